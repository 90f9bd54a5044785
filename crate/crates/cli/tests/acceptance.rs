//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so the lines always show.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use forestlie_core::arith::{binomial, catalan, factorial};
use forestlie_core::compositions::{enumerate_compositions, pullback_table, verify_key_identity};
use forestlie_core::dyck::{coeff_cp, count_dyck, enumerate_dyck};
use forestlie_core::forests::{
    cprime, enumerate_forests_par, expand_covariant, fiber, graft, labels_with_root, monomial,
    prune, Label,
};
use forestlie_core::operator::{
    estimate_certificate, expand_lie_forests, expand_lie_partitions, lie_chain_oracle,
};
use forestlie_core::partitions::{
    bell, enumerate_partitions, partition_to_path, path_to_partition,
};
use forestlie_core::polynomial::{poly_equal, sigma_bruteforce, sigma_formula};
use forestlie_core::{Composition, DyckVector, Forest, MultiPolynomial, SetPartition, Term};
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dv(p: &[u32]) -> DyckVector {
    DyckVector::new(p.to_vec()).expect("Dyck vector")
}

fn digits(s: &str) -> Vec<u32> {
    s.chars().map(|c| c.to_digit(10).expect("digit")).collect()
}

fn c1_worked_example() -> Outcome {
    let p = dv(&[0, 1, 0, 1, 3, 0, 1]);
    ensure(coeff_cp(&p) == BigUint::from(72u32), || {
        format!("C_P = {}", coeff_cp(&p))
    })?;
    ensure(p.deficits() == [0, 1, 1, 2, 2, 0, 1, 1], || {
        format!("deficits {:?}", p.deficits())
    })?;
    Ok("C_P = 72, D row 0 1 1 2 2 0 1 1".into())
}

fn c2_dyck_tables() -> Outcome {
    let printed: [&[(&str, u32)]; 3] = [
        &[("0", 1), ("1", 2)],
        &[("00", 1), ("01", 3), ("02", 2), ("10", 2), ("11", 4)],
        &[
            ("000", 1),
            ("001", 4),
            ("002", 5),
            ("003", 2),
            ("010", 3),
            ("011", 9),
            ("012", 6),
            ("020", 2),
            ("021", 4),
            ("100", 2),
            ("101", 6),
            ("102", 4),
            ("110", 4),
            ("111", 8),
        ],
    ];
    let mut entries = 0;
    for (i, table) in printed.iter().enumerate() {
        let k = i + 1;
        let got: Vec<(Vec<u32>, BigUint)> = enumerate_dyck(k)
            .iter()
            .map(|p| (p.entries().to_vec(), coeff_cp(p)))
            .collect();
        let want: Vec<(Vec<u32>, BigUint)> = table
            .iter()
            .map(|(p, c)| (digits(p), BigUint::from(*c)))
            .collect();
        ensure(got == want, || format!("k = {k}: {got:?}"))?;
        entries += got.len();
    }
    Ok(format!("{entries} entries for k = 1, 2, 3"))
}

fn c3_catalan() -> Outcome {
    for k in 0..=14usize {
        let n = count_dyck(k);
        ensure(BigUint::from(n) == catalan(k as u64 + 1), || {
            format!("k = {k}: {n}")
        })?;
    }
    Ok(format!("|Dyck(14)| = {}", count_dyck(14)))
}

fn c4_pullback() -> Outcome {
    let t = pullback_table(4);
    let figure_order = ["1111", "211", "121", "112", "31", "22", "13", "4"];
    let row: Vec<BigUint> = figure_order
        .iter()
        .map(|s| {
            let lambda = Composition::new(digits(s)).expect("composition");
            t.rows
                .iter()
                .find(|r| r.composition == lambda)
                .map(|r| r.by_derivation.clone())
                .unwrap_or_default()
        })
        .collect();
    let want: Vec<BigUint> = [1u32, 1, 2, 3, 1, 3, 3, 1]
        .iter()
        .map(|&x| x.into())
        .collect();
    ensure(row == want, || format!("k = 4 row {row:?}"))?;
    ensure(t.total == BigUint::from(15u32), || {
        format!("k = 4 total {}", t.total)
    })?;
    let bells = [1u32, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
    for (k, &b) in bells.iter().enumerate() {
        let t = pullback_table(k as u32);
        if let Some(r) = t.rows.iter().find(|r| !r.agrees()) {
            return Err(format!("k = {k}: {} disagrees", r.composition));
        }
        ensure(t.total == BigUint::from(b), || {
            format!("k = {k}: total {}", t.total)
        })?;
    }
    Ok("k = 4 row 1,1,2,3,1,3,3,1 (sum 15); three ways agree and Bell totals for k <= 9".into())
}

fn c5_key_identity() -> Outcome {
    let mut n = 0;
    for k in 0..=10 {
        for lambda in enumerate_compositions(k) {
            let w = verify_key_identity(&lambda).map_err(|e| format!("{lambda}: {e}"))?;
            ensure(w.holds, || format!("{lambda}: {} != {}", w.lhs, w.rhs))?;
            n += 1;
        }
    }
    Ok(format!("{n} compositions, k <= 10"))
}

fn c6_partition_bijection() -> Outcome {
    for k in 0..=8 {
        for p in enumerate_partitions(k) {
            let back = path_to_partition(&partition_to_path(&p)).map_err(|e| e.to_string())?;
            ensure(back == p, || format!("{p} -> {back}"))?;
        }
    }
    let p: SetPartition = "1|35|6|247".parse().map_err(|e| format!("{e:?}"))?;
    let mut shapes: Vec<Composition> = partition_to_path(&p);
    shapes.reverse();
    let want: Vec<Composition> = ["1213", "213", "212", "112", "111", "11", "1", ""]
        .iter()
        .map(|s| Composition::new(digits(s)).expect("composition"))
        .collect();
    ensure(shapes == want, || format!("chain {shapes:?}"))?;
    Ok("mutually inverse for k <= 8; 1|35|6|247 chain reproduced".into())
}

fn c7_forest_lemmas() -> Outcome {
    for k in 0..=7usize {
        let forests = enumerate_forests_par(&labels_with_root(k as u32));
        ensure(
            BigUint::from(forests.len()) == factorial(k as u64 + 1),
            || format!("k = {k}: {} forests", forests.len()),
        )?;
        if k > 6 {
            continue;
        }
        for f in &forests {
            let m = monomial(f);
            ensure(m.root_children as u32 == k as u32 - m.degree(), || {
                format!("degree lemma fails on {f}")
            })?;
            if k >= 1 {
                let mut reduced = m.exponent_vec();
                reduced.pop();
                let pruned = monomial(&prune(f).map_err(|e| e.to_string())?).exponent_vec();
                ensure(pruned == reduced, || format!("pruning lemma fails on {f}"))?;
            }
        }
    }
    Ok("(k+1)! forests for k <= 7; both monomial lemmas for k <= 6".into())
}

fn c8_fiber() -> Outcome {
    let p = dv(&[0, 0, 2, 1, 1]);
    let fib = fiber(&p);
    let mut hist = [0usize; 4];
    for f in &fib {
        hist[f.tree_count() - 1] += 1;
    }
    ensure(hist == [1, 4, 5, 2], || format!("histogram {hist:?}"))?;
    let c = cprime(&p);
    ensure(c == BigUint::from(45u32) && c == coeff_cp(&p), || {
        format!("C'_P = {c}")
    })?;
    ensure(fib.len() == hist.iter().sum::<usize>(), || {
        "histogram total".into()
    })?;
    Ok(format!(
        "{} forests, histogram (1,4,5,2), C'_P = 45 = C_P; note: the stated count 13 \
         disagrees with its own histogram, whose total is 12",
        fib.len()
    ))
}

fn term(b: u32, p: &str, c: i64) -> Term {
    Term::new(b, digits(p), c)
}

fn c9_theorem() -> Outcome {
    for k in 0..=7 {
        let cmp = poly_equal(&sigma_formula(k), &sigma_bruteforce(k));
        ensure(cmp.is_equal(), || format!("k = {k}: {cmp:?}"))?;
    }
    ensure(sigma_formula(1).to_string() == "B X^(0) + 2 X^(1)", || {
        format!("Σ_1 = {}", sigma_formula(1))
    })?;
    let s2 = MultiPolynomial::from_terms([
        term(2, "00", 1),
        term(1, "10", 2),
        term(1, "01", 3),
        term(0, "11", 4),
        term(0, "02", 2),
    ]);
    ensure(poly_equal(&sigma_formula(2), &s2).is_equal(), || {
        format!("Σ_2 = {}", sigma_formula(2))
    })?;

    let s3 = sigma_formula(3);
    for p in enumerate_dyck(3) {
        ensure(
            s3.coeff(p.final_deficit(), p.entries()) == coeff_cp(&p).into(),
            || format!("Σ_3 coefficient of {p}"),
        )?;
    }
    let printed = MultiPolynomial::from_terms([
        term(3, "000", 1),
        term(2, "100", 2),
        term(2, "020", 3),
        term(1, "110", 4),
        term(1, "010", 2),
        term(2, "001", 4),
        term(1, "101", 6),
        term(1, "011", 9),
        term(0, "111", 8),
        term(0, "021", 4),
        term(1, "002", 5),
        term(0, "102", 4),
        term(0, "012", 6),
        term(0, "003", 2),
    ]);
    let differing: BTreeSet<(u32, Vec<u32>)> = s3
        .terms()
        .chain(printed.terms())
        .map(|t| (t.bdeg, t.expo))
        .filter(|(b, e)| s3.coeff(*b, e) != printed.coeff(*b, e))
        .collect();
    let expected: BTreeSet<(u32, Vec<u32>)> = [
        (2, vec![0, 1, 0]),
        (2, vec![0, 2, 0]),
        (1, vec![0, 1, 0]),
        (1, vec![0, 2, 0]),
    ]
    .into();
    ensure(differing == expected, || {
        format!("unexpected Σ_3 differences {differing:?}")
    })?;
    Ok(
        "Σ_k formula = forest enumeration for k <= 7; Σ_1, Σ_2 verbatim; Σ_3 matches the \
        closed formula and the k = 3 list; printed Σ_3 differs: it has 3 B^2 X^(0,2,0) and \
        2 B X^(0,1,0) where formula and enumeration give 3 B^2 X^(0,1,0) and 2 B X^(0,2,0) \
        (the printed B^2 X^(0,2,0) also has total degree 4, not 3)"
            .into(),
    )
}

fn c10_operators() -> Outcome {
    for k in 1..=6 {
        let s = expand_lie_partitions(k).map_err(|e| e.to_string())?;
        ensure(BigUint::from(s.len()) == bell(k + 1), || {
            format!("k = {k}: {} terms", s.len())
        })?;
    }
    for k in 1..=5 {
        let f = expand_lie_forests(k).map_err(|e| e.to_string())?;
        let o = lie_chain_oracle(k);
        if let Some((key, a, b)) = f.first_difference(&o) {
            return Err(format!("k = {k}: {key} has {a} against {b}"));
        }
        ensure(BigUint::from(f.len()) == factorial(k as u64 + 1), || {
            format!("k = {k}: {} forest terms", f.len())
        })?;
    }
    Ok(
        "partition closed form = recurrence for k <= 6 (877 terms at k = 6); \
        chain oracle = forest expansion for k <= 5 (720 terms at k = 5)"
            .into(),
    )
}

fn c11_covariant() -> Outcome {
    for n in 0..=6u32 {
        let s: Vec<u32> = (1..=n).collect();
        let m = expand_covariant(&s).map_err(|e| e.to_string())?;
        ensure(BigUint::from(m.len()) == factorial(n as u64), || {
            format!("|S| = {n}")
        })?;
        ensure(m.values().all(|&c| c == 1), || {
            format!("|S| = {n}: multiplicity")
        })?;
    }
    let t: Forest = "(∘ (3) (6 (2)))".parse().map_err(|e| format!("{e:?}"))?;
    let got: BTreeSet<String> = graft(&t, Label::Plain(1))
        .map_err(|e| e.to_string())?
        .iter()
        .map(Forest::to_string)
        .collect();
    let want: BTreeSet<String> = [
        "(∘ (1) (3) (6 (2)))",
        "(∘ (3 (1)) (6 (2)))",
        "(∘ (3) (6 (1) (2)))",
        "(∘ (3) (6 (2 (1))))",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    ensure(got == want, || format!("graft display {got:?}"))?;
    Ok("Trees(S) each once for |S| <= 6; four-term graft display reproduced".into())
}

fn c12_certificate() -> Outcome {
    for k in 1..=6 {
        let got: BTreeSet<(Vec<u32>, BigUint, u32, Vec<u32>)> = estimate_certificate(k, 0)
            .into_iter()
            .map(|r| (r.p.entries().to_vec(), r.coeff, r.a_order, r.xi_orders))
            .collect();
        let want: BTreeSet<(Vec<u32>, BigUint, u32, Vec<u32>)> = enumerate_dyck(k)
            .into_iter()
            .map(|p| {
                let c = coeff_cp(&p);
                let d = p.final_deficit();
                (p.entries().to_vec(), c, d, p.entries().to_vec())
            })
            .collect();
        ensure(got == want, || format!("k = {k}: h = 0 table differs"))?;
    }
    for k in 1..=4usize {
        for h in 0..=3u32 {
            let rows = estimate_certificate(k, h).len() as u64;
            // |N^{k+1}(h)| = binom(h + k, k)
            let splits = binomial(h as i64 + k as i64, k as i64);
            let want = BigUint::from(count_dyck(k)) * splits;
            ensure(BigUint::from(rows) == want, || {
                format!("k = {k}, h = {h}: {rows} rows")
            })?;
        }
    }
    Ok("h = 0 table = (P, C_P, D_{P,k}, P) for k <= 6; row counts for k <= 4, h <= 3".into())
}

fn c13_end_to_end() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_forestlie"))
        .args(["verify", "--all", "--max-k", "5"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let tail = String::from_utf8_lossy(&out.stdout)
        .lines()
        .last()
        .unwrap_or_default()
        .to_string();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}: {tail}", out.status.code())
    })?;
    ensure(elapsed < Duration::from_secs(60), || format!("{elapsed:?}"))?;
    Ok(format!("exit 0 in {} ms; {tail}", elapsed.as_millis()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("C_P worked example", c1_worked_example),
        ("Dyck coefficient tables", c2_dyck_tables),
        ("Catalan counts", c3_catalan),
        ("pull-back coefficients", c4_pullback),
        ("key identity", c5_key_identity),
        ("partition bijection", c6_partition_bijection),
        ("forest counts and lemmas", c7_forest_lemmas),
        ("fiber example", c8_fiber),
        ("Σ_k theorem", c9_theorem),
        ("operator expansions", c10_operators),
        ("covariant chain rule", c11_covariant),
        ("estimate certificate", c12_certificate),
        ("end-to-end verify", c13_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{ms} ms]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} [{ms} ms]: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
