//! Property suites: each check compares an expected value with an
//! independently computed one and records both as text.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::arith::{binomial, catalan, factorial};
use crate::compositions::{enumerate_compositions, pullback_table, verify_key_identity};
use crate::dyck::{
    coeff_cp, coeff_cp_factors, coeff_cp_restricted, count_dyck, enumerate_dyck, DyckPath,
    DyckVector,
};
use crate::forests::{
    cprime, enumerate_forests_par, expand_covariant, fiber, fiber_constructive, graft,
    labels_with_root, monomial, prune, unprune, Forest, Label,
};
use crate::operator::{
    connected_part, estimate_certificate, expand_lie_forests, expand_lie_partitions,
    group_by_node_sets, leibniz_groups, lie_chain_oracle, verify_map_recombination,
    weak_compositions,
};
use crate::partitions::{bell, enumerate_partitions, partition_to_path, path_to_partition};
use crate::polynomial::{poly_equal, sigma_bruteforce, sigma_formula, weighted_forest_count};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

impl Check {
    pub fn compare<T: PartialEq + Display>(
        name: impl Into<String>,
        expected: T,
        actual: T,
    ) -> Self {
        Check {
            name: name.into(),
            ok: expected == actual,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    /// A check whose outcome is a `Result`: `Ok` carries the observed value.
    pub fn outcome<T: Display, E: Display>(
        name: impl Into<String>,
        expected: impl Into<String>,
        r: std::result::Result<T, E>,
    ) -> Self {
        let expected = expected.into();
        match r {
            Ok(v) => Check {
                name: name.into(),
                actual: v.to_string(),
                expected,
                ok: true,
            },
            Err(e) => Check {
                name: name.into(),
                actual: e.to_string(),
                expected,
                ok: false,
            },
        }
    }
}

/// Largest `k` for each suite. Enumeration cost is factorial in the forest
/// and operator suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub dyck: usize,
    pub partitions: usize,
    pub sigma: usize,
    pub lie: usize,
}

impl Caps {
    pub const MAX: Caps = Caps {
        dyck: 12,
        partitions: 8,
        sigma: 7,
        lie: 5,
    };

    pub fn up_to(max_k: usize) -> Caps {
        Caps {
            dyck: max_k.min(Self::MAX.dyck),
            partitions: max_k.min(Self::MAX.partitions),
            sigma: max_k.min(Self::MAX.sigma),
            lie: max_k.min(Self::MAX.lie),
        }
    }
}

fn all_ok(failures: &[String]) -> Result<&'static str, String> {
    match failures.first() {
        None => Ok("all"),
        Some(f) => Err(f.clone()),
    }
}

pub fn dyck_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    let p = DyckVector::new(vec![0, 1, 0, 1, 3, 0, 1]).expect("Dyck vector");
    checks.push(Check::compare(
        "dyck/worked_example",
        BigUint::from(72u32),
        coeff_cp(&p),
    ));
    for k in 0..=max_k {
        checks.push(Check::compare(
            format!("dyck/count/k={k}"),
            catalan(k as u64 + 1),
            BigUint::from(count_dyck(k)),
        ));
        let mut failures = Vec::new();
        for p in enumerate_dyck(k) {
            let product: BigUint = coeff_cp_factors(&p).iter().product();
            if BigInt::from(product.clone()) != coeff_cp_restricted(&p).to_integer()
                || !coeff_cp_restricted(&p).is_integer()
            {
                failures.push(format!("{p}: product forms differ"));
            }
            let path: DyckPath = p.to_path();
            if path.to_vector() != p || path.to_string().parse::<DyckPath>().ok() != Some(path) {
                failures.push(format!("{p}: path round trip"));
            }
        }
        checks.push(Check::outcome(
            format!("dyck/forms_and_paths/k={k}"),
            "all",
            all_ok(&failures),
        ));
    }
    checks
}

pub fn composition_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 0..=max_k as u32 {
        let t = pullback_table(k);
        let bad: Vec<String> = t
            .rows
            .iter()
            .filter(|r| !r.agrees())
            .map(|r| r.composition.to_string())
            .collect();
        checks.push(Check::outcome(
            format!("pullback/three_ways/k={k}"),
            "all",
            all_ok(&bad),
        ));
        checks.push(Check::compare(
            format!("pullback/bell/k={k}"),
            t.bell.clone(),
            t.total.clone(),
        ));
        let mut failures = Vec::new();
        for lambda in enumerate_compositions(k) {
            match verify_key_identity(&lambda) {
                Ok(w) if w.holds => {}
                Ok(w) => failures.push(format!("{lambda}: {} != {}", w.lhs, w.rhs)),
                Err(e) => failures.push(format!("{lambda}: {e}")),
            }
        }
        checks.push(Check::outcome(
            format!("key_identity/k={k}"),
            "all",
            all_ok(&failures),
        ));
    }
    checks
}

pub fn partition_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 0..=max_k {
        let parts = enumerate_partitions(k);
        checks.push(Check::compare(
            format!("partitions/count/k={k}"),
            bell(k),
            BigUint::from(parts.len()),
        ));
        let failures: Vec<String> = parts
            .iter()
            .filter(|p| path_to_partition(&partition_to_path(p)).ok().as_ref() != Some(*p))
            .map(|p| p.to_string())
            .collect();
        checks.push(Check::outcome(
            format!("partitions/bijection/k={k}"),
            "all",
            all_ok(&failures),
        ));
    }
    checks
}

/// Preimages of each pruned forest, split by whether `k` is a root, against
/// `binom(D_{P,k-1}, p_k - 1)` and `binom(D_{P,k-1}, p_k)`.
fn root_split_failures(k: usize, forests: &[Forest]) -> Vec<String> {
    let top = Label::Plain(k as u32);
    let mut groups: BTreeMap<(Forest, u32, bool), u64> = BTreeMap::new();
    for f in forests {
        let m = monomial(f);
        let pk = m.exponents[&top];
        *groups
            .entry((prune(f).expect("k >= 1"), pk, f.is_root(top)))
            .or_insert(0) += 1;
    }
    let mut failures = Vec::new();
    for ((h, pk, is_root), count) in groups {
        let d = h.nchild(Label::Root) as i64;
        let want = if is_root {
            binomial(d, pk as i64 - 1)
        } else {
            binomial(d, pk as i64)
        };
        let (rooted, attached) = unprune(&h, k as u32, pk);
        let built = if is_root {
            rooted.len()
        } else {
            attached.len()
        };
        if BigUint::from(count) != want || built as u64 != count {
            failures.push(format!(
                "{h} with p_k = {pk}: {count} preimages, expected {want}"
            ));
        }
    }
    failures
}

pub fn forest_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 0..=max_k {
        let forests = enumerate_forests_par(&labels_with_root(k as u32));
        checks.push(Check::compare(
            format!("forests/count/k={k}"),
            factorial(k as u64 + 1),
            BigUint::from(forests.len()),
        ));
        let mut failures = Vec::new();
        for f in &forests {
            let m = monomial(f);
            if m.dyck_vector().is_none() {
                failures.push(format!("{f}: X_F is not a Dyck monomial"));
            }
            if m.root_children as u32 + m.degree() != k as u32 {
                failures.push(format!("{f}: nchild(∘) != k - deg X_F"));
            }
            if k >= 1 {
                let mut reduced = m.exponent_vec();
                reduced.pop();
                if monomial(&prune(f).expect("k >= 1")).exponent_vec() != reduced {
                    failures.push(format!("{f}: X_F' != X_F at X_k = 1"));
                }
            }
        }
        checks.push(Check::outcome(
            format!("forests/monomial_lemmas/k={k}"),
            "all",
            all_ok(&failures),
        ));
        if k >= 1 {
            checks.push(Check::outcome(
                format!("forests/root_split/k={k}"),
                "all",
                all_ok(&root_split_failures(k, &forests)),
            ));
        }
        let mut failures = Vec::new();
        let mut covered = 0usize;
        for p in enumerate_dyck(k) {
            let fib = fiber(&p);
            covered += fib.len();
            let mut sorted = fib.clone();
            sorted.sort();
            if fiber_constructive(&p) != sorted {
                failures.push(format!("{p}: constructive fiber differs"));
            }
            if cprime(&p) != coeff_cp(&p) {
                failures.push(format!("{p}: C'_P != C_P"));
            }
        }
        if covered != forests.len() {
            failures.push(format!(
                "fibers cover {covered} of {} forests",
                forests.len()
            ));
        }
        checks.push(Check::outcome(
            format!("forests/fibers/k={k}"),
            "all",
            all_ok(&failures),
        ));
    }
    for n in 0..=(max_k + 1).min(6) {
        let s: Vec<u32> = (1..=n as u32).collect();
        checks.push(Check::outcome(
            format!("covariant/trees/|S|={n}"),
            format!("{} trees", factorial(n as u64)),
            expand_covariant(&s).map(|m| format!("{} trees", m.len())),
        ));
        let mut failures = Vec::new();
        for t in crate::forests::enumerate_trees(&s) {
            let total: usize = t.labels().iter().map(|&l| t.nchild(l)).sum();
            if total != n {
                failures.push(format!("{t}: {total} children"));
            }
            if let Some(j) = (n > 0).then_some(Label::Primed(1)) {
                let g = graft(&t, j).expect("primed labels are smallest");
                let mut d = g.clone();
                d.sort();
                d.dedup();
                if d.len() != g.len() {
                    failures.push(format!("{t}: repeated graft"));
                }
            }
        }
        checks.push(Check::outcome(
            format!("covariant/nchild_total/|S|={n}"),
            "all",
            all_ok(&failures),
        ));
    }
    checks
}

pub fn sigma_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 0..=max_k {
        let formula = sigma_formula(k);
        let brute = sigma_bruteforce(k);
        let cmp = poly_equal(&formula, &brute);
        checks.push(Check::outcome(
            format!("sigma/theorem/k={k}"),
            "equal",
            if cmp.is_equal() {
                Ok("equal".to_string())
            } else {
                Err(serde_json::to_string(&cmp).expect("serializable"))
            },
        ));
        checks.push(Check::compare(
            format!("sigma/all_ones/k={k}"),
            BigInt::from(weighted_forest_count(k)),
            formula.specialize_all_ones(),
        ));
        let bad: Vec<String> = brute
            .terms()
            .filter(|t| {
                DyckVector::new(t.expo.clone()).is_err()
                    || t.bdeg + t.expo.iter().sum::<u32>() != k as u32
            })
            .map(|t| format!("{:?}", t.expo))
            .collect();
        checks.push(Check::outcome(
            format!("sigma/dyck_monomials/k={k}"),
            "all",
            all_ok(&bad),
        ));
    }
    checks
}

pub fn operator_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 1..=max_k {
        checks.push(Check::outcome(
            format!("lie/partitions/k={k}"),
            format!("{} terms", bell(k + 1)),
            expand_lie_partitions(k).map(|s| format!("{} terms", s.len())),
        ));
        let forests = expand_lie_forests(k);
        checks.push(Check::outcome(
            format!("lie/forests/k={k}"),
            format!("{} terms", factorial(k as u64 + 1)),
            forests
                .as_ref()
                .map(|s| format!("{} terms", s.len()))
                .map_err(|e| e.clone()),
        ));
        let oracle = lie_chain_oracle(k);
        checks.push(Check::outcome(
            format!("lie/chain_oracle/k={k}"),
            "equal",
            match forests {
                Ok(f) => match f.first_difference(&oracle) {
                    None => Ok("equal".to_string()),
                    Some((key, a, b)) => Err(format!("{key}: {a} against {b}")),
                },
                Err(e) => Err(e.to_string()),
            },
        ));
        checks.push(Check::outcome(
            format!("lie/connected_part/k={k}"),
            format!("{} trees", factorial(k as u64)),
            connected_part(k).map(|s| format!("{} trees", s.len())),
        ));
        if k <= 4 {
            checks.push(Check::outcome(
                format!("lie/node_set_groups/k={k}"),
                format!("{} groups", bell(k + 1)),
                group_by_node_sets(k).map(|g| format!("{} groups", g.len())),
            ));
        }
    }
    for l in 1..=max_k.max(1) as u32 {
        for h in 0..=3usize {
            checks.push(Check::outcome(
                format!("leibniz/groups/h={h},l={l}"),
                format!("{} maps", (l as u64).pow(h as u32)),
                leibniz_groups(h, l).map(|g| {
                    let total: BigUint = g.iter().map(|(_, m)| m).sum();
                    format!("{total} maps")
                }),
            ));
        }
    }
    for k in 0..=max_k.min(4) {
        for h in 0..=3usize {
            let expected: u64 = (1..=k as u64 + 1).product::<u64>() * (k as u64 + 1).pow(h as u32);
            checks.push(Check::outcome(
                format!("recombination/k={k},h={h}"),
                format!("{expected} pairs"),
                verify_map_recombination(k, h).map(|n| format!("{n} pairs")),
            ));
        }
    }
    checks
}

pub fn estimate_suite(max_k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 1..=max_k {
        let rows = estimate_certificate(k, 0);
        let bad: Vec<String> = rows
            .iter()
            .zip(enumerate_dyck(k))
            .filter(|(r, p)| {
                r.p != *p
                    || r.coeff != coeff_cp(p)
                    || r.a_order != p.final_deficit()
                    || r.xi_orders != p.entries()
            })
            .map(|(r, _)| r.p.to_string())
            .collect();
        checks.push(Check::outcome(
            format!("estimate/h=0/k={k}"),
            "all",
            if rows.len() as u64 == count_dyck(k) {
                all_ok(&bad)
            } else {
                Err(format!("{} rows", rows.len()))
            },
        ));
        for h in 1..=3u32 {
            checks.push(Check::compare(
                format!("estimate/rows/k={k},h={h}"),
                count_dyck(k) * weak_compositions(h, k + 1).len() as u64,
                estimate_certificate(k, h).len() as u64,
            ));
        }
    }
    checks
}

/// Every suite, each bounded by `min(max_k, cap)`.
pub fn run_all(max_k: usize) -> Vec<Check> {
    let caps = Caps::up_to(max_k);
    let mut checks = dyck_suite(caps.dyck);
    checks.extend(composition_suite(caps.partitions));
    checks.extend(partition_suite(caps.partitions));
    checks.extend(forest_suite(caps.lie.max(caps.sigma.min(6))));
    checks.extend(sigma_suite(caps.sigma));
    checks.extend(operator_suite(caps.lie));
    checks.extend(estimate_suite(caps.sigma.min(6)));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let checks = run_all(3);
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(checks.len() > 50);
    }

    #[test]
    fn caps_clamp() {
        assert_eq!(Caps::up_to(100), Caps::MAX);
        assert_eq!(Caps::up_to(2).sigma, 2);
    }

    #[test]
    fn failing_outcome_keeps_witness() {
        let c = Check::outcome("x", "all", Err::<&str, _>("witness"));
        assert!(!c.ok);
        assert_eq!(c.actual, "witness");
    }
}
