//! `forestlie`: enumeration, coefficient lookup and cross-verification of the
//! combinatorics behind products of Lie derivatives.
//!
//! Exit status: 0 when every check passes, 1 on a verification failure (the
//! first witness is printed), 2 on a usage error.

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use forestlie_core::arith::json_integer;
use forestlie_core::compositions::{coeff_clambda, pullback_table};
use forestlie_core::dyck::{coeff_cp, coeff_cp_factors, enumerate_dyck};
use forestlie_core::operator::{
    estimate_certificate, expand_lie_forests, expand_lie_partitions, lie_chain_oracle,
    partition_terms,
};
use forestlie_core::polynomial::{poly_equal, sigma_bruteforce, sigma_formula};
use forestlie_core::verify::{self, Caps, Check};
use forestlie_core::{Composition, DyckVector, MultiPolynomial};
use serde::Serialize;
use serde_json::{json, Value};

/// Largest `k` for which full forest enumeration runs without `--force`.
const FOREST_LIMIT: usize = 9;

#[derive(Parser)]
#[command(
    name = "forestlie",
    version,
    about = "Dyck vectors, decreasing forests and Lie derivative expansions, computed exactly"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write `o`, `D` and `x` in place of `∘`, `∇` and `ξ`.
    #[arg(long, global = true)]
    ascii: bool,
    /// Worker threads for parallel enumeration.
    #[arg(long, env = "FORESTLIE_JOBS", global = true)]
    jobs: Option<usize>,
    /// Allow full forest enumeration beyond k = 9.
    #[arg(long, global = true)]
    force: bool,
    /// Include the elapsed time in JSON reports.
    #[arg(long, global = true)]
    timing: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List Dyck(k), optionally with the coefficients C_P.
    Dyck {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        coeffs: bool,
    },
    /// C_P with its deficit table.
    Coeff {
        /// Comma-separated entries, e.g. 0,1,0,1,3,0,1.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        p: Vec<u32>,
    },
    /// The pull-back coefficient C_λ of a composition.
    Clambda {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        lambda: Vec<u32>,
    },
    /// The coefficients of D^k(()) by derivation, closed formula and
    /// partition counting.
    Pullback {
        #[arg(long)]
        k: u32,
    },
    /// The polynomial Σ_k, optionally checked against forest enumeration.
    Sigma {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        check: bool,
    },
    /// Expand L_ξ1 ··· L_ξk over partitions and forests and compare with the
    /// left-multiplication oracle.
    Lie {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        check: bool,
        /// Also list the signed forest terms.
        #[arg(long)]
        list: bool,
    },
    /// The term table (P, H, C_P, derivative orders) of the estimate.
    Estimate {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        h: u32,
    },
    /// Run the property suites.
    Verify {
        /// Run every suite.
        #[arg(long)]
        all: bool,
        /// Run only the named suites.
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 5)]
        max_k: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Dyck,
    Compositions,
    Partitions,
    Forests,
    Sigma,
    Operator,
    Estimate,
}

#[derive(Serialize)]
struct Report {
    command: String,
    status: &'static str,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

/// What a command produced: the rendered payload and whether it verified.
struct Outcome {
    body: String,
    ok: bool,
}

impl Outcome {
    fn pass(body: String) -> Self {
        Outcome { body, ok: true }
    }
}

enum Failure {
    Usage(String),
    Io(String),
}

type Run = Result<Outcome, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("forestlie: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let result = run(&cli, start);
    let elapsed = start.elapsed().as_millis();
    match result {
        Ok(out) => {
            let body = if cli.global.ascii {
                asciify(&out.body)
            } else {
                out.body
            };
            if let Err(e) = emit(&cli.global, &body) {
                eprintln!("forestlie: {e}");
                return ExitCode::from(2);
            }
            if cli.global.timing {
                eprintln!("elapsed_ms: {elapsed}");
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("forestlie: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("forestlie: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(g: &Global, body: &str) -> std::io::Result<()> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &g.output {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn asciify(s: &str) -> String {
    s.replace('∘', "o")
        .replace('∇', "D")
        .replace('ξ', "x")
        .replace('Σ', "Sigma")
        .replace('λ', "lambda")
}

fn run(cli: &Cli, start: Instant) -> Run {
    let g = &cli.global;
    match &cli.command {
        Command::Dyck { k, coeffs } => cmd_dyck(g, *k, *coeffs),
        Command::Coeff { p } => cmd_coeff(g, p),
        Command::Clambda { lambda } => cmd_clambda(g, lambda),
        Command::Pullback { k } => cmd_pullback(g, *k),
        Command::Sigma { k, check } => cmd_sigma(g, *k, *check, start),
        Command::Lie { k, check, list } => cmd_lie(g, *k, *check, *list, start),
        Command::Estimate { k, h } => cmd_estimate(g, *k, *h),
        Command::Verify { all, suite, max_k } => cmd_verify(g, *all, suite, *max_k, start),
    }
}

fn guard_forests(g: &Global, k: usize) -> Result<(), Failure> {
    if k > FOREST_LIMIT && !g.force {
        return Err(usage(format!(
            "k = {k} needs ({})! forests; pass --force to enumerate beyond k = {FOREST_LIMIT}",
            k + 1
        )));
    }
    Ok(())
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn csv_table(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| Failure::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 fields"))
}

fn spaced(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_dyck(g: &Global, k: usize, coeffs: bool) -> Run {
    let all = enumerate_dyck(k);
    let body = match g.format {
        Format::Text => all
            .iter()
            .map(|p| {
                if coeffs {
                    format!("{p} {}", coeff_cp(p))
                } else {
                    p.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" "),
        Format::Json => {
            let rows: Vec<Value> = all
                .iter()
                .map(|p| {
                    if coeffs {
                        json!({"p": p, "c": json_integer(&coeff_cp(p))})
                    } else {
                        json!({"p": p})
                    }
                })
                .collect();
            to_json(&rows)
        }
        Format::Csv => {
            let header: &[&str] = if coeffs { &["p", "c"] } else { &["p"] };
            csv_table(
                header,
                all.iter().map(|p| {
                    let mut r = vec![spaced(p.entries())];
                    if coeffs {
                        r.push(coeff_cp(p).to_string());
                    }
                    r
                }),
            )?
        }
    };
    Ok(Outcome::pass(body))
}

fn cmd_coeff(g: &Global, p: &[u32]) -> Run {
    let p = DyckVector::new(p.to_vec()).map_err(usage)?;
    let deficits = p.deficits();
    let factors = coeff_cp_factors(&p);
    let c = coeff_cp(&p);
    let body = match g.format {
        Format::Text => {
            let k = p.len();
            let mut rows: Vec<Vec<String>> = vec![
                std::iter::once("j".to_string())
                    .chain((0..=k).map(|j| j.to_string()))
                    .collect(),
                std::iter::once("p_j".to_string())
                    .chain(std::iter::once(String::new()))
                    .chain(p.entries().iter().map(u32::to_string))
                    .collect(),
                std::iter::once("D_{P,j}".to_string())
                    .chain(deficits.iter().map(u32::to_string))
                    .collect(),
                std::iter::once("factor".to_string())
                    .chain(std::iter::once(String::new()))
                    .chain(factors.iter().map(|f| f.to_string()))
                    .collect(),
            ];
            let widths: Vec<usize> = (0..=k + 1)
                .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for r in rows.iter_mut() {
                let cells: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(i, (cell, &w))| {
                        if i == 0 {
                            format!("{cell:<w$}")
                        } else {
                            format!("{cell:>w$}")
                        }
                    })
                    .collect();
                out.push_str(cells.join(" ").trim_end());
                out.push('\n');
            }
            out.push_str(&format!("C_P = {c}"));
            out
        }
        Format::Json => to_json(&json!({
            "p": p,
            "deficits": deficits,
            "factors": factors.iter().map(json_integer).collect::<Vec<_>>(),
            "coeff": json_integer(&c),
        })),
        Format::Csv => csv_table(
            &["j", "p", "d", "factor"],
            (0..=p.len()).map(|j| {
                vec![
                    j.to_string(),
                    if j == 0 {
                        String::new()
                    } else {
                        p.entries()[j - 1].to_string()
                    },
                    deficits[j].to_string(),
                    if j == 0 {
                        String::new()
                    } else {
                        factors[j - 1].to_string()
                    },
                ]
            }),
        )?,
    };
    Ok(Outcome::pass(body))
}

fn cmd_clambda(g: &Global, lambda: &[u32]) -> Run {
    let lambda = Composition::new(lambda.to_vec()).map_err(usage)?;
    let c = coeff_clambda(&lambda);
    let body = match g.format {
        Format::Text => format!("C_{lambda} = {c}"),
        Format::Json => to_json(&json!({"lambda": lambda, "c": json_integer(&c)})),
        Format::Csv => csv_table(
            &["lambda", "c"],
            [vec![spaced(lambda.parts()), c.to_string()]],
        )?,
    };
    Ok(Outcome::pass(body))
}

fn cmd_pullback(g: &Global, k: u32) -> Run {
    let t = pullback_table(k);
    let ok = t.rows.iter().all(|r| r.agrees()) && t.total == t.bell;
    let body = match g.format {
        Format::Text => {
            let mut out = String::from("λ derivation formula partitions\n");
            for r in &t.rows {
                out.push_str(&format!(
                    "{} {} {} {}{}\n",
                    r.composition,
                    r.by_derivation,
                    r.by_formula,
                    r.by_partitions,
                    if r.agrees() { "" } else { "  MISMATCH" }
                ));
            }
            out.push_str(&format!("total {} Bell({k}) {}\n", t.total, t.bell));
            out.push_str(if ok { "status: pass" } else { "status: fail" });
            out
        }
        Format::Json => to_json(&json!({
            "table": t,
            "status": if ok { "pass" } else { "fail" },
        })),
        Format::Csv => csv_table(
            &["lambda", "derivation", "formula", "partitions"],
            t.rows.iter().map(|r| {
                vec![
                    spaced(r.composition.parts()),
                    r.by_derivation.to_string(),
                    r.by_formula.to_string(),
                    r.by_partitions.to_string(),
                ]
            }),
        )?,
    };
    Ok(Outcome { body, ok })
}

fn poly_csv(p: &MultiPolynomial) -> Result<String, Failure> {
    csv_table(
        &["b", "p", "c"],
        p.terms()
            .map(|t| vec![t.bdeg.to_string(), spaced(&t.expo), t.coeff.to_string()]),
    )
}

fn cmd_sigma(g: &Global, k: usize, check: bool, start: Instant) -> Run {
    let formula = sigma_formula(k);
    let mut checks = Vec::new();
    if check {
        guard_forests(g, k)?;
        let cmp = poly_equal(&formula, &sigma_bruteforce(k));
        checks.push(Check::outcome(
            format!("sigma/theorem/k={k}"),
            "equal",
            if cmp.is_equal() {
                Ok("equal".to_string())
            } else {
                Err(serde_json::to_string(&cmp).expect("serializable"))
            },
        ));
    }
    let ok = checks.iter().all(|c| c.ok);
    let body = match g.format {
        Format::Text => {
            let mut out = formula.to_string();
            for c in &checks {
                out.push('\n');
                out.push_str(&check_line(c));
            }
            out
        }
        Format::Json => {
            let mut v = json!({"k": k, "terms": formula});
            if check {
                v["report"] =
                    serde_json::to_value(report("sigma", checks, g, start)).expect("serializable");
            }
            to_json(&v)
        }
        Format::Csv => poly_csv(&formula)?,
    };
    Ok(Outcome { body, ok })
}

fn cmd_lie(g: &Global, k: usize, check: bool, list: bool, start: Instant) -> Run {
    if k == 0 {
        return Err(usage("lie needs k >= 1"));
    }
    guard_forests(g, k)?;
    let mut checks = Vec::new();
    let forests = expand_lie_forests(k);
    if check {
        checks.push(Check::outcome(
            format!("lie/partitions/k={k}"),
            "closed form = recurrence",
            expand_lie_partitions(k).map(|s| format!("{} terms", s.len())),
        ));
        checks.push(Check::outcome(
            format!("lie/forests/k={k}"),
            "closed form = block product",
            forests
                .as_ref()
                .map(|s| format!("{} terms", s.len()))
                .map_err(Clone::clone),
        ));
        let oracle = lie_chain_oracle(k);
        checks.push(Check::outcome(
            format!("lie/chain_oracle/k={k}"),
            "equal",
            match &forests {
                Ok(f) => match f.first_difference(&oracle) {
                    None => Ok("equal".to_string()),
                    Some((key, a, b)) => Err(format!("{key}: {a} against {b}")),
                },
                Err(e) => Err(e.to_string()),
            },
        ));
    }
    let ok = checks.iter().all(|c| c.ok);
    let body = match g.format {
        Format::Text => {
            let mut lines = Vec::new();
            if list || !check {
                match &forests {
                    Ok(f) => lines.extend(
                        f.iter()
                            .map(|(key, m)| format!("{} {key}", if m > 0 { "+" } else { "-" })),
                    ),
                    Err(e) => lines.push(format!("error: {e}")),
                }
                if !check && k <= 3 {
                    lines.push(String::new());
                    lines.extend(partition_terms(k).iter().map(|t| t.operator_word(g.ascii)));
                }
            }
            lines.extend(checks.iter().map(check_line));
            if check {
                lines.push(format!("status: {}", if ok { "pass" } else { "fail" }));
            }
            lines.join("\n")
        }
        Format::Json => {
            let mut v = json!({"k": k});
            if list || !check {
                v["terms"] = match &forests {
                    Ok(f) => serde_json::to_value(f).expect("serializable"),
                    Err(e) => Value::String(e.to_string()),
                };
            }
            if check {
                v["report"] =
                    serde_json::to_value(report("lie", checks, g, start)).expect("serializable");
            }
            to_json(&v)
        }
        Format::Csv => match &forests {
            Ok(f) => csv_table(
                &["key", "sign"],
                f.iter()
                    .map(|(key, m)| vec![key.to_string(), m.to_string()]),
            )?,
            Err(e) => return Err(Failure::Io(e.to_string())),
        },
    };
    Ok(Outcome { body, ok })
}

fn cmd_estimate(g: &Global, k: usize, h: u32) -> Run {
    if k == 0 {
        return Err(usage("estimate needs k >= 1"));
    }
    let rows = estimate_certificate(k, h);
    let body = match g.format {
        Format::Text => {
            let mut out = String::from("P H C_P a_order xi_orders\n");
            let lines: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{} ({}) {} {} ({})",
                        r.p,
                        spaced(&r.h).replace(' ', ","),
                        r.coeff,
                        r.a_order,
                        spaced(&r.xi_orders).replace(' ', ",")
                    )
                })
                .collect();
            out.push_str(&lines.join("\n"));
            out
        }
        Format::Json => to_json(&rows),
        Format::Csv => csv_table(
            &["p", "h", "coeff", "a_order", "xi_orders"],
            rows.iter().map(|r| {
                vec![
                    spaced(r.p.entries()),
                    spaced(&r.h),
                    r.coeff.to_string(),
                    r.a_order.to_string(),
                    spaced(&r.xi_orders),
                ]
            }),
        )?,
    };
    Ok(Outcome::pass(body))
}

fn check_line(c: &Check) -> String {
    if c.ok {
        format!("PASS {} ({})", c.name, c.actual)
    } else {
        format!("FAIL {}: expected {}, got {}", c.name, c.expected, c.actual)
    }
}

fn report(command: &str, checks: Vec<Check>, g: &Global, start: Instant) -> Report {
    let ok = checks.iter().all(|c| c.ok);
    Report {
        command: command.to_string(),
        status: if ok { "pass" } else { "fail" },
        checks,
        elapsed_ms: g.timing.then(|| start.elapsed().as_millis()),
    }
}

fn cmd_verify(g: &Global, all: bool, suites: &[Suite], max_k: usize, start: Instant) -> Run {
    if !all && suites.is_empty() {
        return Err(usage("verify needs --all or at least one --suite"));
    }
    let caps = Caps::up_to(max_k);
    if caps.sigma.max(caps.lie) > FOREST_LIMIT {
        guard_forests(g, caps.sigma.max(caps.lie))?;
    }
    let checks = if all {
        verify::run_all(max_k)
    } else {
        let mut checks = Vec::new();
        for s in suites {
            checks.extend(match s {
                Suite::Dyck => verify::dyck_suite(caps.dyck),
                Suite::Compositions => verify::composition_suite(caps.partitions),
                Suite::Partitions => verify::partition_suite(caps.partitions),
                Suite::Forests => verify::forest_suite(caps.lie.max(caps.sigma.min(6))),
                Suite::Sigma => verify::sigma_suite(caps.sigma),
                Suite::Operator => verify::operator_suite(caps.lie),
                Suite::Estimate => verify::estimate_suite(caps.sigma.min(6)),
            });
        }
        checks
    };
    let r = report("verify", checks, g, start);
    let ok = r.status == "pass";
    let body = match g.format {
        Format::Text => {
            let mut lines: Vec<String> = r.checks.iter().map(check_line).collect();
            let failed = r.checks.iter().filter(|c| !c.ok).count();
            lines.push(format!(
                "status: {} ({} checks, {failed} failed)",
                r.status,
                r.checks.len()
            ));
            lines.join("\n")
        }
        Format::Json => to_json(&r),
        Format::Csv => csv_table(
            &["name", "expected", "actual", "ok"],
            r.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.expected.clone(),
                    c.actual.clone(),
                    c.ok.to_string(),
                ]
            }),
        )?,
    };
    Ok(Outcome { body, ok })
}
