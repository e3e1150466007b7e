use std::fmt::Write as _;

use multidep::channels::apply_channel;
use multidep::dependence::{
    dependence, dependence_classical, dependence_pure, k_dependence, k_dependence_classical, k_dependence_pure,
    DependenceReport, KDependenceReport,
};
use multidep::formats::{parse_kraus, LoadedState, StateSpec};
use multidep::golden::{evaluate_table, table_one, table_two_theory, RowResult, EXCLUDED};
use multidep::measure::measurement_gap;
use multidep::secret::{leakage_audit, trace_distance, SecretSharingScheme};
use multidep::verify::{run_suite, Suite, SuiteReport, VerifyConfig};
use multidep::{random_density, Error};
use serde_json::{json, Value};

use crate::{parse_apply, Cli, Command, Failure, Format, TableChoice};

type Outcome = Result<String, (String, Failure)>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Compute {
            state,
            k,
            apply,
            no_validate,
        } => compute(cli.format, state, *k, apply, !no_validate).map_err(|f| (String::new(), f)),
        Command::Table { which } => table(cli.format, *which),
        Command::Verify { suite } => verify(cli, suite),
        Command::SecretShare { shares } => secret_share(cli, shares),
        Command::MeasureOpt { states, restarts } => {
            measure_opt(cli, states, *restarts).map_err(|f| (String::new(), f))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn kind(state: &LoadedState) -> &'static str {
    match state {
        LoadedState::Pure(_) => "pure",
        LoadedState::Mixed(_) => "mixed",
        LoadedState::Classical(_) => "classical",
    }
}

fn compute(format: Format, spec: &str, k: Option<usize>, apply: &[String], validate: bool) -> Result<String, Failure> {
    let mut state = spec.parse::<StateSpec>()?.load(validate)?;
    for arg in apply {
        let (party, path) = parse_apply(arg)?;
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let ch = parse_kraus(&text)?;
        state = LoadedState::Mixed(apply_channel(&state.to_density(), &ch, party)?);
    }
    let n = state.num_parties();
    match k {
        Some(k) if k != n => {
            let report = match &state {
                LoadedState::Pure(psi) => k_dependence_pure(psi, k)?,
                LoadedState::Mixed(rho) => k_dependence(rho, k)?,
                LoadedState::Classical(p) => k_dependence_classical(p, k)?,
            };
            Ok(render_k(format, spec, kind(&state), &report))
        }
        _ => {
            let report = match &state {
                LoadedState::Pure(psi) => dependence_pure(psi)?,
                LoadedState::Mixed(rho) => dependence(rho)?,
                LoadedState::Classical(p) => dependence_classical(p)?,
            };
            Ok(render_report(format, spec, kind(&state), &report))
        }
    }
}

fn render_report(format: Format, spec: &str, kind: &str, r: &DependenceReport) -> String {
    match format {
        Format::Json => {
            let mut s = r.to_json();
            s.push('\n');
            s
        }
        Format::Csv => r.to_csv(),
        Format::Text => {
            let mut out = format!(
                "state {spec} ({kind}, N = {}, d = {})\nD_{} = {:.10}  (minimizing pair {} {})\n",
                r.num_parties, r.local_dim, r.num_parties, r.value, r.min_pair.0, r.min_pair.1
            );
            for p in &r.pair_values {
                let _ = writeln!(out, "  I({}:{}|rest) = {:.10}", p.i, p.j, p.cmi);
            }
            out
        }
    }
}

fn render_k(format: Format, spec: &str, kind: &str, r: &KDependenceReport) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(r).expect("report serializes")),
        Format::Csv => {
            // Pair indices are translated back to the parties of the full register.
            let mut out = String::from("i,j,cmi\n");
            for p in &r.report.pair_values {
                let _ = writeln!(out, "{},{},{}", r.subset[p.i], r.subset[p.j], p.cmi);
            }
            out
        }
        Format::Text => {
            let (a, b) = r.report.min_pair;
            let mut out = format!(
                "state {spec} ({kind}, N = {}, d = {})\nD_{} = {:.10}  (marginal {:?}, minimizing pair {} {})\n",
                r.report.num_parties.max(r.k),
                r.report.local_dim,
                r.k,
                r.value(),
                r.subset,
                r.subset[a],
                r.subset[b]
            );
            for p in &r.report.pair_values {
                let _ = writeln!(out, "  I({}:{}|rest of marginal) = {:.10}", r.subset[p.i], r.subset[p.j], p.cmi);
            }
            out
        }
    }
}

fn table(format: Format, which: TableChoice) -> Outcome {
    let mut sections = Vec::new();
    if which != TableChoice::Two {
        sections.push(("dependence of standard states", table_one()));
    }
    if which != TableChoice::One {
        sections.push(("ideal-state values for measured states", table_two_theory()));
    }
    let mut results: Vec<(&str, Vec<RowResult>)> = Vec::new();
    for (title, rows) in sections {
        let evaluated = evaluate_table(&rows).map_err(|e| (String::new(), e.into()))?;
        results.push((title, evaluated));
    }
    let ok = results.iter().all(|(_, rows)| rows.iter().all(RowResult::passed));
    let out = match format {
        Format::Json => pretty(&json!({
            "tables": results.iter().map(|(t, rows)| json!({"title": t, "rows": rows})).collect::<Vec<_>>(),
            "excluded": EXCLUDED.iter().map(|(n, why)| json!({"state": n, "reason": why})).collect::<Vec<_>>(),
            "passed": ok,
        })),
        Format::Csv => {
            let mut out = String::from("table,N,state,k,quoted,computed,delta,tolerance,status\n");
            for (t, (_, rows)) in results.iter().enumerate() {
                for r in rows {
                    for c in &r.cells {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{:.6},{:.2e},{},{}",
                            t + 1,
                            r.n,
                            r.label,
                            c.k,
                            c.quoted_text,
                            shown(c.computed),
                            c.delta,
                            c.tolerance,
                            status(c.passed, c.flag.is_some())
                        );
                    }
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (title, rows) in &results {
                let _ = writeln!(out, "== {title}");
                let _ = writeln!(out, "{:>2}  {:<10} {:>3} {:>9} {:>10} {:>9}  status", "N", "state", "k", "quoted", "computed", "|delta|");
                for r in rows {
                    for c in &r.cells {
                        let _ = writeln!(
                            out,
                            "{:>2}  {:<10} {:>3} {:>9} {:>10.6} {:>9.1e}  {}",
                            r.n,
                            r.label,
                            c.k,
                            c.quoted_text,
                            shown(c.computed),
                            c.delta,
                            status(c.passed, c.flag.is_some())
                        );
                    }
                }
                let mut reasons: Vec<&str> = rows.iter().flat_map(|r| r.cells.iter().filter_map(|c| c.flag)).collect();
                reasons.dedup();
                for reason in reasons {
                    let _ = writeln!(out, "  flagged: {reason}");
                }
            }
            for (name, why) in EXCLUDED {
                let _ = writeln!(out, "excluded: {name} ({why})");
            }
            let _ = writeln!(out, "{}", if ok { "all cells within tolerance" } else { "SOME CELLS FAILED" });
            out
        }
    };
    if ok {
        Ok(out)
    } else {
        Err((out, Failure::Checks))
    }
}

/// Rounds values within printing precision of zero to +0 so `-0.000000` never shows.
fn shown(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

fn status(passed: bool, flagged: bool) -> &'static str {
    match (passed, flagged) {
        (true, false) => "ok",
        (true, true) => "flagged",
        (false, _) => "FAIL",
    }
}

fn verify(cli: &Cli, suite: &str) -> Outcome {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        match suite.parse() {
            Ok(s) => vec![s],
            Err(e) => return Err((String::new(), Failure::Usage(format!("{e}")))),
        }
    };
    let cfg = VerifyConfig {
        seed: cli.seed,
        trials: cli.trials.unwrap_or(200),
        tolerance: cli.tolerance,
    };
    let reports = suites
        .iter()
        .map(|&s| run_suite(s, &cfg))
        .collect::<multidep::Result<Vec<SuiteReport>>>()
        .map_err(|e| (String::new(), e.into()))?;
    let ok = reports.iter().all(SuiteReport::passed);
    let out = match cli.format {
        Format::Json => pretty(&json!({ "suites": reports, "passed": ok })),
        Format::Csv => {
            let mut out = String::from("suite,check,trials,worst,tolerance,passed\n");
            for r in &reports {
                for c in &r.checks {
                    let _ = writeln!(out, "{},\"{}\",{},{:e},{:e},{}", r.suite.name(), c.name, c.trials, c.worst, c.tolerance, c.passed);
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "== {} (seed {}, {} trials)", r.suite, r.seed, r.trials);
                for c in &r.checks {
                    let _ = writeln!(
                        out,
                        "  {} {}  [worst {:.3e}, tol {:.0e}; {}]",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.worst,
                        c.tolerance,
                        c.detail
                    );
                }
            }
            let _ = writeln!(out, "{}", if ok { "all checks passed" } else { "SOME CHECKS FAILED" });
            out
        }
    };
    if ok {
        Ok(out)
    } else {
        Err((out, Failure::Checks))
    }
}

fn secret_share(cli: &Cli, shares: &[usize]) -> Outcome {
    let trials = cli.trials.unwrap_or(20);
    let tol = cli.tolerance.unwrap_or(1e-10);
    let lib = |e: Error| (String::new(), Failure::Lib(e));
    let mut records = Vec::new();
    for &n in shares {
        let scheme = SecretSharingScheme::new(n).map_err(lib)?;
        let mut round_trip = 0.0f64;
        let mut leakage = (0.0f64, Vec::new());
        let mut min_eig = f64::INFINITY;
        for t in 0..trials {
            let secret = random_density(1, 2, 1 + t % 2, cli.seed.wrapping_add(t as u64)).map_err(lib)?;
            let encoded = scheme.encode(&secret).map_err(lib)?;
            let back = scheme.decode(&encoded).map_err(lib)?;
            round_trip = round_trip.max(trace_distance(back.matrix(), secret.matrix()).map_err(lib)?);
            let audit = leakage_audit(&encoded).map_err(lib)?;
            if audit.worst_distance > leakage.0 || leakage.1.is_empty() {
                leakage = (audit.worst_distance, audit.worst_subset);
            }
            let eigs = encoded.eigenvalues().map_err(lib)?;
            min_eig = min_eig.min(*eigs.last().expect("nonempty spectrum"));
        }
        records.push(json!({
            "shares": n,
            "secrets": trials,
            "round_trip_error": round_trip,
            "leakage": leakage.0,
            "leakage_subset": leakage.1,
            "min_share_eigenvalue": min_eig,
            "outputs_are_states": scheme.produces_states(),
            "passed": round_trip <= tol && leakage.0 <= tol,
        }));
    }
    let ok = records.iter().all(|r| r["passed"] == json!(true));
    let out = match cli.format {
        Format::Json => pretty(&json!({ "runs": records, "passed": ok })),
        Format::Csv => {
            let mut out = String::from("shares,secrets,round_trip_error,leakage,min_share_eigenvalue,outputs_are_states,passed\n");
            for r in &records {
                let _ = writeln!(
                    out,
                    "{},{},{:e},{:e},{:e},{},{}",
                    r["shares"], r["secrets"], r["round_trip_error"].as_f64().unwrap_or(f64::NAN),
                    r["leakage"].as_f64().unwrap_or(f64::NAN), r["min_share_eigenvalue"].as_f64().unwrap_or(f64::NAN),
                    r["outputs_are_states"], r["passed"]
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &records {
                let _ = writeln!(
                    out,
                    "N = {}: {} secrets, round-trip error {:.2e}, worst leakage {:.2e} on {}, smallest share eigenvalue {:.4}{}",
                    r["shares"],
                    r["secrets"],
                    r["round_trip_error"].as_f64().unwrap_or(f64::NAN),
                    r["leakage"].as_f64().unwrap_or(f64::NAN),
                    r["leakage_subset"],
                    r["min_share_eigenvalue"].as_f64().unwrap_or(f64::NAN),
                    if r["outputs_are_states"] == json!(true) { "" } else { " (even share count: outputs not always positive)" }
                );
            }
            let _ = writeln!(out, "{}", if ok { "secret sharing checks passed" } else { "SECRET SHARING CHECKS FAILED" });
            out
        }
    };
    if ok {
        Ok(out)
    } else {
        Err((out, Failure::Checks))
    }
}

fn measure_opt(cli: &Cli, states: &[String], restarts: usize) -> Result<String, Failure> {
    let defaults = ["dicke:N=3,e=1".to_string(), "dicke:N=4,e=1".to_string()];
    let states = if states.is_empty() { &defaults[..] } else { states };
    let mut results = Vec::new();
    for spec in states {
        let rho = spec.parse::<StateSpec>()?.load(true)?.to_density();
        results.push((spec.clone(), measurement_gap(&rho, restarts, cli.seed)?));
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!(results
            .iter()
            .map(|(s, g)| json!({"state": s, "restarts": restarts, "result": g}))
            .collect::<Vec<_>>())),
        Format::Csv => {
            let mut out = String::from("state,i,j,quantum_cmi,classical_best\n");
            for (s, g) in &results {
                for p in &g.pairs {
                    let _ = writeln!(out, "\"{s}\",{},{},{},{}", p.i, p.j, p.quantum_cmi, p.classical_best);
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (s, g) in &results {
                let _ = writeln!(
                    out,
                    "{s}: D = {:.6}; gap vs best pair {:.6}, vs worst pair {:.6}, at minimizing pair {:.6} ({restarts} restarts)",
                    g.dependence, g.gap, g.gap_min, g.gap_at_min_pair
                );
                for p in &g.pairs {
                    let _ = writeln!(out, "  ({},{}) quantum {:.6}  measured {:.6}", p.i, p.j, p.quantum_cmi, p.classical_best);
                }
            }
            out
        }
    })
}
