//! Acceptance criteria, one test per criterion. Every check prints a PASS/FAIL line
//! (run with `--nocapture` to see them).
//!
//! Two quoted values cannot be reached by the stated constructions: the damped
//! dependence 0.19 and `D3 = 1` for three qutrits in the (N−1)-uniform family.
//! Their lines are computed faithfully and print FAIL; the assertions for them
//! live in ignored tests so they can be run on demand with `--ignored`.

use std::time::Instant;

use multidep::channels::{apply_channel, KrausChannel};
use multidep::dependence::{
    dependence, dependence_classical, dependence_pure, dicke_dependence_analytic, k_dependence, k_dependence_pure,
};
use multidep::measure::measurement_gap;
use multidep::secret::{leakage_audit, rate_bound, trace_distance, SecretSharingScheme};
use multidep::verify::{run_suite, Suite, VerifyConfig};
use multidep::zoo::{ame_state, classical_preset, dicke, ghz, graph_state, kuniform_mixed, nc_state, smolin, GraphSpec};
use multidep::{random_density, ComplexMatrix, DensityOperator, StateVector};

/// Collects PASS/FAIL lines for one criterion.
struct Criterion {
    id: u8,
    failures: Vec<String>,
    known: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &str) -> Self {
        println!("== criterion {id}: {title}");
        Self {
            id,
            failures: Vec::new(),
            known: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, ok: bool, detail: String) {
        println!("{} [C{}] {what}: {detail}", if ok { "PASS" } else { "FAIL" }, self.id);
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn near(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        self.check(what, ok, format!("{value:.6} vs {target} ± {tol:e}"));
    }

    /// A check whose target is known to be out of reach; it is printed but does
    /// not fail the test.
    fn near_known(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        let note = if ok { "" } else { " (known discrepancy)" };
        println!(
            "{} [C{}] {what}: {value:.6} vs {target} ± {tol:e}{note}",
            if ok { "PASS" } else { "FAIL" },
            self.id
        );
        if !ok {
            self.known.push(what.to_string());
        }
    }

    fn finish(self) {
        println!(
            "== criterion {}: {} ({} quoted value(s) not reproduced)",
            self.id,
            if self.failures.is_empty() { "PASS" } else { "FAIL" },
            self.known.len()
        );
        assert!(self.failures.is_empty(), "criterion {} failed: {:?}", self.id, self.failures);
    }
}

fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn all_marginals_maximally_mixed(rho: &DensityOperator, k: usize) -> f64 {
    let n = rho.num_parties();
    let mut worst = 0.0f64;
    for skip in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&p| p != skip).take(k).collect();
        let m = rho.reduce(&keep).unwrap();
        let mixed = DensityOperator::maximally_mixed(k, rho.local_dim()).unwrap();
        worst = worst.max(max_abs_diff(m.matrix(), mixed.matrix()));
    }
    worst
}

enum Family {
    Pure(StateVector),
    Mixed(DensityOperator),
}

fn profile(state: &Family, n: usize) -> Vec<f64> {
    (3..=n)
        .map(|k| match state {
            Family::Pure(psi) if k == n => dependence_pure(psi).unwrap().value,
            Family::Pure(psi) => k_dependence_pure(psi, k).unwrap().value(),
            Family::Mixed(rho) if k == n => dependence(rho).unwrap().value,
            Family::Mixed(rho) => k_dependence(rho, k).unwrap().value(),
        })
        .collect()
}

fn tolerance(quoted: &str) -> f64 {
    match quoted.split_once('.') {
        Some((_, frac)) if frac.len() >= 4 => 5e-4,
        _ => 5e-3,
    }
}

#[test]
fn criterion_1_reference_table() {
    let mut c = Criterion::new(1, "dependence profiles D_3..D_N of the standard families");
    let start = Instant::now();

    let p_same = dependence_classical(&classical_preset("P_same").unwrap()).unwrap().value;
    c.near("P_same D3", p_same, 0.0, tolerance("0"));
    let p_even = dependence_classical(&classical_preset("P_even").unwrap()).unwrap().value;
    c.near("P_even D3", p_even, 1.0, tolerance("1"));

    let pure = |psi| Family::Pure(psi);
    let mixed = |rho| Family::Mixed(rho);
    let rows: Vec<(&str, usize, Family, &[&str])> = vec![
        ("GHZ", 3, pure(ghz(3, 2).unwrap()), &["1"]),
        ("D_3^1", 3, pure(dicke(3, 1).unwrap()), &["0.9183"]),
        ("rho_nc", 3, mixed(nc_state(3).unwrap()), &["0.5033"]),
        ("GHZ", 4, pure(ghz(4, 2).unwrap()), &["0", "1"]),
        ("D_4^1", 4, pure(dicke(4, 1).unwrap()), &["0.3774", "0.62256"]),
        ("D_4^2", 4, pure(dicke(4, 2).unwrap()), &["0.5033", "0.7484"]),
        ("L_4", 4, pure(graph_state(&GraphSpec::path(4)).unwrap()), &["1", "0"]),
        ("GHZ", 5, pure(ghz(5, 2).unwrap()), &["0", "0", "1"]),
        ("D_5^1", 5, pure(dicke(5, 1).unwrap()), &["0.2490", "0.2490", "0.4729"]),
        ("D_5^2", 5, pure(dicke(5, 2).unwrap()), &["0.3245", "0.3245", "0.6464"]),
        ("L_5", 5, pure(graph_state(&GraphSpec::path(5)).unwrap()), &["0", "0", "0"]),
        ("R_5", 5, pure(graph_state(&GraphSpec::cycle(5)).unwrap()), &["1", "1", "0"]),
        ("AME(5,2)", 5, mixed(ame_state(5).unwrap()), &["1", "1", "0"]),
        ("GHZ", 6, pure(ghz(6, 2).unwrap()), &["0", "0", "0", "1"]),
        ("D_6^1", 6, pure(dicke(6, 1).unwrap()), &["0.1866", "0.1634", "0.1866", "0.3818"]),
        ("D_6^2", 6, pure(dicke(6, 2).unwrap()), &["0.2566", "0.1961", "0.2566", "0.5637"]),
        ("D_6^3", 6, pure(dicke(6, 3).unwrap()), &["0.2729", "0.1961", "0.2729", "0.6291"]),
        ("L_6", 6, pure(graph_state(&GraphSpec::path(6)).unwrap()), &["0", "0", "0", "0"]),
        ("R_6", 6, pure(graph_state(&GraphSpec::cycle(6)).unwrap()), &["0", "0", "0", "0"]),
        ("AME(6,2)", 6, mixed(ame_state(6).unwrap()), &["0", "2", "0", "0"]),
        ("5-uniform", 6, mixed(kuniform_mixed(6, 2).unwrap()), &["0", "0", "0", "2"]),
    ];
    for (label, n, state, quoted) in &rows {
        let computed = profile(state, *n);
        for (i, q) in quoted.iter().enumerate() {
            let target: f64 = q.parse().unwrap();
            c.near(&format!("N={n} {label} D{}", i + 3), computed[i], target, tolerance(q));
        }
    }

    // The 4-qubit 3-uniform row is quoted as (D3, D4) = (2, 0); the maximizer
    // argument gives D4 = 2 and maximally mixed 3-party marginals give D3 = 0.
    let three_uniform = profile(&Family::Mixed(smolin(4).unwrap()), 4);
    println!(
        "NOTE [C1] N=4 3-uniform quoted (2, 0), computed ({:.6}, {:.6}); columns treated as transposed",
        three_uniform[0], three_uniform[1]
    );
    c.near("N=4 3-uniform D3 (corrected reference)", three_uniform[0], 0.0, 5e-3);
    c.near("N=4 3-uniform D4 (corrected reference)", three_uniform[1], 2.0, 5e-3);
    println!("NOTE [C1] Psi_4 excluded: no construction available");

    let secs = start.elapsed().as_secs_f64();
    c.check("runtime under one minute", secs < 60.0, format!("{secs:.2} s"));
    c.finish();
}

/// `(D3 before, min pair before, D3 after, tied minimizers after)`.
type Damped = (f64, (usize, usize), f64, Vec<(usize, usize)>);

fn damped_example() -> Damped {
    let rho = classical_preset("AD_example").unwrap().to_density();
    let before = dependence(&rho).unwrap();
    let after = dependence(&apply_channel(&rho, &KrausChannel::amplitude_damping_half(), 0).unwrap()).unwrap();
    let ties = after.minimizers(1e-9);
    (before.value, before.min_pair, after.value, ties)
}

#[test]
fn criterion_2_damping_raises_dependence() {
    let mut c = Criterion::new(2, "amplitude damping on party 0 raises D3");
    let (before, min_before, after, ties) = damped_example();
    c.near("D3 before damping", before, 0.06, 5e-3);
    c.check(
        "minimum before damping conditions on party 0",
        min_before == (1, 2),
        format!("min pair {min_before:?}"),
    );
    c.near_known("D3 after damping", after, 0.19, 5e-3);
    // Shannon oracle on the damped diagonal {1/2, 1/16, 1/16, 1/8, 0, 1/16, 1/16, 1/8}:
    // I(0:1|2) = H(02) + H(12) − H(2) − H(012).
    let h = |ps: &[f64]| -ps.iter().filter(|&&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>();
    let h012 = h(&[0.5, 1.0 / 16.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 16.0, 1.0 / 8.0]);
    let h02 = h(&[0.5 + 1.0 / 16.0, 1.0 / 16.0 + 1.0 / 8.0, 1.0 / 16.0, 1.0 / 16.0 + 1.0 / 8.0]);
    let h12 = h(&[0.5, 1.0 / 16.0 + 1.0 / 16.0, 1.0 / 16.0 + 1.0 / 16.0, 1.0 / 8.0 + 1.0 / 8.0]);
    let h2 = h(&[0.5 + 1.0 / 16.0 + 1.0 / 16.0, 1.0 / 16.0 + 1.0 / 8.0 + 1.0 / 8.0 + 1.0 / 16.0]);
    c.near("D3 after damping equals the Shannon oracle", after, h02 + h12 - h2 - h012, 1e-9);
    c.check(
        "minimum after damping moves to pairs (0,1) and (0,2)",
        ties == [(0, 1), (0, 2)],
        format!("minimizing pairs {ties:?}"),
    );
    c.check("damping increases D3", after > before + 0.1, format!("{before:.4} -> {after:.4}"));
    c.finish();
}

#[test]
#[ignore = "quoted target 0.19 is not reached by the stated channel (computed 0.1681)"]
fn damped_dependence_reaches_quoted_value() {
    let (_, _, after, _) = damped_example();
    assert!((after - 0.19).abs() <= 5e-3, "D3 after damping = {after}");
}

#[test]
fn criterion_3_maximizers() {
    let mut c = Criterion::new(3, "(N-1)-uniform maximizers");
    let ku4 = kuniform_mixed(4, 2).unwrap();
    let sm4 = smolin(4).unwrap();
    c.near("kuniform(4,2) equals smolin(4) entrywise", max_abs_diff(ku4.matrix(), sm4.matrix()), 0.0, 1e-12);
    c.near("kuniform(4,2) D4", dependence(&ku4).unwrap().value, 2.0, 1e-9);
    c.near("smolin(4) D4", dependence(&sm4).unwrap().value, 2.0, 1e-9);
    c.near("kuniform(4,2) 3-marginals maximally mixed", all_marginals_maximally_mixed(&ku4, 3), 0.0, 1e-10);
    let ku3 = kuniform_mixed(3, 3).unwrap();
    c.near("kuniform(3,3) 2-marginals maximally mixed", all_marginals_maximally_mixed(&ku3, 2), 0.0, 1e-10);
    let d3 = dependence(&ku3).unwrap().value;
    c.near_known("kuniform(3,3) D3", d3, 1.0, 1e-9);
    // Entropy oracle: the state is a projector of rank d^{N-2} = 3 with maximally
    // mixed 2-marginals, so every CMI is 2 + 2 - 1 - 1 = 2 dits.
    c.near("kuniform(3,3) D3 equals the rank oracle", d3, 2.0, 1e-9);
    c.finish();
}

#[test]
#[ignore = "three-qutrit (N-1)-uniform state has D3 = 2, not the quoted 1"]
fn three_qutrit_maximizer_quoted_value() {
    let d3 = dependence(&kuniform_mixed(3, 3).unwrap()).unwrap().value;
    assert!((d3 - 1.0).abs() <= 1e-9, "D3 = {d3}");
}

#[test]
fn criterion_4_secret_sharing() {
    let mut c = Criterion::new(4, "secret sharing round trip, leakage and rate bound");
    for n in [4usize, 6] {
        let scheme = SecretSharingScheme::new(n).unwrap();
        let mut worst_round_trip = 0.0f64;
        let mut worst_leak = 0.0f64;
        for t in 0..20u64 {
            let secret = random_density(1, 2, 1 + (t as usize % 2), 1000 * n as u64 + t).unwrap();
            let shares = scheme.encode(&secret).unwrap();
            let back = scheme.decode(&shares).unwrap();
            worst_round_trip = worst_round_trip.max(trace_distance(back.matrix(), secret.matrix()).unwrap());
            worst_leak = worst_leak.max(leakage_audit(&shares).unwrap().worst_distance);
        }
        c.near(&format!("N={n} round-trip trace distance, 20 secrets"), worst_round_trip, 0.0, 1e-10);
        c.near(&format!("N={n} leakage of proper subsets, 20 secrets"), worst_leak, 0.0, 1e-10);
    }
    let r = rate_bound(&smolin(4).unwrap()).unwrap();
    c.near("4-party Smolin Choi lower bound", r.lower_bound, 1.0, 1e-9);
    c.near("4-party Smolin Choi coherent information", r.coherent_info, 1.0, 1e-9);
    c.finish();
}

#[test]
fn criterion_5_dicke() {
    let mut c = Criterion::new(5, "Dicke closed form, limits and measurement gap");
    let mut worst = 0.0f64;
    for n in 3..=8 {
        for e in 1..n {
            let analytic = dicke_dependence_analytic(n, e).unwrap();
            let numeric = dependence_pure(&dicke(n, e).unwrap()).unwrap().value;
            worst = worst.max((analytic - numeric).abs());
        }
    }
    c.near("closed form vs numeric, 3 <= N <= 8", worst, 0.0, 1e-9);
    let limit = |k: f64| 2.0 * (k - 1.0) / (k * k);
    c.near("N=200, e=100", dicke_dependence_analytic(200, 100).unwrap(), limit(2.0), 0.02);
    c.near("N=300, e=100", dicke_dependence_analytic(300, 100).unwrap(), limit(3.0), 0.02);
    for (n, label) in [(3usize, "D_3^1"), (4, "D_4^1")] {
        let g = measurement_gap(&dicke(n, 1).unwrap().to_density(), 32, 7).unwrap();
        c.check(
            &format!("{label} measurement gap > 1e-3 (32 restarts)"),
            g.gap > 1e-3 && g.gap_min > 1e-3 && g.gap_at_min_pair > 1e-3,
            format!("gap {:.6}, gap_min {:.6}, at min pair {:.6}", g.gap, g.gap_min, g.gap_at_min_pair),
        );
    }
    c.finish();
}

#[test]
fn criterion_6_property_suites() {
    let mut c = Criterion::new(6, "randomized invariant suites, 200 trials");
    let start = Instant::now();
    let cfg = VerifyConfig {
        seed: 7,
        trials: 200,
        tolerance: None,
    };
    for suite in [Suite::Ssa, Suite::Bounds, Suite::Monotonicity, Suite::PropertiesIII] {
        let report = run_suite(suite, &cfg).unwrap();
        for check in &report.checks {
            c.check(
                &format!("{}: {}", suite.name(), check.name),
                check.passed,
                format!("worst {:.3e} over {} trials", check.worst, check.trials),
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime under five minutes", secs < 300.0, format!("{secs:.2} s"));
    c.finish();
}

#[test]
fn criterion_7_five_party_nc_theory_row() {
    let mut c = Criterion::new(7, "theory values for the 5-qubit rho_nc");
    println!("NOTE [C7] measured columns are not reproducible: no density matrices are available");
    let computed = profile(&Family::Mixed(nc_state(5).unwrap()), 5);
    for (i, target) in [0.17, 0.65, 0.47].into_iter().enumerate() {
        c.near(&format!("N=5 rho_nc D{}", i + 3), computed[i], target, 5e-3);
    }
    c.finish();
}
