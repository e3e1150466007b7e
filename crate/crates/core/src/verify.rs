//! Named, seeded invariant suites. Every check reduces its trials to a worst-case
//! slack that must stay at or above `−tolerance`; equalities are recorded as
//! `−|difference|`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    apply_channel, dependence_increase_bound, monotonicity_gap, random_channel, KrausChannel, LocalChannels,
};
use crate::dependence::{
    dependence, dependence_classical, dependence_grouped, dependence_pure, dicke_dependence_analytic, k_dependence,
};
use crate::error::{invalid, Error, Result};
use crate::info::{
    classical_cmi, conditional_mutual_information, mutual_information, subsystem_entropy, ProbTensor,
};
use crate::matrix::{kron, seeded_rng, ComplexMatrix};
use crate::secret::{leakage_audit, rate_bound, trace_distance, SecretSharingScheme};
use crate::state::{random_density, random_state_vector, DensityOperator, GroupedState};
use crate::zoo::{classical_preset, dicke, smolin};

/// Default tolerance of the inequality and identity checks.
pub const INVARIANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Ssa,
    Bounds,
    Monotonicity,
    PropertiesIII,
    SecretSharing,
    DickeAnalytic,
    AdExample,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Ssa,
        Suite::Bounds,
        Suite::Monotonicity,
        Suite::PropertiesIII,
        Suite::SecretSharing,
        Suite::DickeAnalytic,
        Suite::AdExample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ssa => "ssa",
            Suite::Bounds => "bounds",
            Suite::Monotonicity => "monotonicity",
            Suite::PropertiesIII => "properties-i-ii",
            Suite::SecretSharing => "secret-sharing",
            Suite::DickeAnalytic => "dicke-analytic",
            Suite::AdExample => "ad-example",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                invalid(format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    /// Smallest slack observed (or the checked value for fixed examples).
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Overrides [`INVARIANT_TOL`]; fixed-example tolerances are unaffected.
    pub tolerance: Option<f64>,
}

impl VerifyConfig {
    fn tol(&self) -> f64 {
        self.tolerance.unwrap_or(INVARIANT_TOL)
    }
}

/// Seed of trial `t` of check `check`, decorrelated from neighbouring seeds.
fn trial_seed(seed: u64, check: u64, t: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(check.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(t as u64)
}

/// Runs `trial` over all seeds in parallel and keeps the smallest slack.
fn sweep<F>(name: &str, cfg: &VerifyConfig, check: u64, tol: f64, trial: F) -> Result<Check>
where
    F: Fn(usize, u64) -> Result<f64> + Sync,
{
    let slacks = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(t, trial_seed(cfg.seed, check, t)))
        .collect::<Result<Vec<f64>>>()?;
    let (at, worst) = slacks
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    Ok(Check {
        name: name.to_string(),
        trials: cfg.trials,
        worst,
        tolerance: tol,
        passed: worst >= -tol,
        detail: format!("worst slack at trial {at}"),
    })
}

fn exact(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check {
        name: name.to_string(),
        trials: 1,
        worst: value,
        tolerance: tol,
        passed: (value - target).abs() <= tol,
        detail: format!("value {value:.6}, target {target} ± {tol:e}"),
    }
}

fn flag(name: &str, ok: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        trials: 1,
        worst: if ok { 0.0 } else { -1.0 },
        tolerance: 0.0,
        passed: ok,
        detail,
    }
}

/// `(n, d)` for trial `t`: qubits and qutrits at `N = 3, 4`.
fn shape(t: usize) -> (usize, usize) {
    (3 + t % 2, 2 + (t / 2) % 2)
}

fn random_mixed(t: usize, seed: u64) -> Result<DensityOperator> {
    let (n, d) = shape(t);
    let dim = d.pow(n as u32);
    let rank = 1 + (seed as usize) % dim;
    random_density(n, d, rank, seed)
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let checks = match suite {
        Suite::Ssa => ssa(cfg)?,
        Suite::Bounds => bounds(cfg)?,
        Suite::Monotonicity => monotonicity(cfg)?,
        Suite::PropertiesIII => properties_i_ii(cfg)?,
        Suite::SecretSharing => secret_sharing(cfg)?,
        Suite::DickeAnalytic => dicke_analytic(cfg)?,
        Suite::AdExample => ad_example()?,
    };
    Ok(SuiteReport {
        suite,
        seed: cfg.seed,
        trials: cfg.trials,
        checks,
    })
}

fn ssa(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol();
    Ok(vec![
        sweep("quantum CMI >= 0 (all pairs given the rest and given one party)", cfg, 1, tol, |t, s| {
            let rho = random_mixed(t, s)?;
            let n = rho.num_parties();
            let mut worst = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    let rest: Vec<usize> = (0..n).filter(|&p| p != i && p != j).collect();
                    worst = worst.min(conditional_mutual_information(&rho, i, j, &rest)?);
                    worst = worst.min(conditional_mutual_information(&rho, i, j, &rest[..1])?);
                }
            }
            Ok(worst)
        })?,
        sweep("classical CMI >= 0", cfg, 2, tol, |t, s| {
            let (n, d) = shape(t);
            let p = ProbTensor::random(n, d, s)?;
            let rest: Vec<usize> = (2..n).collect();
            classical_cmi(&p, 0, 1, &rest)
        })?,
        sweep("chain rule I(A:BC) = I(A:B) + I(A:C|B)", cfg, 3, tol, |t, s| {
            let rho = random_mixed(t, s)?;
            let mut rng = seeded_rng(s);
            let a = rng.random_range(0..3);
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let whole = mutual_information(&rho, &[a], &[b, c])?;
            let parts = mutual_information(&rho, &[a], &[b])? + conditional_mutual_information(&rho, a, c, &[b])?;
            Ok(-(whole - parts).abs())
        })?,
    ])
}

fn bounds(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol();
    Ok(vec![
        sweep("mixed: 0 <= D <= 2", cfg, 11, tol, |t, s| {
            let v = dependence(&random_mixed(t, s)?)?.value;
            Ok(v.min(2.0 - v))
        })?,
        sweep("pure: 0 <= D <= 1", cfg, 12, tol, |t, s| {
            let (n, d) = shape(t);
            let v = dependence_pure(&random_state_vector(n, d, s)?)?.value;
            Ok(v.min(1.0 - v))
        })?,
        sweep("pure shortcut equals the general formula", cfg, 13, tol, |t, s| {
            let (n, d) = shape(t);
            let psi = random_state_vector(n, d, s)?;
            Ok(-(dependence_pure(&psi)?.value - dependence(&psi.to_density())?.value).abs())
        })?,
        sweep("classical: 0 <= D <= 1", cfg, 14, tol, |t, s| {
            let (n, d) = shape(t);
            let v = dependence_classical(&ProbTensor::random(n, d, s)?)?.value;
            Ok(v.min(1.0 - v))
        })?,
        sweep("pure monogamy I(i:j) + I(j:k) <= 2 S(j)", cfg, 15, tol, |t, s| {
            let (n, d) = shape(t);
            let rho = random_state_vector(n, d, s)?.to_density();
            Ok(2.0 * subsystem_entropy(&rho, &[1])?
                - mutual_information(&rho, &[0], &[1])?
                - mutual_information(&rho, &[1], &[2])?)
        })?,
    ])
}

/// Random channels on a random nonempty set of parties.
fn random_local_channels(n: usize, d: usize, seed: u64) -> Result<LocalChannels> {
    let mut rng = seeded_rng(seed ^ 0xC4A7);
    let mut chans = LocalChannels::new();
    for p in 0..n {
        if rng.random_bool(0.6) || p == n - 1 {
            let rank = rng.random_range(1..=d * d);
            chans.insert(p, random_channel(d, rank, rng.random())?);
        }
    }
    Ok(chans)
}

fn monotonicity(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol();
    let setup = |t: usize, s: u64| -> Result<(DensityOperator, LocalChannels, usize, usize)> {
        let rho = random_mixed(t, s)?;
        let (n, d) = (rho.num_parties(), rho.local_dim());
        let a = (s as usize) % n;
        let b = (a + 1 + (s as usize / n) % (n - 1)) % n;
        Ok((rho, random_local_channels(n, d, s)?, a, b))
    };
    Ok(vec![
        sweep("local-operation bound on CMI (slack >= 0)", cfg, 21, tol, |t, s| {
            let (rho, ch, a, b) = setup(t, s)?;
            Ok(monotonicity_gap(&rho, &ch, a, b)?.bound_slack)
        })?,
        sweep("dependence increase bound (slack >= 0)", cfg, 22, tol, |t, s| {
            let (rho, ch, _, _) = setup(t, s)?;
            Ok(dependence_increase_bound(&rho, &ch)?.bound_slack)
        })?,
        sweep("data processing I(ab:rest) >= I(ab:rest')", cfg, 23, tol, |t, s| {
            let (rho, ch, a, b) = setup(t, s)?;
            let r = monotonicity_gap(&rho, &ch, a, b)?;
            Ok(r.info_before - r.info_after)
        })?,
        sweep("CMI monotone under a channel on a non-conditioned party", cfg, 24, tol, |t, s| {
            let rho = random_mixed(t, s)?;
            let (n, d) = (rho.num_parties(), rho.local_dim());
            let ch = random_channel(d, 1 + (s as usize) % (d * d), s.rotate_left(17))?;
            let rest: Vec<usize> = (2..n).collect();
            let before = conditional_mutual_information(&rho, 0, 1, &rest)?;
            let after = conditional_mutual_information(&apply_channel(&rho, &ch, 1)?, 0, 1, &rest)?;
            Ok(before - after)
        })?,
    ])
}

/// `Σ_k p_k ρ_A^k ⊗ ρ_B^k ⊗ |k⟩⟨k| ⊗ σ^k`: `A` and `B` are conditionally
/// independent given the classical flag, so `D = 0`. `A` spans `a_units` parties.
fn markov_state(a_units: usize, n: usize, d: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = seeded_rng(seed);
    let weights: Vec<f64> = (0..d).map(|_| 0.1 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let extra = n - 3;
    let fine = a_units + 2 + extra;
    let dim = d.pow(fine as u32);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (k, w) in weights.iter().enumerate() {
        let rank_a = 1 + rng.random_range(0..d.pow(a_units as u32));
        let ra = random_density(a_units, d, rank_a, rng.random())?;
        let rb = random_density(1, d, 1 + rng.random_range(0..d), rng.random())?;
        let mut flag = ComplexMatrix::zeros(d, d);
        flag[(k, k)] = crate::matrix::ONE;
        let mut term = kron(&kron(ra.matrix(), rb.matrix()), &flag);
        if extra > 0 {
            let rs = random_density(extra, d, 1, rng.random())?;
            term = kron(&term, rs.matrix());
        }
        m += term.scale(w / total);
    }
    DensityOperator::new_unchecked(fine, d, m)
}

fn properties_i_ii(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol();
    Ok(vec![
        sweep("conditionally independent construction has D = 0", cfg, 31, tol, |t, s| {
            let (n, d) = shape(t);
            Ok(-dependence(&markov_state(1, n, d, s)?)?.value.abs())
        })?,
        sweep("(i) appending a product party keeps D_N = 0", cfg, 32, tol, |t, s| {
            let (n, d) = shape(t);
            let rho = markov_state(1, n, d, s)?;
            let extra = random_density(1, d, 1 + (s as usize) % d, s.rotate_left(7))?;
            let grown = rho.append_product_party(&extra)?;
            Ok(-k_dependence(&grown, n)?.value().abs())
        })?,
        sweep("(ii) splitting a party keeps D = 0", cfg, 33, tol, |t, s| {
            let (n, d) = shape(t);
            // Qutrit registers stay at three coarse parties to bound the matrix size.
            let n = if d == 3 { 3 } else { n };
            let fine = markov_state(2, n, d, s)?;
            let mut sizes = vec![2];
            sizes.extend(std::iter::repeat_n(1, fine.num_parties() - 2));
            let grouped = GroupedState::new(fine, sizes)?;
            let before = dependence_grouped(&grouped)?.value;
            let after = dependence_grouped(&grouped.split_subsystem(0, d, d)?)?.value;
            Ok(-(before.abs().max(after.abs())))
        })?,
    ])
}

fn secret_sharing(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol();
    let mut checks = Vec::new();
    for (idx, n) in [4usize, 6].into_iter().enumerate() {
        let scheme = SecretSharingScheme::new(n)?;
        checks.push(sweep(&format!("round trip, N = {n}"), cfg, 41 + idx as u64, 1e-10, |_, s| {
            let secret = random_density(1, 2, 1 + (s as usize) % 2, s)?;
            let back = scheme.decode(&scheme.encode(&secret)?)?;
            Ok(-trace_distance(back.matrix(), secret.matrix())?)
        })?);
        let audit_cfg = VerifyConfig {
            trials: cfg.trials.min(10),
            ..*cfg
        };
        checks.push(sweep(&format!("no proper subset learns anything, N = {n}"), &audit_cfg, 43 + idx as u64, 1e-10, |_, s| {
            let secret = random_density(1, 2, 1, s)?;
            Ok(-leakage_audit(&scheme.encode(&secret)?)?.worst_distance)
        })?);
    }
    let smolin_bound = rate_bound(&smolin(4)?)?;
    checks.push(exact("rate bound on 4-qubit Smolin: lower bound", smolin_bound.lower_bound, 1.0, 1e-9));
    checks.push(exact("rate bound on 4-qubit Smolin: coherent information", smolin_bound.coherent_info, 1.0, 1e-9));
    for n in [3usize, 5] {
        let c = SecretSharingScheme::new(n)?.choi()?;
        let r = rate_bound(&c)?;
        checks.push(flag(
            &format!("encoder Choi state, N = {n}: mixed marginals, D = 2, chain holds"),
            r.marginals_ok && (r.dependence_value - 2.0).abs() <= 1e-9 && r.coherent_info >= r.lower_bound - tol,
            format!("D = {:.6}, coherent info = {:.6}", r.dependence_value, r.coherent_info),
        ));
    }
    Ok(checks)
}

fn dicke_analytic(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol();
    let mut worst = (0.0f64, (0, 0));
    for n in 3..=8 {
        for e in 1..n {
            let diff = (dicke_dependence_analytic(n, e)? - dependence_pure(&dicke(n, e)?)?.value).abs();
            if diff > worst.0 {
                worst = (diff, (n, e));
            }
        }
    }
    Ok(vec![
        Check {
            name: "closed form equals numerics, 3 <= N <= 8".into(),
            trials: 33,
            worst: -worst.0,
            tolerance: tol,
            passed: worst.0 <= tol,
            detail: format!("largest difference at (N, e) = {:?}", worst.1),
        },
        exact("N = 200, e = 100 approaches 1/2", dicke_dependence_analytic(200, 100)?, 0.5, 0.02),
        exact("N = 300, e = 100 approaches 4/9", dicke_dependence_analytic(300, 100)?, 4.0 / 9.0, 0.02),
    ])
}

fn ad_example() -> Result<Vec<Check>> {
    let rho = classical_preset("AD_example")?.to_density();
    let before = dependence(&rho)?;
    let after = dependence(&apply_channel(&rho, &KrausChannel::amplitude_damping_half(), 0)?)?;
    let ties = after.minimizers(1e-9);
    Ok(vec![
        exact("D3 before damping", before.value, 0.06, 5e-3),
        flag(
            "minimum before damping conditions on party 0",
            before.min_pair == (1, 2),
            format!("min pair {:?}", before.min_pair),
        ),
        exact("D3 after damping party 0", after.value, 0.19, 5e-3),
        flag(
            "minimum after damping moves to pairs containing party 0",
            ties == [(0, 1), (0, 2)],
            format!("minimizing pairs {ties:?}"),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(trials: usize) -> VerifyConfig {
        VerifyConfig {
            seed: 7,
            trials,
            tolerance: None,
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn randomized_suites_pass_briefly() {
        for s in [Suite::Ssa, Suite::Bounds, Suite::Monotonicity, Suite::PropertiesIII, Suite::SecretSharing] {
            let r = run_suite(s, &cfg(8)).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = run_suite(Suite::Bounds, &cfg(6)).unwrap();
        let b = run_suite(Suite::Bounds, &cfg(6)).unwrap();
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert_eq!(x.worst.to_bits(), y.worst.to_bits());
        }
    }

    #[test]
    fn ad_example_structure() {
        let r = run_suite(Suite::AdExample, &cfg(1)).unwrap();
        let by_name = |n: &str| r.checks.iter().find(|c| c.name.starts_with(n)).unwrap().passed;
        assert!(by_name("D3 before"));
        assert!(by_name("minimum before"));
        assert!(by_name("minimum after"));
        // The quoted post-damping value is not reproduced by the stated channel.
        assert!(!by_name("D3 after"));
    }
}
