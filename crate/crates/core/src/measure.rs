//! Local projective qubit measurements and a multistart simplex search for the
//! largest classical conditional mutual information they can reveal.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{apply_channel, KrausChannel};
use crate::dependence::dependence;
use crate::error::{invalid, Error, Result};
use crate::info::{classical_cmi, conditional_mutual_information, ProbTensor};
use crate::matrix::{seeded_rng, ComplexMatrix, C64};
use crate::state::DensityOperator;

/// Basis `{cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩, orthogonal complement}`; outcome 0 is
/// the first vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementSetting {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementSetting {
    pub const Z: Self = Self { theta: 0.0, phi: 0.0 };
    pub const X: Self = Self {
        theta: PI / 2.0,
        phi: 0.0,
    };

    /// Maps arbitrary angles onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)` without changing the
    /// measurement or its outcome labels.
    pub fn canonical(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(2.0 * PI);
        let mut p = phi;
        if t > PI {
            t = 2.0 * PI - t;
            p += PI;
        }
        let mut p = p.rem_euclid(2.0 * PI);
        if p >= 2.0 * PI {
            p = 0.0;
        }
        Self { theta: t, phi: p }
    }

    /// Unitary whose rows are the two basis bras.
    fn readout_unitary(&self) -> ComplexMatrix {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let e = C64::from_polar(1.0, self.phi);
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(c, 0.0), e.conj() * s, -e * s, C64::new(c, 0.0)],
        )
    }
}

fn check_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.local_dim() != 2 {
        return Err(Error::Dimension(format!(
            "local measurements are implemented for qubits, got d = {}",
            rho.local_dim()
        )));
    }
    Ok(())
}

/// Outcome distribution of measuring every party in its own basis.
pub fn induced_distribution(rho: &DensityOperator, settings: &[MeasurementSetting]) -> Result<ProbTensor> {
    check_qubits(rho)?;
    let n = rho.num_parties();
    if settings.len() != n {
        return Err(invalid(format!("{} settings for {n} parties", settings.len())));
    }
    let mut m = rho.clone();
    for (p, s) in settings.iter().enumerate() {
        let u = KrausChannel::new(2, 2, vec![s.readout_unitary()])?;
        m = apply_channel(&m, &u, p)?;
    }
    let weights = m.matrix().diagonal().iter().map(|z| z.re.max(0.0)).collect();
    ProbTensor::from_weights(n, 2, weights)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub best_value: f64,
    pub best_setting: Vec<MeasurementSetting>,
    /// Objective evaluations summed over restarts.
    pub evaluations: usize,
    /// Whether the winning restart met the diameter criterion.
    pub converged: bool,
}

pub const SIMPLEX_TOL: f64 = 1e-6;
pub const MAX_EVALS: usize = 2000;
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.5;

pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead minimization from `start`. Stops when every vertex lies within
/// `SIMPLEX_TOL` of the best one, or after `MAX_EVALS` evaluations.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], step: f64) -> SimplexOutcome {
    let dim = start.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), eval(start)));
    for k in 0..dim {
        let mut x = start.to_vec();
        x[k] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_TOL {
            converged = true;
            break;
        }
        if evals.get() >= MAX_EVALS {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(REFLECT);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(REFLECT * CONTRACT);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(-CONTRACT);
            let v = eval(&x);
            (x, v)
        };
        if fc < fr.min(worst.1) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, v)| a + SHRINK * (v - a))
                .collect();
            let v = eval(&x);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    SimplexOutcome {
        point,
        value,
        evaluations: evals.get(),
        converged,
    }
}

fn settings_from(params: &[f64]) -> Vec<MeasurementSetting> {
    params
        .chunks(2)
        .map(|c| MeasurementSetting::canonical(c[0], c[1]))
        .collect()
}

fn measured_cmi(
    rho: &DensityOperator,
    settings: &[MeasurementSetting],
    a: usize,
    b: usize,
    cond: &[usize],
) -> Result<f64> {
    classical_cmi(&induced_distribution(rho, settings)?, a, b, cond)
}

/// Largest `I(a:b|cond)` of the outcome distribution over all local projective
/// measurements. Restart `r` starts from the `r`-th seeded random point; ties
/// go to the lowest restart index.
pub fn optimize_classical_cmi(
    rho: &DensityOperator,
    a: usize,
    b: usize,
    cond: &[usize],
    restarts: usize,
    seed: u64,
) -> Result<OptResult> {
    check_qubits(rho)?;
    if restarts == 0 {
        return Err(invalid("need at least one restart"));
    }
    let n = rho.num_parties();
    // Validates the partition once, outside the objective.
    measured_cmi(rho, &vec![MeasurementSetting::Z; n], a, b, cond)?;

    let mut rng = seeded_rng(seed);
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|_| {
            (0..n)
                .flat_map(|_| [rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)])
                .collect()
        })
        .collect();
    let objective = |x: &[f64]| -> f64 {
        measured_cmi(rho, &settings_from(x), a, b, cond).map_or(f64::INFINITY, |v| -v)
    };
    let outcomes: Vec<SimplexOutcome> = starts
        .par_iter()
        .map(|s| nelder_mead(objective, s, INITIAL_STEP))
        .collect();

    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let winner = outcomes
        .iter()
        .enumerate()
        .fold(0, |best, (i, o)| if o.value < outcomes[best].value { i } else { best });
    let best_setting = settings_from(&outcomes[winner].point);
    Ok(OptResult {
        best_value: measured_cmi(rho, &best_setting, a, b, cond)?,
        best_setting,
        evaluations,
        converged: outcomes[winner].converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOptimum {
    pub i: usize,
    pub j: usize,
    pub quantum_cmi: f64,
    pub classical_best: f64,
}

/// Quantum dependence against the classical conditional informations reachable by
/// local measurements, pair by pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementGap {
    pub dependence: f64,
    pub min_pair: (usize, usize),
    pub pairs: Vec<PairOptimum>,
    /// `D − max over pairs of the optimized classical CMI`.
    pub gap: f64,
    /// `D − min over pairs of the optimized classical CMI`.
    pub gap_min: f64,
    /// `D − optimized classical CMI of the pair minimizing D`.
    pub gap_at_min_pair: f64,
}

pub fn measurement_gap(rho: &DensityOperator, restarts: usize, seed: u64) -> Result<MeasurementGap> {
    check_qubits(rho)?;
    let report = dependence(rho)?;
    let n = rho.num_parties();
    let pairs = report
        .pair_values
        .iter()
        .map(|pv| {
            let cond: Vec<usize> = (0..n).filter(|&p| p != pv.i && p != pv.j).collect();
            let opt = optimize_classical_cmi(rho, pv.i, pv.j, &cond, restarts, seed)?;
            Ok(PairOptimum {
                i: pv.i,
                j: pv.j,
                quantum_cmi: conditional_mutual_information(rho, pv.i, pv.j, &cond)?,
                classical_best: opt.best_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = pairs.iter().map(|p| p.classical_best).fold(f64::NEG_INFINITY, f64::max);
    let min = pairs.iter().map(|p| p.classical_best).fold(f64::INFINITY, f64::min);
    let at_min = pairs
        .iter()
        .find(|p| (p.i, p.j) == report.min_pair)
        .map(|p| p.classical_best)
        .unwrap_or(max);
    Ok(MeasurementGap {
        dependence: report.value,
        min_pair: report.min_pair,
        pairs,
        gap: report.value - max,
        gap_min: report.value - min,
        gap_at_min_pair: report.value - at_min,
    })
}
