//! N-partite dependence: the smallest conditional mutual information between two
//! parties given all the remaining ones,
//!
//! `D_N = min_{i<j} [S(ρ without i) + S(ρ without j) − S(ρ without i,j) − S(ρ)]`.
//!
//! Every pair is evaluated and reported, not just the minimizer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::info::{classical_subsystem_entropy, spectral_entropy, subsystem_entropy, ProbTensor};
use crate::state::{DensityOperator, GroupedState, StateVector};

/// Pair values closer than this to the minimum count as ties; the lexicographically
/// first such pair is reported as the minimizer.
pub const TIE_TOL: f64 = 1e-12;

/// Anything whose subsystem entropies (in dits) can be evaluated.
pub trait Entropic: Sync {
    fn num_parties(&self) -> usize;
    fn local_dim(&self) -> usize;
    /// Entropy of the marginal on `parties` (sorted, possibly all parties).
    fn entropy(&self, parties: &[usize]) -> Result<f64>;
}

impl Entropic for DensityOperator {
    fn num_parties(&self) -> usize {
        DensityOperator::num_parties(self)
    }
    fn local_dim(&self) -> usize {
        DensityOperator::local_dim(self)
    }
    fn entropy(&self, parties: &[usize]) -> Result<f64> {
        subsystem_entropy(self, parties)
    }
}

impl Entropic for ProbTensor {
    fn num_parties(&self) -> usize {
        self.num_vars()
    }
    fn local_dim(&self) -> usize {
        ProbTensor::local_dim(self)
    }
    fn entropy(&self, parties: &[usize]) -> Result<f64> {
        classical_subsystem_entropy(self, parties)
    }
}

/// For a pure state a subsystem and its complement have equal entropy, so the
/// smaller side is diagonalized.
impl Entropic for StateVector {
    fn num_parties(&self) -> usize {
        StateVector::num_parties(self)
    }
    fn local_dim(&self) -> usize {
        StateVector::local_dim(self)
    }
    fn entropy(&self, parties: &[usize]) -> Result<f64> {
        let n = StateVector::num_parties(self);
        if parties.is_empty() || parties.len() == n {
            return Ok(0.0);
        }
        let complement: Vec<usize> = (0..n).filter(|p| !parties.contains(p)).collect();
        let side = if complement.len() < parties.len() {
            &complement[..]
        } else {
            parties
        };
        let marginal = self.reduce(side)?;
        spectral_entropy(&marginal.eigenvalues()?, StateVector::local_dim(self))
    }
}

/// Parties are the groups; entropies are in base `d` of the underlying register.
impl Entropic for GroupedState {
    fn num_parties(&self) -> usize {
        GroupedState::num_parties(self)
    }
    fn local_dim(&self) -> usize {
        self.fine().local_dim()
    }
    fn entropy(&self, parties: &[usize]) -> Result<f64> {
        subsystem_entropy(self.fine(), &self.fine_parties(parties))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairValue {
    pub i: usize,
    pub j: usize,
    /// `I(X_i : X_j | all other parties)` in dits.
    pub cmi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    #[serde(rename = "N")]
    pub num_parties: usize,
    #[serde(rename = "d")]
    pub local_dim: usize,
    #[serde(rename = "pairs")]
    pub pair_values: Vec<PairValue>,
    pub min_pair: (usize, usize),
    #[serde(rename = "D")]
    pub value: f64,
}

impl DependenceReport {
    fn from_pairs(num_parties: usize, local_dim: usize, pair_values: Vec<PairValue>) -> Self {
        let lowest = pair_values
            .iter()
            .map(|p| p.cmi)
            .fold(f64::INFINITY, f64::min);
        let min = pair_values
            .iter()
            .find(|p| p.cmi <= lowest + TIE_TOL)
            .expect("at least three parties give at least three pairs");
        Self {
            num_parties,
            local_dim,
            min_pair: (min.i, min.j),
            value: min.cmi,
            pair_values,
        }
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<f64> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pair_values
            .iter()
            .find(|p| p.i == i && p.j == j)
            .map(|p| p.cmi)
    }

    /// Every pair whose value ties the minimum within `tol`.
    pub fn minimizers(&self, tol: f64) -> Vec<(usize, usize)> {
        self.pair_values
            .iter()
            .filter(|p| p.cmi <= self.value + tol)
            .map(|p| (p.i, p.j))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("bad report JSON: {e}")))
    }

    /// `i,j,cmi` header plus one row per pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,cmi\n");
        for p in &self.pair_values {
            out.push_str(&format!("{},{},{}\n", p.i, p.j, p.cmi));
        }
        out
    }
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

fn without(n: usize, drop: &[usize]) -> Vec<usize> {
    (0..n).filter(|p| !drop.contains(p)).collect()
}

/// Dependence of anything [`Entropic`], evaluating all `N(N−1)/2` pairs.
pub fn dependence_of<E: Entropic + ?Sized>(source: &E) -> Result<DependenceReport> {
    let n = source.num_parties();
    if n < 3 {
        return Err(invalid(format!("dependence needs N >= 3 parties, got {n}")));
    }
    let everyone: Vec<usize> = (0..n).collect();
    let total = source.entropy(&everyone)?;
    let singles = (0..n)
        .into_par_iter()
        .map(|i| source.entropy(&without(n, &[i])))
        .collect::<Result<Vec<f64>>>()?;
    let pair_values = all_pairs(n)
        .into_par_iter()
        .map(|(i, j)| {
            let s_ij = source.entropy(&without(n, &[i, j]))?;
            Ok(PairValue {
                i,
                j,
                cmi: singles[i] + singles[j] - s_ij - total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DependenceReport::from_pairs(n, source.local_dim(), pair_values))
}

pub fn dependence(rho: &DensityOperator) -> Result<DependenceReport> {
    dependence_of(rho)
}

pub fn dependence_classical(p: &ProbTensor) -> Result<DependenceReport> {
    dependence_of(p)
}

/// Pure-state shortcut: the smallest two-party mutual information
/// `S(ρ_i) + S(ρ_j) − S(ρ_ij)`.
pub fn dependence_pure(psi: &StateVector) -> Result<DependenceReport> {
    dependence_of(psi)
}

/// Dependence with groups of fine parties acting as single parties.
pub fn dependence_grouped(state: &GroupedState) -> Result<DependenceReport> {
    dependence_of(state)
}

/// Worst k-partite dependence over all k-party marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KDependenceReport {
    pub k: usize,
    /// Parties of the minimizing marginal, ascending.
    pub subset: Vec<usize>,
    /// Dependence of that marginal; its pair indices refer to positions in `subset`.
    pub report: DependenceReport,
}

impl KDependenceReport {
    pub fn value(&self) -> f64 {
        self.report.value
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn k_dependence_with<F>(n: usize, k: usize, eval: F) -> Result<KDependenceReport>
where
    F: Fn(&[usize]) -> Result<DependenceReport> + Sync,
{
    if k < 3 || k > n {
        return Err(invalid(format!("k must satisfy 3 <= k <= {n}, got {k}")));
    }
    let reports = subsets(n, k)
        .into_par_iter()
        .map(|s| eval(&s).map(|r| (s, r)))
        .collect::<Result<Vec<_>>>()?;
    let lowest = reports
        .iter()
        .map(|(_, r)| r.value)
        .fold(f64::INFINITY, f64::min);
    let (subset, report) = reports
        .into_iter()
        .find(|(_, r)| r.value <= lowest + TIE_TOL)
        .expect("at least one subset");
    Ok(KDependenceReport { k, subset, report })
}

pub fn k_dependence(rho: &DensityOperator, k: usize) -> Result<KDependenceReport> {
    let n = rho.num_parties();
    k_dependence_with(n, k, |s| {
        if s.len() == n {
            dependence(rho)
        } else {
            dependence(&rho.reduce(s)?)
        }
    })
}

pub fn k_dependence_pure(psi: &StateVector, k: usize) -> Result<KDependenceReport> {
    let n = psi.num_parties();
    k_dependence_with(n, k, |s| {
        if s.len() == n {
            dependence_pure(psi)
        } else {
            dependence(&psi.reduce(s)?)
        }
    })
}

pub fn k_dependence_classical(p: &ProbTensor, k: usize) -> Result<KDependenceReport> {
    let n = p.num_vars();
    k_dependence_with(n, k, |s| dependence_classical(&p.marginal(s)?))
}

/// `ln C(n, k)` as a sum of logs; `None` when `k` is outside `0..=n`.
fn ln_binomial(n: i64, k: i64) -> Option<f64> {
    if k < 0 || n < 0 || k > n {
        return None;
    }
    let k = k.min(n - k);
    Some((1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum())
}

/// Closed-form dependence (in bits) of the N-qubit Dicke state with `e` excitations:
///
/// `C(N,e)⁻¹ [ −2 C(N−1,e−1) log(e/N) − 2 C(N−1,e) log(1−e/N)
///   + C(N−2,e−2) log(C(N−2,e−2)/C(N,e)) + 2 C(N−2,e−1) log(2 C(N−2,e−1)/C(N,e))
///   + C(N−2,e) log(C(N−2,e)/C(N,e)) ]`.
///
/// Binomials are carried as logarithms so `N` in the thousands is fine.
pub fn dicke_dependence_analytic(n: usize, e: usize) -> Result<f64> {
    if n < 3 {
        return Err(invalid(format!("N must be at least 3, got {n}")));
    }
    if e == 0 || e >= n {
        return Err(invalid(format!("excitations must be in 1..={}, got {e}", n - 1)));
    }
    let (n, e) = (n as i64, e as i64);
    let ln_total = ln_binomial(n, e).expect("1 <= e < N");
    // C(a, b) / C(N, e), or zero when C(a, b) vanishes.
    let ratio = |a: i64, b: i64| ln_binomial(a, b).map_or(0.0, |l| (l - ln_total).exp());
    let xlogx = |weight: f64, arg: f64| if weight > 0.0 { weight * arg.log2() } else { 0.0 };
    let frac = e as f64 / n as f64;

    let mut sum = 0.0;
    sum -= 2.0 * xlogx(ratio(n - 1, e - 1), frac);
    sum -= 2.0 * xlogx(ratio(n - 1, e), 1.0 - frac);
    let r = ratio(n - 2, e - 2);
    sum += xlogx(r, r);
    let r = ratio(n - 2, e - 1);
    sum += 2.0 * xlogx(r, 2.0 * r);
    let r = ratio(n - 2, e);
    sum += xlogx(r, r);
    Ok(sum)
}
