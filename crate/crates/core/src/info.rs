//! Shannon and von Neumann entropies and the mutual informations built from them.
//!
//! All quantities are in dits: logarithms are taken in base `d`, the local
//! dimension of the register.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::matrix::seeded_rng;
use crate::state::{check_parties, digit_offsets, register_dim, DensityOperator, PSD_TOL};

pub const PROB_SUM_TOL: f64 = 1e-12;

/// Joint distribution of `N` variables with `d` outcomes each, indexed like a
/// register basis (variable 0 is the most significant digit).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTensor {
    num_vars: usize,
    local_dim: usize,
    probs: Vec<f64>,
}

impl ProbTensor {
    pub fn new(num_vars: usize, local_dim: usize, probs: Vec<f64>) -> Result<Self> {
        let dim = register_dim(num_vars, local_dim)?;
        if probs.len() != dim {
            return Err(Error::Dimension(format!(
                "expected {dim} probabilities, got {}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "entry {bad} is not a nonnegative number"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}"
            )));
        }
        Ok(Self {
            num_vars,
            local_dim,
            probs,
        })
    }

    /// Renormalizes nonnegative weights to a distribution.
    pub fn from_weights(num_vars: usize, local_dim: usize, mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Self::new(num_vars, local_dim, weights)
    }

    pub fn uniform(num_vars: usize, local_dim: usize) -> Result<Self> {
        let dim = register_dim(num_vars, local_dim)?;
        Self::new(num_vars, local_dim, vec![1.0 / dim as f64; dim])
    }

    /// Seeded sample from the flat Dirichlet distribution over outcome tables.
    pub fn random(num_vars: usize, local_dim: usize, seed: u64) -> Result<Self> {
        let dim = register_dim(num_vars, local_dim)?;
        let mut rng = seeded_rng(seed);
        let weights = (0..dim)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        Self::from_weights(num_vars, local_dim, weights)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of the outcome tuple `digits`.
    pub fn prob(&self, digits: &[usize]) -> f64 {
        let idx = digits.iter().fold(0, |acc, &x| acc * self.local_dim + x);
        self.probs[idx]
    }

    /// Marginal on `keep` (in the listed order).
    pub fn marginal(&self, keep: &[usize]) -> Result<ProbTensor> {
        check_parties(keep, self.num_vars)?;
        if keep.is_empty() {
            return Err(Error::TraceAll);
        }
        Ok(Self {
            num_vars: keep.len(),
            local_dim: self.local_dim,
            probs: self.marginal_probs(keep),
        })
    }

    fn marginal_probs(&self, keep: &[usize]) -> Vec<f64> {
        let dims = vec![self.local_dim; self.num_vars];
        let traced: Vec<usize> = (0..self.num_vars).filter(|v| !keep.contains(v)).collect();
        let traced_off = digit_offsets(&dims, &traced);
        digit_offsets(&dims, keep)
            .into_iter()
            .map(|k| traced_off.iter().map(|&t| self.probs[k + t]).sum())
            .collect()
    }

    /// The distribution as a diagonal density operator.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::diagonal(self.num_vars, self.local_dim, &self.probs)
            .expect("shape checked at construction")
    }
}

/// `-Σ p log_d p` with `0 log 0 = 0`.
pub fn entropy_of(probs: &[f64], base: usize) -> f64 {
    let ln_d = (base as f64).ln();
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
        / ln_d
}

/// Entropy of a density-operator spectrum. Eigenvalues in `[-1e-10, 0)` count as
/// zero; anything more negative is rejected.
pub fn spectral_entropy(eigenvalues: &[f64], base: usize) -> Result<f64> {
    if let Some(&bad) = eigenvalues.iter().find(|&&v| v < -PSD_TOL) {
        return Err(Error::NotPsd(bad));
    }
    Ok(entropy_of(eigenvalues, base).max(0.0))
}

pub fn shannon_entropy(p: &ProbTensor) -> f64 {
    entropy_of(&p.probs, p.local_dim).max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    spectral_entropy(&rho.eigenvalues()?, rho.local_dim())
}

/// Entropy of the marginal on `parties`; zero for the empty set.
pub fn subsystem_entropy(rho: &DensityOperator, parties: &[usize]) -> Result<f64> {
    if parties.is_empty() {
        return Ok(0.0);
    }
    if parties.len() == rho.num_parties() {
        check_parties(parties, rho.num_parties())?;
        return von_neumann_entropy(rho);
    }
    let mut sorted = parties.to_vec();
    sorted.sort_unstable();
    von_neumann_entropy(&rho.reduce(&sorted)?)
}

pub fn classical_subsystem_entropy(p: &ProbTensor, vars: &[usize]) -> Result<f64> {
    if vars.is_empty() {
        return Ok(0.0);
    }
    check_parties(vars, p.num_vars)?;
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    Ok(entropy_of(&p.marginal_probs(&sorted), p.local_dim).max(0.0))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u
}

fn check_groups(a: &[usize], b: &[usize], c: &[usize], num_parties: usize) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("both sides of the information must be non-empty"));
    }
    let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    check_parties(&all, num_parties).map_err(|e| match e {
        Error::InvalidArgument(_) => invalid("party groups overlap"),
        other => other,
    })
}

/// `I(A:B|C) = S(AC) + S(BC) - S(C) - S(ABC)` from any subset-entropy oracle.
fn grouped_cmi_with(
    a: &[usize],
    b: &[usize],
    c: &[usize],
    mut entropy: impl FnMut(&[usize]) -> Result<f64>,
) -> Result<f64> {
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    Ok(entropy(&ac)? + entropy(&bc)? - entropy(c)? - entropy(&abc)?)
}

/// `I(A:B) = S(A) + S(B) - S(AB)`; parties outside `A ∪ B` are traced out.
pub fn mutual_information(rho: &DensityOperator, a: &[usize], b: &[usize]) -> Result<f64> {
    grouped_cmi(rho, a, b, &[])
}

/// Conditional mutual information `I(A:B|C)` between groups of parties.
pub fn grouped_cmi(rho: &DensityOperator, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    check_groups(a, b, c, rho.num_parties())?;
    grouped_cmi_with(a, b, c, |s| subsystem_entropy(rho, s))
}

/// `I(a:b|cond)` for single parties `a`, `b`.
pub fn conditional_mutual_information(
    rho: &DensityOperator,
    a: usize,
    b: usize,
    cond: &[usize],
) -> Result<f64> {
    grouped_cmi(rho, &[a], &[b], cond)
}

pub fn classical_mutual_information(p: &ProbTensor, a: &[usize], b: &[usize]) -> Result<f64> {
    classical_grouped_cmi(p, a, b, &[])
}

pub fn classical_grouped_cmi(p: &ProbTensor, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    check_groups(a, b, c, p.num_vars)?;
    grouped_cmi_with(a, b, c, |s| classical_subsystem_entropy(p, s))
}

/// `I(X_a:X_b|X_cond)` computed from Shannon entropies of marginals.
pub fn classical_cmi(p: &ProbTensor, a: usize, b: usize, cond: &[usize]) -> Result<f64> {
    classical_grouped_cmi(p, &[a], &[b], cond)
}
