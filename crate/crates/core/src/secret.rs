//! Quantum secret sharing with (N−1)-uniform states: a qubit secret is spread over
//! `N` shares so that all `N` together recover it exactly while every proper
//! subset holds a maximally mixed marginal.
//!
//! The encoder is `E_N(ρ) = 2^{−N}(Tr ρ · I + s Σ_j Tr(σ_jᵀ ρ) σ_j^{⊗N})` with
//! `s = (−1)^{⌈N/2⌉}`. For odd `N` its Choi state is the `(N+1)`-qubit Smolin
//! state and the map is CPTP. For even `N` the three strings `σ_j^{⊗N}` commute,
//! and the output is Hermitian with unit trace but not positive for every
//! secret; [`SecretSharingScheme::produces_states`] reports which case applies.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::choi_of_map;
use crate::dependence::{dependence, subsets};
use crate::error::{invalid, Error, Result};
use crate::info::subsystem_entropy;
use crate::matrix::{hermitian_eigenvalues, max_abs_diff, ComplexMatrix, C64};
use crate::state::DensityOperator;
use crate::zoo::{Pauli, PauliString};

const MARGINAL_TOL: f64 = 1e-8;
pub const MAX_AUDIT_PARTIES: usize = 8;

const LETTERS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// `Tr(σᵀ m)`; only `σ_y` changes sign under transposition.
fn transposed_component(letter: Pauli, m: &ComplexMatrix) -> C64 {
    let c = (letter.matrix() * m).trace();
    if letter == Pauli::Y {
        -c
    } else {
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecretSharingScheme {
    num_shares: usize,
}

impl SecretSharingScheme {
    pub fn new(num_shares: usize) -> Result<Self> {
        if num_shares < 3 {
            return Err(invalid(format!("need at least 3 shares, got {num_shares}")));
        }
        if num_shares > 16 {
            return Err(invalid(format!("{num_shares} shares exceed the dense-matrix limit")));
        }
        Ok(Self { num_shares })
    }

    pub fn num_shares(&self) -> usize {
        self.num_shares
    }

    pub fn sign(&self) -> f64 {
        if self.num_shares.div_ceil(2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// True when every encoded secret is a positive operator (odd share counts).
    pub fn produces_states(&self) -> bool {
        self.num_shares % 2 == 1
    }

    /// The encoder as a linear map on arbitrary 2×2 operators.
    pub fn encode_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.shape() != (2, 2) {
            return Err(Error::Dimension("the secret must be a single qubit".into()));
        }
        let n = self.num_shares;
        let dim = 1usize << n;
        let id = ComplexMatrix::identity(dim, dim);
        let mut out = id.map(|z| z * m.trace());
        for letter in LETTERS {
            let w = transposed_component(letter, m) * self.sign();
            out += PauliString::uniform(letter, n).apply_left(&id).map(|z| z * w);
        }
        Ok(out.unscale(dim as f64))
    }

    /// Shares for a qubit secret. Not validated for positivity (see module docs).
    pub fn encode(&self, secret: &DensityOperator) -> Result<DensityOperator> {
        if secret.num_parties() != 1 || secret.local_dim() != 2 {
            return Err(Error::Dimension("the secret must be a single qubit".into()));
        }
        DensityOperator::new_unchecked(self.num_shares, 2, self.encode_matrix(secret.matrix())?)
    }

    /// Pauli readout `½(I + s Σ_j Tr(σ_j^{⊗N} ρ) σ_j)ᵀ`.
    pub fn decode(&self, shares: &DensityOperator) -> Result<DensityOperator> {
        if shares.num_parties() != self.num_shares || shares.local_dim() != 2 {
            return Err(Error::Dimension(format!(
                "expected {} qubit shares, got {} parties of dimension {}",
                self.num_shares,
                shares.num_parties(),
                shares.local_dim()
            )));
        }
        let mut out = ComplexMatrix::identity(2, 2);
        for letter in LETTERS {
            let r = PauliString::uniform(letter, self.num_shares).expectation(shares.matrix()) * self.sign();
            out += letter.matrix().map(|z| z * r);
        }
        DensityOperator::new_unchecked(1, 2, out.transpose().scale(0.5))
    }

    /// Choi state of the encoder on (reference, shares).
    pub fn choi(&self) -> Result<DensityOperator> {
        choi_of_map(2, self.num_shares, |m| self.encode_matrix(m))
    }
}

pub fn ss_encode(secret: &DensityOperator, num_shares: usize) -> Result<DensityOperator> {
    SecretSharingScheme::new(num_shares)?.encode(secret)
}

pub fn ss_decode(shares: &DensityOperator) -> Result<DensityOperator> {
    SecretSharingScheme::new(shares.num_parties())?.decode(shares)
}

/// `½‖a − b‖₁` for Hermitian operators of equal size.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension("operands differ in size".into()));
    }
    Ok(0.5 * hermitian_eigenvalues(&(a - b))?.iter().map(|x| x.abs()).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    /// Largest trace distance of a proper-subset marginal from `I/d^k`.
    pub worst_distance: f64,
    pub worst_subset: Vec<usize>,
}

/// Scans every non-empty proper subset of shares.
pub fn leakage_audit(shares: &DensityOperator) -> Result<LeakageReport> {
    let n = shares.num_parties();
    if n > MAX_AUDIT_PARTIES {
        return Err(invalid(format!(
            "leakage audit enumerates 2^N subsets; N = {n} exceeds {MAX_AUDIT_PARTIES}"
        )));
    }
    if n < 2 {
        return Err(invalid("need at least two shares"));
    }
    let all: Vec<Vec<usize>> = (1..n).flat_map(|k| subsets(n, k)).collect();
    let distances = all
        .par_iter()
        .map(|s| {
            let m = shares.reduce(s)?;
            let mixed = DensityOperator::maximally_mixed(s.len(), shares.local_dim())?;
            trace_distance(m.matrix(), mixed.matrix())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (idx, &worst) = distances
        .iter()
        .enumerate()
        .fold((0, &distances[0]), |best, cur| if *cur.1 > *best.1 + 1e-15 { cur } else { best });
    Ok(LeakageReport {
        worst_distance: worst,
        worst_subset: all[idx].clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateBoundReport {
    /// `D_{N+1}(ρ_c)`.
    pub dependence_value: f64,
    /// `−S(A|X₁…X_N) = S(X₁…X_N) − S(ρ_c)`, the coherent information at the Choi input.
    pub coherent_info: f64,
    /// `D_{N+1}(ρ_c) − 1`.
    pub lower_bound: f64,
    /// Whether every single-party marginal is maximally mixed within 1e-8. The
    /// bound chain assumes it; the numbers are reported either way.
    pub marginals_ok: bool,
}

/// Party 0 of `rho_c` is the reference system `A`.
pub fn rate_bound(rho_c: &DensityOperator) -> Result<RateBoundReport> {
    let n = rho_c.num_parties();
    if n < 3 {
        return Err(invalid("need the reference plus at least two shares"));
    }
    let d = rho_c.local_dim();
    let mixed = DensityOperator::maximally_mixed(1, d)?;
    let mut marginals_ok = true;
    for p in 0..n {
        if max_abs_diff(rho_c.reduce(&[p])?.matrix(), mixed.matrix()) > MARGINAL_TOL {
            marginals_ok = false;
        }
    }
    let dep = dependence(rho_c)?.value;
    let shares: Vec<usize> = (1..n).collect();
    let coherent_info = subsystem_entropy(rho_c, &shares)? - subsystem_entropy(rho_c, &(0..n).collect::<Vec<_>>())?;
    Ok(RateBoundReport {
        dependence_value: dep,
        coherent_info,
        lower_bound: dep - 1.0,
        marginals_ok,
    })
}
