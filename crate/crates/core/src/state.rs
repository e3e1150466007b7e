//! Multi-party registers: density operators, pure state vectors, and coarse-grained
//! party groupings.
//!
//! Every register has `N` parties of uniform local dimension `d`. Basis index
//! `x₁x₂…x_N` is stored at `Σ x_k d^{N-k}`: party 0 is the most significant digit.
//! Parties are indexed from 0 throughout the crate.

use nalgebra::DVector;

use crate::error::{invalid, Error, Result};
use crate::matrix::{
    gaussian_matrix, hermitian_eigenvalues, hermiticity_error, seeded_rng, trace, ComplexMatrix,
    C64, HERMITIAN_TOL, ZERO,
};

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-8;

pub(crate) fn register_dim(num_parties: usize, local_dim: usize) -> Result<usize> {
    if num_parties == 0 {
        return Err(invalid("register needs at least one party"));
    }
    if local_dim < 2 {
        return Err(invalid(format!("local dimension must be >= 2, got {local_dim}")));
    }
    local_dim
        .checked_pow(num_parties as u32)
        .ok_or_else(|| invalid("register dimension overflows"))
}

/// Flat offsets of every digit tuple over `parties`, enumerated with the first listed
/// party most significant. `dims` are the per-party dimensions of the full register.
pub(crate) fn digit_offsets(dims: &[usize], parties: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &p in parties {
        let mut next = Vec::with_capacity(offsets.len() * dims[p]);
        for &base in &offsets {
            for digit in 0..dims[p] {
                next.push(base + digit * strides[p]);
            }
        }
        offsets = next;
    }
    offsets
}

pub(crate) fn check_parties(parties: &[usize], num_parties: usize) -> Result<()> {
    let mut seen = vec![false; num_parties];
    for &p in parties {
        if p >= num_parties {
            return Err(Error::PartyOutOfRange {
                index: p,
                num_parties,
            });
        }
        if seen[p] {
            return Err(invalid(format!("party {p} listed twice")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Marginal on `keep` (in the listed order) of an operator over parties with `dims`.
pub(crate) fn reduce_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let kept_off = digit_offsets(dims, keep);
    let traced_off = digit_offsets(dims, &traced);
    let k = kept_off.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (c, &oc) in kept_off.iter().enumerate() {
        for (r, &or) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(or + t, oc + t)];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

fn complement(num_parties: usize, discard: &[usize]) -> Vec<usize> {
    (0..num_parties).filter(|p| !discard.contains(p)).collect()
}

/// Hermitian, positive semidefinite, unit-trace operator on `N` parties of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    num_parties: usize,
    local_dim: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validating constructor: Hermitian within 1e-10, unit trace within 1e-10 and
    /// smallest eigenvalue at least -1e-10.
    pub fn new(num_parties: usize, local_dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(num_parties, local_dim, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks the shape only. For operators that are valid by construction, or
    /// callers that opt out of validation.
    pub fn new_unchecked(
        num_parties: usize,
        local_dim: usize,
        matrix: ComplexMatrix,
    ) -> Result<Self> {
        let dim = register_dim(num_parties, local_dim)?;
        if matrix.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "{num_parties} parties of dimension {local_dim} need a {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            num_parties,
            local_dim,
            matrix,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_error(&self.matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&self.matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Trace(tr.re));
        }
        let smallest = hermitian_eigenvalues(&self.matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if smallest < -PSD_TOL {
            return Err(Error::NotPsd(smallest));
        }
        Ok(())
    }

    pub fn maximally_mixed(num_parties: usize, local_dim: usize) -> Result<Self> {
        let dim = register_dim(num_parties, local_dim)?;
        let m = ComplexMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Self::new_unchecked(num_parties, local_dim, m)
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let v = &psi.amplitudes;
        Self {
            num_parties: psi.num_parties,
            local_dim: psi.local_dim,
            matrix: v * v.adjoint(),
        }
    }

    /// Diagonal operator holding a probability vector (validated by the caller).
    pub(crate) fn diagonal(num_parties: usize, local_dim: usize, probs: &[f64]) -> Result<Self> {
        let m = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| C64::new(p, 0.0)),
        ));
        Self::new_unchecked(num_parties, local_dim, m)
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Traces out `discard`; the remaining parties keep their relative order.
    /// An empty `discard` returns a copy.
    pub fn partial_trace(&self, discard: &[usize]) -> Result<Self> {
        check_parties(discard, self.num_parties)?;
        if discard.len() == self.num_parties {
            return Err(Error::TraceAll);
        }
        self.reduce(&complement(self.num_parties, discard))
    }

    /// Marginal on `keep`, with output parties in the listed order.
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        check_parties(keep, self.num_parties)?;
        if keep.is_empty() {
            return Err(Error::TraceAll);
        }
        let dims = vec![self.local_dim; self.num_parties];
        Ok(Self {
            num_parties: keep.len(),
            local_dim: self.local_dim,
            matrix: reduce_matrix(&self.matrix, &dims, keep),
        })
    }

    /// Relabels parties: party `k` of the result is party `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.num_parties {
            return Err(invalid("permutation must list every party once"));
        }
        self.reduce(order)
    }

    /// `self ⊗ other`, with `other`'s parties appended after `self`'s.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::Dimension(format!(
                "local dimensions differ: {} vs {}",
                self.local_dim, other.local_dim
            )));
        }
        Ok(Self {
            num_parties: self.num_parties + other.num_parties,
            local_dim: self.local_dim,
            matrix: crate::matrix::kron(&self.matrix, &other.matrix),
        })
    }

    /// Appends one extra party in the product state `party_state`.
    pub fn append_product_party(&self, party_state: &DensityOperator) -> Result<Self> {
        if party_state.num_parties != 1 {
            return Err(invalid("appended party state must be single-party"));
        }
        self.tensor(party_state)
    }

    /// Reinterprets party `party` of dimension `d1·d2` as two adjacent parties of
    /// dimensions `d1` and `d2`. Only index bookkeeping changes. The result must
    /// still have uniform local dimension, which for a uniform register means a
    /// single party split into two equal halves; see [`GroupedState`] for the
    /// general case.
    pub fn split_subsystem(&self, party: usize, d1: usize, d2: usize) -> Result<Self> {
        if party >= self.num_parties {
            return Err(Error::PartyOutOfRange {
                index: party,
                num_parties: self.num_parties,
            });
        }
        if d1 * d2 != self.local_dim {
            return Err(Error::Dimension(format!(
                "party dimension {} is not {d1}·{d2}",
                self.local_dim
            )));
        }
        if d1 != d2 || self.num_parties != 1 {
            return Err(Error::Dimension(
                "split would produce a register with non-uniform local dimension".into(),
            ));
        }
        Self::new_unchecked(2, d1, self.matrix.clone())
    }

    /// Inverse of [`split_subsystem`](Self::split_subsystem) for a two-party register.
    pub fn merge_parties(&self) -> Result<Self> {
        if self.num_parties != 2 {
            return Err(Error::Dimension(
                "merge would produce a register with non-uniform local dimension".into(),
            ));
        }
        Self::new_unchecked(1, self.local_dim * self.local_dim, self.matrix.clone())
    }
}

/// Seeded random mixed state `GG†/Tr(GG†)` with `G` a complex Gaussian
/// `d^N × rank` matrix.
pub fn random_density(
    num_parties: usize,
    local_dim: usize,
    rank: usize,
    seed: u64,
) -> Result<DensityOperator> {
    let dim = register_dim(num_parties, local_dim)?;
    if rank == 0 || rank > dim {
        return Err(invalid(format!("rank must be in 1..={dim}, got {rank}")));
    }
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(dim, rank, &mut rng);
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    DensityOperator::new_unchecked(num_parties, local_dim, m.unscale(tr))
}

/// Seeded Haar-random pure state (normalized complex Gaussian vector).
pub fn random_state_vector(num_parties: usize, local_dim: usize, seed: u64) -> Result<StateVector> {
    let dim = register_dim(num_parties, local_dim)?;
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(dim, 1, &mut rng);
    StateVector::normalized(num_parties, local_dim, g.column(0).into_owned())
}

/// Normalized pure state of `N` parties of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_parties: usize,
    local_dim: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Rejects vectors whose norm is off by more than 1e-8.
    pub fn new(num_parties: usize, local_dim: usize, amplitudes: DVector<C64>) -> Result<Self> {
        let dim = register_dim(num_parties, local_dim)?;
        if amplitudes.len() != dim {
            return Err(Error::Dimension(format!(
                "expected {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            num_parties,
            local_dim,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` first. Fails on the zero vector.
    pub fn normalized(
        num_parties: usize,
        local_dim: usize,
        amplitudes: DVector<C64>,
    ) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(num_parties, local_dim, amplitudes.unscale(norm))
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    /// Marginal on `keep` computed straight from the amplitudes.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator> {
        check_parties(keep, self.num_parties)?;
        if keep.is_empty() {
            return Err(Error::TraceAll);
        }
        let dims = vec![self.local_dim; self.num_parties];
        let traced: Vec<usize> = complement(self.num_parties, keep);
        let kept_off = digit_offsets(&dims, keep);
        let traced_off = digit_offsets(&dims, &traced);
        let k = kept_off.len();
        let psi = &self.amplitudes;
        let mut m = ComplexMatrix::zeros(k, k);
        for (c, &oc) in kept_off.iter().enumerate() {
            for (r, &or) in kept_off.iter().enumerate().skip(c) {
                let mut acc = ZERO;
                for &t in &traced_off {
                    acc += psi[or + t] * psi[oc + t].conj();
                }
                m[(r, c)] = acc;
                m[(c, r)] = acc.conj();
            }
        }
        DensityOperator::new_unchecked(keep.len(), self.local_dim, m)
    }
}

/// A uniform-`d` register viewed with consecutive parties grouped into laboratories.
///
/// Group `g` holds `group_sizes[g]` consecutive fine parties and has dimension
/// `d^{group_sizes[g]}`. Entropies stay in base `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedState {
    fine: DensityOperator,
    group_sizes: Vec<usize>,
}

impl GroupedState {
    pub fn new(fine: DensityOperator, group_sizes: Vec<usize>) -> Result<Self> {
        if group_sizes.contains(&0) {
            return Err(invalid("empty party group"));
        }
        if group_sizes.iter().sum::<usize>() != fine.num_parties() {
            return Err(Error::Dimension(format!(
                "groups cover {} parties, register has {}",
                group_sizes.iter().sum::<usize>(),
                fine.num_parties()
            )));
        }
        Ok(Self { fine, group_sizes })
    }

    /// Every fine party in its own group.
    pub fn singletons(fine: DensityOperator) -> Self {
        let n = fine.num_parties();
        Self {
            fine,
            group_sizes: vec![1; n],
        }
    }

    pub fn fine(&self) -> &DensityOperator {
        &self.fine
    }

    pub fn num_parties(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    pub fn party_dim(&self, party: usize) -> usize {
        self.fine.local_dim().pow(self.group_sizes[party] as u32)
    }

    /// Fine parties belonging to grouped party `party`.
    pub fn members(&self, party: usize) -> std::ops::Range<usize> {
        let start: usize = self.group_sizes[..party].iter().sum();
        start..start + self.group_sizes[party]
    }

    /// Fine parties belonging to any of the grouped `parties`.
    pub fn fine_parties(&self, parties: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = parties.iter().flat_map(|&p| self.members(p)).collect();
        out.sort_unstable();
        out
    }

    /// Splits grouped party `party` of dimension `d1·d2` into two adjacent parties.
    pub fn split_subsystem(&self, party: usize, d1: usize, d2: usize) -> Result<Self> {
        if party >= self.num_parties() {
            return Err(Error::PartyOutOfRange {
                index: party,
                num_parties: self.num_parties(),
            });
        }
        let d = self.fine.local_dim();
        if d1 * d2 != self.party_dim(party) {
            return Err(Error::Dimension(format!(
                "party dimension {} is not {d1}·{d2}",
                self.party_dim(party)
            )));
        }
        let units = |x: usize| -> Option<usize> {
            let mut k = 0;
            let mut v = 1;
            while v < x {
                v *= d;
                k += 1;
            }
            (v == x && k > 0).then_some(k)
        };
        let (k1, k2) = match (units(d1), units(d2)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Dimension(format!(
                    "split dimensions {d1}, {d2} are not powers of the local dimension {d}"
                )))
            }
        };
        let mut sizes = self.group_sizes.clone();
        sizes.splice(party..=party, [k1, k2]);
        Ok(Self {
            fine: self.fine.clone(),
            group_sizes: sizes,
        })
    }

    /// Merges grouped parties `party` and `party + 1`.
    pub fn merge(&self, party: usize) -> Result<Self> {
        if party + 1 >= self.num_parties() {
            return Err(Error::PartyOutOfRange {
                index: party + 1,
                num_parties: self.num_parties(),
            });
        }
        let mut sizes = self.group_sizes.clone();
        let merged = sizes[party] + sizes[party + 1];
        sizes.splice(party..=party + 1, [merged]);
        Ok(Self {
            fine: self.fine.clone(),
            group_sizes: sizes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, max_abs_diff, ONE};

    fn bell() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = DVector::from_vec(vec![
            C64::new(s, 0.0),
            ZERO,
            ZERO,
            C64::new(s, 0.0),
        ]);
        StateVector::new(2, 2, amps).unwrap()
    }

    /// Direct digit-by-digit partial trace used as an oracle.
    fn naive_trace_out(rho: &DensityOperator, traced: usize) -> ComplexMatrix {
        let n = rho.num_parties();
        let d = rho.local_dim();
        let digits = |mut x: usize| {
            let mut v = vec![0; n];
            for k in (0..n).rev() {
                v[k] = x % d;
                x /= d;
            }
            v
        };
        let k = d.pow(n as u32 - 1);
        let mut out = ComplexMatrix::zeros(k, k);
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                let (dr, dc) = (digits(r), digits(c));
                if dr[traced] != dc[traced] {
                    continue;
                }
                let fold = |v: &[usize]| {
                    v.iter()
                        .enumerate()
                        .filter(|(p, _)| *p != traced)
                        .fold(0, |acc, (_, &x)| acc * d + x)
                };
                out[(fold(&dr), fold(&dc))] += rho.matrix()[(r, c)];
            }
        }
        out
    }

    #[test]
    fn trace_of_product_recovers_factor() {
        let a = random_density(1, 3, 2, 1).unwrap();
        let b = random_density(1, 3, 3, 2).unwrap();
        let ab = a.tensor(&b).unwrap();
        let back = ab.partial_trace(&[1]).unwrap();
        assert!(max_abs_diff(back.matrix(), a.matrix()) < 1e-14);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell().to_density();
        let m = rho.partial_trace(&[0]).unwrap();
        let half = DensityOperator::maximally_mixed(1, 2).unwrap();
        assert!(max_abs_diff(m.matrix(), half.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_matches_naive_oracle() {
        for seed in 0..5 {
            let rho = random_density(3, 2, 8, seed).unwrap();
            let fast = rho.partial_trace(&[1]).unwrap();
            assert!(max_abs_diff(fast.matrix(), &naive_trace_out(&rho, 1)) < 1e-14);
        }
        let rho = random_density(3, 3, 5, 9).unwrap();
        for p in 0..3 {
            let fast = rho.partial_trace(&[p]).unwrap();
            assert!(max_abs_diff(fast.matrix(), &naive_trace_out(&rho, p)) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_empty_discard_copies() {
        let rho = random_density(2, 2, 2, 3).unwrap();
        assert_eq!(rho.partial_trace(&[]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = random_density(2, 2, 2, 3).unwrap();
        assert!(matches!(
            rho.partial_trace(&[2]),
            Err(Error::PartyOutOfRange { index: 2, .. })
        ));
        assert!(matches!(rho.partial_trace(&[0, 1]), Err(Error::TraceAll)));
    }

    #[test]
    fn nested_partial_traces_compose() {
        for seed in 0..10 {
            let rho = random_density(4, 2, 16, seed).unwrap();
            // Trace {1} then, in the reindexed 3-party state, old party 3 is now 2.
            let stepwise = rho.partial_trace(&[1]).unwrap().partial_trace(&[2]).unwrap();
            let direct = rho.partial_trace(&[1, 3]).unwrap();
            assert!(max_abs_diff(stepwise.matrix(), direct.matrix()) < 1e-14);
            assert!((trace(direct.matrix()).re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn permute_then_reduce_agrees_with_reduce_in_order() {
        let rho = random_density(3, 2, 4, 8).unwrap();
        let p = rho.permute(&[2, 0, 1]).unwrap();
        let a = p.reduce(&[0, 1]).unwrap();
        let b = rho.reduce(&[2, 0]).unwrap();
        assert_eq!(a, b);
        // Relabelling keeps the state valid and is invertible.
        let back = p.permute(&[1, 2, 0]).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn pure_reduce_matches_density_reduce() {
        let mut rng = seeded_rng(4);
        let g = gaussian_matrix(27, 1, &mut rng);
        let psi = StateVector::normalized(3, 3, g.column(0).into_owned()).unwrap();
        let rho = psi.to_density();
        for keep in [vec![0], vec![2], vec![0, 2], vec![1, 2]] {
            let a = psi.reduce(&keep).unwrap();
            let b = rho.reduce(&keep).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
        }
    }

    #[test]
    fn state_vector_rejects_unnormalized() {
        let amps = DVector::from_vec(vec![ONE, ONE]);
        assert!(matches!(
            StateVector::new(1, 2, amps),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn validation_catches_each_defect() {
        let i2 = ComplexMatrix::identity(2, 2);
        assert!(matches!(
            DensityOperator::new(1, 2, i2.clone()),
            Err(Error::Trace(_))
        ));
        let skew = ComplexMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(1, 2, skew),
            Err(Error::NotHermitian(_))
        ));
        let neg = ComplexMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)]);
        assert!(matches!(DensityOperator::new(1, 2, neg), Err(Error::NotPsd(_))));
        assert!(matches!(
            DensityOperator::new(2, 2, i2),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn random_density_is_seeded_and_valid() {
        let a = random_density(2, 2, 1, 77).unwrap();
        let b = random_density(2, 2, 1, 77).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        let c = random_density(2, 2, 1, 78).unwrap();
        assert_ne!(a, c);
        assert!(random_density(2, 2, 0, 1).is_err());
        assert!(random_density(2, 2, 5, 1).is_err());
    }

    #[test]
    fn full_rank_random_states_are_psd() {
        for seed in 0..1000 {
            let rho = random_density(2, 2, 4, seed).unwrap();
            let smallest = *rho.eigenvalues().unwrap().last().unwrap();
            assert!(smallest >= -1e-10, "seed {seed}: {smallest}");
        }
    }

    #[test]
    fn density_eigenvalues_lie_in_unit_interval() {
        for seed in 0..50 {
            let rho = random_density(3, 2, 1 + (seed as usize % 8), seed).unwrap();
            let vals = rho.eigenvalues().unwrap();
            assert!(vals.iter().all(|&v| (-1e-10..=1.0 + 1e-10).contains(&v)));
            assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn split_single_ququart_into_qubits() {
        let mixed = DensityOperator::maximally_mixed(1, 4).unwrap();
        let split = mixed.split_subsystem(0, 2, 2).unwrap();
        assert_eq!(split.num_parties(), 2);
        assert_eq!(split.local_dim(), 2);
        assert_eq!(split, DensityOperator::maximally_mixed(2, 2).unwrap());
        assert_eq!(split.merge_parties().unwrap(), mixed);
    }

    #[test]
    fn split_rejects_bad_shapes() {
        let mixed = DensityOperator::maximally_mixed(1, 4).unwrap();
        assert!(matches!(
            mixed.split_subsystem(0, 2, 3),
            Err(Error::Dimension(_))
        ));
        let pair = DensityOperator::maximally_mixed(2, 4).unwrap();
        assert!(matches!(
            pair.split_subsystem(1, 2, 2),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn grouped_split_and_merge_round_trip() {
        let rho = random_density(4, 2, 3, 12).unwrap();
        let grouped = GroupedState::new(rho.clone(), vec![1, 1, 2]).unwrap();
        assert_eq!(grouped.party_dim(2), 4);
        let split = grouped.split_subsystem(2, 2, 2).unwrap();
        assert_eq!(split.group_sizes(), &[1, 1, 1, 1]);
        assert_eq!(split.fine().matrix(), rho.matrix());
        assert_eq!(split.merge(2).unwrap(), grouped);
        assert!(grouped.split_subsystem(2, 4, 1).is_err());
        assert!(grouped.split_subsystem(0, 2, 2).is_err());
    }

    #[test]
    fn tensor_with_identity_factor_layout() {
        let a = random_density(1, 2, 2, 1).unwrap();
        let b = DensityOperator::maximally_mixed(1, 2).unwrap();
        let ab = a.append_product_party(&b).unwrap();
        assert_eq!(ab.matrix(), &kron(a.matrix(), b.matrix()));
    }
}
