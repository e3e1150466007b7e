//! Local CPTP maps in Kraus form, Choi states, and the experiments that probe how
//! conditional mutual information and dependence respond to local operations.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dependence::dependence;
use crate::error::{invalid, Error, Result};
use crate::info::{conditional_mutual_information, grouped_cmi, mutual_information};
use crate::matrix::{gaussian_matrix, max_abs_diff, seeded_rng, ComplexMatrix, C64, ONE, ZERO};
use crate::state::{digit_offsets, DensityOperator};

pub const TP_TOL: f64 = 1e-10;
pub const CHOI_MARGINAL_TOL: f64 = 1e-8;

/// CPTP map `ρ ↦ Σ K ρ K†` from dimension `d_in` to `d_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks shapes and `Σ K†K = I` within 1e-10.
    pub fn new(d_in: usize, d_out: usize, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus_ops.is_empty() {
            return Err(invalid("a channel needs at least one Kraus operator"));
        }
        if let Some(k) = kraus_ops.iter().find(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::Dimension(format!(
                "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                k.nrows(),
                k.ncols()
            )));
        }
        let ch = Self {
            d_in,
            d_out,
            kraus_ops,
        };
        let err = ch.trace_preservation_error();
        if err > TP_TOL {
            return Err(invalid(format!(
                "Kraus operators are not trace preserving (max |ΣK†K − I| = {err:e})"
            )));
        }
        Ok(ch)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn trace_preservation_error(&self) -> f64 {
        let sum = self
            .kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.d_in, self.d_in), |acc, k| {
                acc + k.adjoint() * k
            });
        max_abs_diff(&sum, &ComplexMatrix::identity(self.d_in, self.d_in))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            kraus_ops: vec![ComplexMatrix::identity(d, d)],
        }
    }

    /// Replaces the input by `I/d`: Kraus operators `|i⟩⟨j|/√d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let scale = 1.0 / (d as f64).sqrt();
        let kraus_ops = (0..d * d)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(k / d, k % d)] = C64::new(scale, 0.0);
                m
            })
            .collect();
        Self {
            d_in: d,
            d_out: d,
            kraus_ops,
        }
    }

    /// Amplitude damping with decay probability ½:
    /// `K₀ = [[0, 1/√2], [0, 0]]`, `K₁ = [[1, 0], [0, 1/√2]]`.
    pub fn amplitude_damping_half() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            d_in: 2,
            d_out: 2,
            kraus_ops: vec![
                ComplexMatrix::from_row_slice(2, 2, &[ZERO, s, ZERO, ZERO]),
                ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, s]),
            ],
        }
    }

    /// Action on a single `d_in`-dimensional operator.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.d_out, self.d_out), |acc, k| {
                acc + k * m * k.adjoint()
            })
    }
}

/// Seeded random channel from a Stinespring isometry: the Gaussian
/// `(d·r) × d` block matrix is orthonormalized by QR and cut into `r` Kraus blocks.
pub fn random_channel(d: usize, kraus_rank: usize, seed: u64) -> Result<KrausChannel> {
    if d < 2 {
        return Err(invalid(format!("dimension must be >= 2, got {d}")));
    }
    if kraus_rank == 0 || kraus_rank > d * d {
        return Err(invalid(format!(
            "Kraus rank must be in 1..={}, got {kraus_rank}",
            d * d
        )));
    }
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(d * kraus_rank, d, &mut rng);
    let q = g.qr().q();
    let kraus_ops = (0..kraus_rank)
        .map(|k| q.rows(k * d, d).into_owned())
        .collect();
    KrausChannel::new(d, d, kraus_ops)
}

/// `(K acting on party p) · m` for an operator over `num_parties` parties of dimension `d`.
fn apply_local_left(m: &ComplexMatrix, d: usize, num_parties: usize, party: usize, k: &ComplexMatrix) -> ComplexMatrix {
    let dims = vec![d; num_parties];
    let others: Vec<usize> = (0..num_parties).filter(|&p| p != party).collect();
    let party_off = digit_offsets(&dims, &[party]);
    let rest_off = digit_offsets(&dims, &others);
    let mut out = ComplexMatrix::zeros(m.nrows(), m.ncols());
    for col in 0..m.ncols() {
        for &base in &rest_off {
            for (r, &or) in party_off.iter().enumerate() {
                let mut acc = ZERO;
                for (s, &os) in party_off.iter().enumerate() {
                    let kv = k[(r, s)];
                    if kv != ZERO {
                        acc += kv * m[(base + os, col)];
                    }
                }
                out[(base + or, col)] = acc;
            }
        }
    }
    out
}

/// `Σ_K (I⊗K⊗I) ρ (I⊗K⊗I)†` with the channel on `party`.
pub fn apply_channel(rho: &DensityOperator, ch: &KrausChannel, party: usize) -> Result<DensityOperator> {
    let (n, d) = (rho.num_parties(), rho.local_dim());
    if party >= n {
        return Err(Error::PartyOutOfRange {
            index: party,
            num_parties: n,
        });
    }
    if ch.d_in != d || ch.d_out != d {
        return Err(Error::Dimension(format!(
            "channel maps {} -> {}, register has local dimension {d}",
            ch.d_in, ch.d_out
        )));
    }
    let mut acc = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for k in &ch.kraus_ops {
        let left = apply_local_left(rho.matrix(), d, n, party, k);
        acc += apply_local_left(&left.adjoint(), d, n, party, k).adjoint();
    }
    DensityOperator::new_unchecked(n, d, acc)
}

/// Local channels keyed by the party they act on.
pub type LocalChannels = BTreeMap<usize, KrausChannel>;

pub fn apply_local_channels(rho: &DensityOperator, channels: &LocalChannels) -> Result<DensityOperator> {
    channels
        .iter()
        .try_fold(rho.clone(), |acc, (&p, ch)| apply_channel(&acc, ch, p))
}

/// Choi state `(1/d_in) Σ_{ij} |i⟩⟨j| ⊗ map(|i⟩⟨j|)` of any linear map whose output
/// is an operator on `out_parties` parties of dimension `d_in`. The reference is
/// party 0 of the result. Positivity is not checked.
pub fn choi_of_map<F>(d_in: usize, out_parties: usize, map: F) -> Result<DensityOperator>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let out_dim = d_in.pow(out_parties as u32);
    let mut c = ComplexMatrix::zeros(d_in * out_dim, d_in * out_dim);
    for i in 0..d_in {
        for j in 0..d_in {
            let mut unit = ComplexMatrix::zeros(d_in, d_in);
            unit[(i, j)] = ONE;
            let image = map(&unit)?;
            if image.shape() != (out_dim, out_dim) {
                return Err(Error::Dimension(format!(
                    "map output is {}x{}, expected {out_dim}x{out_dim}",
                    image.nrows(),
                    image.ncols()
                )));
            }
            c.view_mut((i * out_dim, j * out_dim), (out_dim, out_dim))
                .copy_from(&image.unscale(d_in as f64));
        }
    }
    DensityOperator::new_unchecked(1 + out_parties, d_in, c)
}

/// Unit-trace Choi state `(I ⊗ ch)(|Φ⟩⟨Φ|)` on (reference, output).
pub fn choi(ch: &KrausChannel) -> Result<DensityOperator> {
    if ch.d_in != ch.d_out {
        return Err(Error::Dimension(
            "Choi states of dimension-changing channels are not uniform registers".into(),
        ));
    }
    choi_of_map(ch.d_in, 1, |m| Ok(ch.apply(m)))
}

/// Channel reconstructed from its Choi state: `ρ ↦ d_in · Tr_ref[(ρᵀ ⊗ I) c]`,
/// with the transpose in the computational basis.
#[derive(Debug, Clone)]
pub struct ChoiChannel {
    d_in: usize,
    out_parties: usize,
    choi: ComplexMatrix,
}

impl ChoiChannel {
    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn out_parties(&self) -> usize {
        self.out_parties
    }

    pub fn choi_matrix(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(Error::Dimension(format!(
                "input is {}x{}, channel expects {}x{}",
                rho.nrows(),
                rho.ncols(),
                self.d_in,
                self.d_in
            )));
        }
        let out_dim = self.choi.nrows() / self.d_in;
        let mut out = ComplexMatrix::zeros(out_dim, out_dim);
        for a in 0..self.d_in {
            for b in 0..self.d_in {
                let w = rho[(b, a)];
                if w == ZERO {
                    continue;
                }
                out += self
                    .choi
                    .view((b * out_dim, a * out_dim), (out_dim, out_dim))
                    .map(|z| z * w);
            }
        }
        Ok(out.scale(self.d_in as f64))
    }

    pub fn apply_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self.apply(rho.matrix())?;
        DensityOperator::new_unchecked(self.out_parties, self.d_in, out)
    }
}

/// Treats party 0 of `c` as the reference. Requires `Tr_out c = I/d_in` within 1e-8.
pub fn channel_from_choi(c: &DensityOperator) -> Result<ChoiChannel> {
    let n = c.num_parties();
    if n < 2 {
        return Err(invalid("a Choi state needs a reference and at least one output party"));
    }
    let d = c.local_dim();
    let reference = c.reduce(&[0])?;
    let err = max_abs_diff(
        reference.matrix(),
        &ComplexMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0)),
    );
    if err > CHOI_MARGINAL_TOL {
        return Err(invalid(format!(
            "reference marginal deviates from I/d by {err:e}; the map would not be trace preserving"
        )));
    }
    Ok(ChoiChannel {
        d_in: d,
        out_parties: n - 1,
        choi: c.matrix().clone(),
    })
}

/// Both sides of the bound
/// `I(X̄a:X̄b|X̄rest) ≤ I(a:b|rest) + I(ab:rest) − I(ab:X̄rest)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityRecord {
    pub cmi_before: f64,
    pub cmi_after: f64,
    /// `I(ab : rest)` before any channel.
    pub info_before: f64,
    /// `I(ab : rest)` after only the channels on `rest` have acted.
    pub info_after: f64,
    /// `(cmi_before + info_before − info_after) − cmi_after`, nonnegative when the bound holds.
    pub bound_slack: f64,
}

fn rest_of(n: usize, a: usize, b: usize) -> Vec<usize> {
    (0..n).filter(|&p| p != a && p != b).collect()
}

fn check_pair(n: usize, a: usize, b: usize) -> Result<()> {
    for p in [a, b] {
        if p >= n {
            return Err(Error::PartyOutOfRange {
                index: p,
                num_parties: n,
            });
        }
    }
    if a == b {
        return Err(invalid("the tracked pair needs two distinct parties"));
    }
    if n < 3 {
        return Err(invalid("need at least three parties"));
    }
    Ok(())
}

/// Evaluates the local-operation bound on the conditional mutual information of
/// the pair `(a, b)` given everyone else.
pub fn monotonicity_gap(
    rho: &DensityOperator,
    channels: &LocalChannels,
    a: usize,
    b: usize,
) -> Result<MonotonicityRecord> {
    let n = rho.num_parties();
    check_pair(n, a, b)?;
    let rest = rest_of(n, a, b);
    let on_rest: LocalChannels = channels
        .iter()
        .filter(|(p, _)| rest.contains(p))
        .map(|(&p, ch)| (p, ch.clone()))
        .collect();
    let rest_processed = apply_local_channels(rho, &on_rest)?;
    let all_processed = apply_local_channels(rho, channels)?;

    let cmi_before = conditional_mutual_information(rho, a, b, &rest)?;
    let cmi_after = conditional_mutual_information(&all_processed, a, b, &rest)?;
    let info_before = mutual_information(rho, &[a, b], &rest)?;
    let info_after = mutual_information(&rest_processed, &[a, b], &rest)?;
    Ok(MonotonicityRecord {
        cmi_before,
        cmi_after,
        info_before,
        info_after,
        bound_slack: cmi_before + info_before - info_after - cmi_after,
    })
}

/// The dependence counterpart: `D̄ ≤ D + I(X₁X₂:rest) − I(X₁X₂:X̄rest)` with
/// `(X₁, X₂)` the pair minimizing `D` before the channels act.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceBoundRecord {
    pub min_pair: (usize, usize),
    pub d_before: f64,
    pub d_after: f64,
    pub info_before: f64,
    pub info_after: f64,
    pub bound_slack: f64,
}

pub fn dependence_increase_bound(
    rho: &DensityOperator,
    channels: &LocalChannels,
) -> Result<DependenceBoundRecord> {
    let before = dependence(rho)?;
    let after = dependence(&apply_local_channels(rho, channels)?)?;
    let (a, b) = before.min_pair;
    let rest = rest_of(rho.num_parties(), a, b);
    let on_rest: LocalChannels = channels
        .iter()
        .filter(|(p, _)| rest.contains(p))
        .map(|(&p, ch)| (p, ch.clone()))
        .collect();
    let info_before = grouped_cmi(rho, &[a, b], &rest, &[])?;
    let info_after = grouped_cmi(&apply_local_channels(rho, &on_rest)?, &[a, b], &rest, &[])?;
    Ok(DependenceBoundRecord {
        min_pair: (a, b),
        d_before: before.value,
        d_after: after.value,
        info_before,
        info_after,
        bound_slack: before.value + info_before - info_after - after.value,
    })
}
