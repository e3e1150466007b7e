//! Constructors for the reference states and distributions: GHZ, Dicke, graph and
//! stabilizer states, Weyl–Heisenberg (N−1)-uniform mixed states, generalized
//! Smolin states, the correlation-free ρ_nc mixture, and small classical presets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{invalid, Error, Result};
use crate::info::ProbTensor;
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::state::{register_dim, DensityOperator, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_row_slice(2, 2, &entries)
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn has_z(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// `P|b⟩ = factor(b) |b ⊕ flips⟩`.
    fn factor(self, bit: usize) -> C64 {
        match (self, bit) {
            (Pauli::I | Pauli::X, _) => ONE,
            (Pauli::Y, 0) => C64::new(0.0, 1.0),
            (Pauli::Y, _) => C64::new(0.0, -1.0),
            (Pauli::Z, 0) => ONE,
            (Pauli::Z, _) => -ONE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub fn value(self) -> C64 {
        match self {
            Phase::PlusOne => ONE,
            Phase::MinusOne => -ONE,
            Phase::PlusI => C64::new(0.0, 1.0),
            Phase::MinusI => C64::new(0.0, -1.0),
        }
    }
}

/// Signed tensor word over {I, X, Y, Z} acting on qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub phase: Phase,
    pub letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Self {
        Self { phase, letters }
    }

    /// The same letter on every one of `n` qubits.
    pub fn uniform(letter: Pauli, n: usize) -> Self {
        Self::new(Phase::PlusOne, vec![letter; n])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_hermitian(&self) -> bool {
        matches!(self.phase, Phase::PlusOne | Phase::MinusOne)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    /// Binary symplectic representation `(x | z)`.
    fn symplectic(&self) -> Vec<bool> {
        let x = self.letters.iter().map(|p| p.flips());
        let z = self.letters.iter().map(|p| p.has_z());
        x.chain(z).collect()
    }

    fn flip_mask(&self) -> usize {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (k, _)| m | 1 << (n - 1 - k))
    }

    /// `P|x⟩ = coefficient(x) |x ⊕ flip_mask⟩`.
    fn coefficient(&self, x: usize) -> C64 {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .fold(self.phase.value(), |acc, (k, p)| acc * p.factor((x >> (n - 1 - k)) & 1))
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        self.apply_left(&ComplexMatrix::identity(1 << self.len(), 1 << self.len()))
    }

    /// `P · m` in `O(4^n)` using the monomial structure of Pauli strings.
    pub fn apply_left(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let dim = 1usize << self.len();
        assert_eq!(m.nrows(), dim, "Pauli string and matrix sizes differ");
        let mask = self.flip_mask();
        let mut out = ComplexMatrix::zeros(dim, m.ncols());
        for x in 0..dim {
            let c = self.coefficient(x);
            let target = x ^ mask;
            for col in 0..m.ncols() {
                out[(target, col)] = c * m[(x, col)];
            }
        }
        out
    }

    /// `Tr(P ρ)`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> C64 {
        let dim = 1usize << self.len();
        let mask = self.flip_mask();
        (0..dim)
            .map(|x| self.coefficient(x) * rho[(x, x ^ mask)])
            .sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            Phase::PlusOne => "+",
            Phase::MinusOne => "-",
            Phase::PlusI => "+i",
            Phase::MinusI => "-i",
        };
        f.write_str(sign)?;
        for p in &self.letters {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional sign prefix `+`, `-`, `+i`, `-i` (or `i`) followed by letters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::PlusOne, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(invalid(format!("unknown Pauli letter '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(invalid("empty Pauli string"));
        }
        Ok(Self::new(phase, letters))
    }
}

fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let pivot_row = rows[rank].clone();
                rows[r].iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= *b);
            }
        }
        rank += 1;
    }
    rank
}

/// Normalized projector onto the joint +1 eigenspace of `generators`:
/// `ρ = 2^{m−N} Π_i (I + G_i)/2`, of rank `2^{N−m}`. An empty list needs `n`.
pub fn stabilizer_state(n: usize, generators: &[PauliString]) -> Result<DensityOperator> {
    let dim = register_dim(n, 2)?;
    if let Some(g) = generators.iter().find(|g| g.len() != n) {
        return Err(invalid(format!("generator {g} does not act on {n} qubits")));
    }
    if let Some(g) = generators.iter().find(|g| !g.is_hermitian()) {
        return Err(invalid(format!("generator {g} has a non-real phase")));
    }
    if generators.len() > n {
        return Err(invalid("more generators than qubits"));
    }
    for (a, ga) in generators.iter().enumerate() {
        for gb in &generators[a + 1..] {
            if !ga.commutes_with(gb) {
                return Err(invalid(format!("generators {ga} and {gb} anticommute")));
            }
        }
    }
    let rank = gf2_rank(generators.iter().map(PauliString::symplectic).collect());
    if rank < generators.len() {
        return Err(invalid("generators are not independent"));
    }
    let mut m = ComplexMatrix::identity(dim, dim);
    for g in generators {
        m = (&m + g.apply_left(&m)).scale(0.5);
    }
    let free = (n - generators.len()) as i32;
    DensityOperator::new_unchecked(n, 2, m.scale(0.5f64.powi(free)))
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a},{b}) leaves the {n}-vertex graph")));
            }
            if a == b {
                return Err(invalid(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(invalid(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self { n, edges })
    }

    /// Linear cluster `0 - 1 - ... - n−1`.
    pub fn path(n: usize) -> Self {
        Self {
            n,
            edges: (1..n).map(|k| (k - 1, k)).collect(),
        }
    }

    /// Ring cluster: the path closed by `(n−1, 0)`.
    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.edges.push((n - 1, 0));
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Canonical generators `X_a Π_{b ~ a} Z_b`.
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n)
            .map(|a| {
                let mut letters = vec![Pauli::I; self.n];
                letters[a] = Pauli::X;
                for &(u, v) in &self.edges {
                    if u == a {
                        letters[v] = Pauli::Z;
                    } else if v == a {
                        letters[u] = Pauli::Z;
                    }
                }
                PauliString::new(Phase::PlusOne, letters)
            })
            .collect()
    }
}

/// `|+⟩^{⊗N}` followed by controlled-Z on every edge.
pub fn graph_state(g: &GraphSpec) -> Result<StateVector> {
    let n = g.n;
    if n < 2 {
        return Err(invalid("graph states need at least two qubits"));
    }
    let dim = register_dim(n, 2)?;
    let amp = 1.0 / (dim as f64).sqrt();
    let bit = |x: usize, v: usize| (x >> (n - 1 - v)) & 1;
    let amps = (0..dim)
        .map(|x| {
            let parity = g.edges.iter().filter(|&&(a, b)| bit(x, a) & bit(x, b) == 1).count();
            C64::new(if parity % 2 == 0 { amp } else { -amp }, 0.0)
        })
        .collect();
    StateVector::new(n, 2, DVector::from_vec(amps))
}

/// `(|0…0⟩ + |1…1⟩ + … + |d−1…d−1⟩)/√d`.
pub fn ghz(n: usize, d: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(invalid("GHZ states need at least two parties"));
    }
    let dim = register_dim(n, d)?;
    let step = (dim - 1) / (d - 1);
    let mut amps = DVector::from_element(dim, ZERO);
    for k in 0..d {
        amps[k * step] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    StateVector::new(n, d, amps)
}

/// Equal superposition of all `C(N, e)` N-qubit kets of Hamming weight `e`.
pub fn dicke(n: usize, e: usize) -> Result<StateVector> {
    if e == 0 || e >= n {
        return Err(invalid(format!(
            "Dicke excitations must be in 1..={}, got {e}",
            n.saturating_sub(1)
        )));
    }
    let dim = register_dim(n, 2)?;
    let amps = (0..dim)
        .map(|x| if x.count_ones() as usize == e { ONE } else { ZERO })
        .collect();
    StateVector::normalized(n, 2, DVector::from_vec(amps))
}

pub fn w_state(n: usize) -> Result<StateVector> {
    dicke(n, 1)
}

/// `ρ = d^{−N} Σ_{i,j} (X^{⊗N})^i (Z^{⊗N})^j` with `X = Σ|k⟩⟨k+1|` and
/// `Z = Σ ω^k |k⟩⟨k|`, `ω = e^{2πi/d}`. Requires `d | N` so the two generators
/// commute.
pub fn kuniform_mixed(n: usize, d: usize) -> Result<DensityOperator> {
    if n < 3 {
        return Err(invalid(format!("need N >= 3, got {n}")));
    }
    if !n.is_multiple_of(d) {
        return Err(invalid(format!("N = {n} is not a multiple of d = {d}")));
    }
    let dim = register_dim(n, d)?;
    let digits = |mut x: usize| {
        let mut v = vec![0usize; n];
        for k in (0..n).rev() {
            v[k] = x % d;
            x /= d;
        }
        v
    };
    let fold = |v: &[usize]| v.iter().fold(0, |acc, &x| acc * d + x);
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        let x = digits(row);
        for shift in 0..d {
            // X^shift maps column digits y = x + shift onto row x.
            let y: Vec<usize> = x.iter().map(|&xk| (xk + shift) % d).collect();
            let col = fold(&y);
            let weight: usize = y.iter().sum();
            for power in 0..d {
                m[(row, col)] += omega(power * weight);
            }
        }
    }
    DensityOperator::new_unchecked(n, d, m.unscale(dim as f64))
}

/// Generalized Smolin state `2^{−N}(σ₀^{⊗N} + (−1)^{N/2} Σ_j σ_j^{⊗N})`, N even.
pub fn smolin(n: usize) -> Result<DensityOperator> {
    if n % 2 == 1 || n < 4 {
        return Err(invalid(format!("Smolin states need even N >= 4, got {n}")));
    }
    let dim = register_dim(n, 2)?;
    let sign = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let id = ComplexMatrix::identity(dim, dim);
    let mut m = id.clone();
    for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
        m += PauliString::uniform(letter, n).apply_left(&id).scale(sign);
    }
    DensityOperator::new_unchecked(n, 2, m.unscale(dim as f64))
}

/// `½|D_N¹⟩⟨D_N¹| + ½|D_N^{N−1}⟩⟨D_N^{N−1}|`.
pub fn nc_state(n: usize) -> Result<DensityOperator> {
    if n < 3 {
        return Err(invalid(format!("need N >= 3, got {n}")));
    }
    let low = dicke(n, 1)?.to_density();
    let high = dicke(n, n - 1)?.to_density();
    DensityOperator::new_unchecked(n, 2, (low.matrix() + high.matrix()).scale(0.5))
}

/// Stabilizers of the five-qubit code (cyclic shifts of XZZXI).
pub fn five_qubit_code() -> Vec<PauliString> {
    ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
        .iter()
        .map(|s| s.parse().expect("static generator"))
        .collect()
}

/// Stabilizer generators of the qubit AME states with `n ∈ {5, 6}` parties.
///
/// `n = 5`: the five-qubit code plus the logical `XXXXX`, a 2-uniform pure state.
/// `n = 6`: the code with a sixth qubit maximally entangled to its logical qubit
/// (`XXXXX X`, `ZZZZZ Z`), a 3-uniform pure state.
pub fn ame_generators(n: usize) -> Result<Vec<PauliString>> {
    let mut gens = five_qubit_code();
    match n {
        5 => gens.push("XXXXX".parse()?),
        6 => {
            for g in &mut gens {
                g.letters.push(Pauli::I);
            }
            gens.push("XXXXXX".parse()?);
            gens.push("ZZZZZZ".parse()?);
        }
        _ => return Err(invalid(format!("no AME({n},2) preset; use 5 or 6"))),
    }
    Ok(gens)
}

pub fn ame_state(n: usize) -> Result<DensityOperator> {
    stabilizer_state(n, &ame_generators(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalPreset {
    /// `P(000) = P(111) = 1/2`.
    PSame,
    /// `P(000) = P(110) = P(101) = P(011) = 1/4`.
    PEven,
    /// `P(000) = 1/2, P(101) = P(110) = 1/8, P(111) = 1/4`.
    AdExample,
}

impl ClassicalPreset {
    pub fn distribution(self) -> ProbTensor {
        let mut p = vec![0.0; 8];
        match self {
            ClassicalPreset::PSame => {
                p[0b000] = 0.5;
                p[0b111] = 0.5;
            }
            ClassicalPreset::PEven => {
                for x in [0b000, 0b110, 0b101, 0b011] {
                    p[x] = 0.25;
                }
            }
            ClassicalPreset::AdExample => {
                p[0b000] = 0.5;
                p[0b101] = 0.125;
                p[0b110] = 0.125;
                p[0b111] = 0.25;
            }
        }
        ProbTensor::new(3, 2, p).expect("exact preset")
    }
}

impl FromStr for ClassicalPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "p_same" | "psame" | "same" => Ok(Self::PSame),
            "p_even" | "peven" | "even" => Ok(Self::PEven),
            "ad_example" | "adexample" | "ad" => Ok(Self::AdExample),
            _ => Err(invalid(format!("unknown classical preset '{s}'"))),
        }
    }
}

pub fn classical_preset(name: &str) -> Result<ProbTensor> {
    Ok(name.parse::<ClassicalPreset>()?.distribution())
}
