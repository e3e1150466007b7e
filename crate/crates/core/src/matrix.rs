//! Dense complex matrices and the Hermitian eigensolver that feeds every entropy.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Hermiticity tolerance shared by validation and the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Kronecker product with `(a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for j in 0..ca {
        for i in 0..ra {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for l in 0..cb {
                for k in 0..rb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of matrices, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1, 1), |acc, f| kron(&acc, f))
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entrywise modulus of `a - b`. Shapes must agree.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Spectral decomposition `M = V Λ V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    /// Real eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let lambda = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(self.eigenvalues[i], 0.0)
            } else {
                ZERO
            }
        });
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let err = hermiticity_error(m);
    if err > HERMITIAN_TOL {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Symmetrize away the sub-tolerance anti-Hermitian noise before decomposing.
fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigDecomposition> {
    check_hermitian(m)?;
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.nrows();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, sorted descending. Cheaper than [`hermitian_eig`].
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// The PRNG behind every seeded operation: ChaCha with 8 rounds, seeded from a `u64`.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries (real and imaginary parts ~ N(0,1)).
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> ComplexMatrix {
    // Column-major fill order is part of the reproducibility contract.
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4, 4));
    }

    #[test]
    fn kron_sigma_x_is_antidiagonal() {
        let xx = kron(&sigma_x(), &sigma_x());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(xx[(i, j)], expected, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn kron_matches_four_index_loop() {
        let mut rng = seeded_rng(11);
        let a = gaussian_matrix(2, 2, &mut rng);
        let b = gaussian_matrix(2, 2, &mut rng);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(2 * i + p, 2 * j + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = seeded_rng(5);
        for _ in 0..10 {
            let a = gaussian_matrix(2, 3, &mut rng);
            let b = gaussian_matrix(3, 2, &mut rng);
            let c = gaussian_matrix(2, 2, &mut rng);
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            assert!(max_abs_diff(&left, &right) <= 1e-12);
        }
    }

    #[test]
    fn eig_of_simple_matrices() {
        let half = ComplexMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        let vals = hermitian_eig(&half).unwrap().eigenvalues;
        assert!((vals[0] - 0.5).abs() < 1e-15 && (vals[1] - 0.5).abs() < 1e-15);

        let vals = hermitian_eig(&sigma_x()).unwrap().eigenvalues;
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn random_hermitian_trace_and_reconstruction() {
        let mut rng = seeded_rng(42);
        for _ in 0..20 {
            let g = gaussian_matrix(8, 8, &mut rng);
            let h = &g + g.adjoint();
            let eig = hermitian_eig(&h).unwrap();
            let sum: f64 = eig.eigenvalues.iter().sum();
            assert!((sum - trace(&h).re).abs() <= 1e-10);
            assert!(max_abs_diff(&eig.reconstruct(), &h) <= 1e-9);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let only = hermitian_eigenvalues(&h).unwrap();
            for (a, b) in only.iter().zip(&eig.eigenvalues) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = seeded_rng(3);
        let g = gaussian_matrix(6, 6, &mut rng);
        let h = &g * g.adjoint();
        let a = hermitian_eig(&h).unwrap();
        let b = hermitian_eig(&h).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }
}
