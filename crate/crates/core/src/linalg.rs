// SPDX-License-Identifier: Apache-2.0

//! Dense Hermitian calculus on `DMatrix<Complex64>`.
//!
//! Everything above this module works with a [`HermitianOperator`] and its
//! [`SpectralDecomposition`]; functions of operators are always evaluated as
//! `U f(Λ) U*` on the eigenbasis.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Correction size above which symmetrization logs a warning.
pub const HERMITIAN_WARN: f64 = 1e-12;
/// Relative deviation above which a matrix is rejected as non-Hermitian.
pub const HERMITIAN_REJECT: f64 = 1e-8;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { c(0.0) })
}

pub fn from_real(n: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(n, n, entries.iter().map(|&x| c(x)))
}

pub fn pauli_x() -> CMatrix {
    from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)])
}

pub fn pauli_z() -> CMatrix {
    from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// Kronecker product, left factor is the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn max_imag(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Real part of `tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn ensure_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// A Hermitian matrix. Construction symmetrizes to `(A + A*)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        ensure_square(&matrix)?;
        let deviation = hermitian_deviation(&matrix);
        let scale = max_abs(&matrix).max(1.0);
        if deviation > HERMITIAN_REJECT * scale {
            return Err(Error::NotHermitian { deviation });
        }
        if deviation > HERMITIAN_WARN {
            log::warn!("symmetrizing operator with correction {deviation:e}");
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Symmetrizes without checking. Used for results that are Hermitian in
    /// exact arithmetic.
    pub(crate) fn symmetrized(matrix: CMatrix) -> Self {
        let adj = matrix.adjoint();
        HermitianOperator((matrix + adj) * c(0.5))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        HermitianOperator(diag(values))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianOperator(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator(identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_real(&self, tol: f64) -> bool {
        max_imag(&self.0) <= tol
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator(&self.0 * c(factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianOperator(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianOperator(&self.0 - &other.0)
    }

    /// `i[A, B]`, Hermitian for Hermitian `A`, `B`.
    pub fn i_commutator(&self, other: &Self) -> Self {
        Self::symmetrized(commutator(&self.0, &other.0) * I)
    }

    /// Unitary conjugation `U A U*`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Self {
        Self::symmetrized(unitary * &self.0 * unitary.adjoint())
    }
}

/// Eigen-pairs of a Hermitian operator, eigenvalues ascending.
///
/// The reconstruction error `‖A − UΛU*‖_F / max(1, ‖A‖_F)` stays below `1e-10`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U*` for a complex-valued spectral function.
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fj = f(lambda);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * u.adjoint()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        HermitianOperator::symmetrized(self.apply_complex(|x| c(f(x))))
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.apply(|x| x)
    }

    pub fn reconstruction_error(&self, a: &HermitianOperator) -> f64 {
        frobenius(&(a.matrix() - self.reconstruct().matrix())) / frobenius(a.matrix()).max(1.0)
    }

    pub fn column(&self, j: usize) -> CMatrix {
        self.eigenvectors.columns(j, 1).into_owned()
    }
}

/// Eigendecomposition of a Hermitian operator.
pub fn eig(a: &HermitianOperator) -> SpectralDecomposition {
    let sym = SymmetricEigen::new(a.matrix().clone());
    let mut order: Vec<usize> = (0..sym.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| sym.eigenvalues[i].total_cmp(&sym.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let n = a.dim();
    let eigenvectors = CMatrix::from_fn(n, n, |r, k| sym.eigenvectors[(r, order[k])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigendecomposition of a raw matrix; rejects non-Hermitian input.
pub fn eig_matrix(a: &CMatrix) -> Result<SpectralDecomposition> {
    ensure_square(a)?;
    let deviation = hermitian_deviation(a);
    if deviation > HERMITIAN_WARN * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(eig(&HermitianOperator::symmetrized(a.clone())))
}

/// `f(A)` evaluated spectrally. Fails when `f` leaves the reals on the
/// spectrum (e.g. `log` or a fractional power of a non-positive eigenvalue).
pub fn matrix_function(a: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    let dec = eig(a);
    let mapped: Vec<f64> = dec.eigenvalues.iter().map(|&x| f(x)).collect();
    if let Some(pos) = mapped.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "spectral function undefined at eigenvalue {:e}",
            dec.eigenvalues[pos]
        )));
    }
    let spectral = SpectralDecomposition {
        eigenvalues: mapped,
        eigenvectors: dec.eigenvectors,
    };
    Ok(spectral.reconstruct())
}
