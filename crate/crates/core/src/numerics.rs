//! Dense matrix utilities shared by the other modules: rank with a relative
//! tolerance, Hermitian eigenvalues, Kronecker products and factorization of a
//! Gram matrix back into vectors.
//!
//! Everything here is a pure function over [`DenseRealMatrix`] /
//! [`DenseComplexMatrix`]; matrices stay dense and desk-sized.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix (row/column counts plus finite entries).
pub type DenseRealMatrix = DMatrix<f64>;

/// Dense complex matrix.
pub type DenseComplexMatrix = DMatrix<Complex64>;

/// Entrywise tolerance used when checking that a matrix is Hermitian.
pub const HERMITIAN_EPS: f64 = 1e-12;

/// Numerical thresholds shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative singular-value threshold for rank decisions.
    pub rank_eps: f64,
    /// Absolute eigenvalue floor for positive-semidefiniteness checks.
    pub psd_eps: f64,
    /// Absolute value-increase threshold for see-saw convergence.
    pub conv_eps: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_eps: 1e-8,
            psd_eps: 1e-9,
            conv_eps: 1e-10,
        }
    }
}

impl ToleranceConfig {
    /// Tighter thresholds for verification runs.
    pub fn strict() -> Self {
        Self {
            rank_eps: 1e-10,
            psd_eps: 1e-11,
            conv_eps: 1e-13,
        }
    }

    /// All thresholds must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("rank_eps", self.rank_eps),
            ("psd_eps", self.psd_eps),
            ("conv_eps", self.conv_eps),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must be strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

fn ensure_finite_real(m: &DenseRealMatrix, what: &str) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} contains non-finite entries")));
    }
    Ok(())
}

/// Number of singular values exceeding `eps` times the largest singular value.
///
/// The all-zero matrix has rank 0. The threshold is relative so the answer is
/// invariant under rescaling the whole matrix.
pub fn rank_with_tolerance(m: &DenseRealMatrix, eps: f64) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidInput("rank of an empty matrix is undefined".into()));
    }
    ensure_finite_real(m, "rank input")?;
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > eps * top).count())
}

/// Ascending eigenvalues of a Hermitian matrix.
///
/// The input must be square and Hermitian entrywise within
/// [`HERMITIAN_EPS`]; anything else is rejected rather than symmetrized.
pub fn hermitian_eigenvalues(m: &DenseComplexMatrix) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidInput(format!(
            "hermitian_eigenvalues needs a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::InvalidInput("matrix contains non-finite entries".into()));
    }
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > HERMITIAN_EPS {
                return Err(Error::InvalidInput(format!(
                    "matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {dev:e}"
                )));
            }
        }
    }
    let mut eigenvalues: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(eigenvalues)
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DenseRealMatrix) -> Result<Vec<f64>> {
    check_square_symmetric(m, 1e-10)?;
    let mut eigenvalues: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(eigenvalues)
}

fn check_square_symmetric(m: &DenseRealMatrix, eps: f64) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidInput(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite_real(m, "symmetric matrix")?;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > eps {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Kronecker (tensor) product of two real matrices.
pub fn kron(a: &DenseRealMatrix, b: &DenseRealMatrix) -> DenseRealMatrix {
    a.kronecker(b)
}

/// Kronecker (tensor) product of two complex matrices.
pub fn kron_complex(a: &DenseComplexMatrix, b: &DenseComplexMatrix) -> DenseComplexMatrix {
    a.kronecker(b)
}

/// Factor a positive-semidefinite `G` into vectors with `v_i . v_j = G_ij`.
///
/// Eigenvalues in `[-eps, 0)` are clipped to zero; anything below `-eps`
/// is an error, not a repair. The returned vectors live in dimension
/// `G.nrows()`, with `v_i` given by row `i` of `U sqrt(L)`.
pub fn gram_factorize(g: &DenseRealMatrix, eps: f64) -> Result<Vec<DVector<f64>>> {
    check_square_symmetric(g, 1e-10)?;
    let eigen = g.clone().symmetric_eigen();
    let min_eig = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -eps {
        return Err(Error::NotPsd { min_eig, eps });
    }
    let n = g.nrows();
    let sqrt_eig: Vec<f64> = eigen
        .eigenvalues
        .iter()
        .map(|&l| if l < 0.0 { 0.0 } else { l.sqrt() })
        .collect();
    let u = eigen.eigenvectors;
    Ok((0..n)
        .map(|i| DVector::from_fn(n, |k, _| u[(i, k)] * sqrt_eig[k]))
        .collect())
}
