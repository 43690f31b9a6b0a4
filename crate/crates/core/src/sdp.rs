//! Analytic level-1 semidefinite primal/dual pair certifying the quantum
//! maximum of the Bell family.
//!
//! The primal maximizes `(1/2) Tr(Gamma W)` over positive-semidefinite Gram
//! matrices with unit diagonal, where `W` embeds the Bell matrix in its
//! off-diagonal blocks. The dual minimizes `sum(lambda)` subject to
//! `-(1/2) W + diag(lambda)` being positive semidefinite. For
//! `M_ij = 1 - (m/2) delta_ij` both sides evaluate in closed form to `m^2/2`:
//! the all-equal-vector Gram matrix on the primal side, `lambda = (m/4) 1` on
//! the dual side, with the slack spectrum bounded through the eigenvalues of
//! single-parameter structured matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{symmetric_eigenvalues, DenseRealMatrix};
use crate::seesaw::{bell_matrix, BellMatrix, VectorConfiguration};

/// Default absolute eigenvalue floor for feasibility checks here.
const PSD_EPS_DEFAULT: f64 = 1e-9;

/// Certificate pairing a feasible primal value with a dual candidate.
///
/// The primal side is always the value of the all-equal-vector Gram matrix,
/// which is feasible by construction; the dual side is valid exactly when
/// `min_eig_slack >= -psd_eps`. Serializes as
/// `{m, primal, dual, gap, min_eig_slack, lambda}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpCertificate {
    pub m: usize,
    #[serde(rename = "primal")]
    pub primal_value: f64,
    #[serde(rename = "dual")]
    pub dual_value: f64,
    pub gap: f64,
    pub min_eig_slack: f64,
    pub lambda: Vec<f64>,
}

impl SdpCertificate {
    /// A dual candidate certifies an upper bound only when the slack matrix
    /// is positive semidefinite within the floor.
    pub fn is_valid(&self, psd_eps: f64) -> bool {
        self.min_eig_slack >= -psd_eps
    }
}

/// `m x m` matrix with diagonal `p` and off-diagonal `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredMatrixSpec {
    pub m: usize,
    pub p: f64,
    pub q: f64,
}

impl StructuredMatrixSpec {
    /// Materialize the matrix (tests and oracles).
    pub fn build(&self) -> DenseRealMatrix {
        DMatrix::from_fn(self.m, self.m, |i, j| if i == j { self.p } else { self.q })
    }
}

/// Symmetric `2m x 2m` embedding `[[0, M], [M^T, 0]]`.
///
/// The transpose in the lower-left block keeps `W` symmetric for general
/// coefficient matrices; the Bell family is symmetric, so there both blocks
/// coincide.
pub fn build_w(m: &BellMatrix) -> DenseRealMatrix {
    let n = m.m();
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    w.view_mut((0, n), (n, n)).copy_from(m.entries());
    w.view_mut((n, 0), (n, n)).copy_from(&m.entries().transpose());
    w
}

/// `(1/2) Tr(Gamma W)` after checking primal feasibility of `Gamma`:
/// symmetric, unit diagonal within `1e-10`, minimum eigenvalue at least
/// `-psd_eps`.
pub fn primal_value(gamma: &DenseRealMatrix, w: &DenseRealMatrix, psd_eps: f64) -> Result<f64> {
    if gamma.nrows() != gamma.ncols() || gamma.shape() != w.shape() {
        return Err(Error::InfeasiblePoint(format!(
            "Gamma is {}x{}, W is {}x{}",
            gamma.nrows(),
            gamma.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    for i in 0..gamma.nrows() {
        if (gamma[(i, i)] - 1.0).abs() > 1e-10 {
            return Err(Error::InfeasiblePoint(format!(
                "diagonal entry {} deviates from 1 at index {i}",
                gamma[(i, i)]
            )));
        }
        for j in (i + 1)..gamma.ncols() {
            if (gamma[(i, j)] - gamma[(j, i)]).abs() > 1e-10 {
                return Err(Error::InfeasiblePoint(format!("Gamma not symmetric at ({i},{j})")));
            }
        }
    }
    let min_eig = symmetric_eigenvalues(gamma)?
        .first()
        .copied()
        .expect("nonempty spectrum");
    if min_eig < -psd_eps {
        return Err(Error::InfeasiblePoint(format!(
            "Gamma has eigenvalue {min_eig:e} below -{psd_eps:e}"
        )));
    }
    // W is symmetric, so Tr(Gamma W) is the entrywise inner product.
    Ok(0.5 * gamma.dot(w))
}

/// Gram matrix of the stacked `[a_1..a_m, b_1..b_m]` vectors; the natural
/// externally-computed primal point for cross-checks.
pub fn gram_from_configuration(c: &VectorConfiguration) -> DenseRealMatrix {
    let stacked: Vec<&nalgebra::DVector<f64>> =
        c.a_vectors.iter().chain(c.b_vectors.iter()).collect();
    let n = stacked.len();
    DMatrix::from_fn(n, n, |i, j| stacked[i].dot(stacked[j]))
}

/// Evaluate a dual candidate `lambda`: dual value `sum(lambda)`, slack
/// matrix `R = -(1/2) W + diag(lambda)` and its minimum eigenvalue.
///
/// An indefinite slack yields an invalid certificate, reported rather than
/// thrown; [`SdpCertificate::is_valid`] inspects it. The primal side is the
/// canonical all-equal-vector value `(1/2) sum(W)`.
pub fn dual_certificate(m: &BellMatrix, lambda: &[f64]) -> Result<SdpCertificate> {
    let n = m.m();
    if lambda.len() != 2 * n {
        return Err(Error::InvalidInput(format!(
            "lambda must have 2m = {} entries, got {}",
            2 * n,
            lambda.len()
        )));
    }
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidInput("lambda contains non-finite entries".into()));
    }
    let w = build_w(m);
    let mut slack = &w * -0.5;
    for (i, &l) in lambda.iter().enumerate() {
        slack[(i, i)] += l;
    }
    let min_eig_slack = symmetric_eigenvalues(&slack)?
        .first()
        .copied()
        .expect("nonempty spectrum");
    let dual_value: f64 = lambda.iter().sum();
    let primal_value = 0.5 * w.sum();
    Ok(SdpCertificate {
        m: n,
        primal_value,
        dual_value,
        gap: dual_value - primal_value,
        min_eig_slack,
        lambda: lambda.to_vec(),
    })
}

/// The closed-form certificate for the Bell family: `lambda = (m/4) 1`.
///
/// Verifies the eigenvalue chain behind it. The largest eigenvalue of `W` is
/// the largest singular value of the Bell matrix, `m/2` from the structured
/// spectrum, so the slack minimum eigenvalue is bounded below by
/// `-(1/2)(m/2) + m/4 = 0`. Both that bound and the zero duality gap are
/// re-checked numerically.
pub fn analytic_certificate(m: usize) -> Result<SdpCertificate> {
    let bell = bell_matrix(m)?;
    let lambda = vec![m as f64 / 4.0; 2 * m];
    let certificate = dual_certificate(&bell, &lambda)?;

    let spectrum = structured_eigenvalues(&StructuredMatrixSpec {
        m,
        p: 1.0 - m as f64 / 2.0,
        q: 1.0,
    });
    let gamma_max_w = spectrum.iter().fold(0.0_f64, |acc, &e| acc.max(e.abs()));
    let weyl_lower = -0.5 * gamma_max_w + m as f64 / 4.0;
    if certificate.min_eig_slack < weyl_lower - PSD_EPS_DEFAULT {
        return Err(Error::NumericalIntegrity(format!(
            "slack eigenvalue {:e} fell below the analytic bound {:e}",
            certificate.min_eig_slack, weyl_lower
        )));
    }
    if certificate.gap.abs() > PSD_EPS_DEFAULT {
        return Err(Error::NumericalIntegrity(format!(
            "primal/dual gap {:e} exceeds {PSD_EPS_DEFAULT:e}",
            certificate.gap
        )));
    }
    Ok(certificate)
}

/// Closed-form determinant `[p + (m-1) q] (p - q)^(m-1)`.
pub fn structured_determinant(spec: &StructuredMatrixSpec) -> f64 {
    (spec.p + (spec.m as f64 - 1.0) * spec.q) * (spec.p - spec.q).powi(spec.m as i32 - 1)
}

/// Closed-form spectrum: `p + (m-1) q` once and `p - q` with multiplicity
/// `m - 1`, in that order.
pub fn structured_eigenvalues(spec: &StructuredMatrixSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.m);
    out.push(spec.p + (spec.m as f64 - 1.0) * spec.q);
    out.extend(std::iter::repeat_n(spec.p - spec.q, spec.m.saturating_sub(1)));
    out
}
