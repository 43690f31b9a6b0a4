//! Explicit quantum realizations: anticommuting generator chains turning unit
//! vectors into `+-1`-valued observables, maximally entangled states, and
//! expectation evaluation on product observables.
//!
//! On the maximally entangled state `sum_k |kk> / sqrt(D)` the identity
//! `<psi| A (x) B^T |psi> = Tr(A B) / D` holds, so Bob-side observables are
//! stored transposed: generator orthogonality `Tr(g_i g_j) = D delta_ij` then
//! turns joint expectations directly into Euclidean dot products, and
//! tracelessness makes every marginal vanish.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Behavior, Scenario};
use crate::numerics::{hermitian_eigenvalues, kron_complex, DenseComplexMatrix};

/// Largest supported generator count; the joint space grows as `4^(n/2)`.
pub const MAX_VECTOR_DIMENSION: usize = 16;

/// Spectrum slack for classifying observables.
const SPECTRUM_EPS: f64 = 1e-10;

/// Whether an observable's spectrum is a subset of `{-1, +1}` or merely of
/// `[-1, +1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    Projective,
    PovmValued,
}

/// A Hermitian operator with spectrum in `[-1, 1]`, the observable of a
/// two-outcome measurement. `P = (I - A)/2` is the element associated with
/// the `-1` outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ObservableRepr", try_from = "ObservableRepr")]
pub struct Observable {
    matrix: DenseComplexMatrix,
    kind: ObservableKind,
}

impl Observable {
    /// Validate hermiticity and the spectrum, and classify the result.
    pub fn new(matrix: DenseComplexMatrix) -> Result<Self> {
        let spectrum = hermitian_eigenvalues(&matrix)?;
        let mut projective = true;
        for &e in &spectrum {
            if e.abs() > 1.0 + SPECTRUM_EPS {
                return Err(Error::InvalidInput(format!(
                    "observable eigenvalue {e} outside [-1, 1]"
                )));
            }
            if (e.abs() - 1.0).abs() > SPECTRUM_EPS {
                projective = false;
            }
        }
        let kind = if projective { ObservableKind::Projective } else { ObservableKind::PovmValued };
        Ok(Self { matrix, kind })
    }

    pub fn matrix(&self) -> &DenseComplexMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// POVM element `(I - A)/2` for the `-1` outcome; spectrum in `[0, 1]`.
    pub fn povm_element(&self) -> DenseComplexMatrix {
        let identity = DMatrix::identity(self.dim(), self.dim());
        (identity - &self.matrix) * Complex64::new(0.5, 0.0)
    }

    /// The transposed observable (entrywise conjugate of a Hermitian matrix),
    /// Hermitian with the same spectrum.
    pub fn transposed(&self) -> Self {
        Self { matrix: self.matrix.transpose(), kind: self.kind }
    }
}

#[derive(Serialize, Deserialize)]
struct ObservableRepr {
    kind: ObservableKind,
    dim: usize,
    /// Row-major, interleaved re/im.
    matrix: Vec<f64>,
}

impl From<Observable> for ObservableRepr {
    fn from(o: Observable) -> Self {
        let dim = o.dim();
        let mut matrix = Vec::with_capacity(2 * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                matrix.push(o.matrix[(i, j)].re);
                matrix.push(o.matrix[(i, j)].im);
            }
        }
        Self { kind: o.kind, dim, matrix }
    }
}

impl TryFrom<ObservableRepr> for Observable {
    type Error = Error;

    fn try_from(r: ObservableRepr) -> Result<Self> {
        if r.matrix.len() != 2 * r.dim * r.dim {
            return Err(Error::InvalidInput("observable payload length mismatch".into()));
        }
        let m = DMatrix::from_fn(r.dim, r.dim, |i, j| {
            let k = 2 * (i * r.dim + j);
            Complex64::new(r.matrix[k], r.matrix[k + 1])
        });
        Observable::new(m)
    }
}

/// A pure state on a product space together with both parties' observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "QuantumRealizationRepr", try_from = "QuantumRealizationRepr")]
pub struct QuantumRealization {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: DVector<Complex64>,
    pub alice_obs: Vec<Observable>,
    pub bob_obs: Vec<Observable>,
}

impl QuantumRealization {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        state: DVector<Complex64>,
        alice_obs: Vec<Observable>,
        bob_obs: Vec<Observable>,
    ) -> Result<Self> {
        if state.len() != dim_a * dim_b {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes, expected {}",
                state.len(),
                dim_a * dim_b
            )));
        }
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("state norm {norm} deviates from 1")));
        }
        if alice_obs.iter().any(|o| o.dim() != dim_a) || bob_obs.iter().any(|o| o.dim() != dim_b) {
            return Err(Error::InvalidInput("observable dimensions do not match their side".into()));
        }
        Ok(Self { dim_a, dim_b, state, alice_obs, bob_obs })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.alice_obs.len(), self.bob_obs.len())
    }
}

#[derive(Serialize, Deserialize)]
struct QuantumRealizationRepr {
    dim_a: usize,
    dim_b: usize,
    /// Interleaved re/im amplitudes.
    state: Vec<f64>,
    alice_obs: Vec<ObservableRepr>,
    bob_obs: Vec<ObservableRepr>,
}

impl From<QuantumRealization> for QuantumRealizationRepr {
    fn from(r: QuantumRealization) -> Self {
        let mut state = Vec::with_capacity(2 * r.state.len());
        for amp in r.state.iter() {
            state.push(amp.re);
            state.push(amp.im);
        }
        Self {
            dim_a: r.dim_a,
            dim_b: r.dim_b,
            state,
            alice_obs: r.alice_obs.into_iter().map(ObservableRepr::from).collect(),
            bob_obs: r.bob_obs.into_iter().map(ObservableRepr::from).collect(),
        }
    }
}

impl TryFrom<QuantumRealizationRepr> for QuantumRealization {
    type Error = Error;

    fn try_from(r: QuantumRealizationRepr) -> Result<Self> {
        if !r.state.len().is_multiple_of(2) {
            return Err(Error::InvalidInput("state payload must interleave re/im".into()));
        }
        let state = DVector::from_fn(r.state.len() / 2, |k, _| {
            Complex64::new(r.state[2 * k], r.state[2 * k + 1])
        });
        QuantumRealization::new(
            r.dim_a,
            r.dim_b,
            state,
            r.alice_obs.into_iter().map(Observable::try_from).collect::<Result<_>>()?,
            r.bob_obs.into_iter().map(Observable::try_from).collect::<Result<_>>()?,
        )
    }
}

fn pauli_x() -> DenseComplexMatrix {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
    ])
}

fn pauli_y() -> DenseComplexMatrix {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0),
    ])
}

fn pauli_z() -> DenseComplexMatrix {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0),
    ])
}

/// The standard single-qubit operators `(X, Y, Z)`.
pub fn pauli_basis() -> [DenseComplexMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `n` pairwise anticommuting Hermitian involutions on dimension
/// `2^ceil(n/2)`.
///
/// Pair `k` (1-based) contributes the X-like generator at index `2k-1` and
/// the Y-like one at index `2k`, each preceded by Z factors:
/// `Z^(k-1) (x) X (x) I...` and `Z^(k-1) (x) Y (x) I...`.
pub fn gamma_generators(n: usize) -> Result<Vec<DenseComplexMatrix>> {
    if n == 0 {
        return Err(Error::InvalidInput("generator count must be at least 1".into()));
    }
    if n > MAX_VECTOR_DIMENSION {
        return Err(Error::ResourceLimit(format!(
            "generator chains support n <= {MAX_VECTOR_DIMENSION}, got {n}"
        )));
    }
    let pairs = n.div_ceil(2);
    let mut generators = Vec::with_capacity(2 * pairs);
    for k in 0..pairs {
        for middle in [pauli_x(), pauli_y()] {
            let mut g = DMatrix::<Complex64>::identity(1, 1);
            for slot in 0..pairs {
                let factor = if slot < k {
                    pauli_z()
                } else if slot == k {
                    middle.clone()
                } else {
                    DMatrix::identity(2, 2)
                };
                g = kron_complex(&g, &factor);
            }
            generators.push(g);
        }
    }
    generators.truncate(n);
    Ok(generators)
}

/// `A(v) = sum_k v_k g_k`; an involution with spectrum `{-1, +1}` whenever
/// `v` is a unit vector.
pub fn observable_from_vector(v: &[f64], gammas: &[DenseComplexMatrix]) -> Result<Observable> {
    if v.len() != gammas.len() || v.is_empty() {
        return Err(Error::InvalidInput(format!(
            "vector has {} components for {} generators",
            v.len(),
            gammas.len()
        )));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("vector norm {norm} deviates from 1")));
    }
    let dim = gammas[0].nrows();
    let mut matrix = DMatrix::zeros(dim, dim);
    for (coeff, g) in v.iter().zip(gammas) {
        matrix += g * Complex64::new(*coeff, 0.0);
    }
    Observable::new(matrix)
}

/// `sum_k |kk> / sqrt(D)` on the `D x D` product space.
pub fn max_entangled_state(d: usize) -> Result<DVector<Complex64>> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("local dimension must be at least 2, got {d}")));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    Ok(DVector::from_fn(d * d, |idx, _| {
        if idx % d == idx / d { amp } else { Complex64::new(0.0, 0.0) }
    }))
}

/// `<psi| A (x) B |psi>` for Hermitian `A`, `B`; pass identities for
/// marginals.
///
/// Evaluated without materializing the product operator: with the state
/// reshaped row-major into `Psi`, the value is `sum conj(Psi) . (A Psi B^T)`.
/// A residual imaginary part beyond `1e-10` is an integrity error.
pub fn expectation(
    state: &DVector<Complex64>,
    a: &DenseComplexMatrix,
    b: &DenseComplexMatrix,
) -> Result<f64> {
    let (da, db) = (a.nrows(), b.nrows());
    if a.ncols() != da || b.ncols() != db {
        return Err(Error::InvalidInput("operators must be square".into()));
    }
    if state.len() != da * db {
        return Err(Error::InvalidInput(format!(
            "state has {} amplitudes, operators imply {}",
            state.len(),
            da * db
        )));
    }
    let psi = DMatrix::from_fn(da, db, |k, l| state[k * db + l]);
    let mapped = a * &psi * b.transpose();
    let value: Complex64 = psi.iter().zip(mapped.iter()).map(|(p, q)| p.conj() * q).sum();
    if value.im.abs() > 1e-10 {
        return Err(Error::NumericalIntegrity(format!(
            "expectation has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Realize prescribed dot products as quantum expectations: Alice measures
/// `A(a_i)`, Bob the transposed `A(b_j)`, on the maximally entangled state of
/// local dimension `2^ceil(n/2)`. Joint expectations equal `a_i . b_j` and
/// all marginals vanish.
pub fn realize_from_vectors(a_list: &[DVector<f64>], b_list: &[DVector<f64>]) -> Result<QuantumRealization> {
    if a_list.is_empty() || b_list.is_empty() {
        return Err(Error::InvalidInput("both vector lists must be nonempty".into()));
    }
    let n = a_list[0].len();
    if a_list.iter().chain(b_list).any(|v| v.len() != n) {
        return Err(Error::InvalidInput("vectors must share a common dimension".into()));
    }
    let gammas = gamma_generators(n)?;
    let dim = gammas[0].nrows();

    let alice_obs: Vec<Observable> = a_list
        .iter()
        .map(|v| observable_from_vector(v.as_slice(), &gammas))
        .collect::<Result<_>>()?;
    let bob_obs: Vec<Observable> = b_list
        .iter()
        .map(|v| Ok(observable_from_vector(v.as_slice(), &gammas)?.transposed()))
        .collect::<Result<_>>()?;

    QuantumRealization::new(dim, dim, max_entangled_state(dim)?, alice_obs, bob_obs)
}

/// The pinned CHSH-optimal qubit block: `A_1 = Z`, `A_2 = X`, Bob's
/// observables at `+-45` degrees between them, on the two-qubit maximally
/// entangled state. The four joints have magnitude `1/sqrt(2)` and the usual
/// alternating-sign combination reaches `2 sqrt(2)`.
pub fn chsh_realization() -> QuantumRealization {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let b1 = (pauli_z() + pauli_x()) * inv_sqrt2;
    let b2 = (pauli_z() - pauli_x()) * inv_sqrt2;
    let alice = vec![
        Observable::new(pauli_z()).expect("Pauli Z is projective"),
        Observable::new(pauli_x()).expect("Pauli X is projective"),
    ];
    let bob = vec![
        Observable::new(b1).expect("rotated observable is projective").transposed(),
        Observable::new(b2).expect("rotated observable is projective").transposed(),
    ];
    QuantumRealization::new(
        2,
        2,
        max_entangled_state(2).expect("two-dimensional state"),
        alice,
        bob,
    )
    .expect("static construction is valid")
}

/// Evaluate every marginal and joint of a realization.
pub fn behavior_of(r: &QuantumRealization) -> Result<Behavior> {
    let scenario = r.scenario()?;
    let id_a = DMatrix::identity(r.dim_a, r.dim_a);
    let id_b = DMatrix::identity(r.dim_b, r.dim_b);

    let a_marginals: Vec<f64> = r
        .alice_obs
        .iter()
        .map(|a| expectation(&r.state, a.matrix(), &id_b))
        .collect::<Result<_>>()?;
    let b_marginals: Vec<f64> = r
        .bob_obs
        .iter()
        .map(|b| expectation(&r.state, &id_a, b.matrix()))
        .collect::<Result<_>>()?;
    let joints: Vec<f64> = r
        .alice_obs
        .iter()
        .flat_map(|a| r.bob_obs.iter().map(move |b| (a, b)))
        .map(|(a, b)| expectation(&r.state, a.matrix(), b.matrix()))
        .collect::<Result<_>>()?;

    Behavior::new(scenario, a_marginals, b_marginals, joints)
}
