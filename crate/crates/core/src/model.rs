//! Behaviors, deterministic strategies, convex mixtures and the correlation
//! matrix layout, plus the balanced-mixture witness point.
//!
//! A behavior collects the marginal and joint expectation values of an
//! `(m_a, m_b)` scenario with two-outcome measurements. Arranged into the
//! `(m_a+1) x (m_b+1)` correlation matrix (corner 1, marginal borders, joint
//! interior), its rank bounds the local Hilbert-space dimension needed to
//! reproduce it; see [`crate::witness`].
//!
//! The witness point mixes all balanced deterministic strategies (half of
//! Alice's outcomes `+1`, Bob anti-correlated) with the two constant
//! strategies. Its closed form has zero marginals, diagonal joints `2/m - 1`
//! and off-diagonal joints `2/m`, and its correlation matrix has full rank
//! `m + 1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseRealMatrix;

/// Slack admitted when validating that expectation values sit in `[-1, 1]`.
const RANGE_SLACK: f64 = 1e-9;

/// Weight bookkeeping tolerance for convex combinations.
const WEIGHT_EPS: f64 = 1e-12;

/// Largest setting count for which balanced strategies are enumerated.
/// `binomial(24, 12)` strategies would already need gigabytes.
pub const MAX_ENUMERATION_SETTINGS: usize = 20;

/// Number of two-outcome settings per party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub m_a: usize,
    pub m_b: usize,
}

impl Scenario {
    pub fn new(m_a: usize, m_b: usize) -> Result<Self> {
        if m_a == 0 || m_b == 0 {
            return Err(Error::InvalidInput(
                "a scenario needs at least one setting per party".into(),
            ));
        }
        Ok(Self { m_a, m_b })
    }

    /// Same setting count on both sides.
    pub fn square(m: usize) -> Result<Self> {
        Self::new(m, m)
    }
}

/// Marginal and joint expectation values of one scenario.
///
/// Serializes as `{m_a, m_b, a_marginals, b_marginals, joints}` with the
/// joints in row-major order (Alice index major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    #[serde(flatten)]
    pub scenario: Scenario,
    pub a_marginals: Vec<f64>,
    pub b_marginals: Vec<f64>,
    pub joints: Vec<f64>,
}

impl Behavior {
    pub fn new(
        scenario: Scenario,
        a_marginals: Vec<f64>,
        b_marginals: Vec<f64>,
        joints: Vec<f64>,
    ) -> Result<Self> {
        let behavior = Self { scenario, a_marginals, b_marginals, joints };
        behavior.validate()?;
        Ok(behavior)
    }

    /// All-zero behavior of the given scenario.
    pub fn zero(scenario: Scenario) -> Self {
        Self {
            scenario,
            a_marginals: vec![0.0; scenario.m_a],
            b_marginals: vec![0.0; scenario.m_b],
            joints: vec![0.0; scenario.m_a * scenario.m_b],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a_marginals.len() != self.scenario.m_a
            || self.b_marginals.len() != self.scenario.m_b
            || self.joints.len() != self.scenario.m_a * self.scenario.m_b
        {
            return Err(Error::InvalidInput("behavior component lengths do not match the scenario".into()));
        }
        for &v in self.a_marginals.iter().chain(&self.b_marginals).chain(&self.joints) {
            if !v.is_finite() || v.abs() > 1.0 + RANGE_SLACK {
                return Err(Error::InvalidInput(format!(
                    "expectation value {v} outside [-1, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Joint expectation for Alice setting `i` and Bob setting `j` (0-based).
    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.joints[i * self.scenario.m_b + j]
    }

    /// Correlation-matrix arrangement of this behavior.
    pub fn correlation_matrix(&self) -> CorrelationMatrix {
        CorrelationMatrix::from_behavior(self)
    }
}

/// The `(m_a+1) x (m_b+1)` arrangement with corner 1, marginal borders and
/// joint interior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "CorrelationMatrixRepr", try_from = "CorrelationMatrixRepr")]
pub struct CorrelationMatrix {
    entries: DenseRealMatrix,
}

impl CorrelationMatrix {
    pub fn from_behavior(b: &Behavior) -> Self {
        let (m_a, m_b) = (b.scenario.m_a, b.scenario.m_b);
        let entries = DMatrix::from_fn(m_a + 1, m_b + 1, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (0, j) => b.b_marginals[j - 1],
            (i, 0) => b.a_marginals[i - 1],
            (i, j) => b.joint(i - 1, j - 1),
        });
        Self { entries }
    }

    /// Wrap an explicit matrix; the corner must be 1 and entries in `[-1, 1]`.
    pub fn new(entries: DenseRealMatrix) -> Result<Self> {
        if entries.nrows() < 2 || entries.ncols() < 2 {
            return Err(Error::InvalidInput("correlation matrix needs at least 2x2 entries".into()));
        }
        if (entries[(0, 0)] - 1.0).abs() > RANGE_SLACK {
            return Err(Error::InvalidInput("correlation matrix corner entry must be 1".into()));
        }
        if entries.iter().any(|&v| !v.is_finite() || v.abs() > 1.0 + RANGE_SLACK) {
            return Err(Error::InvalidInput("correlation matrix entries must lie in [-1, 1]".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DenseRealMatrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Setting counts `(m_a, m_b)` implied by the matrix shape.
    pub fn settings(&self) -> (usize, usize) {
        (self.entries.nrows() - 1, self.entries.ncols() - 1)
    }

    /// Recover the behavior stored in the borders and interior.
    pub fn to_behavior(&self) -> Result<Behavior> {
        let (m_a, m_b) = self.settings();
        Behavior::new(
            Scenario::new(m_a, m_b)?,
            (1..=m_a).map(|i| self.entries[(i, 0)]).collect(),
            (1..=m_b).map(|j| self.entries[(0, j)]).collect(),
            (1..=m_a)
                .flat_map(|i| (1..=m_b).map(move |j| self.entries[(i, j)]))
                .collect(),
        )
    }

    /// Largest entrywise absolute difference between two matrices.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.entries.shape(), other.entries.shape(), "shape mismatch");
        (&self.entries - &other.entries).amax()
    }

    /// Rows as plain vectors (used by serialization).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.entries.nrows())
            .map(|i| (0..self.entries.ncols()).map(|j| self.entries[(i, j)]).collect())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CorrelationMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl From<CorrelationMatrix> for CorrelationMatrixRepr {
    fn from(m: CorrelationMatrix) -> Self {
        Self {
            rows: m.entries.nrows(),
            cols: m.entries.ncols(),
            entries: m.rows(),
        }
    }
}

impl TryFrom<CorrelationMatrixRepr> for CorrelationMatrix {
    type Error = Error;

    fn try_from(r: CorrelationMatrixRepr) -> Result<Self> {
        if r.entries.len() != r.rows || r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(Error::InvalidInput("correlation matrix shape mismatch".into()));
        }
        let entries = DMatrix::from_fn(r.rows, r.cols, |i, j| r.entries[i][j]);
        CorrelationMatrix::new(entries)
    }
}

/// One deterministic assignment of outcomes, `+1` or `-1` per setting.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a_outcomes: Vec<i8>,
    pub b_outcomes: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn new(a_outcomes: Vec<i8>, b_outcomes: Vec<i8>) -> Result<Self> {
        if a_outcomes.is_empty() || b_outcomes.is_empty() {
            return Err(Error::InvalidInput("a strategy needs at least one setting per party".into()));
        }
        if a_outcomes.iter().chain(&b_outcomes).any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("strategy outcomes must be exactly +1 or -1".into()));
        }
        Ok(Self { a_outcomes, b_outcomes })
    }

    /// Constant `+1` strategy with `m` settings per party.
    pub fn all_plus(m: usize) -> Result<Self> {
        Self::new(vec![1; m], vec![1; m])
    }

    /// Constant `-1` strategy with `m` settings per party.
    pub fn all_minus(m: usize) -> Result<Self> {
        Self::new(vec![-1; m], vec![-1; m])
    }

    /// The strategy with every outcome sign flipped.
    pub fn flipped(&self) -> Self {
        Self {
            a_outcomes: self.a_outcomes.iter().map(|s| -s).collect(),
            b_outcomes: self.b_outcomes.iter().map(|s| -s).collect(),
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            m_a: self.a_outcomes.len(),
            m_b: self.b_outcomes.len(),
        }
    }
}

/// Weighted set of deterministic strategies with weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCombination {
    pub terms: Vec<(f64, DeterministicStrategy)>,
}

impl ConvexCombination {
    pub fn new(terms: Vec<(f64, DeterministicStrategy)>) -> Result<Self> {
        let combination = Self { terms };
        combination.validate()?;
        Ok(combination)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidCombination("no terms".into()));
        }
        let scenario = self.terms[0].1.scenario();
        let mut total = 0.0;
        for (w, s) in &self.terms {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidCombination(format!("negative or non-finite weight {w}")));
            }
            if s.scenario() != scenario {
                return Err(Error::InvalidCombination("strategies with mismatched setting counts".into()));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_EPS {
            return Err(Error::InvalidCombination(format!(
                "weights sum to {total}, expected 1 within {WEIGHT_EPS:e}"
            )));
        }
        Ok(())
    }
}

/// Behavior of a single deterministic strategy: marginals are the outcomes
/// themselves, joints are the sign products.
pub fn behavior_from_strategy(s: &DeterministicStrategy) -> Behavior {
    let scenario = s.scenario();
    Behavior {
        scenario,
        a_marginals: s.a_outcomes.iter().map(|&x| f64::from(x)).collect(),
        b_marginals: s.b_outcomes.iter().map(|&x| f64::from(x)).collect(),
        joints: s
            .a_outcomes
            .iter()
            .flat_map(|&a| s.b_outcomes.iter().map(move |&b| f64::from(a * b)))
            .collect(),
    }
}

/// Correlation matrix of a behavior. Thin wrapper kept for symmetry with the
/// other module-level operations.
pub fn to_matrix(b: &Behavior) -> CorrelationMatrix {
    CorrelationMatrix::from_behavior(b)
}

/// Entrywise weighted average of the strategies' behaviors.
///
/// Terms sharing a weight are accumulated with integer sign counts before a
/// single multiplication, so exactly cancelling terms produce exact zeros.
pub fn mix(c: &ConvexCombination) -> Result<Behavior> {
    c.validate()?;
    let scenario = c.terms[0].1.scenario();

    // Group term indices by bit-identical weight.
    let mut groups: BTreeMap<u64, Vec<&DeterministicStrategy>> = BTreeMap::new();
    for (w, s) in &c.terms {
        groups.entry(w.to_bits()).or_default().push(s);
    }

    let sum_over = |signed: &dyn Fn(&DeterministicStrategy) -> i64| -> f64 {
        groups
            .iter()
            .map(|(bits, members)| {
                let net: i64 = members.iter().map(|s| signed(s)).sum();
                f64::from_bits(*bits) * net as f64
            })
            .sum()
    };

    let a_marginals: Vec<f64> = (0..scenario.m_a)
        .map(|i| sum_over(&|s| i64::from(s.a_outcomes[i])))
        .collect();
    let b_marginals: Vec<f64> = (0..scenario.m_b)
        .map(|j| sum_over(&|s| i64::from(s.b_outcomes[j])))
        .collect();
    let joints: Vec<f64> = (0..scenario.m_a)
        .flat_map(|i| {
            (0..scenario.m_b).map(move |j| (i, j))
        })
        .map(|(i, j)| sum_over(&|s| i64::from(s.a_outcomes[i] * s.b_outcomes[j])))
        .collect();

    Behavior::new(scenario, a_marginals, b_marginals, joints)
}

/// All strategies with exactly `m/2` of Alice's outcomes `+1` and Bob
/// anti-correlated (`b_i = -a_i`), in lexicographic order of the Alice
/// pattern with `+1` ordered before `-1`.
pub fn enumerate_balanced_strategies(m: usize) -> Result<Vec<DeterministicStrategy>> {
    require_even(m)?;
    if m > MAX_ENUMERATION_SETTINGS {
        return Err(Error::ResourceLimit(format!(
            "balanced-strategy enumeration supports m <= {MAX_ENUMERATION_SETTINGS}, got {m}"
        )));
    }
    let half = m / 2;
    let mut out = Vec::with_capacity(binomial(m as u64, half as u64) as usize);
    let mut pattern: Vec<i8> = Vec::with_capacity(m);
    fill_balanced(m, half, half, &mut pattern, &mut out);
    Ok(out)
}

fn fill_balanced(
    m: usize,
    plus_left: usize,
    minus_left: usize,
    pattern: &mut Vec<i8>,
    out: &mut Vec<DeterministicStrategy>,
) {
    if pattern.len() == m {
        let b: Vec<i8> = pattern.iter().map(|s| -s).collect();
        out.push(DeterministicStrategy { a_outcomes: pattern.clone(), b_outcomes: b });
        return;
    }
    if plus_left > 0 {
        pattern.push(1);
        fill_balanced(m, plus_left - 1, minus_left, pattern, out);
        pattern.pop();
    }
    if minus_left > 0 {
        pattern.push(-1);
        fill_balanced(m, plus_left, minus_left - 1, pattern, out);
        pattern.pop();
    }
}

fn require_even(m: usize) -> Result<()> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("m must be even and at least 2, got {m}")));
    }
    Ok(())
}

/// Exact binomial coefficient; overflows only far beyond the supported range.
fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// The witness-point mixture: every balanced strategy weighted
/// `(m-1)/m / binomial(m, m/2)`, plus the two constant strategies weighted
/// `1/(2m)` each. Weights come from exact integer arithmetic.
pub fn witness_point_combination(m: usize) -> Result<ConvexCombination> {
    let balanced = enumerate_balanced_strategies(m)?;
    let count = binomial(m as u64, (m / 2) as u64);
    let w_balanced = (m as f64 - 1.0) / (m as u128 * count) as f64;
    let w_constant = 1.0 / (2 * m) as f64;

    let mut terms: Vec<(f64, DeterministicStrategy)> = balanced
        .into_iter()
        .map(|s| (w_balanced, s))
        .collect();
    terms.push((w_constant, DeterministicStrategy::all_plus(m)?));
    terms.push((w_constant, DeterministicStrategy::all_minus(m)?));
    ConvexCombination::new(terms)
}

/// Witness point built by mixing the enumerated strategies.
pub fn witness_point_from_mixture(m: usize) -> Result<Behavior> {
    mix(&witness_point_combination(m)?)
}

/// Witness point in closed form: corner 1, zero borders, diagonal joints
/// `2/m - 1`, off-diagonal joints `2/m`.
pub fn witness_point_closed_form(m: usize) -> Result<CorrelationMatrix> {
    require_even(m)?;
    let diag = 2.0 / m as f64 - 1.0;
    let off = 2.0 / m as f64;
    let entries = DMatrix::from_fn(m + 1, m + 1, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        (i, j) if i == j => diag,
        _ => off,
    });
    CorrelationMatrix::new(entries)
}
