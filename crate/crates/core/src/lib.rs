//! Correlation bodies of bipartite two-outcome measurement scenarios.
//!
//! The crate builds the balanced-mixture witness point whose correlation
//! matrix has full rank, applies the rank `<= d^2` dimension witness, maximizes
//! the associated correlation Bell polynomial over unit-vector configurations
//! by alternating updates, certifies the quantum maximum `m^2/2` with a fully
//! analytic semidefinite primal/dual pair, realizes the optimal vectors as
//! observables built from anticommuting generators on a maximally entangled
//! state, and maps the projective-vs-POVM attainable region of the 3x2
//! scenario over the fixed CHSH-optimal block.

pub mod cone;
pub mod error;
pub mod model;
pub mod numerics;
pub mod realize;
pub mod sdp;
pub mod seesaw;
pub mod witness;

pub use error::{Error, Result};
pub use numerics::{DenseComplexMatrix, DenseRealMatrix, ToleranceConfig};

pub use cone::{ConePoint, ConeSection, ScanPoint, SurfaceClass, ThirdMeasurement};
pub use model::{Behavior, ConvexCombination, CorrelationMatrix, DeterministicStrategy, Scenario};
pub use realize::{Observable, ObservableKind, QuantumRealization};
pub use sdp::{SdpCertificate, StructuredMatrixSpec};
pub use seesaw::{BellMatrix, SeesawResult, VectorConfiguration};
pub use witness::WitnessVerdict;
