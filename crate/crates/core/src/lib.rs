//! Generating-function flows on symplectic groupoids and the free particle on
//! the standard Poisson SU(N).
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the double-precision instantiation that the
//! CLI and the tolerances in the test suites are calibrated for.

pub mod compat;
pub mod dynamics;
pub mod error;
pub mod groupoid;
pub mod legendre;
pub mod linalg;
pub mod matgroup;
pub mod matrix;
pub mod ode;
pub mod sample;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::MatrixJson;
pub use scalar::Real;

pub type Matrix = matrix::SquareMatrix<f64>;
pub type SpecialLinear = matgroup::SpecialLinearElement<f64>;
pub type SpecialUnitary = matgroup::SpecialUnitaryElement<f64>;
pub type TriangularPositive = matgroup::TriangularPositiveElement<f64>;
pub type SuElement = matgroup::AntiHermitianTraceless<f64>;
pub type SbElement = matgroup::TriangularTracelessReal<f64>;
pub type FlowConfig = dynamics::FlowConfig<f64>;
pub type TrajectoryRecord = dynamics::TrajectoryRecord<f64>;
pub type MetricData = legendre::MetricData<f64>;
pub type LagrangianSample = sample::LagrangianSample<f64>;
pub type CompatReport = compat::CompatReport<f64>;

