//! Decaying, evanescent point source of one-dimensional quantum waves.

pub mod analysis;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod source_model;
pub mod special_functions;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub use analysis::{Scenario, TimeScales};
pub use asymptotics::{DitParameters, WaveDecomposition};
pub use oracle::{GridField, GridSpec};
pub use source_model::{ComplexTime, DimensionalScale, NormalizedSource, SourceParams};

/// Double-precision model parameters.
pub type Params = SourceParams<f64>;
/// Single-precision model parameters.
pub type Params32 = SourceParams<f32>;
pub type C64 = Cplx<f64>;
pub type C32 = Cplx<f32>;
pub type Decomposition = WaveDecomposition<f64>;
pub type Scales = TimeScales<f64>;
pub type Field = GridField<f64>;
