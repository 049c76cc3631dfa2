//! Numerical toolkit for projective logarithmic potentials on P^n.

pub mod coarea;
pub mod error;
pub mod format;
pub mod geometry;
pub mod kernels;
pub mod measures;
pub mod monge_ampere;
pub mod potentials;
pub mod quadrature;
pub mod reduce;
pub mod refinement;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{AffinePoint, HomogeneousPoint, C64};
pub use kernels::KernelValue;
pub use measures::{AtomicMeasure, ChartMeasure, Decomposition};

/// Library version recorded in CLI artifact headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
