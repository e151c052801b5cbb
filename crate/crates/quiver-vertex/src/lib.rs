//! Exact vertex functions of quiver gauge theories.
//!
//! Series coefficients are exact rationals obtained by evaluating at seeded
//! sample points; identities are checked coefficientwise with no tolerance.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod fixed;
pub mod io;
pub mod kacmoody;
pub mod scalar;
pub mod series;
pub mod theory;
pub mod verify;
pub mod vertex;

pub use error::{Error, Result};
pub use scalar::{FramingVar, Monomial, Rational, SamplePoint, Scalar};
pub use series::TruncatedSeries;

/// Package version plus the build hash recorded at compile time.
pub fn version() -> &'static str {
    concat!(env!("CARGO_PKG_VERSION"), "+", env!("QVERTEX_BUILD_HASH"))
}
