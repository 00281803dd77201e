//! Exact Bäcklund–Darboux transformations of planes in Sato's Grassmannian.
//!
//! The engine is generic over the coefficient field ([`scalar::Field`]); the
//! aliases below fix it to [`Scalar`], the cyclotomic field Q(ζ_m), which is
//! what the CLI and the acceptance suite use.

pub mod darboux;
pub mod diffop;
pub mod error;
pub mod expfun;
pub mod fraction;
pub mod linalg;
pub mod mpoly;
pub mod plane;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Cyclotomic, Field};

pub use num_rational::BigRational as Rational;

/// Coefficient field used throughout the CLI.
pub type Scalar = Cyclotomic;
pub type Series = series::TruncatedSeries<Scalar>;
pub type Tail = series::LaurentTail<Scalar>;
pub type Wave = series::WaveFunction<Scalar>;
pub type ZPoly = poly::Poly<Scalar>;
