//! Real-normalized differentials on hyperelliptic spectral curves.

pub mod crit;
pub mod curve;
pub mod error;
pub mod hill;
pub mod linalg;
pub mod ode;
pub mod periods;
pub mod poly;
pub mod quad;
pub mod rnd;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Double-precision complex number.
pub type Cx64 = Cx<f64>;
/// Double-precision spectral curve.
pub type Curve = curve::SpectralCurve<f64>;
/// Single-precision complex number.
pub type Cx32 = Cx<f32>;
/// Single-precision spectral curve.
pub type Curve32 = curve::SpectralCurve<f32>;
