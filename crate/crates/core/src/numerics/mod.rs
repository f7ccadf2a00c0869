//! Exact and certified arithmetic: rationals, quadratic surds, interval
//! enclosures and integer matrices.

mod gcd;
mod interval;
mod intmat;
mod rat;
mod scalar;
mod surd;

pub use gcd::{ext_gcd, gcd_all};
pub use interval::{exact_sqrt, sqrt_bounds, Interval};
pub use intmat::{int_serde, IntMat, IntVec};
pub use rat::Rat;
pub use scalar::Scalar;
pub use surd::QSurd;
