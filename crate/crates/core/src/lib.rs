//! Exact certificates for linear symplectic embeddings of simplex bundles over
//! the torus into tilted cylinders, plus barcode combinatorics.

pub mod barcode;
pub mod diophantine;
pub mod embedding;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod presets;
pub mod unimodular;

pub use barcode::{Bar, Barcode, Death, Distance};
pub use diophantine::{ApproxStep, DirectionSpec, Irrationality};
pub use embedding::{EmbedLimits, EmbeddingCertificate, MapPoint, Verdict};
pub use error::{Error, Result};
pub use geometry::Extent;
pub use numerics::{ext_gcd, IntMat, IntVec, Interval, QSurd, Rat, Scalar};
pub use unimodular::CompletionTrace;
