//! Named directions.

use crate::diophantine::{DirectionSpec, DEFAULT_DIGITS};
use crate::embedding::cat3_dominant_direction;
use crate::error::{Error, Result};
use crate::numerics::{Rat, Scalar};

pub const NAMES: [&str; 3] = ["golden", "sqrt2", "cat3-dominant"];

/// `golden` = (phi, 1), `sqrt2` = (1, sqrt 2), `cat3-dominant` = enclosure of the
/// dominant eigenvector of cat3 at `digits` digits.
pub fn preset(name: &str, digits: u32) -> Result<DirectionSpec> {
    match name {
        "golden" => DirectionSpec::new(vec![Scalar::golden(), Scalar::one()]),
        "sqrt2" => DirectionSpec::new(vec![Scalar::one(), Scalar::sqrt_of(&Rat::int(2))?]),
        "cat3-dominant" => cat3_dominant_direction(digits),
        _ => Err(Error::invalid(format!("unknown preset {name:?}; known: {}", NAMES.join(", ")))),
    }
}

pub fn preset_default(name: &str) -> Result<DirectionSpec> {
    preset(name, DEFAULT_DIGITS)
}
