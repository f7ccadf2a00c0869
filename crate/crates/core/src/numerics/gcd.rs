use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Extended gcd: `(g, s, t)` with `s a + t b = g = gcd(|a|, |b|)`.
///
/// For `b != 0` the coefficient `s` is the least nonnegative residue modulo
/// `|b| / g`, which keeps `|s| < |b|` and `|t| <= |a|`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::invalid("ext_gcd(0, 0) is undefined"));
    }
    if b.is_zero() {
        let s = if a.is_negative() { -BigInt::one() } else { BigInt::one() };
        return Ok((a.abs(), s, BigInt::zero()));
    }
    let e = a.extended_gcd(b);
    let g = e.gcd.abs();
    let modulus = (b / &g).abs();
    let s = if modulus.is_one() { BigInt::zero() } else { e.x.mod_floor(&modulus) };
    // s a + t b = g, solved exactly for t.
    let t = (&g - &s * a) / b;
    debug_assert_eq!(&s * a + &t * b, g);
    Ok((g, s, t))
}

/// gcd of all entries (nonnegative); zero for the empty or all-zero slice.
pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eg(a: i64, b: i64) -> (i64, i64, i64) {
        let (g, s, t) = ext_gcd(&a.into(), &b.into()).unwrap();
        (g.try_into().unwrap(), s.try_into().unwrap(), t.try_into().unwrap())
    }

    #[test]
    fn small_examples() {
        assert_eq!(eg(3, 2), (1, 1, -1));
        assert_eq!(eg(0, 5), (5, 0, 1));
        assert_eq!(eg(6, 4), (2, 1, -1));
        assert_eq!(eg(5, 3), (1, 2, -3));
        assert_eq!(eg(-7, 0), (7, -1, 0));
        assert!(ext_gcd(&BigInt::zero(), &BigInt::zero()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn bezout_identity_and_bounds(a in -(10i64.pow(18))..10i64.pow(18), b in -(10i64.pow(18))..10i64.pow(18)) {
            prop_assume!(a != 0 || b != 0);
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let (g, s, t) = ext_gcd(&a, &b).unwrap();
            prop_assert_eq!(&s * &a + &t * &b, g.clone());
            prop_assert_eq!(g, a.gcd(&b));
            if !a.is_zero() && !b.is_zero() {
                prop_assert!(s.abs() <= b.abs());
                prop_assert!(t.abs() <= a.abs());
            }
        }
    }
}
