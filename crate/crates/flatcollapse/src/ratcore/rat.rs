use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Int = BigInt;

/// Arbitrary precision rational. `BigRational` keeps the fraction reduced
/// with a positive denominator, which is exactly the invariant we need.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    BigRational::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(n.into())
}

/// Parse "p/q" or a bare integer "p".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (ns, ds) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n: BigInt = ns
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = ds
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Serialize to "p/q", or bare "p" for integers.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

/// Floor of a rational as an integer.
pub fn rat_floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// True if the rational is an integer; returns it when so.
pub fn rat_as_int(r: &Rat) -> Option<BigInt> {
    if r.is_integer() {
        Some(r.to_integer())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["3/4", "-7/2", "0", "12", "-5"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        // reduction and sign normalization
        assert_eq!(rat_to_string(&parse_rat("4/6").unwrap()), "2/3");
        assert_eq!(rat_to_string(&parse_rat("1/-2").unwrap()), "-1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn floor_and_int_detection() {
        assert_eq!(rat_floor(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(rat_floor(&rat(3, 2)), BigInt::from(1));
        assert_eq!(rat_as_int(&rat(4, 2)), Some(BigInt::from(2)));
        assert_eq!(rat_as_int(&rat(1, 2)), None);
    }
}
