use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::IntScalar;
use crate::error::LatticeError;

/// An element of `Q/Z`, stored as the reduced fraction `num/den` with
/// `0 <= num < den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModOne<T> {
    num: T,
    den: T,
}

impl<T: IntScalar> ModOne<T> {
    pub fn zero() -> Self {
        ModOne {
            num: T::zero(),
            den: T::one(),
        }
    }

    /// The class of `a/b` modulo 1. Panics if `b == 0`.
    pub fn new(a: T, b: T) -> Self {
        assert!(!b.is_zero(), "zero denominator");
        let (a, b) = if b.is_negative() { (-a, -b) } else { (a, b) };
        let a = a.mod_floor(&b);
        let g = a.gcd(&b);
        ModOne {
            num: a / g.clone(),
            den: b / g,
        }
    }

    pub fn from_i64(a: i64, b: i64) -> Self {
        Self::new(T::from_i64_exact(a), T::from_i64_exact(b))
    }

    pub fn numer(&self) -> &T {
        &self.num
    }

    pub fn denom(&self) -> &T {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Order in `Q/Z`: the reduced denominator.
    pub fn order(&self) -> T {
        self.den.clone()
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.den.lcm(&other.den);
        let a = self.num.clone() * (l.clone() / self.den.clone())
            + other.num.clone() * (l.clone() / other.den.clone());
        Self::new(a, l)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.num.clone(), self.den.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(self.num.clone() * k.clone(), self.den.clone())
    }
}

impl<T: IntScalar> fmt::Display for ModOne<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl<T: IntScalar> FromStr for ModOne<T> {
    type Err = LatticeError;

    /// Accepts `"a/b"` or a bare integer; the value is reduced modulo 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::BadFraction(s.to_string());
        let parse = |t: &str| T::from_str_radix(t.trim(), 10).map_err(|_| bad());
        match s.split_once('/') {
            Some((a, b)) => {
                let b = parse(b)?;
                if b.is_zero() {
                    return Err(bad());
                }
                Ok(Self::new(parse(a)?, b))
            }
            None => Ok(Self::new(parse(s)?, T::one())),
        }
    }
}

impl<T: IntScalar> Serialize for ModOne<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, T: IntScalar> Deserialize<'de> for ModOne<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ModOne<i64>;

    #[test]
    fn canonical_representative() {
        let q = Q::from_i64(4, 6);
        assert_eq!((q.numer(), q.denom()), (&2, &3));
        assert_eq!(q.order(), 3);
        assert_eq!(Q::from_i64(-1, 2), Q::from_i64(1, 2));
        assert_eq!(Q::from_i64(3, -4), Q::from_i64(1, 4));
        assert_eq!(Q::zero().order(), 1);
        assert_eq!(Q::from_i64(1, 2).order(), 2);
    }

    #[test]
    fn arithmetic() {
        let a = Q::from_i64(1, 2);
        assert!(a.add(&a).is_zero());
        assert_eq!(Q::from_i64(1, 4).scale(&6), Q::from_i64(1, 2));
        assert_eq!(Q::from_i64(1, 3).sub(&Q::from_i64(1, 2)), Q::from_i64(5, 6));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("3/2".parse::<Q>().unwrap(), Q::from_i64(1, 2));
        assert_eq!("-1/3".parse::<Q>().unwrap().to_string(), "2/3");
        assert_eq!("5".parse::<Q>().unwrap(), Q::zero());
        assert_eq!(Q::zero().to_string(), "0/1");
        assert!("1/0".parse::<Q>().is_err());
        assert!("x".parse::<Q>().is_err());
    }
}
