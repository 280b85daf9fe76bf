use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "inverse of zero");
        Rat(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc *= self;
        }
        acc
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Number of bits in numerator plus denominator; a rough size measure.
    pub fn bits(&self) -> u64 {
        self.0.numer().bits() + self.0.denom().bits()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<i32> for Rat {
    fn from(v: i32) -> Rat {
        Rat::from(v as i64)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Rat {
        Rat(BigRational::from_integer(v))
    }
}

impl From<BigRational> for Rat {
    fn from(v: BigRational) -> Rat {
        Rat(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let err = || ParseRatError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rat::from_bigints(n, d))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $asg:ident, $am:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(self.0.$m(o.0))
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &'a Rat) -> Rat {
                Rat(self.0.$m(&o.0))
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat((&self.0).$m(o.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, o: &'b Rat) -> Rat {
                Rat((&self.0).$m(&o.0))
            }
        }
        impl $asg<Rat> for Rat {
            fn $am(&mut self, o: Rat) {
                self.0.$am(o.0);
            }
        }
        impl<'a> $asg<&'a Rat> for Rat {
            fn $am(&mut self, o: &'a Rat) {
                self.0.$am(&o.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, o: Rat) -> Rat {
        assert!(!o.is_zero(), "division by zero");
        Rat(self.0 / o.0)
    }
}

impl<'a> Div<&'a Rat> for Rat {
    type Output = Rat;
    fn div(self, o: &'a Rat) -> Rat {
        assert!(!o.is_zero(), "division by zero");
        Rat(self.0 / &o.0)
    }
}

impl<'b> Div<&'b Rat> for &Rat {
    type Output = Rat;
    fn div(self, o: &'b Rat) -> Rat {
        assert!(!o.is_zero(), "division by zero");
        Rat(&self.0 / &o.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::one(), |a, b| a * b)
    }
}

/// Shorthand for small literals in code and tests.
pub fn q(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

pub fn qi(v: i64) -> Rat {
    Rat::from(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(q(2, -4), q(-1, 2));
        assert_eq!(q(-1, 2).denom(), &BigInt::from(2));
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(q(-3, 9).to_string(), "-1/3");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "7", "-7/3", "12345678901234567890123/7"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
        assert_eq!(" 4/6 ".parse::<Rat>().unwrap(), q(2, 3));
    }

    #[test]
    fn serde_as_string() {
        let v = vec![q(1, 2), qi(-3)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/2","-3"]"#);
        let back: Vec<Rat> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
        assert_eq!(q(1, 2) - q(1, 3), q(1, 6));
        assert_eq!(q(2, 3) * q(3, 4), q(1, 2));
        assert_eq!(q(2, 3) / q(4, 3), q(1, 2));
        assert_eq!(q(-2, 3).pow(3), q(-8, 27));
        assert_eq!(q(-2, 3).signum(), -1);
    }
}
