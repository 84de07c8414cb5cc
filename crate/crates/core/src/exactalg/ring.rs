use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{inv_mod, Scalar};

/// The ground ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffRing {
    Rationals,
    PrimeField(u64),
    Integers,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("unknown ring {0:?}; expected Q, Z or F<p>")]
    Unknown(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operation needs a field, got {0}")]
    NotAField(CoeffRing),
    #[error("value {value} is not defined over {ring}")]
    NotInRing { value: String, ring: CoeffRing },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl CoeffRing {
    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if is_prime(p) {
            Ok(CoeffRing::PrimeField(p))
        } else {
            Err(RingError::NotPrime(p))
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoeffRing::Integers)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoeffRing::PrimeField(p) => *p,
            _ => 0,
        }
    }

    /// Whether `x = -x` forces `x = 0`.
    pub fn signs_matter(&self) -> bool {
        self.characteristic() != 2
    }

    pub fn require_field(&self) -> Result<(), RingError> {
        if self.is_field() {
            Ok(())
        } else {
            Err(RingError::NotAField(*self))
        }
    }

    /// Canonical representative of `x` in this ring.
    pub fn normalize(&self, x: Scalar) -> Scalar {
        match self {
            CoeffRing::Rationals => x,
            CoeffRing::Integers => {
                debug_assert!(x.is_integer(), "non-integral value {x} over Z");
                x
            }
            CoeffRing::PrimeField(p) => match x {
                Scalar::Small(n, 1) if n >= 0 && (n as u64) < *p => x,
                _ => {
                    let r = x
                        .mod_p(*p)
                        .unwrap_or_else(|| panic!("value {x} has no image in F{p}"));
                    Scalar::from_i64(r as i64)
                }
            },
        }
    }

    pub fn try_normalize(&self, x: Scalar) -> Result<Scalar, RingError> {
        let bad = |x: &Scalar| RingError::NotInRing { value: x.to_string(), ring: *self };
        match self {
            CoeffRing::Rationals => Ok(x),
            CoeffRing::Integers => {
                if x.is_integer() {
                    Ok(x)
                } else {
                    Err(bad(&x))
                }
            }
            CoeffRing::PrimeField(p) => match x.mod_p(*p) {
                Some(r) => Ok(Scalar::from_i64(r as i64)),
                None => Err(bad(&x)),
            },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.normalize(Scalar::from_i64(n))
    }

    pub fn one(&self) -> Scalar {
        Scalar::ONE
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if let (CoeffRing::PrimeField(p), Scalar::Small(x, 1), Scalar::Small(y, 1)) = (self, a, b) {
            let s = (*x as u64 + *y as u64) % p;
            return Scalar::Small(s as i64, 1);
        }
        self.normalize(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if let (CoeffRing::PrimeField(p), Scalar::Small(x, 1), Scalar::Small(y, 1)) = (self, a, b) {
            let s = (*x as u64 + p - *y as u64) % p;
            return Scalar::Small(s as i64, 1);
        }
        self.normalize(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if let (CoeffRing::PrimeField(p), Scalar::Small(x, 1), Scalar::Small(y, 1)) = (self, a, b) {
            let s = ((*x as u128 * *y as u128) % *p as u128) as u64;
            return Scalar::Small(s as i64, 1);
        }
        self.normalize(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.normalize(-a)
    }

    /// Inverse in a field; over Z only units are invertible.
    pub fn inv(&self, a: &Scalar) -> Scalar {
        match self {
            CoeffRing::Rationals => a.recip(),
            CoeffRing::Integers => {
                assert!(a.is_unit_integer(), "{a} is not a unit in Z");
                a.clone()
            }
            CoeffRing::PrimeField(p) => {
                let r = a.mod_p(*p).expect("value outside field");
                assert!(r != 0, "division by zero in F{p}");
                Scalar::from_i64(inv_mod(r, *p) as i64)
            }
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.mul(a, &self.inv(b))
    }

    /// Whether `a` is invertible.
    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            CoeffRing::Integers => a.is_unit_integer(),
            _ => !a.is_zero(),
        }
    }

    pub fn sign(&self, s: i8) -> Scalar {
        if s >= 0 {
            Scalar::ONE
        } else {
            self.normalize(Scalar::from_i64(-1))
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Rationals => write!(f, "Q"),
            CoeffRing::Integers => write!(f, "Z"),
            CoeffRing::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for CoeffRing {
    type Err = RingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "Q" | "q" | "QQ" => Ok(CoeffRing::Rationals),
            "Z" | "z" | "ZZ" => Ok(CoeffRing::Integers),
            _ => {
                let rest = t
                    .strip_prefix('F')
                    .or_else(|| t.strip_prefix("GF"))
                    .ok_or_else(|| RingError::Unknown(s.to_string()))?;
                let p: u64 = rest.parse().map_err(|_| RingError::Unknown(s.to_string()))?;
                CoeffRing::prime_field(p)
            }
        }
    }
}

impl Serialize for CoeffRing {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoeffRing {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rings() {
        assert_eq!("Q".parse::<CoeffRing>().unwrap(), CoeffRing::Rationals);
        assert_eq!("F7".parse::<CoeffRing>().unwrap(), CoeffRing::PrimeField(7));
        assert!("F8".parse::<CoeffRing>().is_err());
        assert!("R".parse::<CoeffRing>().is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = CoeffRing::PrimeField(5);
        let a = f.from_i64(3);
        let b = f.from_i64(4);
        assert_eq!(f.add(&a, &b), f.from_i64(2));
        assert_eq!(f.mul(&a, &b), f.from_i64(2));
        assert_eq!(f.mul(&a, &f.inv(&a)), Scalar::ONE);
        assert_eq!(f.normalize(Scalar::new(1, 3)), f.from_i64(2));
    }
}
