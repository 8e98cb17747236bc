//! Exact coefficient fields: arbitrary-precision rationals and GF(p).
//!
//! No floating point anywhere. Rationals are kept in lowest terms with a
//! positive denominator (the representation `num::BigRational` maintains);
//! prime-field residues are kept in `0..p`.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} is out of range (need 2 <= p < 2^31)")]
    ModulusOutOfRange(u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("residue arithmetic with mismatched modulus (have {have}, expected {expected})")]
    WrongModulus { have: u32, expected: u32 },
}

/// The active coefficient field of a session: the rationals or GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u32),
}

impl Field {
    /// A prime field GF(p) with 2 <= p < 2^31, checked for primality.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if p < 2 || p >= (1 << 31) {
            return Err(FieldError::ModulusOutOfRange(p));
        }
        let p = p as u32;
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::zero()),
            Field::Prime(p) => Scalar::Mod { p: *p, value: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::one()),
            Field::Prime(p) => Scalar::Mod { p: *p, value: 1 },
        }
    }

    pub fn integer(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => {
                let p64 = *p as i64;
                Scalar::Mod {
                    p: *p,
                    value: n.rem_euclid(p64) as u32,
                }
            }
        }
    }

    /// num/den as a field value; in GF(p) this is num * den^{-1}.
    pub fn fraction(&self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        if den == 0 {
            return Err(FieldError::ZeroDenominator);
        }
        match self {
            Field::Rationals => Ok(Scalar::Rat(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            Field::Prime(_) => {
                let d = self.integer(den);
                if d.is_zero() {
                    return Err(FieldError::ZeroDenominator);
                }
                Ok(self.integer(num).mul(&d.inverse()))
            }
        }
    }

    /// A declared residue `value mod p`; the modulus must match the field.
    pub fn residue(&self, value: i64, modulus: u32) -> Result<Scalar, FieldError> {
        match self {
            Field::Prime(p) if *p == modulus => Ok(self.integer(value)),
            Field::Prime(p) => Err(FieldError::WrongModulus {
                have: modulus,
                expected: *p,
            }),
            Field::Rationals => Err(FieldError::WrongModulus {
                have: modulus,
                expected: 0,
            }),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

/// One exact field value. Arithmetic between scalars of different fields is
/// a programming error and panics; public entry points validate the field
/// once and keep it consistent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { p: u32, value: u32 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Mod { .. } => false,
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { p, value: a }, Scalar::Mod { p: q, value: b }) => {
                assert_eq!(p, q, "mixed prime fields");
                Scalar::Mod {
                    p: *p,
                    value: ((*a as u64 + *b as u64) % *p as u64) as u32,
                }
            }
            _ => panic!("mixed scalar fields"),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { p, value } => Scalar::Mod {
                p: *p,
                value: if *value == 0 { 0 } else { p - value },
            },
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { p, value: a }, Scalar::Mod { p: q, value: b }) => {
                assert_eq!(p, q, "mixed prime fields");
                Scalar::Mod {
                    p: *p,
                    value: ((*a as u64 * *b as u64) % *p as u64) as u32,
                }
            }
            _ => panic!("mixed scalar fields"),
        }
    }

    /// Multiplicative inverse of a nonzero value.
    pub fn inverse(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => {
                assert!(!a.is_zero(), "inverse of zero");
                Scalar::Rat(a.recip())
            }
            Scalar::Mod { p, value } => {
                assert!(*value != 0, "inverse of zero");
                Scalar::Mod {
                    p: *p,
                    value: mod_inverse(*value, *p),
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod { p, value } => write!(f, "{value} mod {p}"),
        }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    let n = n as u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // extended Euclid on (a, p); p prime and a != 0 mod p
    let (mut t, mut new_t): (i64, i64) = (0, 1);
    let (mut r, mut new_r): (i64, i64) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible");
    (t.rem_euclid(p as i64)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_canonical_form() {
        let f = Field::Rationals;
        let half = f.fraction(2, 4).unwrap();
        assert_eq!(half, f.fraction(1, 2).unwrap());
        assert_eq!(half.to_string(), "1/2");
        assert_eq!(f.fraction(3, -2).unwrap().to_string(), "-3/2");
        assert_eq!(f.integer(-7).to_string(), "-7");
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let a = f.integer(5);
        let b = f.integer(4);
        assert_eq!(a.add(&b), f.integer(2));
        assert_eq!(a.mul(&b), f.integer(6));
        assert_eq!(a.neg(), f.integer(2));
        assert!(a.mul(&a.inverse()).is_one());
        assert_eq!(a.to_string(), "5 mod 7");
        assert_eq!(f.fraction(1, 2).unwrap(), f.integer(4));
    }

    #[test]
    fn modulus_validation() {
        assert!(Field::prime(6).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(1 << 31).is_err());
        assert!(Field::prime(2147483647).is_ok()); // 2^31 - 1 is prime
        let f = Field::prime(7).unwrap();
        assert!(f.residue(3, 5).is_err());
        assert_eq!(f.residue(10, 7).unwrap(), f.integer(3));
        assert!(f.fraction(1, 7).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let f = Field::Rationals;
        let x = f.fraction(-3, 5).unwrap();
        assert!(x.mul(&x.inverse()).is_one());
        assert!(f.zero().add(&x).eq(&x));
    }
}
