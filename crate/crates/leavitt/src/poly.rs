//! Univariate polynomials over the active field, with the extended
//! Euclidean gcd used to merge cycle generators.

use crate::field::{Field, Scalar};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Dense coefficient vector, index = exponent, trailing zeros trimmed.
/// The empty vector is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPolynomial {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl FieldPolynomial {
    pub fn zero(field: Field) -> FieldPolynomial {
        FieldPolynomial {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: Field) -> FieldPolynomial {
        FieldPolynomial {
            field,
            coeffs: vec![field.one()],
        }
    }

    pub fn from_coeffs(field: Field, coeffs: Vec<Scalar>) -> FieldPolynomial {
        let mut p = FieldPolynomial { field, coeffs };
        p.trim();
        p
    }

    /// Build from (exponent, coefficient) pairs; repeated exponents add.
    pub fn from_terms(field: Field, terms: &[(usize, Scalar)]) -> FieldPolynomial {
        let mut coeffs = Vec::new();
        for (exp, k) in terms {
            if coeffs.len() <= *exp {
                coeffs.resize(*exp + 1, field.zero());
            }
            coeffs[*exp] = coeffs[*exp].add(k);
        }
        FieldPolynomial::from_coeffs(field, coeffs)
    }

    /// Convenience constructor from small integers, index = exponent.
    pub fn from_integers(field: Field, coeffs: &[i64]) -> FieldPolynomial {
        FieldPolynomial::from_coeffs(field, coeffs.iter().map(|&c| field.integer(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, exp: usize) -> Scalar {
        self.coeffs
            .get(exp)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &FieldPolynomial) -> FieldPolynomial {
        assert_eq!(self.field, rhs.field, "mixed fields");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect();
        FieldPolynomial::from_coeffs(self.field, coeffs)
    }

    pub fn neg(&self) -> FieldPolynomial {
        FieldPolynomial {
            field: self.field,
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn sub(&self, rhs: &FieldPolynomial) -> FieldPolynomial {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &FieldPolynomial) -> FieldPolynomial {
        assert_eq!(self.field, rhs.field, "mixed fields");
        if self.is_zero() || rhs.is_zero() {
            return FieldPolynomial::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        FieldPolynomial::from_coeffs(self.field, coeffs)
    }

    pub fn scale(&self, k: &Scalar) -> FieldPolynomial {
        FieldPolynomial::from_coeffs(
            self.field,
            self.coeffs.iter().map(|c| c.mul(k)).collect(),
        )
    }

    /// Exact Euclidean division: (quotient, remainder) with
    /// deg r < deg divisor.
    pub fn div_rem(
        &self,
        divisor: &FieldPolynomial,
    ) -> Result<(FieldPolynomial, FieldPolynomial), PolyError> {
        assert_eq!(self.field, divisor.field, "mixed fields");
        let d = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = divisor.leading().unwrap().inverse();
        let mut rem = self.clone();
        let mut quot = vec![self.field.zero(); self.coeffs.len().saturating_sub(d)];
        while let Some(r) = rem.degree() {
            if r < d {
                break;
            }
            let factor = rem.leading().unwrap().mul(&lead_inv);
            let shift = r - d;
            quot[shift] = quot[shift].add(&factor);
            for i in 0..=d {
                let delta = divisor.coeff(i).mul(&factor);
                rem.coeffs[i + shift] = rem.coeffs[i + shift].sub(&delta);
            }
            rem.trim();
        }
        Ok((FieldPolynomial::from_coeffs(self.field, quot), rem))
    }

    /// Exact quotient when the divisor divides self, else None.
    pub fn exact_div(&self, divisor: &FieldPolynomial) -> Option<FieldPolynomial> {
        let (q, r) = self.div_rem(divisor).ok()?;
        r.is_zero().then_some(q)
    }

    /// Extended Euclidean gcd: returns (d, a, b) with d = a·self + b·rhs.
    /// The gcd is rescaled so d(0) = 1 whenever d(0) is nonzero, and made
    /// monic otherwise.
    pub fn gcd_bezout(
        &self,
        rhs: &FieldPolynomial,
    ) -> Result<(FieldPolynomial, FieldPolynomial, FieldPolynomial), PolyError> {
        assert_eq!(self.field, rhs.field, "mixed fields");
        if self.is_zero() && rhs.is_zero() {
            return Err(PolyError::BothZero);
        }
        let field = self.field;
        let mut r0 = self.clone();
        let mut a0 = FieldPolynomial::one(field);
        let mut b0 = FieldPolynomial::zero(field);
        let mut r1 = rhs.clone();
        let mut a1 = FieldPolynomial::zero(field);
        let mut b1 = FieldPolynomial::one(field);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let a = a0.sub(&q.mul(&a1));
            let b = b0.sub(&q.mul(&b1));
            (r0, a0, b0) = (r1, a1, b1);
            (r1, a1, b1) = (r, a, b);
        }
        let unit = if r0.coeff(0).is_zero() {
            r0.leading().unwrap().clone()
        } else {
            r0.coeff(0)
        };
        let inv = unit.inverse();
        let d = r0.scale(&inv);
        let a = a0.scale(&inv);
        let b = b0.scale(&inv);
        debug_assert_eq!(a.mul(self).add(&b.mul(rhs)), d);
        Ok((d, a, b))
    }
}

impl fmt::Display for FieldPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match exp {
                0 => write!(f, "{c}")?,
                _ => {
                    if !c.is_one() {
                        write!(f, "{c}*")?;
                    }
                    if exp == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{exp}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn gcd_of_square_and_root() {
        // (1 + x)^2 and (1 + x)
        let p = FieldPolynomial::from_integers(q(), &[1, 2, 1]);
        let r = FieldPolynomial::from_integers(q(), &[1, 1]);
        let (d, a, b) = p.gcd_bezout(&r).unwrap();
        assert_eq!(d, r);
        assert_eq!(a, FieldPolynomial::zero(q()));
        assert_eq!(b, FieldPolynomial::one(q()));
    }

    #[test]
    fn coprime_gcd_is_constant_one() {
        let p = FieldPolynomial::from_integers(q(), &[1, 1]);
        let r = FieldPolynomial::from_integers(q(), &[1, 3]);
        let (d, a, b) = p.gcd_bezout(&r).unwrap();
        assert_eq!(d, FieldPolynomial::one(q()));
        assert_eq!(a.mul(&p).add(&b.mul(&r)), d);
        assert_eq!(d.coeff(0), q().one());
    }

    #[test]
    fn gcd_with_zero_normalizes_constant_term() {
        let p = FieldPolynomial::from_integers(q(), &[2, 4]);
        let (d, a, b) = p.gcd_bezout(&FieldPolynomial::zero(q())).unwrap();
        assert_eq!(d, FieldPolynomial::from_integers(q(), &[1, 2]));
        assert_eq!(a.mul(&p).add(&b.mul(&FieldPolynomial::zero(q()))), d);
        assert!(FieldPolynomial::zero(q())
            .gcd_bezout(&FieldPolynomial::zero(q()))
            .is_err());
    }

    #[test]
    fn gcd_without_constant_term_is_monic() {
        // gcd(2x, 2x^2) = x
        let p = FieldPolynomial::from_integers(q(), &[0, 2]);
        let r = FieldPolynomial::from_integers(q(), &[0, 0, 2]);
        let (d, _, _) = p.gcd_bezout(&r).unwrap();
        assert_eq!(d, FieldPolynomial::from_integers(q(), &[0, 1]));
    }

    #[test]
    fn division_and_exact_division() {
        let p = FieldPolynomial::from_integers(q(), &[1, 2, 1]);
        let r = FieldPolynomial::from_integers(q(), &[1, 1]);
        let (quot, rem) = p.div_rem(&r).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quot, r);
        assert_eq!(p.exact_div(&r), Some(r.clone()));
        let s = FieldPolynomial::from_integers(q(), &[1, 3]);
        assert_eq!(p.exact_div(&s), None);
    }

    #[test]
    fn prime_field_gcd() {
        let f = Field::prime(7).unwrap();
        let p = FieldPolynomial::from_integers(f, &[1, 2, 1]);
        let r = FieldPolynomial::from_integers(f, &[1, 1]);
        let (d, a, b) = p.gcd_bezout(&r).unwrap();
        assert_eq!(d, r);
        assert_eq!(a.mul(&p).add(&b.mul(&r)), d);
    }

    #[test]
    fn display_formats() {
        let p = FieldPolynomial::from_integers(q(), &[1, 2, 1]);
        assert_eq!(p.to_string(), "1 + 2*x + x^2");
        assert_eq!(FieldPolynomial::zero(q()).to_string(), "0");
    }
}
