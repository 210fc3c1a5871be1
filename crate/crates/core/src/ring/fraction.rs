use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{check_tables, Polynomial, Rational, VarTable};
use crate::error::{Error, Result};

/// Quotient of two polynomials.
///
/// Normalization rationalizes the denominator, cancels monomial content and
/// exact divisibility in either direction, and scales the denominator to
/// coprime integer coefficients with a positive leading coefficient.
/// Equality is decided by cross-multiplication.
#[derive(Clone)]
pub struct Fraction {
    num: Polynomial,
    den: Polynomial,
}

impl Fraction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Fraction> {
        check_tables(num.vars(), den.vars())?;
        if den.is_zero() {
            return Err(Error::Singular("zero denominator".into()));
        }
        Ok(normalize(num, den))
    }

    pub fn from_poly(p: Polynomial) -> Fraction {
        let den = Polynomial::one(p.vars());
        Fraction { num: p, den }
    }

    pub fn zero(vt: &Arc<VarTable>) -> Fraction {
        Fraction::from_poly(Polynomial::zero(vt))
    }

    pub fn one(vt: &Arc<VarTable>) -> Fraction {
        Fraction::from_poly(Polynomial::one(vt))
    }

    pub fn constant(vt: &Arc<VarTable>, c: Rational) -> Fraction {
        Fraction::from_poly(Polynomial::constant(vt, c))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn has_radicals(&self) -> bool {
        self.num.has_radicals() || self.den.has_radicals()
    }

    pub fn try_add(&self, other: &Fraction) -> Result<Fraction> {
        check_tables(self.vars(), other.vars())?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.den == other.den {
            return Ok(normalize(self.num.try_add(&other.num)?, self.den.clone()));
        }
        if let Some(k) = other.den.exact_divide(&self.den)? {
            let num = &(&self.num * &k) + &other.num;
            return Ok(normalize(num, other.den.clone()));
        }
        if let Some(k) = self.den.exact_divide(&other.den)? {
            let num = &self.num + &(&other.num * &k);
            return Ok(normalize(num, self.den.clone()));
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Ok(normalize(num, &self.den * &other.den))
    }

    pub fn try_sub(&self, other: &Fraction) -> Result<Fraction> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Fraction) -> Result<Fraction> {
        check_tables(self.vars(), other.vars())?;
        if self.is_zero() || other.is_zero() {
            return Ok(Fraction::zero(self.vars()));
        }
        Ok(normalize(&self.num * &other.num, &self.den * &other.den))
    }

    pub fn try_div(&self, other: &Fraction) -> Result<Fraction> {
        self.try_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Fraction> {
        if self.is_zero() {
            return Err(Error::Singular("reciprocal of zero".into()));
        }
        Ok(normalize(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &Rational) -> Fraction {
        if c.is_zero() {
            return Fraction::zero(self.vars());
        }
        Fraction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Fraction {
        normalize(&self.num * p, self.den.clone())
    }

    pub fn pow(&self, e: u32) -> Fraction {
        normalize(self.num.pow(e), self.den.pow(e))
    }

    pub fn derivative(&self, i: usize) -> Result<Fraction> {
        let dn = self.num.derivative(i)?;
        if self.den.is_one() {
            return Ok(dn);
        }
        let dd = self.den.derivative(i)?;
        // (n/d)' = n'/d - n d'/d^2
        let d = Fraction::from_poly(self.den.clone());
        let first = dn.try_div(&d)?;
        let second = dd
            .mul_poly(&self.num)
            .try_div(&Fraction::from_poly(&self.den * &self.den))?;
        first.try_sub(&second)
    }

    pub(crate) fn into_parts(self) -> (Polynomial, Polynomial) {
        (self.num, self.den)
    }
}

fn normalize(mut num: Polynomial, mut den: Polynomial) -> Fraction {
    let vt = num.vars().clone();
    if num.is_zero() {
        return Fraction::zero(&vt);
    }
    for r in 0..vt.nrad() {
        if den.has_radical(r) {
            let c = den.conjugate(r);
            num = &num * &c;
            den = &den * &c;
        }
    }
    if let Some(c) = den.constant_value() {
        return Fraction::from_poly(num.scale(&(Rational::one() / c)));
    }
    let g = num.monomial_content().gcd(&den.monomial_content());
    if !g.is_one() {
        num = num.div_monomial(&g);
        den = den.div_monomial(&g);
    }
    if let Ok(Some(q)) = num.exact_divide(&den) {
        return Fraction::from_poly(q);
    }
    if !num.has_radicals() {
        if let Ok(Some(q)) = den.exact_divide(&num) {
            num = Polynomial::one(&vt);
            den = q;
            if let Some(c) = den.constant_value() {
                return Fraction::from_poly(num.scale(&(Rational::one() / c)));
            }
        }
    }
    let s = den.primitive_scale();
    Fraction {
        num: num.scale(&s),
        den: den.scale(&s),
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        if !super::same_table(self.vars(), other.vars()) {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fraction({self})")
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.nterms() == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

impl From<Polynomial> for Fraction {
    fn from(p: Polynomial) -> Fraction {
        Fraction::from_poly(p)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&Fraction> for &Fraction {
            type Output = Fraction;
            fn $m(self, rhs: &Fraction) -> Fraction {
                self.$inner(rhs).expect("operands share a variable table")
            }
        }
        impl $tr<Fraction> for Fraction {
            type Output = Fraction;
            fn $m(self, rhs: Fraction) -> Fraction {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Fraction {
    type Output = Fraction;
    fn neg(self) -> Fraction {
        Fraction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for Fraction {
    type Output = Fraction;
    fn neg(self) -> Fraction {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, VarTable};

    #[test]
    fn cancels_and_normalizes() {
        let vt = VarTable::numbered(2);
        let x = Polynomial::var(&vt, 0);
        let y = Polynomial::var(&vt, 1);
        let f = Fraction::new((&x * &y).scale(&rat(2)), (&x * &y).scale(&rat(-4))).unwrap();
        assert_eq!(f.constant_value(), Some(crate::ring::ratio(-1, 2)));
        let f = Fraction::new(&x * &x - Polynomial::one(&vt), &x - &Polynomial::one(&vt)).unwrap();
        assert!(f.is_polynomial());
        assert!(Fraction::new(x.clone(), Polynomial::zero(&vt)).is_err());
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let vt = VarTable::numbered(2);
        let x = Polynomial::var(&vt, 0);
        let y = Polynomial::var(&vt, 1);
        let a = Fraction::new(x.clone(), &x + &y).unwrap();
        let b = Fraction::new(x.scale(&rat(3)), (&x + &y).scale(&rat(3))).unwrap();
        assert_eq!(a, b);
        let sum = &a + &Fraction::new(y.clone(), &x + &y).unwrap();
        assert_eq!(sum, Fraction::one(&vt));
    }

    #[test]
    fn quotient_rule() {
        let vt = VarTable::numbered(1);
        let x = Polynomial::var(&vt, 0);
        let f = Fraction::new(Polynomial::one(&vt), x.clone()).unwrap();
        let d = f.derivative(0).unwrap();
        assert_eq!(
            d,
            Fraction::new(Polynomial::constant(&vt, rat(-1)), &x * &x).unwrap()
        );
    }
}
