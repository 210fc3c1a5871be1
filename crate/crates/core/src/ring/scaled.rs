use std::fmt;
use std::ops::{Mul, Neg};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{
    check_tables, fmt_rational, is_nonneg_integer, Fraction, Polynomial, Rational, VarTable,
};
use crate::error::{Error, Result};

/// A fraction times a product of rational powers of declared bases.
///
/// Normal form: bases distinct and nonconstant, exponents nonzero and never
/// a nonnegative integer, and no base divides the numerator or the
/// denominator of the fraction.
#[derive(Clone)]
pub struct ScaledFraction {
    frac: Fraction,
    powers: Vec<(Polynomial, Rational)>,
}

impl ScaledFraction {
    pub fn new(frac: Fraction, powers: Vec<(Polynomial, Rational)>) -> Result<ScaledFraction> {
        for (b, _) in &powers {
            check_tables(frac.vars(), b.vars())?;
            if b.is_zero() {
                return Err(Error::Singular("zero power base".into()));
            }
        }
        normalize(frac, powers)
    }

    pub fn from_fraction(frac: Fraction) -> ScaledFraction {
        ScaledFraction {
            frac,
            powers: Vec::new(),
        }
    }

    pub fn from_poly(p: Polynomial) -> ScaledFraction {
        ScaledFraction::from_fraction(Fraction::from_poly(p))
    }

    /// `base^exp`.
    pub fn power(base: Polynomial, exp: Rational) -> Result<ScaledFraction> {
        let vt = base.vars().clone();
        ScaledFraction::new(Fraction::one(&vt), vec![(base, exp)])
    }

    pub fn zero(vt: &Arc<VarTable>) -> ScaledFraction {
        ScaledFraction::from_fraction(Fraction::zero(vt))
    }

    pub fn one(vt: &Arc<VarTable>) -> ScaledFraction {
        ScaledFraction::from_fraction(Fraction::one(vt))
    }

    pub fn constant(vt: &Arc<VarTable>, c: Rational) -> ScaledFraction {
        ScaledFraction::from_fraction(Fraction::constant(vt, c))
    }

    pub fn frac(&self) -> &Fraction {
        &self.frac
    }

    pub fn powers(&self) -> &[(Polynomial, Rational)] {
        &self.powers
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.frac.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.frac.is_zero()
    }

    pub fn has_radicals(&self) -> bool {
        self.frac.has_radicals() || self.powers.iter().any(|(b, _)| b.has_radicals())
    }

    /// The value as a plain fraction when every exponent is an integer.
    pub fn to_fraction(&self) -> Option<Fraction> {
        let mut num = self.frac.num().clone();
        let mut den = self.frac.den().clone();
        for (b, e) in &self.powers {
            if !e.is_integer() {
                return None;
            }
            let k = int_u32(&e.abs()).ok()?;
            if e.is_negative() {
                den = &den * &b.pow(k);
            } else {
                num = &num * &b.pow(k);
            }
        }
        Fraction::new(num, den).ok()
    }

    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if self.powers.is_empty() {
            return self.frac.as_polynomial().cloned();
        }
        self.to_fraction()?.as_polynomial().cloned()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.powers.is_empty() {
            self.frac.constant_value()
        } else {
            self.to_fraction()?.constant_value()
        }
    }

    pub fn try_mul(&self, other: &ScaledFraction) -> Result<ScaledFraction> {
        check_tables(self.vars(), other.vars())?;
        if self.is_zero() || other.is_zero() {
            return Ok(ScaledFraction::zero(self.vars()));
        }
        let frac = self.frac.try_mul(&other.frac)?;
        let mut powers = self.powers.clone();
        powers.extend(other.powers.iter().cloned());
        normalize(frac, powers)
    }

    pub fn mul_fraction(&self, f: &Fraction) -> Result<ScaledFraction> {
        self.try_mul(&ScaledFraction::from_fraction(f.clone()))
    }

    pub fn try_div(&self, other: &ScaledFraction) -> Result<ScaledFraction> {
        self.try_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<ScaledFraction> {
        let frac = self.frac.recip()?;
        let powers = self.powers.iter().map(|(b, e)| (b.clone(), -e)).collect();
        normalize(frac, powers)
    }

    pub fn scale(&self, c: &Rational) -> ScaledFraction {
        if c.is_zero() {
            return ScaledFraction::zero(self.vars());
        }
        ScaledFraction {
            frac: self.frac.scale(c),
            powers: self.powers.clone(),
        }
    }

    /// Sum of two scaled fractions. Succeeds when, base by base, the
    /// exponents differ by integers; the smaller power is factored out.
    pub fn try_add(&self, other: &ScaledFraction) -> Result<ScaledFraction> {
        check_tables(self.vars(), other.vars())?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut bases: Vec<Polynomial> = Vec::new();
        for (b, _) in self.powers.iter().chain(&other.powers) {
            if !bases.contains(b) {
                bases.push(b.clone());
            }
        }
        let exp_of = |s: &ScaledFraction, b: &Polynomial| {
            s.powers
                .iter()
                .find(|(x, _)| x == b)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(Rational::zero)
        };
        let mut common = Vec::new();
        let mut fa = self.frac.clone();
        let mut fb = other.frac.clone();
        for b in &bases {
            let ea = exp_of(self, b);
            let eb = exp_of(other, b);
            let diff = &ea - &eb;
            if !diff.is_integer() {
                return Err(Error::Unsupported(format!(
                    "sum of powers of ({b}) with exponents {} and {} that differ by a non-integer",
                    fmt_rational(&ea),
                    fmt_rational(&eb)
                )));
            }
            let lo = if ea < eb { ea.clone() } else { eb.clone() };
            let ka = int_u32(&(&ea - &lo))?;
            let kb = int_u32(&(&eb - &lo))?;
            if ka > 0 {
                fa = fa.mul_poly(&b.pow(ka));
            }
            if kb > 0 {
                fb = fb.mul_poly(&b.pow(kb));
            }
            common.push((b.clone(), lo));
        }
        normalize(fa.try_add(&fb)?, common)
    }

    pub fn try_sub(&self, other: &ScaledFraction) -> Result<ScaledFraction> {
        self.try_add(&-other)
    }

    /// `d/dx_i` of `F * prod b^e` is `prod b^e * (F' + F * sum e * b'/b)`.
    pub fn derivative(&self, i: usize) -> Result<ScaledFraction> {
        let mut inner = self.frac.derivative(i)?;
        for (b, e) in &self.powers {
            let db = b.derivative(i)?;
            if db.is_zero() {
                continue;
            }
            let term = self
                .frac
                .try_mul(&db)?
                .try_div(&Fraction::from_poly(b.clone()))?
                .scale(e);
            inner = inner.try_add(&term)?;
        }
        normalize(inner, self.powers.clone())
    }
}

fn int_u32(r: &Rational) -> Result<u32> {
    use num_traits::ToPrimitive;
    r.to_integer()
        .to_u32()
        .ok_or_else(|| Error::Unsupported("exponent difference out of range".into()))
}

fn normalize(frac: Fraction, powers: Vec<(Polynomial, Rational)>) -> Result<ScaledFraction> {
    if frac.is_zero() {
        let vt = frac.vars().clone();
        return Ok(ScaledFraction::zero(&vt));
    }
    let mut merged: Vec<(Polynomial, Rational)> = Vec::new();
    for (b, e) in powers {
        if let Some(slot) = merged.iter_mut().find(|(x, _)| *x == b) {
            slot.1 += e;
        } else {
            merged.push((b, e));
        }
    }
    let (mut num, mut den) = frac.into_parts();
    let mut kept = Vec::new();
    for (b, mut e) in merged {
        if e.is_zero() {
            continue;
        }
        if let Some(c) = b.constant_value() {
            if e.is_integer() {
                let k = e.to_integer();
                let k: i64 = num_traits::ToPrimitive::to_i64(&k)
                    .ok_or_else(|| Error::Unsupported("exponent out of range".into()))?;
                num = num.scale(&super::rational_pow(&c, k));
                continue;
            }
            kept.push((b, e));
            continue;
        }
        loop {
            if is_nonneg_integer(&e) {
                break;
            }
            match num.exact_divide(&b)? {
                Some(q) if !num.is_zero() => {
                    num = q;
                    e += Rational::one();
                }
                _ => break,
            }
        }
        if !is_nonneg_integer(&e) {
            while let Some(q) = den.exact_divide(&b)? {
                den = q;
                e -= Rational::one();
            }
        }
        if e.is_zero() {
            continue;
        }
        if is_nonneg_integer(&e) {
            num = &num * &b.pow(int_u32(&e)?);
            continue;
        }
        kept.push((b, e));
    }
    kept.sort_by_cached_key(|(b, _)| b.to_string());
    let frac = Fraction::new(num, den)?;
    if frac.is_zero() {
        let vt = frac.vars().clone();
        return Ok(ScaledFraction::zero(&vt));
    }
    Ok(ScaledFraction { frac, powers: kept })
}

impl PartialEq for ScaledFraction {
    fn eq(&self, other: &Self) -> bool {
        if !super::same_table(self.vars(), other.vars()) {
            return false;
        }
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let split = |s: &ScaledFraction| {
            let ints: Vec<_> = s
                .powers
                .iter()
                .filter(|(_, e)| e.is_integer())
                .cloned()
                .collect();
            let rest: Vec<_> = s
                .powers
                .iter()
                .filter(|(_, e)| !e.is_integer())
                .cloned()
                .collect();
            let f = ScaledFraction {
                frac: s.frac.clone(),
                powers: ints,
            }
            .to_fraction();
            (f, rest)
        };
        let (fa, ra) = split(self);
        let (fb, rb) = split(other);
        ra == rb && fa.is_some() && fa == fb
    }
}

impl fmt::Debug for ScaledFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScaledFraction({self})")
    }
}

/// Renders as `frac*(base)^(p/q)*...`, re-parseable when the bases are
/// declared positive.
impl fmt::Display for ScaledFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.powers.is_empty() {
            return write!(f, "{}", self.frac);
        }
        let head = self.frac.to_string();
        let mut out = String::new();
        if head == "-1" {
            out.push('-');
        } else if head != "1" {
            if self.frac.is_polynomial() && self.frac.num().nterms() > 1 {
                out.push_str(&format!("({head})*"));
            } else {
                out.push_str(&format!("{head}*"));
            }
        }
        let pw: Vec<String> = self
            .powers
            .iter()
            .map(|(b, e)| format!("({b})^({})", fmt_rational(e)))
            .collect();
        out.push_str(&pw.join("*"));
        write!(f, "{out}")
    }
}

impl From<Fraction> for ScaledFraction {
    fn from(f: Fraction) -> Self {
        ScaledFraction::from_fraction(f)
    }
}

impl From<Polynomial> for ScaledFraction {
    fn from(p: Polynomial) -> Self {
        ScaledFraction::from_poly(p)
    }
}

impl Mul<&ScaledFraction> for &ScaledFraction {
    type Output = ScaledFraction;
    fn mul(self, rhs: &ScaledFraction) -> ScaledFraction {
        self.try_mul(rhs).expect("operands share a variable table")
    }
}

impl Neg for &ScaledFraction {
    type Output = ScaledFraction;
    fn neg(self) -> ScaledFraction {
        ScaledFraction {
            frac: -&self.frac,
            powers: self.powers.clone(),
        }
    }
}

impl Neg for ScaledFraction {
    type Output = ScaledFraction;
    fn neg(self) -> ScaledFraction {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, ratio, VarTable};

    fn g4() -> (Arc<VarTable>, Polynomial) {
        let vt = VarTable::numbered(4);
        let g = (0..4)
            .map(|i| Polynomial::var(&vt, i).pow(2))
            .fold(Polynomial::zero(&vt), |a, b| &a + &b);
        (vt, g)
    }

    #[test]
    fn exponents_add() {
        let (_, g) = g4();
        let a = ScaledFraction::power(g.clone(), rat(-3)).unwrap();
        let b = &a * &a;
        assert_eq!(b.powers(), &[(g, rat(-6))]);
    }

    #[test]
    fn power_rule() {
        let (vt, g) = g4();
        let a = ScaledFraction::power(g.clone(), rat(-3)).unwrap();
        let d = a.derivative(0).unwrap();
        let expect = ScaledFraction::new(
            Fraction::from_poly(Polynomial::var(&vt, 0).scale(&rat(-6))),
            vec![(g, rat(-4))],
        )
        .unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn absorbs_base_from_numerator() {
        let (_, g) = g4();
        let a = ScaledFraction::new(
            Fraction::from_poly(g.clone()),
            vec![(g.clone(), ratio(-5, 2))],
        )
        .unwrap();
        assert_eq!(a.powers(), &[(g, ratio(-3, 2))]);
        assert!(a.frac().constant_value().unwrap().is_one());
    }

    #[test]
    fn integer_powers_equal_fraction() {
        let (vt, g) = g4();
        let a = ScaledFraction::power(g.clone(), rat(-3))
            .unwrap()
            .scale(&rat(2));
        let b = ScaledFraction::from_fraction(
            Fraction::new(Polynomial::constant(&vt, rat(2)), g.pow(3)).unwrap(),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn incompatible_sum() {
        let (vt, g) = g4();
        let a = ScaledFraction::power(g, ratio(1, 2)).unwrap();
        assert!(matches!(
            a.try_add(&ScaledFraction::one(&vt)),
            Err(Error::Unsupported(_))
        ));
    }
}
