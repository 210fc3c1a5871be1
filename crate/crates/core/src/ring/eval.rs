use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{rational_to_f64, Fraction, Polynomial, Rational, ScaledFraction};
use crate::error::{usage, Error, Result};

/// Result of evaluating at a rational point.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    /// -1, 0 or 1.
    pub fn sign(&self) -> i8 {
        match self {
            Value::Exact(r) => super::sign_of_rational(r),
            Value::Approx(x) if *x > 0.0 => 1,
            Value::Approx(x) if *x < 0.0 => -1,
            Value::Approx(_) => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    fn mul(self, other: Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            (a, b) => Value::Approx(a.to_f64() * b.to_f64()),
        }
    }

    fn div(self, other: Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a / b),
            (a, b) => Value::Approx(a.to_f64() / b.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{}", super::fmt_rational(r)),
            Value::Approx(x) => write!(f, "{}", crate::fmt_f64(*x)),
        }
    }
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
fn exact_sqrt(r: &Rational) -> Option<Rational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

fn check_point(p: &Polynomial, point: &[Rational]) -> Result<()> {
    if point.len() != p.vars().nbase() {
        return usage(format!(
            "point has {} coordinates, expected {}",
            point.len(),
            p.vars().nbase()
        ));
    }
    Ok(())
}

fn mono_value(exps: &[u32], point: &[Rational]) -> Rational {
    let mut v = Rational::from_integer(BigInt::from(1));
    for (&e, x) in exps.iter().zip(point) {
        if e > 0 {
            v *= num_traits::pow(x.clone(), e as usize);
        }
    }
    v
}

impl Polynomial {
    /// Evaluates at a rational point. Radicals whose square is a perfect
    /// rational square stay exact; otherwise the result is a double.
    pub fn eval(&self, point: &[Rational]) -> Result<Value> {
        check_point(self, point)?;
        let vt = self.vars();
        let nb = vt.nbase();
        let mut roots = Vec::with_capacity(vt.nrad());
        for r in vt.radicals() {
            let sq: Rational = r
                .square
                .iter()
                .map(|(e, c)| c * mono_value(e, point))
                .fold(Rational::zero(), |a, b| a + b);
            if sq.is_negative() {
                return Err(Error::Domain(format!(
                    "square of `{}` is negative at the point",
                    r.symbol
                )));
            }
            roots.push(match exact_sqrt(&sq) {
                Some(s) => Value::Exact(s),
                None => Value::Approx(rational_to_f64(&sq).sqrt()),
            });
        }
        let exact = roots.iter().all(Value::is_exact);
        if exact {
            let mut acc = Rational::zero();
            for (m, c) in self.terms() {
                let mut t = c * mono_value(&m.exps()[..nb], point);
                for (r, root) in roots.iter().enumerate() {
                    if m.exp(nb + r) == 1 {
                        if let Value::Exact(s) = root {
                            t *= s;
                        }
                    }
                }
                acc += t;
            }
            return Ok(Value::Exact(acc));
        }
        // Sum radical-free parts exactly, then combine with the roots.
        let mut acc = 0.0;
        let mut groups: std::collections::BTreeMap<Vec<u32>, Rational> = Default::default();
        for (m, c) in self.terms() {
            let key = m.exps()[nb..].to_vec();
            let v = c * mono_value(&m.exps()[..nb], point);
            *groups.entry(key).or_insert_with(Rational::zero) += v;
        }
        for (key, coeff) in groups {
            let mut t = rational_to_f64(&coeff);
            for (r, &e) in key.iter().enumerate() {
                if e == 1 {
                    t *= roots[r].to_f64();
                }
            }
            acc += t;
        }
        Ok(Value::Approx(acc))
    }
}

impl Fraction {
    pub fn eval(&self, point: &[Rational]) -> Result<Value> {
        let d = self.den().eval(point)?;
        if d.is_zero() {
            return Err(Error::Singular("denominator vanishes at the point".into()));
        }
        Ok(self.num().eval(point)?.div(d))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num().eval_f64(point) / self.den().eval_f64(point)
    }
}

impl ScaledFraction {
    pub fn eval(&self, point: &[Rational]) -> Result<Value> {
        let mut v = self.frac().eval(point)?;
        for (b, e) in self.powers() {
            let bv = b.eval(point)?;
            let pv = power_value(bv, e)?;
            v = v.mul(pv);
        }
        Ok(v)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut v = self.frac().eval_f64(point);
        for (b, e) in self.powers() {
            v *= b.eval_f64(point).powf(rational_to_f64(e));
        }
        v
    }
}

fn power_value(base: Value, e: &Rational) -> Result<Value> {
    if base.is_zero() {
        if e.is_negative() {
            return Err(Error::Singular(
                "power base vanishes with negative exponent".into(),
            ));
        }
        return Ok(Value::Exact(Rational::zero()));
    }
    if e.is_integer() {
        let k = e
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Unsupported("exponent out of range".into()))?;
        return Ok(match base {
            Value::Exact(b) => Value::Exact(super::rational_pow(&b, k)),
            Value::Approx(b) => Value::Approx(b.powi(k as i32)),
        });
    }
    if base.sign() < 0 {
        return Err(Error::Domain("fractional power of a negative base".into()));
    }
    if let Value::Exact(b) = &base {
        if e.denom() == &BigInt::from(2) {
            if let Some(s) = exact_sqrt(b) {
                let k = e.numer().to_i64().unwrap_or(0);
                return Ok(Value::Exact(super::rational_pow(&s, k)));
            }
        }
    }
    Ok(Value::Approx(base.to_f64().powf(rational_to_f64(e))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, ratio, VarTable};

    #[test]
    fn evaluates_g_and_powers() {
        let vt = VarTable::numbered(4);
        let g = (0..4)
            .map(|i| Polynomial::var(&vt, i).pow(2))
            .fold(Polynomial::zero(&vt), |a, b| &a + &b);
        let p = [rat(1), rat(0), rat(0), rat(0)];
        assert_eq!(g.eval(&p).unwrap(), Value::Exact(rat(1)));
        let e = ScaledFraction::power(g, rat(-3)).unwrap().scale(&rat(2));
        let ones = [rat(1), rat(1), rat(1), rat(1)];
        assert_eq!(e.eval(&ones).unwrap(), Value::Exact(ratio(1, 32)));
    }

    #[test]
    fn singular_denominator() {
        let vt = VarTable::numbered(1);
        let f = Fraction::new(Polynomial::one(&vt), Polynomial::var(&vt, 0)).unwrap();
        assert!(matches!(f.eval(&[rat(0)]), Err(Error::Singular(_))));
    }

    #[test]
    fn radical_values() {
        let pre = VarTable::numbered(2);
        let mut t = (*pre).clone();
        let sq = &Polynomial::var(&pre, 0).pow(2) + &Polynomial::var(&pre, 1).pow(2);
        t.add_radical("s", &sq).unwrap();
        let vt = std::sync::Arc::new(t);
        let s = Polynomial::radical(&vt, 0);
        assert_eq!(s.eval(&[rat(3), rat(4)]).unwrap(), Value::Exact(rat(5)));
        let v = s.eval(&[rat(1), rat(1)]).unwrap();
        assert!((v.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }
}
