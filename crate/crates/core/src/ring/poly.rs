use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{check_tables, fmt_rational, Fraction, Monomial, Rational, VarTable};
use crate::error::{usage, Result};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex monomials, so the last entry
/// is the leading term. Radical exponents are always 0 or 1.
#[derive(Clone)]
pub struct Polynomial {
    vt: Arc<VarTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vt: &Arc<VarTable>) -> Polynomial {
        Polynomial {
            vt: vt.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vt: &Arc<VarTable>) -> Polynomial {
        Polynomial::constant(vt, Rational::one())
    }

    pub fn constant(vt: &Arc<VarTable>, c: Rational) -> Polynomial {
        let mut p = Polynomial::zero(vt);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vt.width()), c);
        }
        p
    }

    /// The base variable `x_i` (zero-based).
    pub fn var(vt: &Arc<VarTable>, i: usize) -> Polynomial {
        assert!(i < vt.nbase(), "base variable index out of range");
        let mut p = Polynomial::zero(vt);
        p.terms
            .insert(Monomial::var(vt.width(), i), Rational::one());
        p
    }

    /// The radical symbol number `r`.
    pub fn radical(vt: &Arc<VarTable>, r: usize) -> Polynomial {
        assert!(r < vt.nrad(), "radical index out of range");
        let mut p = Polynomial::zero(vt);
        p.terms
            .insert(Monomial::var(vt.width(), vt.nbase() + r), Rational::one());
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and reducing
    /// radical exponents.
    pub fn from_terms(
        vt: &Arc<VarTable>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Polynomial {
        let mut acc = Accum::new(vt);
        for (m, c) in terms {
            assert_eq!(m.exps().len(), vt.width(), "monomial width mismatch");
            acc.add_reduced(m, c);
        }
        acc.finish()
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vt
    }

    pub fn terms(
        &self,
    ) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn has_radicals(&self) -> bool {
        let nb = self.vt.nbase();
        self.terms
            .keys()
            .any(|m| m.exps()[nb..].iter().any(|&e| e > 0))
    }

    pub fn has_radical(&self, r: usize) -> bool {
        let slot = self.vt.nbase() + r;
        self.terms.keys().any(|m| m.exp(slot) > 0)
    }

    /// Degree in base variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(i)).max().unwrap_or(0)
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_tables(&self.vt, &other.vt)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Polynomial {
            vt: self.vt.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        check_tables(&self.vt, &other.vt)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&self.vt));
        }
        let mut acc = Accum::new(&self.vt);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc.add_reduced(ma.mul(mb), ca * cb);
            }
        }
        Ok(acc.finish())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vt);
        }
        Polynomial {
            vt: self.vt.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.vt);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplies by a monomial. Radical slots of `m` must be zero.
    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            vt: self.vt.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    /// Divides by a monomial that divides every term.
    pub(crate) fn div_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            vt: self.vt.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.div(m), c.clone()))
                .collect(),
        }
    }

    /// Greatest monomial dividing every term, restricted to base variables.
    pub(crate) fn monomial_content(&self) -> Monomial {
        let nb = self.vt.nbase();
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.vt.width());
        };
        let mut g = first.clone();
        for m in it {
            g = g.gcd(m);
        }
        let mut e = g.exps().to_vec();
        for x in &mut e[nb..] {
            *x = 0;
        }
        Monomial::new(e)
    }

    /// Rational `c > 0` such that `self * c` has coprime integer
    /// coefficients, with the sign chosen so the leading coefficient of the
    /// result is positive.
    pub(crate) fn primitive_scale(&self) -> Rational {
        let mut lcm_den = num_bigint::BigInt::one();
        let mut gcd_num = num_bigint::BigInt::zero();
        for c in self.terms.values() {
            lcm_den = lcm_den.lcm(c.denom());
            gcd_num = gcd_num.gcd(c.numer());
        }
        if gcd_num.is_zero() {
            return Rational::one();
        }
        let mut s = Rational::new(lcm_den, gcd_num);
        if self.leading().is_some_and(|(_, c)| c.is_negative()) {
            s = -s;
        }
        s
    }

    /// Replaces radical `r` by its negative.
    pub fn conjugate(&self, r: usize) -> Polynomial {
        let slot = self.vt.nbase() + r;
        Polynomial {
            vt: self.vt.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    if m.exp(slot) == 1 {
                        (m.clone(), -c)
                    } else {
                        (m.clone(), c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Partial derivative treating radical symbols as constants.
    pub fn formal_derivative(&self, i: usize) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                add_term(
                    &mut terms,
                    m.with_exp(i, e - 1),
                    c * Rational::from_integer(e.into()),
                );
            }
        }
        Polynomial {
            vt: self.vt.clone(),
            terms,
        }
    }

    /// Partial derivative in base variable `i`, with `ds/dx_i = (d square/dx_i) / (2s)`.
    pub fn derivative(&self, i: usize) -> Result<Fraction> {
        if i >= self.vt.nbase() {
            return usage(format!("derivative index {i} is not a base variable"));
        }
        let mut out = Fraction::from_poly(self.formal_derivative(i));
        let nb = self.vt.nbase();
        for r in 0..self.vt.nrad() {
            let slot = nb + r;
            let part = Polynomial {
                vt: self.vt.clone(),
                terms: self
                    .terms
                    .iter()
                    .filter(|(m, _)| m.exp(slot) == 1)
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect(),
            };
            if part.is_zero() {
                continue;
            }
            let sq = VarTable::radical_square(&self.vt, r);
            let dsq = sq.formal_derivative(i);
            if dsq.is_zero() {
                continue;
            }
            // (part) * dsq / (2 sq), since d(B s) carries B s * dsq / (2 sq)
            let extra = Fraction::new(&part * &dsq, sq.scale(&super::rat(2)))?;
            out = &out + &extra;
        }
        Ok(out)
    }

    /// Exact quotient `self / b`, or `None` when `b` does not divide `self`.
    pub fn exact_divide(&self, b: &Polynomial) -> Result<Option<Polynomial>> {
        check_tables(&self.vt, &b.vt)?;
        if b.is_zero() {
            return usage("division by the zero polynomial");
        }
        if self.is_zero() {
            return Ok(Some(Polynomial::zero(&self.vt)));
        }
        let (mut a, mut b) = (self.clone(), b.clone());
        for r in 0..self.vt.nrad() {
            if b.has_radical(r) {
                let conj = b.conjugate(r);
                a = &a * &conj;
                b = &b * &conj;
            }
        }
        Ok(divide_radical_free(&a, &b))
    }

    /// Evaluates with radicals as `sqrt(square)` in double precision.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let nb = self.vt.nbase();
        let rads: Vec<f64> = (0..self.vt.nrad())
            .map(|r| {
                self.vt.radicals()[r]
                    .square
                    .iter()
                    .map(|(e, c)| super::rational_to_f64(c) * mono_f64(e, point))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = super::rational_to_f64(c) * mono_f64(&m.exps()[..nb], point);
                for (r, s) in rads.iter().enumerate() {
                    if m.exp(nb + r) == 1 {
                        v *= s;
                    }
                }
                v
            })
            .sum()
    }

    /// Gradient in double precision, radical-free polynomials only.
    pub fn grad_f64(&self, point: &[f64]) -> Vec<f64> {
        (0..self.vt.nbase())
            .map(|i| self.formal_derivative(i).eval_f64(point))
            .collect()
    }

    /// Base variables that appear in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.vt.nbase())
            .filter(|&i| self.terms.keys().any(|m| m.exp(i) > 0))
            .collect()
    }

    /// Substitutes polynomials for every base variable. Radical-free input only.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if self.has_radicals() {
            return usage("composition of radical expressions is not supported");
        }
        let target = images
            .first()
            .map(|p| p.vt.clone())
            .unwrap_or_else(|| self.vt.clone());
        let mut out = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&target, c.clone());
            for (i, img) in images.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t = t.try_mul(&img.pow(e))?;
                }
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }
}

fn mono_f64(e: &[u32], point: &[f64]) -> f64 {
    e.iter()
        .zip(point)
        .map(|(&k, &x)| if k == 0 { 1.0 } else { x.powi(k as i32) })
        .product()
}

fn add_term(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Collects terms, replacing `s^2` by the radical's square as they arrive.
struct Accum<'a> {
    vt: &'a Arc<VarTable>,
    terms: BTreeMap<Monomial, Rational>,
    squares: Vec<Option<Polynomial>>,
}

impl<'a> Accum<'a> {
    fn new(vt: &'a Arc<VarTable>) -> Self {
        Accum {
            vt,
            terms: BTreeMap::new(),
            squares: vec![None; vt.nrad()],
        }
    }

    fn add_reduced(&mut self, m: Monomial, c: Rational) {
        let nb = self.vt.nbase();
        let needs = (0..self.vt.nrad()).any(|r| m.exp(nb + r) >= 2);
        if !needs {
            add_term(&mut self.terms, m, c);
            return;
        }
        let mut base = m.exps().to_vec();
        let mut factors: Vec<(usize, u32)> = Vec::new();
        for r in 0..self.vt.nrad() {
            let e = base[nb + r];
            if e >= 2 {
                factors.push((r, e / 2));
                base[nb + r] = e % 2;
            }
        }
        let mut expansion: Vec<(Monomial, Rational)> = vec![(Monomial::new(base), c)];
        for (r, k) in factors {
            let sq = self.squares[r]
                .get_or_insert_with(|| VarTable::radical_square(self.vt, r))
                .pow(k);
            let mut next = Vec::with_capacity(expansion.len() * sq.nterms());
            for (m1, c1) in &expansion {
                for (m2, c2) in sq.terms() {
                    next.push((m1.mul(m2), c1 * c2));
                }
            }
            expansion = next;
        }
        for (m, c) in expansion {
            add_term(&mut self.terms, m, c);
        }
    }

    fn finish(self) -> Polynomial {
        Polynomial {
            vt: self.vt.clone(),
            terms: self.terms,
        }
    }
}

/// Single-divisor multivariate division; `b` carries no radical.
fn divide_radical_free(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let (lm, lc) = b.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    let mut r = a.terms.clone();
    let mut q = BTreeMap::new();
    while let Some((m, c)) = r.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        if !lm.divides(&m) {
            return None;
        }
        let tm = m.div(&lm);
        let tc = &c / &lc;
        for (bm, bc) in &b.terms {
            add_term(&mut r, bm.mul(&tm), -(&tc * bc));
        }
        add_term(&mut q, tm, tc);
    }
    Some(Polynomial {
        vt: a.vt.clone(),
        terms: q,
    })
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        super::same_table(&self.vt, &other.vt) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

/// Canonical rendering, leading term first, e.g. `2*x1^2*x2 - 3/4*s + 1`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let mono = render_monomial(&self.vt, m);
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

fn render_monomial(vt: &VarTable, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (slot, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vt.name_at(slot).to_string()),
            _ => parts.push(format!("{}^{e}", vt.name_at(slot))),
        }
    }
    parts.join("*")
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                self.$inner(rhs).expect("operands share a variable table")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vt: self.vt.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, VarTable};

    fn xs(n: usize) -> (Arc<VarTable>, Vec<Polynomial>) {
        let vt = VarTable::numbered(n);
        let v = (0..n).map(|i| Polynomial::var(&vt, i)).collect();
        (vt, v)
    }

    #[test]
    fn sum_of_squares_adds() {
        let (_, x) = xs(4);
        let a = &x[0] * &x[0] + &x[1] * &x[1];
        let b = &x[2] * &x[2] + &x[3] * &x[3];
        assert_eq!((&a + &b).to_string(), "x1^2 + x2^2 + x3^2 + x4^2");
    }

    #[test]
    fn identities() {
        let (vt, x) = xs(2);
        let p = &x[0] * &x[1] + x[0].clone();
        assert_eq!(&p + &Polynomial::zero(&vt), p);
        assert_eq!(&p * &Polynomial::one(&vt), p);
    }

    #[test]
    fn exact_division() {
        let (vt, x) = xs(3);
        let one = Polynomial::one(&vt);
        let g = &x[0] * &x[0] + &x[1] * &x[1] + &x[2] * &x[2];
        let a = (&x[1] * &x[1]).scale(&rat(2)) * (&g - &one);
        let q = a.exact_divide(&(&g - &one)).unwrap().unwrap();
        assert_eq!(q, (&x[1] * &x[1]).scale(&rat(2)));

        let a = &x[0] * &x[0] - one.clone();
        let q = a.exact_divide(&(&x[0] + &one)).unwrap().unwrap();
        assert_eq!(q, &x[0] - &one);

        let a = &x[0] * &x[0] + one.clone();
        assert!(a.exact_divide(&x[0]).unwrap().is_none());
        assert!(a.exact_divide(&Polynomial::zero(&vt)).is_err());
    }

    #[test]
    fn radical_reduces() {
        let mut t = VarTable::new(vec!["x1".into(), "x2".into()], vec![]).unwrap();
        let pre = Arc::new(t.clone());
        let sq = &Polynomial::var(&pre, 0) * &Polynomial::var(&pre, 0)
            + &Polynomial::var(&pre, 1) * &Polynomial::var(&pre, 1);
        t.add_radical("s", &sq).unwrap();
        let vt = Arc::new(t);
        let s = Polynomial::radical(&vt, 0);
        let x1 = Polynomial::var(&vt, 0);
        let x2 = Polynomial::var(&vt, 1);
        assert_eq!(&s * &s, &x1 * &x1 + &x2 * &x2);
        let cube = s.pow(3);
        assert_eq!(cube, &(&x1 * &x1 + &x2 * &x2) * &s);
        // (s - x1) divides s^2 - x1^2 = x2^2
        let q = (&x2 * &x2).exact_divide(&(&s - &x1)).unwrap().unwrap();
        assert_eq!(q, &s + &x1);
    }

    #[test]
    fn mismatched_tables() {
        let (_, x) = xs(2);
        let (_, y) = xs(3);
        assert!(x[0].try_add(&y[0]).is_err());
    }
}
