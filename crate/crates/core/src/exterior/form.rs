use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{usage, Error, Result};
use crate::ring::{check_tables, Fraction, Polynomial, ScaledFraction, VarTable};

/// A differential k-form `sum c_I dx_I` over the base variables.
///
/// Keys are strictly increasing zero-based index tuples; zero coefficients
/// are never stored.
#[derive(Clone)]
pub struct KForm {
    vt: Arc<VarTable>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, ScaledFraction>,
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
pub(crate) fn sort_sign(idx: &mut [usize]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

impl KForm {
    pub fn zero(vt: &Arc<VarTable>, degree: usize) -> KForm {
        KForm {
            vt: vt.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The 0-form `c`.
    pub fn scalar(c: ScaledFraction) -> KForm {
        let mut f = KForm::zero(c.vars(), 0);
        if !c.is_zero() {
            f.coeffs.insert(Vec::new(), c);
        }
        f
    }

    /// `dx_i` (zero-based).
    pub fn dx(vt: &Arc<VarTable>, i: usize) -> KForm {
        assert!(i < vt.nbase(), "differential index out of range");
        let mut f = KForm::zero(vt, 1);
        f.coeffs.insert(vec![i], ScaledFraction::one(vt));
        f
    }

    /// `sum_i a_i dx_i`.
    pub fn one_form(vt: &Arc<VarTable>, coeffs: Vec<ScaledFraction>) -> Result<KForm> {
        if coeffs.len() != vt.nbase() {
            return usage(format!(
                "1-form needs {} coefficients, got {}",
                vt.nbase(),
                coeffs.len()
            ));
        }
        let mut f = KForm::zero(vt, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            check_tables(vt, c.vars())?;
            if !c.is_zero() {
                f.coeffs.insert(vec![i], c);
            }
        }
        Ok(f)
    }

    pub fn from_polys(vt: &Arc<VarTable>, coeffs: &[Polynomial]) -> Result<KForm> {
        KForm::one_form(
            vt,
            coeffs
                .iter()
                .cloned()
                .map(ScaledFraction::from_poly)
                .collect(),
        )
    }

    /// Builds a form from `(indices, coefficient)` pairs in any order,
    /// applying the permutation sign.
    pub fn from_terms(
        vt: &Arc<VarTable>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, ScaledFraction)>,
    ) -> Result<KForm> {
        let mut f = KForm::zero(vt, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return usage("index tuple length differs from the form degree");
            }
            if idx.iter().any(|&i| i >= vt.nbase()) {
                return usage("differential index out of range");
            }
            check_tables(vt, c.vars())?;
            let Some(sign) = sort_sign(&mut idx) else {
                continue;
            };
            let c = if sign < 0 { -c } else { c };
            f.add_term(idx, c)?;
        }
        Ok(f)
    }

    fn add_term(&mut self, idx: Vec<usize>, c: ScaledFraction) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        match self.coeffs.remove(&idx) {
            Some(old) => {
                let s = old.try_add(&c)?;
                if !s.is_zero() {
                    self.coeffs.insert(idx, s);
                }
            }
            None => {
                self.coeffs.insert(idx, c);
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vt
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &ScaledFraction)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> ScaledFraction {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| ScaledFraction::zero(&self.vt))
    }

    /// Coefficient vector of a 1-form.
    pub fn components(&self) -> Result<Vec<ScaledFraction>> {
        if self.degree != 1 {
            return usage("components are defined for 1-forms only");
        }
        Ok((0..self.vt.nbase()).map(|i| self.coeff(&[i])).collect())
    }

    pub fn try_add(&self, other: &KForm) -> Result<KForm> {
        check_tables(&self.vt, &other.vt)?;
        if self.degree != other.degree {
            return usage(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            ));
        }
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &KForm) -> Result<KForm> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> KForm {
        KForm {
            vt: self.vt.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale_by(&self, c: &ScaledFraction) -> Result<KForm> {
        check_tables(&self.vt, c.vars())?;
        let mut out = KForm::zero(&self.vt, self.degree);
        for (k, a) in &self.coeffs {
            let p = a.try_mul(c)?;
            if !p.is_zero() {
                out.coeffs.insert(k.clone(), p);
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        check_tables(&self.vt, &other.vt)?;
        let degree = self.degree + other.degree;
        let mut out = KForm::zero(&self.vt, degree);
        if degree > self.vt.nbase() {
            return Ok(out);
        }
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let mut idx: Vec<usize> = i.iter().chain(j).copied().collect();
                let Some(sign) = sort_sign(&mut idx) else {
                    continue;
                };
                let c = a.try_mul(b)?;
                out.add_term(idx, if sign < 0 { -c } else { c })?;
            }
        }
        Ok(out)
    }

    /// Exterior derivative. A form of top degree maps to the zero form of
    /// degree n+1.
    pub fn d(&self) -> Result<KForm> {
        let n = self.vt.nbase();
        let mut out = KForm::zero(&self.vt, self.degree + 1);
        if self.degree >= n {
            return Ok(out);
        }
        for (idx, c) in &self.coeffs {
            for i in 0..n {
                if idx.contains(&i) {
                    continue;
                }
                let dc = c.derivative(i)?;
                if dc.is_zero() {
                    continue;
                }
                let before = idx.iter().filter(|&&k| k < i).count();
                let mut key = idx.clone();
                key.insert(before, i);
                out.add_term(key, if before % 2 == 1 { -dc } else { dc })?;
            }
        }
        Ok(out)
    }

    /// The coefficient `B` of `B dx_1 ^ ... ^ dx_n`.
    pub fn volume_coefficient(&self) -> Result<ScaledFraction> {
        let n = self.vt.nbase();
        if self.degree != n {
            return usage(format!(
                "volume coefficient needs a form of degree {n}, got {}",
                self.degree
            ));
        }
        Ok(self.coeff(&(0..n).collect::<Vec<_>>()))
    }

    /// Replaces each `dx_i` with `i` in `subst` by the given 1-form.
    pub fn restrict(&self, subst: &BTreeMap<usize, KForm>) -> Result<KForm> {
        for (i, w) in subst {
            check_tables(&self.vt, w.vars())?;
            if w.degree != 1 {
                return usage(format!("substitution for dx{} is not a 1-form", i + 1));
            }
            if let Some(j) = w
                .coeffs
                .keys()
                .map(|k| k[0])
                .find(|j| subst.contains_key(j))
            {
                return usage(format!(
                    "cyclic elimination: the image of dx{} contains dx{}",
                    i + 1,
                    j + 1
                ));
            }
        }
        if subst.is_empty() {
            return Ok(self.clone());
        }
        let mut out = KForm::zero(&self.vt, self.degree);
        for (idx, c) in &self.coeffs {
            let mut acc = KForm::scalar(c.clone());
            for &i in idx {
                let factor = match subst.get(&i) {
                    Some(w) => w.clone(),
                    None => KForm::dx(&self.vt, i),
                };
                acc = acc.wedge(&factor)?;
                if acc.is_zero() {
                    break;
                }
            }
            if !acc.is_zero() {
                out = out.try_add(&acc)?;
            }
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(
        &self,
        f: impl Fn(&ScaledFraction) -> Result<ScaledFraction>,
    ) -> Result<KForm> {
        let mut out = KForm::zero(&self.vt, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), f(c)?)?;
        }
        Ok(out)
    }

    /// True when all coefficients are polynomials.
    pub fn is_polynomial(&self) -> bool {
        self.coeffs.values().all(|c| c.as_polynomial().is_some())
    }
}

/// Solves the 1-form equation `eq = 0` for `dx_var`, giving the image
/// `-(sum_{j != var} a_j dx_j) / a_var`.
pub fn solve_for(var: usize, eq: &KForm) -> Result<KForm> {
    if eq.degree != 1 {
        return usage("elimination equations must be 1-forms");
    }
    let pivot = eq.coeff(&[var]);
    if pivot.is_zero() {
        return Err(Error::Usage(format!(
            "equation does not contain dx{}",
            var + 1
        )));
    }
    let inv = pivot.recip()?;
    let mut out = KForm::zero(&eq.vt, 1);
    for (k, c) in &eq.coeffs {
        if k[0] == var {
            continue;
        }
        out.add_term(k.clone(), -c.try_mul(&inv)?)?;
    }
    Ok(out)
}

impl PartialEq for KForm {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .all(|(k, c)| other.coeffs.get(k).is_some_and(|o| o == c))
    }
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm[{}]({self})", self.degree)
    }
}

/// Renders as `(c)*dx1&dx3 + ...`, `0` for the zero form.
impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let basis: Vec<String> = k
                    .iter()
                    .map(|&i| format!("d{}", self.vt.base_vars()[i]))
                    .collect();
                let basis = basis.join("&");
                let cs = c.to_string();
                match (basis.is_empty(), cs.as_str()) {
                    (true, _) => format!("({cs})"),
                    (false, "1") => basis,
                    (false, "-1") => format!("-{basis}"),
                    _ => format!("({cs})*{basis}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl From<Fraction> for KForm {
    fn from(f: Fraction) -> KForm {
        KForm::scalar(ScaledFraction::from_fraction(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn setup(n: usize) -> (Arc<VarTable>, Vec<Polynomial>) {
        let vt = VarTable::numbered(n);
        let x = (0..n).map(|i| Polynomial::var(&vt, i)).collect();
        (vt, x)
    }

    fn sf(p: Polynomial) -> ScaledFraction {
        ScaledFraction::from_poly(p)
    }

    #[test]
    fn wedge_signs() {
        let (vt, _) = setup(2);
        let a = KForm::dx(&vt, 0);
        let b = KForm::dx(&vt, 1);
        assert!(a.wedge(&a).unwrap().is_zero());
        assert_eq!(b.wedge(&a).unwrap(), a.wedge(&b).unwrap().neg());
    }

    #[test]
    fn d_of_simple_form() {
        let (vt, x) = setup(4);
        let alpha = KForm::from_terms(&vt, 2, vec![(vec![2, 3], sf(x[0].clone()))]).unwrap();
        let expect =
            KForm::from_terms(&vt, 3, vec![(vec![0, 2, 3], ScaledFraction::one(&vt))]).unwrap();
        assert_eq!(alpha.d().unwrap(), expect);
    }

    #[test]
    fn restriction_example() {
        let (vt, x) = setup(4);
        let form =
            KForm::from_terms(&vt, 3, vec![(vec![0, 2, 3], ScaledFraction::one(&vt))]).unwrap();
        let a2 = -(&x[0] * &(&x[1].scale(&rat(-2)) + &x[0].pow(2)));
        let a3 = -(&x[0].pow(2) + &x[2].pow(2));
        let a4 = -(&x[1].pow(2) + &x[3].pow(2));
        let image = KForm::from_polys(&vt, &[Polynomial::zero(&vt), a2, a3, a4]).unwrap();
        let out = form.restrict(&BTreeMap::from([(0, image)])).unwrap();
        let expect_c = &x[0] * &(&x[1].scale(&rat(2)) - &x[0].pow(2));
        let expect = KForm::from_terms(&vt, 3, vec![(vec![1, 2, 3], sf(expect_c))]).unwrap();
        assert_eq!(out, expect);
        assert_eq!(form.restrict(&BTreeMap::new()).unwrap(), form);
    }

    #[test]
    fn restriction_drops_terms_that_vanish_early() {
        let (vt, _) = setup(3);
        let form =
            KForm::from_terms(&vt, 3, vec![(vec![0, 1, 2], ScaledFraction::one(&vt))]).unwrap();
        let out = form
            .restrict(&BTreeMap::from([(0, KForm::dx(&vt, 1))]))
            .unwrap();
        assert!(out.is_zero());
        assert_eq!(out.degree(), 3);
    }

    #[test]
    fn cyclic_plan_rejected() {
        let (vt, _) = setup(2);
        let subst = BTreeMap::from([(0, KForm::dx(&vt, 1)), (1, KForm::dx(&vt, 0))]);
        assert!(KForm::dx(&vt, 0).restrict(&subst).is_err());
    }

    #[test]
    fn volume_coefficient_checks_degree() {
        let (vt, _) = setup(3);
        let v = KForm::from_terms(&vt, 3, vec![(vec![0, 1, 2], ScaledFraction::one(&vt))]).unwrap();
        assert_eq!(v.volume_coefficient().unwrap(), ScaledFraction::one(&vt));
        assert!(KForm::dx(&vt, 0).volume_coefficient().is_err());
        assert!(KForm::zero(&vt, 3).volume_coefficient().unwrap().is_zero());
    }

    #[test]
    fn solving_an_equation() {
        let (vt, x) = setup(2);
        // x2 dx1 - dx2 = 0  =>  dx2 = x2 dx1
        let eq = KForm::from_polys(&vt, &[x[1].clone(), -Polynomial::one(&vt)]).unwrap();
        let img = solve_for(1, &eq).unwrap();
        assert_eq!(
            img,
            KForm::from_polys(&vt, &[x[1].clone(), Polynomial::zero(&vt)]).unwrap()
        );
    }
}
