use crate::error::{usage, Error, Result};
use crate::ring::{Monomial, Polynomial, Rational};

use super::KForm;

/// Potential of a closed 1-form with polynomial coefficients.
///
/// Uses `F(x) = int_0^1 sum_i x_i w_i(t x) dt`, integrated term by term, so
/// `dF = w` and `F(0) = 0`.
pub fn potential(w: &KForm) -> Result<Polynomial> {
    if w.degree() != 1 {
        return usage("potential is defined for 1-forms");
    }
    let vt = w.vars().clone();
    let mut comps = Vec::with_capacity(vt.nbase());
    for c in w.components()? {
        match c.as_polynomial() {
            Some(p) if !p.has_radicals() => comps.push(p),
            _ => {
                return Err(Error::Unsupported(
                    "potential needs polynomial coefficients".into(),
                ))
            }
        }
    }
    if !w.d()?.is_zero() {
        return Err(Error::Precondition("the 1-form is not closed".into()));
    }
    let width = vt.width();
    let mut terms = Vec::new();
    for (i, p) in comps.iter().enumerate() {
        let xi = Monomial::var(width, i);
        for (m, c) in p.terms() {
            let k = Rational::from_integer((m.degree() + 1).into());
            terms.push((m.mul(&xi), c / k));
        }
    }
    Ok(Polynomial::from_terms(&vt, terms))
}
