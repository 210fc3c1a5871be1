//! The system classes and the constructions between them.
//!
//! System indices `j` in this module's public API are one-based, matching
//! the usual numbering of time variables and operators. Variable indices
//! stay zero-based as everywhere else.

pub mod linalg;

use std::sync::Arc;

use crate::error::{usage, Result};
use crate::exterior::{DiffOperator, KForm, VectorField};
use crate::ring::{Polynomial, ScaledFraction, VarTable};
use crate::sign::PointSampler;

pub use linalg::{RatMatrix, UPoly};

/// `dx/dt = f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    pub f: VectorField,
}

/// `dx = X(x) dt` with `t` in R^m; column `j` is the field `X^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalSystem {
    pub columns: Vec<VectorField>,
}

/// `X_j(x) y = 0`, `j = 1..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSystem {
    pub operators: Vec<DiffOperator>,
}

/// `omega_j(x) = 0` for 1-forms.
#[derive(Debug, Clone, PartialEq)]
pub struct PfaffSystem {
    pub forms: Vec<KForm>,
}

/// `zeta_j(x) = 0` for forms of degree `1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorSystem {
    pub zetas: Vec<KForm>,
}

/// `dx = A(x) dt` with constant matrices; entry `(tau, i)` of `A_j` is the
/// coefficient of `x_i` in the `dt_j` part of `dx_tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTotalSystem {
    pub matrices: Vec<RatMatrix>,
}

fn require_polynomial(f: &VectorField, what: &str) -> Result<()> {
    if f.as_polynomials().is_none() {
        return usage(format!("{what} must have polynomial components"));
    }
    Ok(())
}

fn check_count(m: usize, n: usize, what: &str) -> Result<()> {
    if m == 0 {
        return usage(format!("{what} needs at least one entry"));
    }
    if m >= n {
        return usage(format!(
            "{what} must have fewer than n = {n} entries, got {m}"
        ));
    }
    Ok(())
}

impl OdeSystem {
    pub fn new(f: VectorField) -> Result<OdeSystem> {
        require_polynomial(&f, "system (D)")?;
        Ok(OdeSystem { f })
    }

    pub fn from_polys(vt: &Arc<VarTable>, f: &[Polynomial]) -> Result<OdeSystem> {
        OdeSystem::new(VectorField::from_polys(vt, f)?)
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.f.vars()
    }

    pub fn dim(&self) -> usize {
        self.f.vars().nbase()
    }
}

impl TotalSystem {
    pub fn new(columns: Vec<VectorField>) -> Result<TotalSystem> {
        let n = columns.first().map_or(0, |c| c.vars().nbase());
        check_count(columns.len(), n.max(1), "total system")?;
        for c in &columns {
            require_polynomial(c, "total system")?;
        }
        Ok(TotalSystem { columns })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.columns[0].vars()
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    /// The system `(D_j)`: `dx = X^j(x) dt_j`.
    pub fn induced_ode(&self, j: usize) -> Result<OdeSystem> {
        column(&self.columns, j).map(|f| OdeSystem { f })
    }

    pub fn operators(&self) -> &[DiffOperator] {
        &self.columns
    }
}

impl PartialSystem {
    pub fn new(operators: Vec<DiffOperator>) -> Result<PartialSystem> {
        let n = operators.first().map_or(0, |c| c.vars().nbase());
        check_count(operators.len(), n.max(1), "partial system")?;
        for c in &operators {
            require_polynomial(c, "partial system")?;
        }
        Ok(PartialSystem { operators })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.operators[0].vars()
    }

    pub fn m(&self) -> usize {
        self.operators.len()
    }

    /// The characteristic system of operator `j`.
    pub fn induced_ode(&self, j: usize) -> Result<OdeSystem> {
        column(&self.operators, j).map(|f| OdeSystem { f })
    }
}

fn column(cols: &[VectorField], j: usize) -> Result<VectorField> {
    if j == 0 || j > cols.len() {
        return usage(format!("index j = {j} is outside 1..={}", cols.len()));
    }
    Ok(cols[j - 1].clone())
}

impl PfaffSystem {
    pub fn new(forms: Vec<KForm>) -> Result<PfaffSystem> {
        let n = forms.first().map_or(0, |c| c.vars().nbase());
        check_count(forms.len(), n.max(1), "Pfaff system")?;
        if forms.iter().any(|w| w.degree() != 1) {
            return usage("Pfaff systems consist of 1-forms");
        }
        Ok(PfaffSystem { forms })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.forms[0].vars()
    }

    pub fn as_exterior(&self) -> ExteriorSystem {
        ExteriorSystem {
            zetas: self.forms.clone(),
        }
    }
}

impl ExteriorSystem {
    pub fn new(zetas: Vec<KForm>) -> Result<ExteriorSystem> {
        let Some(first) = zetas.first() else {
            return usage("exterior system needs at least one form");
        };
        let n = first.vars().nbase();
        for z in &zetas {
            if z.degree() == 0 || z.degree() >= n {
                return usage(format!(
                    "form degrees must lie in 1..={}, got {}",
                    n - 1,
                    z.degree()
                ));
            }
        }
        Ok(ExteriorSystem { zetas })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.zetas[0].vars()
    }
}

impl LinearTotalSystem {
    pub fn new(matrices: Vec<RatMatrix>) -> Result<LinearTotalSystem> {
        let Some(first) = matrices.first() else {
            return usage("linear total system needs at least one matrix");
        };
        let n = first.rows();
        if matrices.iter().any(|a| !a.is_square() || a.rows() != n) {
            return usage("all matrices must be square of the same size");
        }
        Ok(LinearTotalSystem { matrices })
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].rows()
    }
}

/// The `n(n-1)/2` forms `psi_qh = f_q dx_h - f_h dx_q`, `q < h`, in
/// lexicographic order of `(q, h)`, together with the one-based pairs.
pub fn pfaff_from_ode(s: &OdeSystem) -> Result<(PfaffSystem, Vec<(usize, usize)>)> {
    let vt = s.vars();
    let n = vt.nbase();
    if n < 2 {
        return usage("the induced Pfaff system needs n >= 2");
    }
    let mut forms = Vec::new();
    let mut pairs = Vec::new();
    for q in 0..n {
        for h in q + 1..n {
            let mut coeffs = vec![ScaledFraction::zero(vt); n];
            coeffs[h] = s.f.component(q).clone();
            coeffs[q] = -s.f.component(h);
            forms.push(KForm::one_form(vt, coeffs)?);
            pairs.push((q + 1, h + 1));
        }
    }
    Ok((PfaffSystem { forms }, pairs))
}

/// The fields `Phi_tau`, `tau = 1..n-1`, with `phi_l = delta_{l tau} a_n`
/// and `phi_n = -a_tau`, each orthogonal to `(a_1, .., a_n)`.
pub fn orthogonal_basis_fields(w: &KForm) -> Result<Vec<VectorField>> {
    let a = w.components()?;
    let vt = w.vars();
    let n = a.len();
    (0..n - 1)
        .map(|tau| {
            let mut comps = vec![ScaledFraction::zero(vt); n];
            comps[tau] = a[n - 1].clone();
            comps[n - 1] = -&a[tau];
            VectorField::new(vt, comps)
        })
        .collect()
}

/// Outcome of the pairwise bracket test.
#[derive(Debug, Clone)]
pub struct FrobeniusReport {
    pub solvable: bool,
    /// One-based pair and its nonzero bracket.
    pub failing: Option<(usize, usize, VectorField)>,
}

pub fn frobenius_total(ops: &[DiffOperator]) -> Result<FrobeniusReport> {
    for j in 0..ops.len() {
        for l in j + 1..ops.len() {
            let b = ops[j].lie_bracket(&ops[l])?;
            if !b.is_zero() {
                return Ok(FrobeniusReport {
                    solvable: false,
                    failing: Some((j + 1, l + 1, b)),
                });
            }
        }
    }
    Ok(FrobeniusReport {
        solvable: true,
        failing: None,
    })
}

#[derive(Debug, Clone)]
pub struct PfaffFrobenius {
    pub integrable: bool,
    /// `d omega ^ omega`.
    pub residual: KForm,
}

pub fn frobenius_pfaffian(w: &KForm) -> Result<PfaffFrobenius> {
    if w.degree() != 1 {
        return usage("the Frobenius condition applies to a 1-form");
    }
    let residual = w.d()?.wedge(w)?;
    Ok(PfaffFrobenius {
        integrable: residual.is_zero(),
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct CommutingReport {
    pub commuting: bool,
    /// One-based indices of a non-commuting pair.
    pub failing: Option<(usize, usize)>,
}

pub fn linear_commuting(s: &LinearTotalSystem) -> Result<CommutingReport> {
    let a = &s.matrices;
    for j in 0..a.len() {
        for l in j + 1..a.len() {
            if a[j].mul(&a[l])? != a[l].mul(&a[j])? {
                return Ok(CommutingReport {
                    commuting: false,
                    failing: Some((j + 1, l + 1)),
                });
            }
        }
    }
    Ok(CommutingReport {
        commuting: true,
        failing: None,
    })
}

/// Largest rank of the coefficient matrix whose rows are `rows`, over
/// `count` random rational points where every entry is finite.
pub fn generic_rank(rows: &[Vec<ScaledFraction>], count: usize, seed: u64) -> usize {
    let Some(first) = rows.first().and_then(|r| r.first()) else {
        return 0;
    };
    let n = first.vars().nbase();
    let mut sampler = PointSampler::new(seed);
    let mut best = 0;
    for _ in 0..count {
        let p = sampler.next_point(n);
        let vals: Option<Vec<Vec<_>>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c.eval(&p) {
                        Ok(crate::ring::Value::Exact(v)) => Some(v),
                        Ok(crate::ring::Value::Approx(x)) => crate::ring::Rational::from_float(x),
                        Err(_) => None,
                    })
                    .collect()
            })
            .collect();
        if let Some(v) = vals {
            if let Ok(m) = RatMatrix::new(v) {
                best = best.max(m.rank());
            }
        }
        if best == rows.len() {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, VarTable};

    #[test]
    fn frobenius_examples() {
        let vt = VarTable::numbered(2);
        let x1 = Polynomial::var(&vt, 0);
        let x2 = Polynomial::var(&vt, 1);
        let z = Polynomial::zero(&vt);
        let a = VectorField::from_polys(&vt, &[x1.clone(), z.clone()]).unwrap();
        let b = VectorField::from_polys(&vt, &[z.clone(), x2]).unwrap();
        assert!(frobenius_total(&[a, b]).unwrap().solvable);
        let d1 = VectorField::coordinate(&vt, 0);
        let y = VectorField::from_polys(&vt, &[z, x1]).unwrap();
        let r = frobenius_total(&[d1, y]).unwrap();
        assert!(!r.solvable);
        assert_eq!(r.failing.unwrap().2, VectorField::coordinate(&vt, 1));
    }

    #[test]
    fn frobenius_pfaffian_examples() {
        let vt = VarTable::base_only(&["x", "y", "z"]);
        let (x, y, z) = (
            Polynomial::var(&vt, 0),
            Polynomial::var(&vt, 1),
            Polynomial::var(&vt, 2),
        );
        let w = KForm::from_polys(
            &vt,
            &[&y * &z, (&x * &z).scale(&rat(2)), (&x * &y).scale(&rat(3))],
        )
        .unwrap();
        assert!(frobenius_pfaffian(&w).unwrap().integrable);
        let w = KForm::from_polys(
            &vt,
            &[z.clone(), Polynomial::one(&vt), Polynomial::zero(&vt)],
        )
        .unwrap();
        let r = frobenius_pfaffian(&w).unwrap();
        assert!(!r.integrable);
        assert!(!r.residual.is_zero());
    }

    #[test]
    fn commuting_matrices() {
        let a = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let b = RatMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        let s = LinearTotalSystem::new(vec![a.clone(), b]).unwrap();
        assert!(!linear_commuting(&s).unwrap().commuting);
        let s = LinearTotalSystem::new(vec![RatMatrix::identity(2), a]).unwrap();
        assert!(linear_commuting(&s).unwrap().commuting);
    }

    #[test]
    fn orthogonal_fields_pattern() {
        let vt = VarTable::base_only(&["x", "y", "z"]);
        let (x, y, z) = (
            Polynomial::var(&vt, 0),
            Polynomial::var(&vt, 1),
            Polynomial::var(&vt, 2),
        );
        let a = [&y * &z, (&x * &z).scale(&rat(2)), (&x * &y).scale(&rat(3))];
        let w = KForm::from_polys(&vt, &a).unwrap();
        let phis = orthogonal_basis_fields(&w).unwrap();
        let expect = VectorField::from_polys(
            &vt,
            &[(&x * &y).scale(&rat(3)), Polynomial::zero(&vt), -(&y * &z)],
        )
        .unwrap();
        assert_eq!(phis[0], expect);
        let comps = w.components().unwrap();
        for p in &phis {
            assert!(p.dot(&comps).unwrap().is_zero());
        }
    }
}
