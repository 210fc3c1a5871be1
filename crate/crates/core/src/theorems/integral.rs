//! Certificates that a level set `w = 0` is an integral hypersurface.

use super::{Audit, CheckReport, KIND_INTEGRAL};
use crate::error::{usage, Result};
use crate::exterior::{DiffOperator, KForm};
use crate::ring::{Fraction, Polynomial, ScaledFraction};

/// `X_j w = lambda_j w` for every operator.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCertificate {
    pub w: Polynomial,
    pub cofactors: Vec<Fraction>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartialIntegral {
    Certificate(InvariantCertificate),
    /// One-based operator whose image is not divisible by `w`.
    Failure {
        operator: usize,
        image: ScaledFraction,
    },
}

/// `image / w` when the numerator of `image` is divisible by `w`.
fn cofactor(image: &ScaledFraction, w: &Polynomial) -> Result<Option<Fraction>> {
    let Some(fr) = image.to_fraction() else {
        return Ok(None);
    };
    match fr.num().exact_divide(w)? {
        Some(q) => Ok(Some(Fraction::new(q, fr.den().clone())?)),
        None => Ok(None),
    }
}

pub fn verify_partial_integral(ops: &[DiffOperator], w: &Polynomial) -> Result<PartialIntegral> {
    if w.is_zero() {
        return usage("the candidate w must not be identically zero");
    }
    let mut cofactors = Vec::new();
    for (j, op) in ops.iter().enumerate() {
        let image = op.apply_poly(w)?;
        match cofactor(&image, w)? {
            Some(c) => cofactors.push(c),
            None => {
                return Ok(PartialIntegral::Failure {
                    operator: j + 1,
                    image,
                })
            }
        }
    }
    Ok(PartialIntegral::Certificate(InvariantCertificate {
        w: w.clone(),
        cofactors,
    }))
}

pub fn check_partial_integral(ops: &[DiffOperator], w: &Polynomial) -> Result<CheckReport> {
    let mut a = Audit::new("PI", KIND_INTEGRAL);
    a.echo("w", w);
    if !a.check("w is not constant", !w.is_constant(), format!("w = {w}")) {
        return Ok(a.classification(format!("{w} = 0 is an integral hypersurface")));
    }
    let cert = verify_partial_integral(ops, w)?;
    for (j, op) in ops.iter().enumerate() {
        let desc = format!("X_{} w vanishes on w = 0", j + 1);
        match &cert {
            PartialIntegral::Certificate(c) => {
                a.check(
                    desc,
                    true,
                    format!("X_{} w = ({}) w", j + 1, c.cofactors[j]),
                );
            }
            PartialIntegral::Failure { operator, image } if *operator == j + 1 => {
                a.check(desc, false, format!("X_{} w = {image}", j + 1));
            }
            PartialIntegral::Failure { operator, .. } if *operator < j + 1 => {}
            PartialIntegral::Failure { .. } => {
                let image = op.apply_poly(w)?;
                let ok = cofactor(&image, w)?.is_some();
                a.check(desc, ok, format!("X_{} w = {image}", j + 1));
            }
        }
    }
    Ok(a.classification(format!("{w} = 0 is an integral hypersurface")))
}

/// Verifies `dw = sum_j lambda_j omega_j` on `w = 0`.
pub fn check_pfaff_invariant_surface(
    forms: &[KForm],
    w: &Polynomial,
    lambdas: &[ScaledFraction],
) -> Result<CheckReport> {
    if forms.len() != lambdas.len() {
        return usage(format!(
            "expected {} multipliers, one per equation, got {}",
            forms.len(),
            lambdas.len()
        ));
    }
    if w.is_constant() {
        let mut a = Audit::new("PI-Pf", KIND_INTEGRAL);
        a.echo("w", w);
        a.check("w is not constant", false, format!("w = {w}"));
        return Ok(a.classification(format!("{w} = 0 is an integral hypersurface")));
    }
    let mut res = KForm::scalar(ScaledFraction::from_poly(w.clone())).d()?;
    for (om, l) in forms.iter().zip(lambdas) {
        res = res.try_sub(&om.scale_by(l)?)?;
    }
    let mut a = Audit::new("PI-Pf", KIND_INTEGRAL);
    a.echo("w", w);
    for (j, l) in lambdas.iter().enumerate() {
        a.echo(format!("lambda_{}", j + 1), l);
    }
    a.check("w is not constant", !w.is_constant(), "");
    let mut bad = Vec::new();
    for (idx, c) in res.terms() {
        if cofactor(c, w)?.is_none() {
            bad.push(format!("dx{}: {c}", idx[0] + 1));
        }
    }
    let witness = if bad.is_empty() {
        format!("dw − Σ λ_j ω_j = {res}")
    } else {
        bad.join(", ")
    };
    a.check("dw − Σ λ_j ω_j vanishes on w = 0", bad.is_empty(), witness);
    Ok(a.classification(format!("{w} = 0 is an integral hypersurface")))
}
