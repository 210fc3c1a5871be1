//! Checkers for total differential systems and linear partial systems,
//! mostly run through one of the induced ordinary systems.

use super::exterior_checks::EdData;
use super::ode::{check_ode_pfaff_bound, check_partial_div_bound, SampleMultipliers};
use super::{rank_text, relabel, Audit, CheckReport, HypVerdict, Hypothesis, Need};
use super::{KIND_HYPERSURFACES, KIND_ISOLATED, KIND_ORBITS};
use crate::error::Result;
use crate::exterior::{KForm, VectorField};
use crate::ring::ScaledFraction;
use crate::sign::{sign_of, Domain, SignConfig, SignVerdict};
use crate::systems::{
    frobenius_total, linalg::resultant, linear_commuting, LinearTotalSystem, OdeSystem,
    PartialSystem, TotalSystem,
};

/// Systems that induce `m` ordinary systems `(Dj)`.
#[derive(Debug, Clone, Copy)]
pub enum Family<'a> {
    Total(&'a TotalSystem),
    Partial(&'a PartialSystem),
}

impl<'a> Family<'a> {
    pub fn fields(&self) -> &'a [VectorField] {
        match self {
            Family::Total(s) => &s.columns,
            Family::Partial(s) => &s.operators,
        }
    }

    pub fn induced_ode(&self, j: usize) -> Result<OdeSystem> {
        match self {
            Family::Total(s) => s.induced_ode(j),
            Family::Partial(s) => s.induced_ode(j),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Family::Total(_) => "total system",
            Family::Partial(_) => "partial system",
        }
    }
}

fn induced(j: usize) -> Hypothesis {
    Hypothesis::new(
        format!("the test is applied to the induced system (D{j})"),
        HypVerdict::Pass,
        format!("j = {j}"),
    )
}

fn frobenius(a: &mut Audit, fields: &[VectorField]) -> Result<bool> {
    let fr = frobenius_total(fields)?;
    let witness = match &fr.failing {
        Some((j, l, b)) => format!("[X_{j}, X_{l}] = {b}"),
        None => "all brackets vanish".to_string(),
    };
    Ok(a.check(
        "the system is completely solvable (Frobenius)",
        fr.solvable,
        witness,
    ))
}

/// Partial-divergence test on one induced system.
pub fn check_td_partial_div_bound(
    s: &TotalSystem,
    j: usize,
    nu: usize,
    mus: &SampleMultipliers,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let ode = s.induced_ode(j)?;
    let rep = check_partial_div_bound(&ode, nu, mus, d, cfg)?;
    let riders = vec![
        format!(
            "C1.2: no nonisolated compact regular integral manifolds of dimension {}",
            nu - 1
        ),
        format!("evidence comes from the induced system (D{j}) alone"),
    ];
    Ok(relabel(rep, "T1.2", induced(j), riders))
}

/// First boundedness test on `(Dj)`; with an invariant form the zero-index
/// assertion is attached.
pub fn check_induced_pfaff_bound(
    fam: Family<'_>,
    j: usize,
    data: &EdData,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let ode = fam.induced_ode(j)?;
    let rep = check_ode_pfaff_bound(&ode, data, d, cfg)?;
    let inv = data.theta.is_some();
    let id = match (fam, inv) {
        (Family::Total(_), false) => "T2.12",
        (Family::Total(_), true) => "T2.13",
        (Family::Partial(_), false) => "T2.16",
        (Family::Partial(_), true) => "T2.17",
    };
    let riders = rep.riders.clone();
    Ok(relabel(rep, id, induced(j), riders))
}

/// Second boundedness test: `div(phi X^j)` of constant sign.
pub fn check_induced_dulac(
    fam: Family<'_>,
    j: usize,
    phi: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let ode = fam.induced_ode(j)?;
    let id = match fam {
        Family::Total(_) => "T2.14",
        Family::Partial(_) => "T2.18",
    };
    let mut a = Audit::new(id, KIND_HYPERSURFACES);
    a.echo("system", fam.name());
    a.echo("j", j);
    a.echo("phi", phi);
    a.echo("domain", d);
    a.push(induced(j));
    a.check(
        format!("X^{j} is not identically zero"),
        !ode.f.is_zero(),
        format!("X^{j} = {}", ode.f),
    );
    let div = ode.f.scale_by(phi)?.divergence()?;
    a.sign(
        format!("div(φ X^{j}) is of constant sign"),
        &div,
        Need::ConstSign,
        d,
        cfg,
    );
    let r = a.rank(d, ode.dim());
    Ok(a.bound(r, |r| rank_text(KIND_HYPERSURFACES, r)))
}

fn is_linear(f: &VectorField) -> bool {
    f.as_polynomials()
        .is_some_and(|ps| ps.iter().all(|p| p.degree() <= 1 && !p.has_radicals()))
}

/// Every `g_j X^j` solenoidal with definite `g_j`.
pub fn check_td_solenoidal(
    s: &TotalSystem,
    gs: &[ScaledFraction],
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    if gs.len() != s.m() {
        return crate::error::usage(format!(
            "expected {} functions g_j, got {}",
            s.m(),
            gs.len()
        ));
    }
    let mut a = Audit::new("T2.15", KIND_ISOLATED);
    for (j, g) in gs.iter().enumerate() {
        a.echo(format!("g_{}", j + 1), g);
    }
    a.echo("domain", d);
    a.check(
        "the system is not identically zero",
        s.columns.iter().any(|c| !c.is_zero()),
        "",
    );
    frobenius(&mut a, &s.columns)?;
    let mut all_zero = true;
    for (j, (x, g)) in s.columns.iter().zip(gs).enumerate() {
        a.sign(
            format!("g_{} is definite", j + 1),
            g,
            Need::Definite,
            d,
            cfg,
        );
        let div = x.scale_by(g)?.divergence()?;
        all_zero &= a.check(
            format!("g_{0} X^{0} is solenoidal", j + 1),
            div.is_zero(),
            format!("div(g_{} X^{}) = {div}", j + 1, j + 1),
        );
    }
    if all_zero
        && s.columns.iter().all(is_linear)
        && gs.iter().all(|g| g.constant_value().is_some())
    {
        a.rider("C2.6: the linear system has no isolated compact regular integral hypersurfaces");
    }
    let r = a.rank(d, s.vars().nbase());
    Ok(a.bound(r, |r| rank_text(KIND_ISOLATED, r)))
}

/// Records "some expression is definite" from per-column verdicts.
fn some_definite(
    a: &mut Audit,
    what: &str,
    exprs: &[ScaledFraction],
    d: &Domain,
    cfg: &SignConfig,
) {
    let verdicts: Vec<SignVerdict> =
        crate::par::map(cfg.parallelism, exprs, |e| sign_of(e, d, cfg));
    let desc = format!("{what} is definite for at least one j");
    let witness = |k: usize| format!("j = {}: {} : {}", k + 1, exprs[k], verdicts[k]);
    if let Some(k) = verdicts.iter().position(SignVerdict::is_definite) {
        a.push(Hypothesis::new(desc, HypVerdict::Pass, witness(k)));
        return;
    }
    let all: Vec<String> = (0..exprs.len()).map(witness).collect();
    let verdict = if verdicts.iter().all(|v| {
        matches!(
            v,
            SignVerdict::Indefinite { .. } | SignVerdict::IdenticallyZero
        )
    }) {
        HypVerdict::Fail
    } else {
        HypVerdict::Unknown
    };
    a.push(Hypothesis::new(desc, verdict, all.join("; ")));
}

/// `H_j = X_j N`, at least one definite.
pub fn check_orbit_absence_fn(
    s: &TotalSystem,
    n_fn: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let mut a = Audit::new("T1.3", KIND_ORBITS);
    a.echo("N", n_fn);
    a.echo("domain", d);
    frobenius(&mut a, &s.columns)?;
    a.assume(
        "solutions continue to the entire parameter space",
        "follows from complete solvability; not verified",
    );
    let hs = s
        .columns
        .iter()
        .map(|x| x.apply(n_fn))
        .collect::<Result<Vec<_>>>()?;
    some_definite(&mut a, "H_j = X_j N", &hs, d, cfg);
    Ok(a.absence("no compact regular orbits in the domain"))
}

/// `sum_i w_i X_ij` for a closed (exact) 1-form, at least one definite.
pub fn check_orbit_absence_form(
    s: &TotalSystem,
    w: &KForm,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    if w.degree() != 1 {
        return crate::error::usage("the form must have degree 1");
    }
    let mut a = Audit::new("T1.4", KIND_ORBITS);
    a.echo("omega", w);
    a.echo("domain", d);
    let dw = w.d()?;
    a.check("the form is closed", dw.is_zero(), format!("dω = {dw}"));
    a.assume(
        "the form is exact on the domain",
        "user assertion; holds on simply connected domains",
    );
    frobenius(&mut a, &s.columns)?;
    let comps = w.components()?;
    let sums = s
        .columns
        .iter()
        .map(|x| x.dot(&comps))
        .collect::<Result<Vec<_>>>()?;
    some_definite(&mut a, "Σ_i w_i X_ij", &sums, d, cfg);
    Ok(a.absence("no compact regular orbits in the domain"))
}

/// Commuting constant matrices, one of which has no pair of eigenvalues
/// summing to zero.
pub fn check_linear_td_eigen(s: &LinearTotalSystem) -> Result<CheckReport> {
    let mut a = Audit::new("T1.5", KIND_ORBITS);
    for (j, m) in s.matrices.iter().enumerate() {
        a.echo(format!("A_{}", j + 1), m);
    }
    let comm = linear_commuting(s)?;
    let witness = match comm.failing {
        Some((j, l)) => format!("A_{j} A_{l} ≠ A_{l} A_{j}"),
        None => "A_j A_l = A_l A_j for all pairs".to_string(),
    };
    a.check("the system is completely solvable", comm.commuting, witness);
    let mut lines = Vec::new();
    let mut found = None;
    for (j, m) in s.matrices.iter().enumerate() {
        let p = m.charpoly()?;
        let r = resultant(&p, &p.reflect());
        lines.push(format!(
            "j = {}: p(λ) = {p}, Res(p(λ), p(−λ)) = {}",
            j + 1,
            crate::ring::fmt_rational(&r)
        ));
        if !num_traits::Zero::is_zero(&r) {
            found = Some(j);
            break;
        }
    }
    let desc = "for some j no two eigenvalues of A_j sum to zero";
    match found {
        Some(j) => a.check(desc, true, lines[j].clone()),
        None => a.check(desc, false, lines.join("; ")),
    };
    Ok(a.absence("no compact regular orbits"))
}
