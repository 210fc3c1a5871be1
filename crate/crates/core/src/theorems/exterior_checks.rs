//! Checkers for exterior and Pfaff systems.

use std::fmt;

use super::{rank_text, Audit, CheckReport, HypVerdict, Hypothesis, Need};
use super::{KIND_HYPERSURFACES, KIND_LEAVES};
use crate::error::{usage, Result};
use crate::exterior::{potential, solve_for, KForm, Substitution, VectorField};
use crate::ring::{Polynomial, ScaledFraction};
use crate::sign::{self, vanishing_codimension, Domain, SignConfig};
use crate::systems::{frobenius_pfaffian, orthogonal_basis_fields, ExteriorSystem, PfaffSystem};

/// Solve equation `equation` (one-based) for `dx_{var}` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElimStep {
    pub var: usize,
    pub equation: usize,
}

impl fmt::Display for ElimStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dx{} from equation {}", self.var + 1, self.equation)
    }
}

/// Auxiliary data of the exterior and Pfaff boundedness tests: `alpha`,
/// one `gamma_j` per equation, the elimination plan used for `d alpha`
/// restricted to the system, and optionally an invariant form `theta` with
/// its witnesses `eta_j`.
#[derive(Debug, Clone)]
pub struct EdData {
    pub alpha: KForm,
    pub gammas: Vec<KForm>,
    pub plan: Vec<ElimStep>,
    pub theta: Option<KForm>,
    pub etas: Vec<KForm>,
}

impl EdData {
    pub fn new(alpha: KForm, gammas: Vec<KForm>) -> EdData {
        EdData {
            alpha,
            gammas,
            plan: Vec::new(),
            theta: None,
            etas: Vec::new(),
        }
    }

    pub fn with_plan(mut self, plan: Vec<ElimStep>) -> EdData {
        self.plan = plan;
        self
    }

    pub fn with_invariant(mut self, theta: KForm, etas: Vec<KForm>) -> EdData {
        self.theta = Some(theta);
        self.etas = etas;
        self
    }
}

/// Intermediate forms of the pipeline.
#[derive(Debug, Clone)]
pub struct EdAnalysis {
    /// `d alpha` restricted along the plan.
    pub restricted: KForm,
    /// `zeta_j ^ gamma_j`.
    pub wedges: Vec<KForm>,
    pub sum: KForm,
    /// Coefficient of `d(sum)` on the volume form.
    pub b: ScaledFraction,
    pub pivots: Vec<(ElimStep, ScaledFraction)>,
    /// `d theta - sum_j zeta_j ^ eta_j`, when `theta` is given.
    pub invariance_residual: Option<KForm>,
}

fn check_degrees(zetas: &[KForm], forms: &[KForm], what: &str, n: usize) -> Result<()> {
    if forms.len() != zetas.len() {
        return usage(format!(
            "expected {} {what} forms, one per equation, got {}",
            zetas.len(),
            forms.len()
        ));
    }
    for (j, (z, g)) in zetas.iter().zip(forms).enumerate() {
        let want = n - z.degree() - 1;
        if g.degree() != want {
            return usage(format!(
                "{what}_{} must have degree {want}, got {}",
                j + 1,
                g.degree()
            ));
        }
    }
    Ok(())
}

fn substitution(zetas: &[KForm], plan: &[ElimStep]) -> Result<(Substitution, Vec<ScaledFraction>)> {
    let mut subst = Substitution::new();
    let mut pivots = Vec::new();
    for step in plan {
        if step.equation == 0 || step.equation > zetas.len() {
            return usage(format!(
                "elimination refers to missing equation {}",
                step.equation
            ));
        }
        let eq = &zetas[step.equation - 1];
        if subst.insert(step.var, solve_for(step.var, eq)?).is_some() {
            return usage(format!("dx{} is eliminated twice", step.var + 1));
        }
        pivots.push(eq.coeff(&[step.var]));
    }
    Ok((subst, pivots))
}

pub fn ed_analysis(zetas: &[KForm], data: &EdData) -> Result<EdAnalysis> {
    let vt = data.alpha.vars();
    let n = vt.nbase();
    if n < 2 {
        return usage("the boundedness tests need n >= 2");
    }
    if data.alpha.degree() != n - 2 {
        return usage(format!(
            "alpha must have degree {}, got {}",
            n - 2,
            data.alpha.degree()
        ));
    }
    if let Some(z) = zetas.iter().find(|z| z.degree() == 0 || z.degree() >= n) {
        return usage(format!("equation of degree {} outside 1..n-1", z.degree()));
    }
    check_degrees(zetas, &data.gammas, "gamma", n)?;
    let (subst, pivots) = substitution(zetas, &data.plan)?;
    let restricted = data.alpha.d()?.restrict(&subst)?;
    let wedges = zetas
        .iter()
        .zip(&data.gammas)
        .map(|(z, g)| z.wedge(g))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = restricted.clone();
    for w in &wedges {
        sum = sum.try_add(w)?;
    }
    let mut invariance_residual = None;
    if let Some(theta) = &data.theta {
        if theta.degree() != n - 2 {
            return usage(format!(
                "theta must have degree {}, got {}",
                n - 2,
                theta.degree()
            ));
        }
        check_degrees(zetas, &data.etas, "eta", n)?;
        let dtheta = theta.d()?;
        sum = sum.try_add(&dtheta)?;
        let mut res = dtheta;
        for (z, e) in zetas.iter().zip(&data.etas) {
            res = res.try_sub(&z.wedge(e)?)?;
        }
        invariance_residual = Some(res);
    }
    let b = sum.d()?.volume_coefficient()?;
    Ok(EdAnalysis {
        restricted,
        wedges,
        sum,
        b,
        pivots: data.plan.iter().copied().zip(pivots).collect(),
        invariance_residual,
    })
}

const GAP_INDEX: &str = "any set of gaps of the domain surrounded by a compact integral \
hypersurface has zero total index with respect to the (n−1)-form dθ";

pub(crate) fn ed_report(
    id: &str,
    zetas: &[KForm],
    data: &EdData,
    d: &Domain,
    cfg: &SignConfig,
    system: String,
) -> Result<CheckReport> {
    let an = ed_analysis(zetas, data)?;
    let n = data.alpha.vars().nbase();
    let mut a = Audit::new(id, KIND_HYPERSURFACES);
    a.echo("system", system);
    for (j, z) in zetas.iter().enumerate() {
        a.echo(format!("zeta_{}", j + 1), z);
    }
    a.echo("alpha", &data.alpha);
    for (j, g) in data.gammas.iter().enumerate() {
        a.echo(format!("gamma_{}", j + 1), g);
    }
    for step in &data.plan {
        a.echo("eliminate", step);
    }
    if let Some(t) = &data.theta {
        a.echo("theta", t);
        for (j, e) in data.etas.iter().enumerate() {
            a.echo(format!("eta_{}", j + 1), e);
        }
    }
    a.echo("domain", d);
    a.check(
        "the system is not identically zero",
        zetas.iter().any(|z| !z.is_zero()),
        "",
    );
    if zetas.iter().all(|z| z.degree() == 1) {
        let rows: Vec<Vec<ScaledFraction>> = zetas
            .iter()
            .map(|z| z.components())
            .collect::<Result<_>>()?;
        a.independence(&rows, cfg.seed);
    }
    for (step, pivot) in &an.pivots {
        a.sign(
            format!(
                "the coefficient of dx{} in equation {} is nonzero on the domain",
                step.var + 1,
                step.equation
            ),
            pivot,
            Need::Definite,
            d,
            cfg,
        );
    }
    if let Some(res) = &an.invariance_residual {
        a.check(
            "θ is invariant: dθ = Σ ζ_j ∧ η_j",
            res.is_zero(),
            format!("dθ − Σ ζ_j ∧ η_j = {res}"),
        );
        a.rider(GAP_INDEX);
    }
    a.sign("B is of constant sign", &an.b, Need::ConstSign, d, cfg);
    let r = a.rank(d, n);
    Ok(a.bound(r, |r| rank_text(KIND_HYPERSURFACES, r)))
}

/// Boundedness test for an exterior system; with an invariant form the
/// zero-index assertion is attached.
pub fn check_ed_bound(
    s: &ExteriorSystem,
    data: &EdData,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let id = if data.theta.is_some() { "T2.2" } else { "T2.1" };
    ed_report(id, &s.zetas, data, d, cfg, "exterior system".into())
}

/// Boundedness test for a Pfaff system (`gamma_j` play the role of `l_j`).
pub fn check_pfaff_bound(
    s: &PfaffSystem,
    data: &EdData,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let id = if data.theta.is_some() { "T2.4" } else { "T2.3" };
    ed_report(id, &s.forms, data, d, cfg, "Pfaff system".into())
}

/// Verifies `d theta = sum_j zeta_j ^ eta_j`.
pub fn check_form_invariance(
    zetas: &[KForm],
    theta: &KForm,
    etas: &[KForm],
) -> Result<CheckReport> {
    let n = theta.vars().nbase();
    if n < 2 || theta.degree() != n - 2 {
        return usage("theta must have degree n-2");
    }
    check_degrees(zetas, etas, "eta", n)?;
    let mut res = theta.d()?;
    for (z, e) in zetas.iter().zip(etas) {
        res = res.try_sub(&z.wedge(e)?)?;
    }
    let mut a = Audit::new("T2.2-premise", "invariant (n−2)-form");
    a.echo("theta", theta);
    for (j, e) in etas.iter().enumerate() {
        a.echo(format!("eta_{}", j + 1), e);
    }
    a.check(
        "dθ = Σ ζ_j ∧ η_j",
        res.is_zero(),
        format!("dθ − Σ ζ_j ∧ η_j = {res}"),
    );
    Ok(a.classification("θ is invariant with respect to the system"))
}

fn linear_coefficients(w: &KForm) -> Result<()> {
    for (_, c) in w.terms() {
        match c.as_polynomial() {
            Some(p) if p.degree() <= 1 && !p.has_radicals() => {}
            _ => return usage(format!("coefficient {c} is not linear")),
        }
    }
    Ok(())
}

/// Linear Pfaff systems: a non-closed form rules out compact integral
/// hypersurfaces; otherwise every form has a quadratic potential.
pub fn classify_linear_pfaff(s: &PfaffSystem) -> Result<CheckReport> {
    for w in &s.forms {
        linear_coefficients(w)?;
    }
    let ds = s.forms.iter().map(KForm::d).collect::<Result<Vec<_>>>()?;
    if let Some(k) = ds.iter().position(|dw| !dw.is_zero()) {
        let mut a = Audit::new("C2.1", KIND_HYPERSURFACES);
        for (j, w) in s.forms.iter().enumerate() {
            a.echo(format!("omega_{}", j + 1), w);
        }
        a.check("coefficients are linear", true, "");
        a.check(
            format!("dω_{} ≠ 0", k + 1),
            true,
            format!("dω_{} = {}", k + 1, ds[k]),
        );
        a.rider("T2.5: no isolated compact integral hypersurfaces");
        return Ok(a.absence("no compact integral hypersurfaces"));
    }
    let mut a = Audit::new("C2.2", KIND_HYPERSURFACES);
    let mut pots = Vec::new();
    for (j, w) in s.forms.iter().enumerate() {
        a.echo(format!("omega_{}", j + 1), w);
        pots.push(format!("F_{} = {}", j + 1, potential(w)?));
    }
    a.check("coefficients are linear", true, "");
    a.check("every dω_j = 0", true, pots.join(", "));
    Ok(a.classification(format!(
        "no isolated compact integral hypersurfaces; any compact integral hypersurface is a \
         second-order algebraic hypersurface ({})",
        pots.join(", ")
    )))
}

fn orthogonality(a: &mut Audit, v: &VectorField, forms: &[KForm]) -> Result<()> {
    for (j, w) in forms.iter().enumerate() {
        let dot = v.dot(&w.components()?)?;
        a.check(
            format!("V is orthogonal to W_{}", j + 1),
            dot.is_zero(),
            format!("(V, W_{}) = {dot}", j + 1),
        );
    }
    Ok(())
}

fn integrability(a: &mut Audit, w: &KForm) -> Result<()> {
    let fr = frobenius_pfaffian(w)?;
    a.check(
        "the Pfaffian equation is completely integrable: dω ∧ ω = 0",
        fr.integrable,
        format!("dω ∧ ω = {}", fr.residual),
    );
    Ok(())
}

/// Orthogonal-field test. A single equation is treated as a foliation and
/// must be completely integrable.
pub fn check_orthogonal_field_bound(
    s: &PfaffSystem,
    v: &VectorField,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let single = s.forms.len() == 1;
    let (id, kind) = if single {
        ("C2.3", KIND_LEAVES)
    } else {
        ("T2.6", KIND_HYPERSURFACES)
    };
    let mut a = Audit::new(id, kind);
    for (j, w) in s.forms.iter().enumerate() {
        a.echo(format!("omega_{}", j + 1), w);
    }
    a.echo("V", v);
    a.echo("domain", d);
    a.check("V is not identically zero", !v.is_zero(), "");
    orthogonality(&mut a, v, &s.forms)?;
    if single {
        integrability(&mut a, &s.forms[0])?;
    }
    let div = v.divergence()?;
    a.sign("div V is of constant sign", &div, Need::ConstSign, d, cfg);
    let r = a.rank(d, v.vars().nbase());
    Ok(a.bound(r, |r| rank_text(kind, r)))
}

/// The orthogonal field is assembled as `V = sum_tau g_tau Phi_tau` from the
/// basis orthogonal to the coefficients of `w`.
pub fn check_orthogonal_combination(
    w: &KForm,
    gs: &[ScaledFraction],
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let n = w.vars().nbase();
    if gs.len() + 1 != n {
        return usage(format!(
            "expected {} functions g_tau, got {}",
            n - 1,
            gs.len()
        ));
    }
    let mut v = VectorField::zero(w.vars());
    for (g, phi) in gs.iter().zip(orthogonal_basis_fields(w)?) {
        v = v.try_add(&phi.scale_by(g)?)?;
    }
    let mut a = Audit::new("T2.7", KIND_LEAVES);
    a.echo("omega", w);
    for (t, g) in gs.iter().enumerate() {
        a.echo(format!("g_{}", t + 1), g);
    }
    a.echo("domain", d);
    a.check(
        "V = Σ g_τ Φ_τ is not identically zero",
        !v.is_zero(),
        format!("V = {v}"),
    );
    orthogonality(&mut a, &v, std::slice::from_ref(w))?;
    integrability(&mut a, w)?;
    let div = v.divergence()?;
    a.sign("div V is of constant sign", &div, Need::ConstSign, d, cfg);
    let r = a.rank(d, n);
    Ok(a.bound(r, |r| rank_text(KIND_LEAVES, r)))
}

/// Absence of compact leaves for a solenoidal `mu A` on a domain with
/// trivial `pi_{n-1}`.
pub fn check_solenoidal_absence(
    w: &KForm,
    mu: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let vt = w.vars();
    let n = vt.nbase();
    let unit = mu
        .constant_value()
        .is_some_and(|c| c == crate::ring::rat(1));
    let mut a = Audit::new(if unit { "C2.4" } else { "T2.8" }, KIND_LEAVES);
    a.echo("omega", w);
    a.echo("mu", mu);
    a.echo("domain", d);
    let comps = w.components()?;
    let field = VectorField::new(vt, comps.clone())?;
    a.check("A is not identically zero", !field.is_zero(), "");
    integrability(&mut a, w)?;
    let div = field.scale_by(mu)?.divergence()?;
    a.check(
        "μA is solenoidal",
        div.is_zero(),
        format!("div(μA) = {div}"),
    );
    a.push(vanishing_hypothesis(&comps, mu, d, cfg));
    let desc = format!("the homotopy group π_{} of the domain is trivial", n - 1);
    match sign::homotopy_rank(d, n) {
        Some(0) => a.check(desc, true, "r = 0"),
        Some(r) => a.check(desc, false, format!("r = {r}")),
        None => {
            a.push(Hypothesis::new(
                desc,
                HypVerdict::Unknown,
                "declare rank for this domain",
            ));
            false
        }
    };
    Ok(a.absence("no compact leaves in the domain"))
}

/// `mu A` may vanish only on a set of codimension at least two, certified by
/// the vanishing locus of `sum a_i^2` and a nonvanishing `mu`.
fn vanishing_hypothesis(
    comps: &[ScaledFraction],
    mu: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Hypothesis {
    let desc = "μA vanishes only on a null set of the (n−2)-dimensional measure";
    let polys: Option<Vec<Polynomial>> = comps.iter().map(ScaledFraction::as_polynomial).collect();
    let Some(polys) = polys else {
        return Hypothesis::new(desc, HypVerdict::Unknown, "A has non-polynomial components");
    };
    if mu.constant_value().is_none() && !sign::sign_of(mu, d, cfg).is_definite() {
        return Hypothesis::new(
            desc,
            HypVerdict::Unknown,
            format!("μ = {mu} is not certified nonvanishing"),
        );
    }
    let vt = comps[0].vars();
    let sq = polys
        .iter()
        .fold(Polynomial::zero(vt), |acc, p| &acc + &p.pow(2));
    match vanishing_codimension(&sq) {
        Some(c) if c >= 2 => {
            let c = if c == usize::MAX {
                "never vanishes".into()
            } else {
                format!("codimension {c}")
            };
            Hypothesis::new(desc, HypVerdict::Pass, format!("Σ a_i² = {sq}: {c}"))
        }
        Some(c) => Hypothesis::new(
            desc,
            HypVerdict::Fail,
            format!("Σ a_i² = {sq}: codimension {c}"),
        ),
        None => Hypothesis::new(
            desc,
            HypVerdict::Unknown,
            format!("Σ a_i² = {sq}: no certificate"),
        ),
    }
}
