//! Checkers for an autonomous ODE `dx/dt = f(x)`.

use std::collections::BTreeMap;

use super::exterior_checks::{ed_report, EdData};
use super::{rank_text, Audit, CheckReport, Need};
use super::{
    KIND_CURVES, KIND_HYPERSURFACES, KIND_ISOLATED, KIND_LIMIT_CYCLES, KIND_MANIFOLDS,
    KIND_TRAJECTORIES,
};
use crate::error::{usage, Result};
use crate::exterior::Sample;
use crate::par;
use crate::ring::ScaledFraction;
use crate::sign::{sign_of, Domain, SignConfig};
use crate::systems::{pfaff_from_ode, OdeSystem};

/// Multiplier `mu^nu_xi` for every sample `xi`.
pub type SampleMultipliers = BTreeMap<Sample, ScaledFraction>;

fn nontrivial(a: &mut Audit, s: &OdeSystem) -> bool {
    a.check(
        "the vector field is not identically zero",
        !s.f.is_zero(),
        format!("f = {}", s.f),
    )
}

/// `H = sum_i dN/dx_i f_i` must be definite.
pub fn check_tkachev_absence(
    s: &OdeSystem,
    n_fn: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let mut a = Audit::new("T0.2", KIND_TRAJECTORIES);
    a.echo("f", &s.f);
    a.echo("N", n_fn);
    a.echo("domain", d);
    nontrivial(&mut a, s);
    let h = s.f.apply(n_fn)?;
    a.sign("H = Σ ∂N/∂x_i f_i is definite", &h, Need::Definite, d, cfg);
    Ok(a.absence("no closed trajectories in the domain"))
}

/// `div(phi f)`.
pub fn dulac_divergence(s: &OdeSystem, phi: &ScaledFraction) -> Result<ScaledFraction> {
    s.f.scale_by(phi)?.divergence()
}

/// Planar systems use the limit-cycle test, which also accepts an
/// identically zero divergence; in higher dimension the divergence must be
/// of constant sign.
pub fn check_dulac_bound(
    s: &OdeSystem,
    phi: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let n = s.dim();
    if n < 2 {
        return usage("the divergence test needs n >= 2");
    }
    let planar = n == 2;
    let (id, kind) = if planar {
        ("T0.1", KIND_LIMIT_CYCLES)
    } else {
        ("T2.9", KIND_HYPERSURFACES)
    };
    let mut a = Audit::new(id, kind);
    a.echo("f", &s.f);
    a.echo("phi", phi);
    a.echo("domain", d);
    nontrivial(&mut a, s);
    if planar {
        a.sign(
            "the multiplier is of constant sign",
            phi,
            Need::ConstSign,
            d,
            cfg,
        );
    }
    let div = dulac_divergence(s, phi)?;
    if planar {
        a.sign(
            "div(φ f) is of constant sign or identically zero",
            &div,
            Need::ConstSignOrZero,
            d,
            cfg,
        );
    } else {
        a.sign(
            "div(φ f) is of constant sign",
            &div,
            Need::ConstSign,
            d,
            cfg,
        );
    }
    let r = a.rank(d, n);
    Ok(a.bound(r, |r| rank_text(kind, r)))
}

/// `div^nu_xi (mu_xi f restricted to xi)` for every sample, in sample order.
pub fn partial_divergences(
    s: &OdeSystem,
    nu: usize,
    mus: &SampleMultipliers,
) -> Result<Vec<(Sample, ScaledFraction)>> {
    let n = s.dim();
    if nu < 3 || nu > n {
        return usage(format!(
            "sample dimension must satisfy 3 <= ν <= n = {n}, got {nu}"
        ));
    }
    Sample::all(n, nu)
        .into_iter()
        .map(|xi| {
            let Some(mu) = mus.get(&xi) else {
                return usage(format!("no multiplier given for sample {xi}"));
            };
            let m = s.f.restricted_to(xi.indices()).scale_by(mu)?;
            let div = m.partial_divergence(&xi)?;
            Ok((xi, div))
        })
        .collect()
}

pub fn check_partial_div_bound(
    s: &OdeSystem,
    nu: usize,
    mus: &SampleMultipliers,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let divs = partial_divergences(s, nu, mus)?;
    let mut a = Audit::new("T1.1", KIND_MANIFOLDS);
    a.echo("f", &s.f);
    a.echo("nu", nu);
    for (xi, mu) in mus {
        a.echo(format!("mu_{xi}"), mu);
    }
    a.echo("domain", d);
    nontrivial(&mut a, s);
    let verdicts = par::map(cfg.parallelism, &divs, |(_, e)| sign_of(e, d, cfg));
    for ((xi, div), v) in divs.iter().zip(&verdicts) {
        a.push(super::sign_hypothesis(
            format!("div^{nu}_{xi} M^{nu}_{xi} is {nu}-constant sign"),
            div,
            v,
            Need::ConstSign,
        ));
    }
    let r = a.rank(d, nu);
    a.rider(format!(
        "C1.1: no nonisolated compact regular integral manifolds of dimension {}",
        nu - 1
    ));
    Ok(a.bound(r, |r| {
        format!(
            "at most {r} compact regular integral manifolds of dimension {} in the domain",
            nu - 1
        )
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `p1 = (P/Q) d_x alpha`.
    One,
    /// `p2 = (Q/P) d_y alpha`.
    Two,
}

/// `q1` or `q2` for the planar system `(P, Q)`.
pub fn planar_q(
    s: &OdeSystem,
    alpha: &ScaledFraction,
    beta: &ScaledFraction,
    branch: Branch,
) -> Result<ScaledFraction> {
    if s.dim() != 2 {
        return usage("the planar test needs n = 2");
    }
    let p = s.f.component(0);
    let q = s.f.component(1);
    let ax = alpha.derivative(0)?;
    let ay = alpha.derivative(1)?;
    let div = dulac_divergence(s, beta)?;
    let lead = match branch {
        Branch::One => {
            let p1 = if ax.is_zero() {
                ax.clone()
            } else {
                p.try_div(q)?.try_mul(&ax)?
            };
            p1.try_add(&ay)?.derivative(0)?
        }
        Branch::Two => {
            let p2 = if ay.is_zero() {
                ay.clone()
            } else {
                q.try_div(p)?.try_mul(&ay)?
            };
            -ax.try_add(&p2)?.derivative(1)?
        }
    };
    lead.try_add(&div)
}

pub fn check_planar_alpha_beta(
    s: &OdeSystem,
    alpha: &ScaledFraction,
    beta: &ScaledFraction,
    branch: Branch,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    if s.dim() != 2 {
        return usage("the planar test needs n = 2");
    }
    let mut a = Audit::new("T2.10", KIND_CURVES);
    a.echo("f", &s.f);
    a.echo("alpha", alpha);
    a.echo("beta", beta);
    a.echo("branch", if branch == Branch::One { 1 } else { 2 });
    a.echo("domain", d);
    nontrivial(&mut a, s);
    let (da, den, label) = match branch {
        Branch::One => (alpha.derivative(0)?, s.f.component(1), "p1 = (P/Q) ∂_x α"),
        Branch::Two => (alpha.derivative(1)?, s.f.component(0), "p2 = (Q/P) ∂_y α"),
    };
    let desc = format!("{label} is continuously differentiable on the domain");
    if da.is_zero() {
        a.check(desc, true, "the α-derivative vanishes identically");
    } else {
        a.sign(desc, den, Need::Definite, d, cfg);
    }
    let q = planar_q(s, alpha, beta, branch)?;
    let qname = if branch == Branch::One { "q1" } else { "q2" };
    a.sign(
        format!("{qname} is of constant sign"),
        &q,
        Need::ConstSign,
        d,
        cfg,
    );
    let r = a.rank(d, 2);
    Ok(a.bound(r, |r| rank_text(KIND_CURVES, r)))
}

fn is_linear(s: &OdeSystem) -> bool {
    s.f.as_polynomials()
        .is_some_and(|ps| ps.iter().all(|p| p.degree() <= 1 && !p.has_radicals()))
}

pub fn check_isolated_regular_bound(
    s: &OdeSystem,
    g: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let mut a = Audit::new("T2.11", KIND_ISOLATED);
    a.echo("f", &s.f);
    a.echo("g", g);
    a.echo("domain", d);
    nontrivial(&mut a, s);
    a.sign("g is definite", g, Need::Definite, d, cfg);
    let div = dulac_divergence(s, g)?;
    let solenoidal = a.check(
        "g f is solenoidal",
        div.is_zero(),
        format!("div(g f) = {div}"),
    );
    if solenoidal && is_linear(s) && g.constant_value().is_some() {
        a.rider("C2.5: the linear system has no isolated compact regular integral hypersurface");
    }
    let r = a.rank(d, s.dim());
    Ok(a.bound(r, |r| rank_text(KIND_ISOLATED, r)))
}

/// Zero-based position of `psi_qh` (one-based `q < h`) in the induced
/// Pfaff system.
pub fn psi_index(n: usize, q: usize, h: usize) -> Option<usize> {
    if q == 0 || q >= h || h > n {
        return None;
    }
    let before: usize = (1..q).map(|k| n - k).sum();
    Some(before + (h - q - 1))
}

/// The first boundedness test on the induced Pfaff system of `s`; with an
/// invariant form in `data` the second assertion is attached as well.
pub fn check_ode_pfaff_bound(
    s: &OdeSystem,
    data: &EdData,
    d: &Domain,
    cfg: &SignConfig,
) -> Result<CheckReport> {
    let (pf, _) = pfaff_from_ode(s)?;
    let id = if data.theta.is_some() {
        "T2.4D"
    } else {
        "T2.3D"
    };
    ed_report(id, &pf.forms, data, d, cfg, format!("f = {}", s.f))
}
