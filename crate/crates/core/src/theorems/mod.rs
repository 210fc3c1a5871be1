//! One checker per boundedness or absence test.
//!
//! Every checker audits the hypotheses of its test and returns a
//! [`CheckReport`]. A report carries a `Bound` or `Absence` conclusion only
//! when every hypothesis is [`HypVerdict::Pass`] or [`HypVerdict::Assumed`];
//! advisory entries are informational and never gate.

mod exterior_checks;
mod integral;
mod ode;
mod total;

use std::fmt;

use crate::ring::ScaledFraction;
use crate::sign::{self, Domain, SignConfig, SignVerdict};
use crate::systems::generic_rank;

pub use exterior_checks::{
    check_ed_bound, check_form_invariance, check_orthogonal_combination,
    check_orthogonal_field_bound, check_pfaff_bound, check_solenoidal_absence,
    classify_linear_pfaff, ed_analysis, EdAnalysis, EdData, ElimStep,
};
pub use integral::{
    check_partial_integral, check_pfaff_invariant_surface, verify_partial_integral,
    InvariantCertificate, PartialIntegral,
};
pub use ode::{
    check_dulac_bound, check_isolated_regular_bound, check_ode_pfaff_bound,
    check_partial_div_bound, check_planar_alpha_beta, check_tkachev_absence, dulac_divergence,
    partial_divergences, planar_q, psi_index, Branch, SampleMultipliers,
};
pub use total::{
    check_induced_dulac, check_induced_pfaff_bound, check_linear_td_eigen, check_orbit_absence_fn,
    check_orbit_absence_form, check_td_partial_div_bound, check_td_solenoidal, Family,
};

pub const KIND_MANIFOLDS: &str = "compact regular integral manifolds of dimension ν−1";
pub const KIND_HYPERSURFACES: &str = "compact integral hypersurfaces";
pub const KIND_ORBITS: &str = "compact regular orbits";
pub const KIND_LIMIT_CYCLES: &str = "limit cycles";
pub const KIND_LEAVES: &str = "compact leaves";
pub const KIND_TRAJECTORIES: &str = "closed trajectories";
pub const KIND_CURVES: &str = "simple closed curves made from trajectories";
pub const KIND_ISOLATED: &str = "isolated compact regular integral hypersurfaces";
pub const KIND_INTEGRAL: &str = "integral hypersurface";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypVerdict {
    Pass,
    Fail,
    Unknown,
    /// Taken on trust and recorded in the report.
    Assumed,
    /// Informational; never gates the conclusion.
    Advisory,
}

impl HypVerdict {
    pub fn name(self) -> &'static str {
        match self {
            HypVerdict::Pass => "pass",
            HypVerdict::Fail => "fail",
            HypVerdict::Unknown => "unknown",
            HypVerdict::Assumed => "assumed",
            HypVerdict::Advisory => "advisory",
        }
    }

    fn gates(self) -> bool {
        matches!(self, HypVerdict::Fail | HypVerdict::Unknown)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub desc: String,
    pub verdict: HypVerdict,
    pub witness: String,
}

impl Hypothesis {
    pub fn new(desc: impl Into<String>, verdict: HypVerdict, witness: impl Into<String>) -> Self {
        Hypothesis {
            desc: desc.into(),
            verdict,
            witness: witness.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    Bound { bound: usize, text: String },
    Absence { text: String },
    NotApplicable { reason: String },
    Classification { text: String },
}

impl Conclusion {
    pub fn type_name(&self) -> &'static str {
        match self {
            Conclusion::Bound { .. } => "Bound",
            Conclusion::Absence { .. } => "Absence",
            Conclusion::NotApplicable { .. } => "NotApplicable",
            Conclusion::Classification { .. } => "Classification",
        }
    }

    pub fn bound(&self) -> Option<usize> {
        match self {
            Conclusion::Bound { bound, .. } => Some(*bound),
            _ => None,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Conclusion::Bound { text, .. }
            | Conclusion::Absence { text }
            | Conclusion::Classification { text } => text,
            Conclusion::NotApplicable { reason } => reason,
        }
    }

    pub fn is_not_applicable(&self) -> bool {
        matches!(self, Conclusion::NotApplicable { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub theorem_id: String,
    pub object_kind: String,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Conclusion,
    /// Corollaries and secondary assertions that share the hypotheses.
    pub riders: Vec<String>,
    /// Canonical rendering of every input, in insertion order.
    pub inputs_echo: Vec<(String, String)>,
}

impl CheckReport {
    /// True when no gating hypothesis is failing or unknown.
    pub fn established(&self) -> bool {
        !self.hypotheses.iter().any(|h| h.verdict.gates())
    }

    pub fn hypothesis(&self, needle: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.desc.contains(needle))
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", self.theorem_id, self.object_kind)?;
        for h in &self.hypotheses {
            writeln!(f, "  {:<8} {}", h.verdict.name(), h.desc)?;
            if !h.witness.is_empty() {
                writeln!(f, "           {}", h.witness)?;
            }
        }
        write!(
            f,
            "  => {}: {}",
            self.conclusion.type_name(),
            self.conclusion.text()
        )
    }
}

/// Report under construction.
pub(crate) struct Audit {
    id: String,
    kind: String,
    hyps: Vec<Hypothesis>,
    riders: Vec<String>,
    echo: Vec<(String, String)>,
}

impl Audit {
    pub(crate) fn new(id: impl Into<String>, kind: impl Into<String>) -> Audit {
        Audit {
            id: id.into(),
            kind: kind.into(),
            hyps: Vec::new(),
            riders: Vec::new(),
            echo: Vec::new(),
        }
    }

    pub(crate) fn echo(&mut self, name: impl Into<String>, value: impl fmt::Display) {
        self.echo.push((name.into(), value.to_string()));
    }

    pub(crate) fn push(&mut self, h: Hypothesis) -> HypVerdict {
        let v = h.verdict;
        self.hyps.push(h);
        v
    }

    pub(crate) fn check(
        &mut self,
        desc: impl Into<String>,
        ok: bool,
        witness: impl Into<String>,
    ) -> bool {
        let v = if ok {
            HypVerdict::Pass
        } else {
            HypVerdict::Fail
        };
        self.push(Hypothesis::new(desc, v, witness));
        ok
    }

    pub(crate) fn assume(&mut self, desc: impl Into<String>, witness: impl Into<String>) {
        self.push(Hypothesis::new(desc, HypVerdict::Assumed, witness));
    }

    pub(crate) fn rider(&mut self, text: impl Into<String>) {
        self.riders.push(text.into());
    }

    pub(crate) fn sign(
        &mut self,
        desc: impl Into<String>,
        e: &ScaledFraction,
        need: Need,
        d: &Domain,
        cfg: &SignConfig,
    ) -> SignVerdict {
        let v = sign::sign_of(e, d, cfg);
        self.push(sign_hypothesis(desc, e, &v, need));
        v
    }

    /// Records the rank of `pi_{nu-1}` of the domain.
    pub(crate) fn rank(&mut self, d: &Domain, nu: usize) -> Option<usize> {
        let r = sign::homotopy_rank(d, nu);
        let desc = format!(
            "rank of the homotopy group π_{} of the domain is known",
            nu - 1
        );
        match r {
            Some(r) => self.push(Hypothesis::new(desc, HypVerdict::Pass, format!("r = {r}"))),
            None => self.push(Hypothesis::new(
                desc,
                HypVerdict::Unknown,
                "declare rank for this domain",
            )),
        };
        r
    }

    /// Generic-point linear independence of the given coefficient rows.
    pub(crate) fn independence(&mut self, rows: &[Vec<ScaledFraction>], seed: u64) {
        if rows.len() < 2 {
            return;
        }
        let r = generic_rank(rows, 20, seed);
        let witness = if r == rows.len() {
            format!("rank {r} at sampled points")
        } else {
            format!(
                "rank {r} < {} at 20 sampled points; entries may be linearly bound",
                rows.len()
            )
        };
        self.push(Hypothesis::new(
            "entries are not linearly bound (sampled)",
            HypVerdict::Advisory,
            witness,
        ));
    }

    fn established(&self) -> bool {
        !self.hyps.iter().any(|h| h.verdict.gates())
    }

    fn first_gap(&self) -> String {
        match self.hyps.iter().find(|h| h.verdict.gates()) {
            Some(h) => format!(
                "hypothesis not established: {} ({})",
                h.desc,
                h.verdict.name()
            ),
            None => "hypotheses not established".into(),
        }
    }

    fn finish(self, conclusion: Conclusion) -> CheckReport {
        CheckReport {
            theorem_id: self.id,
            object_kind: self.kind,
            hypotheses: self.hyps,
            conclusion,
            riders: self.riders,
            inputs_echo: self.echo,
        }
    }

    pub(crate) fn bound(self, r: Option<usize>, text: impl FnOnce(usize) -> String) -> CheckReport {
        match r {
            Some(r) if self.established() => {
                let text = with_riders(text(r), &self.riders);
                self.finish(Conclusion::Bound { bound: r, text })
            }
            _ => {
                let reason = self.first_gap();
                self.finish(Conclusion::NotApplicable { reason })
            }
        }
    }

    pub(crate) fn absence(self, text: impl Into<String>) -> CheckReport {
        if self.established() {
            let text = with_riders(text.into(), &self.riders);
            self.finish(Conclusion::Absence { text })
        } else {
            let reason = self.first_gap();
            self.finish(Conclusion::NotApplicable { reason })
        }
    }

    pub(crate) fn classification(self, text: impl Into<String>) -> CheckReport {
        if self.established() {
            let text = with_riders(text.into(), &self.riders);
            self.finish(Conclusion::Classification { text })
        } else {
            let reason = self.first_gap();
            self.finish(Conclusion::NotApplicable { reason })
        }
    }
}

fn with_riders(text: String, riders: &[String]) -> String {
    if riders.is_empty() {
        text
    } else {
        format!("{text}; {}", riders.join("; "))
    }
}

/// What a sign hypothesis asks of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Need {
    ConstSign,
    ConstSignOrZero,
    Definite,
}

pub(crate) fn sign_hypothesis(
    desc: impl Into<String>,
    e: &ScaledFraction,
    v: &SignVerdict,
    need: Need,
) -> Hypothesis {
    let verdict = match v {
        SignVerdict::Unknown => HypVerdict::Unknown,
        SignVerdict::Indefinite { .. } => HypVerdict::Fail,
        SignVerdict::IdenticallyZero if need == Need::ConstSignOrZero => HypVerdict::Pass,
        SignVerdict::IdenticallyZero => HypVerdict::Fail,
        v if v.is_definite() => HypVerdict::Pass,
        _ if need == Need::Definite => HypVerdict::Unknown,
        _ => HypVerdict::Pass,
    };
    Hypothesis::new(desc, verdict, format!("{e} : {v}"))
}

/// Re-issues a delegate's report under another test id, with the induced
/// index recorded first and `riders` in place of the delegate's.
pub(crate) fn relabel(
    mut rep: CheckReport,
    id: &str,
    first: Hypothesis,
    riders: Vec<String>,
) -> CheckReport {
    let base = match &rep.conclusion {
        Conclusion::NotApplicable { .. } => None,
        c => {
            let t = c.text();
            let tail = format!("; {}", rep.riders.join("; "));
            Some(if rep.riders.is_empty() {
                t.to_string()
            } else {
                t.strip_suffix(tail.as_str()).unwrap_or(t).to_string()
            })
        }
    };
    if let Some(base) = base {
        let text = with_riders(base, &riders);
        match &mut rep.conclusion {
            Conclusion::Bound { text: t, .. }
            | Conclusion::Absence { text: t }
            | Conclusion::Classification { text: t } => *t = text,
            Conclusion::NotApplicable { .. } => {}
        }
    }
    rep.theorem_id = id.to_string();
    rep.hypotheses.insert(0, first);
    rep.riders = riders;
    rep
}

pub(crate) fn rank_text(kind: &str, r: usize) -> String {
    format!("at most {r} {kind} in the domain")
}
