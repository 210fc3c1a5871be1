//! Executing the checks of a manifest and rendering the reports.

use std::time::Instant;

use serde::Serialize;

use super::model::{CheckSpec, Manifest, SystemSpec, Task};
use crate::error::{usage, Result};
use crate::par::{self, Parallelism};
use crate::sign::{Domain, SignConfig};
use crate::theorems::*;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub samples: usize,
    pub parallelism: Parallelism,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        let cfg = SignConfig::default();
        RunOptions {
            seed: cfg.seed,
            samples: cfg.samples,
            parallelism: cfg.parallelism,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: CheckReport,
    pub timing_ms: u64,
}

fn run_task(m: &Manifest, c: &CheckSpec, d: &Domain, cfg: &SignConfig) -> Result<Vec<CheckReport>> {
    use SystemSpec as S;
    let sys = &m.system;
    let one = |r: Result<CheckReport>| r.map(|r| vec![r]);
    let ode = || sys.induced_ode(1);
    let fam = || match sys {
        S::Total(t) => Ok(Family::Total(t)),
        S::Partial(p) => Ok(Family::Partial(p)),
        _ => usage("expected a total or partial system"),
    };
    let total = || match sys {
        S::Total(t) => Ok(t),
        _ => usage("expected a total system"),
    };
    let pfaff = || match sys {
        S::Pfaff(p) => Ok(p),
        _ => usage("expected a Pfaff system"),
    };
    match &c.task {
        Task::Tkachev { n_fn } => one(check_tkachev_absence(&ode()?, n_fn, d, cfg)),
        Task::Dulac { phi } => one(check_dulac_bound(&ode()?, phi, d, cfg)),
        Task::PartialDiv { nu, mus } => one(check_partial_div_bound(&ode()?, *nu, mus, d, cfg)),
        Task::TdPartialDiv { j, nu, mus } => {
            one(check_td_partial_div_bound(total()?, *j, *nu, mus, d, cfg))
        }
        Task::OrbitFn { n_fn } => one(check_orbit_absence_fn(total()?, n_fn, d, cfg)),
        Task::OrbitForm { w } => one(check_orbit_absence_form(total()?, w, d, cfg)),
        Task::LinearEigen { system } => one(check_linear_td_eigen(system)),
        Task::Exterior { zetas, data } => one(check_ed_bound(zetas, data, d, cfg)),
        Task::Pfaff { data } => one(check_pfaff_bound(pfaff()?, data, d, cfg)),
        Task::OdePfaff { data } => one(check_ode_pfaff_bound(&ode()?, data, d, cfg)),
        Task::InducedPfaff { j, data } => one(check_induced_pfaff_bound(fam()?, *j, data, d, cfg)),
        Task::FormInvariance { zetas, theta, etas } => {
            one(check_form_invariance(zetas, theta, etas))
        }
        Task::ClassifyLinear => one(classify_linear_pfaff(pfaff()?)),
        Task::OrthogonalField { v } => one(check_orthogonal_field_bound(pfaff()?, v, d, cfg)),
        Task::OrthogonalCombination { w, gs } => one(check_orthogonal_combination(w, gs, d, cfg)),
        Task::Solenoidal { w, mu } => one(check_solenoidal_absence(w, mu, d, cfg)),
        Task::Planar {
            alpha,
            beta,
            branch,
        } => one(check_planar_alpha_beta(
            &ode()?,
            alpha,
            beta,
            *branch,
            d,
            cfg,
        )),
        Task::Isolated { g } => one(check_isolated_regular_bound(&ode()?, g, d, cfg)),
        Task::InducedDulac { j, phi } => one(check_induced_dulac(fam()?, *j, phi, d, cfg)),
        Task::TdSolenoidal { gs } => one(check_td_solenoidal(total()?, gs, d, cfg)),
        Task::PartialIntegral { ws } => {
            let Some(ops) = sys.operators() else {
                return usage("PI needs an ODE, total or partial system");
            };
            ws.iter().map(|w| check_partial_integral(&ops, w)).collect()
        }
        Task::PfaffSurface { w, lambdas } => {
            one(check_pfaff_invariant_surface(&pfaff()?.forms, w, lambdas))
        }
    }
}

/// Runs the checks (all of them, or those selected by `only`) and returns
/// the reports in manifest order.
///
/// `only` matches a check label first; if no label matches, every check
/// runs and reports are kept by their theorem id.
pub fn run_checks(m: &Manifest, opts: &RunOptions, only: Option<&str>) -> Result<Vec<Outcome>> {
    let by_label = only.is_some_and(|o| m.checks.iter().any(|c| c.label == o));
    let selected: Vec<&CheckSpec> = m
        .checks
        .iter()
        .filter(|c| !by_label || Some(c.label.as_str()) == only)
        .collect();
    let cfg = SignConfig {
        seed: opts.seed,
        samples: opts.samples,
        parallelism: opts.parallelism,
    };
    let results = par::map(opts.parallelism, &selected, |c| {
        let started = Instant::now();
        let d = m
            .domain(&c.domain)
            .expect("domains are validated when the manifest is built");
        let reports = run_task(m, c, d, &cfg)?;
        let ms = if opts.timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        Ok(reports
            .into_iter()
            .map(|report| Outcome {
                report,
                timing_ms: ms,
            })
            .collect::<Vec<_>>())
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    if let (Some(o), false) = (only, by_label) {
        out.retain(|x| x.report.theorem_id == o);
    }
    Ok(out)
}

/// 0 when every report reaches a conclusion, 2 when any is not applicable.
pub fn exit_code(outcomes: &[Outcome]) -> i32 {
    if outcomes
        .iter()
        .any(|o| o.report.conclusion.is_not_applicable())
    {
        2
    } else {
        0
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    tool: &'a str,
    version: &'a str,
    seed: u64,
    reports: Vec<JsonReport<'a>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    theorem_id: &'a str,
    object_kind: &'a str,
    hypotheses: Vec<JsonHyp<'a>>,
    conclusion: JsonConclusion<'a>,
    timing_ms: u64,
}

#[derive(Serialize)]
struct JsonHyp<'a> {
    desc: &'a str,
    verdict: &'a str,
    witness: &'a str,
}

#[derive(Serialize)]
struct JsonConclusion<'a> {
    #[serde(rename = "type")]
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<usize>,
    text: &'a str,
}

/// The machine-readable report document.
pub fn to_json(seed: u64, outcomes: &[Outcome]) -> String {
    let doc = JsonDoc {
        tool: "cyclebound",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        reports: outcomes
            .iter()
            .map(|o| {
                let r = &o.report;
                JsonReport {
                    theorem_id: &r.theorem_id,
                    object_kind: &r.object_kind,
                    hypotheses: r
                        .hypotheses
                        .iter()
                        .map(|h| JsonHyp {
                            desc: &h.desc,
                            verdict: h.verdict.name(),
                            witness: &h.witness,
                        })
                        .collect(),
                    conclusion: JsonConclusion {
                        kind: r.conclusion.type_name(),
                        bound: r.conclusion.bound(),
                        text: r.conclusion.text(),
                    },
                    timing_ms: o.timing_ms,
                }
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Human-readable rendering; `verbose` adds inputs and riders.
pub fn to_text(outcomes: &[Outcome], verbose: bool) -> String {
    let mut s = String::new();
    for o in outcomes {
        let r = &o.report;
        if verbose {
            for (k, v) in &r.inputs_echo {
                s.push_str(&format!("  input {k} = {v}\n"));
            }
        }
        s.push_str(&r.to_string());
        s.push('\n');
        if verbose || r.established() {
            for rider in &r.riders {
                s.push_str(&format!("  + {rider}\n"));
            }
        }
        if o.timing_ms > 0 {
            s.push_str(&format!("  ({} ms)\n", o.timing_ms));
        }
        s.push('\n');
    }
    s
}
