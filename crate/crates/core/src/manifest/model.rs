//! Interpretation of parsed blocks into a [`Manifest`].

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::expr::{Pos, Scope};
use super::syntax::{parse_blocks, Block, Value};
use crate::error::{usage, Error, Result};
use crate::exterior::{KForm, Sample, VectorField};
use crate::ring::{Polynomial, Rational, ScaledFraction, VarTable};
use crate::sign::{Domain, Excluded};
use crate::systems::{
    pfaff_from_ode, ExteriorSystem, LinearTotalSystem, OdeSystem, PartialSystem, PfaffSystem,
    RatMatrix, TotalSystem,
};
use crate::theorems::{psi_index, Branch, EdData, ElimStep, SampleMultipliers};

/// The system a manifest is about.
#[derive(Debug, Clone)]
pub enum SystemSpec {
    Ode(OdeSystem),
    Total(TotalSystem),
    Partial(PartialSystem),
    Pfaff(PfaffSystem),
    Exterior(ExteriorSystem),
}

impl SystemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemSpec::Ode(_) => "ode",
            SystemSpec::Total(_) => "total",
            SystemSpec::Partial(_) => "partial",
            SystemSpec::Pfaff(_) => "pfaff",
            SystemSpec::Exterior(_) => "exterior",
        }
    }

    /// Operators whose common partial integrals are sought.
    pub fn operators(&self) -> Option<Vec<VectorField>> {
        match self {
            SystemSpec::Ode(s) => Some(vec![s.f.clone()]),
            SystemSpec::Total(s) => Some(s.columns.clone()),
            SystemSpec::Partial(s) => Some(s.operators.clone()),
            _ => None,
        }
    }

    /// The ordinary system `(Dj)`; `j` is ignored for an ODE.
    pub fn induced_ode(&self, j: usize) -> Result<OdeSystem> {
        match self {
            SystemSpec::Ode(s) => Ok(s.clone()),
            SystemSpec::Total(s) => s.induced_ode(j),
            SystemSpec::Partial(s) => s.induced_ode(j),
            _ => usage("exterior and Pfaff systems have no induced vector field"),
        }
    }
}

/// One unit of work of a check block.
#[derive(Debug, Clone)]
pub enum Task {
    Tkachev {
        n_fn: ScaledFraction,
    },
    Dulac {
        phi: ScaledFraction,
    },
    PartialDiv {
        nu: usize,
        mus: SampleMultipliers,
    },
    TdPartialDiv {
        j: usize,
        nu: usize,
        mus: SampleMultipliers,
    },
    OrbitFn {
        n_fn: ScaledFraction,
    },
    OrbitForm {
        w: KForm,
    },
    LinearEigen {
        system: LinearTotalSystem,
    },
    Exterior {
        zetas: ExteriorSystem,
        data: EdData,
    },
    Pfaff {
        data: EdData,
    },
    OdePfaff {
        data: EdData,
    },
    InducedPfaff {
        j: usize,
        data: EdData,
    },
    FormInvariance {
        zetas: Vec<KForm>,
        theta: KForm,
        etas: Vec<KForm>,
    },
    ClassifyLinear,
    OrthogonalField {
        v: VectorField,
    },
    OrthogonalCombination {
        w: KForm,
        gs: Vec<ScaledFraction>,
    },
    Solenoidal {
        w: KForm,
        mu: ScaledFraction,
    },
    Planar {
        alpha: ScaledFraction,
        beta: ScaledFraction,
        branch: Branch,
    },
    Isolated {
        g: ScaledFraction,
    },
    InducedDulac {
        j: usize,
        phi: ScaledFraction,
    },
    TdSolenoidal {
        gs: Vec<ScaledFraction>,
    },
    PartialIntegral {
        ws: Vec<Polynomial>,
    },
    PfaffSurface {
        w: Polynomial,
        lambdas: Vec<ScaledFraction>,
    },
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    /// The label written after `check`.
    pub label: String,
    pub domain: String,
    pub task: Task,
}

#[derive(Debug, Clone)]
pub struct ProbeSpec {
    pub candidate: String,
    pub start: Vec<f64>,
    pub horizon: f64,
    pub step: f64,
    pub j: usize,
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub scope: Scope,
    pub system: SystemSpec,
    pub domains: Vec<(String, Domain)>,
    pub checks: Vec<CheckSpec>,
    pub candidates: Vec<(String, Polynomial)>,
    pub probes: Vec<ProbeSpec>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

pub const DEFAULT_DOMAIN: &str = "default";

impl Manifest {
    pub fn load(path: &std::path::Path) -> Result<Manifest> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Manifest::parse(&src)
    }

    pub fn parse(src: &str) -> Result<Manifest> {
        let blocks = parse_blocks(src)?;
        let vt = variables(&blocks)?;
        let mut b = Builder {
            scope: Scope::new(&vt),
            system: None,
            domains: Vec::new(),
            candidates: Vec::new(),
            seed: None,
            samples: None,
        };
        for blk in &blocks {
            match blk.kind.as_str() {
                "variables" | "radical" | "check" | "probe" => {}
                "define" => b.define(blk)?,
                "assume" => b.assume(blk)?,
                "system" => b.system(blk)?,
                "domain" => b.domain(blk)?,
                "options" => b.options(blk)?,
                "candidate" => b.candidate(blk)?,
                k => return blk.pos.err(format!("unknown block `{k}`")),
            }
        }
        let Some(system) = b.system.clone() else {
            return Pos::new(1, 1).err("the manifest needs a `system` block");
        };
        if b.domains.is_empty() {
            b.domains.push((
                DEFAULT_DOMAIN.into(),
                b.with_bases(Domain::whole(vt.nbase())),
            ));
        }
        let mut checks = Vec::new();
        let mut probes = Vec::new();
        for blk in &blocks {
            match blk.kind.as_str() {
                "check" => checks.push(b.check(blk, &system)?),
                "probe" => probes.push(b.probe(blk)?),
                _ => {}
            }
        }
        Ok(Manifest {
            scope: b.scope,
            system,
            domains: b.domains,
            checks,
            candidates: b.candidates,
            probes,
            seed: b.seed,
            samples: b.samples,
        })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.scope.vars()
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn candidate(&self, name: &str) -> Option<&Polynomial> {
        self.candidates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| w)
    }
}

fn words(v: &Value) -> Result<Vec<String>> {
    match v {
        Value::List(items, _) => items.iter().map(|i| i.text().map(str::to_string)).collect(),
        v => Ok(v
            .text()?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()),
    }
}

fn variables(blocks: &[Block]) -> Result<Arc<VarTable>> {
    let Some(vb) = blocks.iter().find(|b| b.kind == "variables") else {
        return Pos::new(1, 1).err("the manifest needs a `variables` block");
    };
    let base = words(vb.require("base")?)?;
    let time = match vb.get("time") {
        Some(v) => words(v)?,
        None => Vec::new(),
    };
    let mut vt = VarTable::new(base, time).map_err(|e| at(vb.pos, e))?;
    let plain = Arc::new(vt.clone());
    let scope = Scope::new(&plain);
    for rb in blocks.iter().filter(|b| b.kind == "radical") {
        let Some(sym) = &rb.label else {
            return rb
                .pos
                .err("a radical block needs a symbol, e.g. `radical s { ... }`");
        };
        let sq = rb.require("square")?;
        let p = scope.polynomial_at(sq.text()?, sq.text_pos())?;
        vt.add_radical(sym, &p).map_err(|e| at(rb.pos, e))?;
    }
    Ok(Arc::new(vt))
}

fn at(pos: Pos, e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::Io(_) => e,
        e => Error::Parse {
            line: pos.line,
            col: pos.col,
            msg: e.to_string(),
        },
    }
}

fn number<T: std::str::FromStr>(v: &Value, what: &str) -> Result<T> {
    v.text()?
        .trim()
        .parse()
        .or_else(|_| v.pos().err(format!("expected {what}")))
}

fn float(v: &Value) -> Result<f64> {
    number::<f64>(v, "a number")
}

struct Builder {
    scope: Scope,
    system: Option<SystemSpec>,
    domains: Vec<(String, Domain)>,
    candidates: Vec<(String, Polynomial)>,
    seed: Option<u64>,
    samples: Option<usize>,
}

impl Builder {
    fn vt(&self) -> Arc<VarTable> {
        self.scope.vars().clone()
    }

    fn n(&self) -> usize {
        self.scope.vars().nbase()
    }

    fn scalar(&self, v: &Value) -> Result<ScaledFraction> {
        self.scope.scalar_at(v.text()?, v.text_pos())
    }

    fn poly(&self, v: &Value) -> Result<Polynomial> {
        self.scope.polynomial_at(v.text()?, v.text_pos())
    }

    fn form(&self, v: &Value, degree: usize) -> Result<KForm> {
        let f = self.scope.form_at(v.text()?, v.text_pos())?;
        if f.is_zero() {
            return Ok(KForm::zero(&self.vt(), degree));
        }
        if f.degree() != degree {
            return v.pos().err(format!(
                "expected a {degree}-form, found degree {}",
                f.degree()
            ));
        }
        Ok(f)
    }

    fn any_form(&self, v: &Value) -> Result<KForm> {
        self.scope.form_at(v.text()?, v.text_pos())
    }

    fn scalar_or(&self, b: &Block, key: &str, default: &str) -> Result<ScaledFraction> {
        match b.get(key) {
            Some(v) => self.scalar(v),
            None => self.scope.scalar(default),
        }
    }

    fn scalars(&self, v: &Value) -> Result<Vec<ScaledFraction>> {
        v.items()?.iter().map(|i| self.scalar(i)).collect()
    }

    fn field(&self, v: &Value) -> Result<VectorField> {
        let comps = self.scalars(v)?;
        if comps.len() != self.n() {
            return v.pos().err(format!(
                "expected {} components, found {}",
                self.n(),
                comps.len()
            ));
        }
        VectorField::new(&self.vt(), comps).map_err(|e| at(v.pos(), e))
    }

    fn define(&mut self, b: &Block) -> Result<()> {
        for e in &b.entries {
            let v = super::expr::parse_expr_at(e.value.text()?, e.value.text_pos())?
                .eval(&self.scope)?;
            self.scope.define(&e.key, v);
        }
        Ok(())
    }

    fn assume(&mut self, b: &Block) -> Result<()> {
        if let Some(v) = b.get("positive") {
            for item in v.items()? {
                let p = self.poly(item)?;
                if p.is_constant() {
                    return item.pos().err("positive bases must be nonconstant");
                }
                self.scope.declare_positive(p);
            }
        }
        Ok(())
    }

    fn with_bases(&self, mut d: Domain) -> Domain {
        for p in self.scope.positive_bases() {
            d = d.with_positive_base(p.clone());
        }
        d
    }

    fn system(&mut self, b: &Block) -> Result<()> {
        if self.system.is_some() {
            return b.pos.err("only one system per manifest");
        }
        let kind = b.require("kind")?;
        let vt = self.vt();
        let wrap = |r: Result<SystemSpec>| r.map_err(|e| at(b.pos, e));
        let spec = match kind.text()? {
            "ode" => wrap(OdeSystem::new(self.field(b.require("f")?)?).map(SystemSpec::Ode))?,
            "total" | "partial" => {
                let key = if kind.text()? == "total" {
                    "columns"
                } else {
                    "operators"
                };
                let fields = b
                    .require(key)?
                    .items()?
                    .iter()
                    .map(|c| self.field(c))
                    .collect::<Result<Vec<_>>>()?;
                if kind.text()? == "total" {
                    wrap(TotalSystem::new(fields).map(SystemSpec::Total))?
                } else {
                    wrap(PartialSystem::new(fields).map(SystemSpec::Partial))?
                }
            }
            "pfaff" | "exterior" => {
                let forms = b
                    .require("forms")?
                    .items()?
                    .iter()
                    .map(|v| self.any_form(v))
                    .collect::<Result<Vec<_>>>()?;
                if kind.text()? == "pfaff" {
                    wrap(PfaffSystem::new(forms).map(SystemSpec::Pfaff))?
                } else {
                    wrap(ExteriorSystem::new(forms).map(SystemSpec::Exterior))?
                }
            }
            k => return kind.pos().err(format!("unknown system kind `{k}`")),
        };
        let _ = vt;
        self.system = Some(spec);
        Ok(())
    }

    fn domain(&mut self, b: &Block) -> Result<()> {
        let name = b.label.clone().unwrap_or_else(|| DEFAULT_DOMAIN.into());
        if self.domains.iter().any(|(n, _)| *n == name) {
            return b.pos.err(format!("domain `{name}` is declared twice"));
        }
        let n = self.n();
        let mut d = self.with_bases(Domain::whole(n));
        if let Some(v) = b.get("exclude") {
            let items = match v {
                Value::List(items, _) => items.clone(),
                v => vec![v.clone()],
            };
            for item in &items {
                d = d.exclude(self.flat(item)?);
            }
        }
        if let Some(v) = b.get("rank") {
            let items = v.items()?;
            let pairs: Vec<&Value> = if items.iter().all(|i| matches!(i, Value::List(..))) {
                items.iter().collect()
            } else {
                vec![v]
            };
            for p in pairs {
                let pr = p.items()?;
                if pr.len() != 2 {
                    return p.pos().err("rank entries are pairs [nu, r]");
                }
                d = d.with_rank(number(&pr[0], "an integer")?, number(&pr[1], "an integer")?);
            }
        }
        if let Some(v) = b.get("where") {
            for item in v.items()? {
                d = d.with_inequality(self.poly(item)?);
            }
        }
        self.domains.push((name, d));
        Ok(())
    }

    /// `origin` or `x1 = 0, x2 = 0`.
    fn flat(&self, v: &Value) -> Result<Excluded> {
        let text = v.text()?.trim();
        if text == "origin" {
            return Ok(Excluded::origin(self.n()));
        }
        let mut fixed = BTreeMap::new();
        for part in text.split(',') {
            let Some((lhs, rhs)) = part.split_once('=') else {
                return v
                    .pos()
                    .err(format!("expected `xi = value`, found `{}`", part.trim()));
            };
            let i = self
                .vt()
                .base_index(lhs.trim())
                .map_err(|e| at(v.pos(), e))?;
            let c = self.scope.scalar_at(rhs, v.text_pos())?;
            let Some(c) = c.constant_value() else {
                return v.pos().err("excluded coordinates must be constants");
            };
            fixed.insert(i, c);
        }
        Ok(Excluded { fixed })
    }

    fn options(&mut self, b: &Block) -> Result<()> {
        if let Some(v) = b.get("seed") {
            self.seed = Some(number(v, "an integer seed")?);
        }
        if let Some(v) = b.get("samples") {
            self.samples = Some(number(v, "a sample count")?);
        }
        Ok(())
    }

    fn candidate(&mut self, b: &Block) -> Result<()> {
        let Some(name) = &b.label else {
            return b
                .pos
                .err("a candidate needs a name, e.g. `candidate w1 { ... }`");
        };
        let w = self.poly(b.require("w")?)?;
        self.candidates.push((name.clone(), w));
        Ok(())
    }

    fn probe(&self, b: &Block) -> Result<ProbeSpec> {
        let Some(name) = &b.label else {
            return b
                .pos
                .err("a probe names its candidate, e.g. `probe w1 { ... }`");
        };
        if !self.candidates.iter().any(|(n, _)| n == name) {
            return b.pos.err(format!("unknown candidate `{name}`"));
        }
        let start = b
            .require("start")?
            .items()?
            .iter()
            .map(|v| self.scalar(v).and_then(|s| constant_f64(&s, v.pos())))
            .collect::<Result<Vec<_>>>()?;
        if start.len() != self.n() {
            return b.pos.err(format!("start needs {} coordinates", self.n()));
        }
        Ok(ProbeSpec {
            candidate: name.clone(),
            start,
            horizon: b.get("horizon").map(float).transpose()?.unwrap_or(5.0),
            step: b.get("step").map(float).transpose()?.unwrap_or(1e-3),
            j: b.get("j")
                .map(|v| number(v, "an index"))
                .transpose()?
                .unwrap_or(1),
        })
    }

    fn index(&self, b: &Block, key: &str) -> Result<usize> {
        number(b.require(key)?, "a positive integer")
    }

    fn samples_map(&self, b: &Block, nu: usize) -> Result<SampleMultipliers> {
        let n = self.n();
        let mut out = SampleMultipliers::new();
        let Some(mb) = b.block("mu") else {
            return b
                .pos
                .err("the partial divergence test needs a `mu { ... }` block");
        };
        let default = mb.get("default").map(|v| self.scalar(v)).transpose()?;
        for e in &mb.entries {
            if e.key == "default" {
                continue;
            }
            let xi = Sample::parse(&e.key, n).map_err(|err| at(e.pos, err))?;
            if xi.nu() != nu {
                return e
                    .pos
                    .err(format!("sample {} does not have size {nu}", e.key));
            }
            out.insert(xi, self.scalar(&e.value)?);
        }
        if let Some(d) = default {
            for xi in Sample::all(n, nu) {
                out.entry(xi).or_insert_with(|| d.clone());
            }
        }
        Ok(out)
    }

    /// Forms keyed by equation: a list, or a block with one-based keys or
    /// `psiQH` labels. Missing entries are zero.
    fn keyed_forms(
        &self,
        b: &Block,
        key: &str,
        zetas: &[KForm],
        degree: impl Fn(&KForm) -> usize,
    ) -> Result<Vec<KForm>> {
        let vt = self.vt();
        let mut out: Vec<KForm> = zetas.iter().map(|z| KForm::zero(&vt, degree(z))).collect();
        if let Some(v) = b.get(key) {
            let items = v.items()?;
            if items.len() != zetas.len() {
                return v.pos().err(format!(
                    "expected {} forms, found {}",
                    zetas.len(),
                    items.len()
                ));
            }
            for (k, item) in items.iter().enumerate() {
                out[k] = self.form(item, degree(&zetas[k]))?;
            }
        }
        if let Some(kb) = b.block(key) {
            for e in &kb.entries {
                let k = self.equation(&e.key, zetas.len(), e.pos)?;
                out[k] = self.form(&e.value, degree(&zetas[k]))?;
            }
        }
        Ok(out)
    }

    /// Zero-based equation index from `3` or `psi13`.
    fn equation(&self, label: &str, m: usize, pos: Pos) -> Result<usize> {
        let k = if let Some(rest) = label.strip_prefix("psi") {
            let (q, h) = match rest.split_once('_') {
                Some((q, h)) => (q.parse().ok(), h.parse().ok()),
                None if rest.len() == 2 => (rest[..1].parse().ok(), rest[1..].parse().ok()),
                None => (None, None),
            };
            match (q, h) {
                (Some(q), Some(h)) => psi_index(self.n(), q, h),
                _ => None,
            }
        } else {
            label.parse::<usize>().ok().and_then(|k| k.checked_sub(1))
        };
        match k {
            Some(k) if k < m => Ok(k),
            _ => pos.err(format!("`{label}` does not name one of the {m} equations")),
        }
    }

    fn ed_data(&self, b: &Block, zetas: &[KForm]) -> Result<EdData> {
        let n = self.n();
        if n < 2 {
            return b.pos.err("the boundedness tests need n >= 2");
        }
        let alpha = match b.get("alpha") {
            Some(v) => self.form(v, n - 2)?,
            None => KForm::zero(&self.vt(), n - 2),
        };
        let lower = |z: &KForm| n.saturating_sub(z.degree() + 1);
        let gkey = if b.get("ell").is_some() || b.block("ell").is_some() {
            "ell"
        } else {
            "gamma"
        };
        let gammas = self.keyed_forms(b, gkey, zetas, lower)?;
        let mut plan = Vec::new();
        if let Some(v) = b.get("eliminate") {
            for step in v.items()? {
                let pr = step.items()?;
                if pr.len() != 2 {
                    return step
                        .pos()
                        .err("eliminate entries are pairs [variable, equation]");
                }
                let var = self
                    .vt()
                    .base_index(pr[0].text()?)
                    .map_err(|e| at(pr[0].pos(), e))?;
                let eq = self.equation(pr[1].text()?, zetas.len(), pr[1].pos())?;
                plan.push(ElimStep {
                    var,
                    equation: eq + 1,
                });
            }
        }
        let mut data = EdData::new(alpha, gammas).with_plan(plan);
        if let Some(v) = b.get("theta") {
            let theta = self.form(v, n - 2)?;
            let etas = self.keyed_forms(b, "eta", zetas, lower)?;
            data = data.with_invariant(theta, etas);
        }
        Ok(data)
    }

    fn single_form(&self, b: &Block, system: &SystemSpec) -> Result<KForm> {
        if let Some(v) = b.get("omega") {
            return self.form(v, 1);
        }
        match system {
            SystemSpec::Pfaff(p) if p.forms.len() == 1 => Ok(p.forms[0].clone()),
            _ => b
                .pos
                .err("this test needs `omega` or a single-equation Pfaff system"),
        }
    }

    fn check(&self, b: &Block, system: &SystemSpec) -> Result<CheckSpec> {
        let Some(label) = b.label.clone() else {
            return b
                .pos
                .err("a check needs a test id, e.g. `check T2.3 { ... }`");
        };
        let domain = match b.get("domain") {
            Some(v) => v.text()?.to_string(),
            None => self.domains[0].0.clone(),
        };
        if !self.domains.iter().any(|(n, _)| *n == domain) {
            return b.pos.err(format!("unknown domain `{domain}`"));
        }
        let task = self.task(&label, b, system).map_err(|e| at(b.pos, e))?;
        Ok(CheckSpec {
            label,
            domain,
            task,
        })
    }

    fn task(&self, id: &str, b: &Block, system: &SystemSpec) -> Result<Task> {
        use SystemSpec as S;
        let wrong = || {
            b.pos.err(format!(
                "test {id} does not apply to a {} system",
                system.kind()
            ))
        };
        let n = self.n();
        Ok(match (id, system) {
            ("T0.2", S::Ode(_)) => Task::Tkachev {
                n_fn: self.scalar(b.require("N")?)?,
            },
            ("T0.1" | "T2.9", S::Ode(_)) => Task::Dulac {
                phi: self.scalar_or(b, "phi", "1")?,
            },
            ("T1.1" | "C1.1", S::Ode(_)) => {
                let nu = self.index(b, "nu")?;
                Task::PartialDiv {
                    nu,
                    mus: self.samples_map(b, nu)?,
                }
            }
            ("T1.2" | "C1.2", S::Total(_)) => {
                let nu = self.index(b, "nu")?;
                Task::TdPartialDiv {
                    j: self.index(b, "j")?,
                    nu,
                    mus: self.samples_map(b, nu)?,
                }
            }
            ("T1.3", S::Total(_)) => Task::OrbitFn {
                n_fn: self.scalar(b.require("N")?)?,
            },
            ("T1.4", S::Total(_)) => Task::OrbitForm {
                w: self.form(b.require("omega")?, 1)?,
            },
            ("T1.5", S::Total(t)) => Task::LinearEigen {
                system: linear_matrices(t)?,
            },
            ("T2.1" | "T2.2", S::Exterior(e)) => Task::Exterior {
                zetas: e.clone(),
                data: self.ed_data(b, &e.zetas)?,
            },
            ("T2.1" | "T2.2", S::Pfaff(p)) => Task::Exterior {
                zetas: p.as_exterior(),
                data: self.ed_data(b, &p.forms)?,
            },
            ("T2.3" | "T2.4", S::Pfaff(p)) => Task::Pfaff {
                data: self.ed_data(b, &p.forms)?,
            },
            ("T2.3" | "T2.4" | "T2.3D" | "T2.4D", S::Ode(o)) => {
                let (pf, _) = pfaff_from_ode(o)?;
                Task::OdePfaff {
                    data: self.ed_data(b, &pf.forms)?,
                }
            }
            ("T2.12" | "T2.13" | "T2.16" | "T2.17", S::Total(_) | S::Partial(_)) => {
                let j = self.index(b, "j")?;
                let (pf, _) = pfaff_from_ode(&system.induced_ode(j)?)?;
                Task::InducedPfaff {
                    j,
                    data: self.ed_data(b, &pf.forms)?,
                }
            }
            ("T2.2-premise", S::Exterior(_) | S::Pfaff(_)) => {
                let zetas = match system {
                    S::Exterior(e) => e.zetas.clone(),
                    S::Pfaff(p) => p.forms.clone(),
                    _ => unreachable!(),
                };
                let lower = |z: &KForm| n.saturating_sub(z.degree() + 1);
                Task::FormInvariance {
                    theta: self.form(b.require("theta")?, n.saturating_sub(2))?,
                    etas: self.keyed_forms(b, "eta", &zetas, lower)?,
                    zetas,
                }
            }
            ("T2.5" | "C2.1" | "C2.2", S::Pfaff(_)) => Task::ClassifyLinear,
            ("T2.6" | "C2.3", S::Pfaff(_)) => Task::OrthogonalField {
                v: self.field(b.require("V")?)?,
            },
            ("T2.7", S::Pfaff(_)) => Task::OrthogonalCombination {
                w: self.single_form(b, system)?,
                gs: self.scalars(b.require("g")?)?,
            },
            ("T2.8" | "C2.4", S::Pfaff(_)) => Task::Solenoidal {
                w: self.single_form(b, system)?,
                mu: self.scalar_or(b, "mu", "1")?,
            },
            ("T2.10", S::Ode(_)) => Task::Planar {
                alpha: self.scalar_or(b, "alpha", "0")?,
                beta: self.scalar_or(b, "beta", "0")?,
                branch: match b.get("branch").map(|v| v.text()).transpose()? {
                    None | Some("1") => Branch::One,
                    Some("2") => Branch::Two,
                    Some(x) => return usage(format!("branch must be 1 or 2, got {x}")),
                },
            },
            ("T2.11" | "C2.5", S::Ode(_)) => Task::Isolated {
                g: self.scalar_or(b, "g", "1")?,
            },
            ("T2.14" | "T2.18", S::Total(_) | S::Partial(_)) => Task::InducedDulac {
                j: self.index(b, "j")?,
                phi: self.scalar_or(b, "phi", "1")?,
            },
            ("T2.15" | "C2.6", S::Total(_)) => Task::TdSolenoidal {
                gs: self.scalars(b.require("g")?)?,
            },
            ("PI", S::Ode(_) | S::Total(_) | S::Partial(_)) => {
                let mut ws = Vec::new();
                if let Some(v) = b.get("w") {
                    ws.push(self.poly(v)?);
                }
                if let Some(v) = b.get("candidates") {
                    for name in words(v)? {
                        match self.candidates.iter().find(|(n, _)| *n == name) {
                            Some((_, w)) => ws.push(w.clone()),
                            None => return v.pos().err(format!("unknown candidate `{name}`")),
                        }
                    }
                }
                if ws.is_empty() {
                    return b.pos.err("PI needs `w` or `candidates`");
                }
                Task::PartialIntegral { ws }
            }
            ("PI-Pf", S::Pfaff(p)) => {
                let w = match (b.get("w"), b.get("candidate")) {
                    (Some(v), _) => self.poly(v)?,
                    (None, Some(c)) => match self
                        .candidates
                        .iter()
                        .find(|(n, _)| n == c.text().unwrap_or(""))
                    {
                        Some((_, w)) => w.clone(),
                        None => return c.pos().err("unknown candidate"),
                    },
                    (None, None) => return b.pos.err("PI-Pf needs `w` or `candidate`"),
                };
                let mut lambdas = vec![ScaledFraction::zero(&self.vt()); p.forms.len()];
                if let Some(v) = b.get("lambda") {
                    lambdas = self.scalars(v)?;
                }
                if let Some(lb) = b.block("lambda") {
                    for e in &lb.entries {
                        let k = self.equation(&e.key, p.forms.len(), e.pos)?;
                        lambdas[k] = self.scalar(&e.value)?;
                    }
                }
                Task::PfaffSurface { w, lambdas }
            }
            _ => return wrong(),
        })
    }
}

fn constant_f64(s: &ScaledFraction, pos: Pos) -> Result<f64> {
    match s.constant_value() {
        Some(c) => Ok(crate::ring::rational_to_f64(&c)),
        None => pos.err("expected a constant"),
    }
}

/// The constant matrices of a total system with linear homogeneous columns;
/// entry `(tau, i)` of `A_j` is the coefficient of `x_i` in `X^j_tau`.
pub fn linear_matrices(t: &TotalSystem) -> Result<LinearTotalSystem> {
    let vt = t.vars();
    let n = vt.nbase();
    let mut mats = Vec::new();
    for col in &t.columns {
        let Some(ps) = col.as_polynomials() else {
            return usage("the eigenvalue test needs polynomial columns");
        };
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (tau, p) in ps.iter().enumerate() {
            for (m, c) in p.terms() {
                let e = m.exps();
                let lin = e.iter().sum::<u32>() == 1 && e[n..].iter().all(|&x| x == 0);
                let Some(i) = e.iter().position(|&x| x == 1).filter(|_| lin) else {
                    return usage("the eigenvalue test needs linear homogeneous columns");
                };
                rows[tau][i] = c.clone();
            }
        }
        mats.push(RatMatrix::new(rows)?);
    }
    LinearTotalSystem::new(mats)
}
