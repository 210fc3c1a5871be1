#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use cyclebound::exterior::{KForm, VectorField};
use cyclebound::manifest::Manifest;
use cyclebound::ring::{rat, Monomial, Polynomial, Rational, ScaledFraction, VarTable};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.cb"))
}

pub fn fixture(name: &str) -> Manifest {
    Manifest::load(&fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_names() -> Vec<String> {
    let mut v: Vec<String> =
        std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
            .unwrap()
            .filter_map(|e| {
                let p = e.ok()?.path();
                (p.extension()? == "cb").then(|| p.file_stem()?.to_str().map(String::from))?
            })
            .collect();
    v.sort();
    v
}

/// Random polynomial in the base variables with small integer coefficients.
pub fn poly(r: &mut TestRng, vt: &Arc<VarTable>, max_deg: u32, max_terms: usize) -> Polynomial {
    let n = vt.nbase();
    let k = r.gen_range(1..=max_terms);
    let terms = (0..k).map(|_| {
        let mut e = vec![0u32; vt.width()];
        let d = r.gen_range(0..=max_deg);
        for _ in 0..d {
            e[r.gen_range(0..n)] += 1;
        }
        (Monomial::new(e), rat(r.gen_range(-5..=5)))
    });
    Polynomial::from_terms(vt, terms.collect::<Vec<_>>())
}

pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Random k-form with polynomial coefficients.
pub fn form(r: &mut TestRng, vt: &Arc<VarTable>, degree: usize, max_deg: u32) -> KForm {
    let mut terms: Vec<(Vec<usize>, ScaledFraction)> = Vec::new();
    for idx in combos(vt.nbase(), degree) {
        if r.gen_bool(0.6) {
            terms.push((idx, poly(r, vt, max_deg, 3).into()));
        }
    }
    KForm::from_terms(vt, degree, terms).unwrap()
}

pub fn field(r: &mut TestRng, vt: &Arc<VarTable>, max_deg: u32) -> VectorField {
    let comps: Vec<Polynomial> = (0..vt.nbase()).map(|_| poly(r, vt, max_deg, 3)).collect();
    VectorField::from_polys(vt, &comps).unwrap()
}

/// Rational point with denominators up to 7, in [-3, 3].
pub fn point(r: &mut TestRng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let d = r.gen_range(1..=7i64);
            Rational::new(r.gen_range(-3 * d..=3 * d).into(), d.into())
        })
        .collect()
}
