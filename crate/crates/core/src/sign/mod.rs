//! Domains and the sign-certificate engine.
//!
//! [`sign_of`] first looks for a syntactic certificate: a nonzero polynomial
//! whose monomials are all even with same-signed coefficients has constant
//! sign, and is definite when its zero set lies in the excluded flats.
//! Fractions and power factors combine factor verdicts. Without a
//! certificate the expression is sampled at seeded rational points, which
//! can only prove indefiniteness.

mod domain;
mod sampler;

use std::fmt;

use crate::par::{self, Parallelism};
use crate::ring::{fmt_rational, Polynomial, Rational, ScaledFraction, Value};

pub use domain::{
    is_even_same_sign, vanishing_codimension, vanishing_locus, Domain, Excluded, Tri,
};
pub use sampler::PointSampler;

/// A point together with the value found there.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<Rational>,
    pub value: Value,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.point.iter().map(fmt_rational).collect();
        write!(f, "({}) -> {}", p.join(", "), self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignVerdict {
    PositiveDefinite,
    NegativeDefinite,
    PositiveConstSign,
    NegativeConstSign,
    IdenticallyZero,
    Indefinite { pos: Witness, neg: Witness },
    Unknown,
}

impl SignVerdict {
    pub fn is_definite(&self) -> bool {
        matches!(
            self,
            SignVerdict::PositiveDefinite | SignVerdict::NegativeDefinite
        )
    }

    /// Definite verdicts count as constant sign.
    pub fn is_const_sign(&self) -> bool {
        matches!(
            self,
            SignVerdict::PositiveDefinite
                | SignVerdict::NegativeDefinite
                | SignVerdict::PositiveConstSign
                | SignVerdict::NegativeConstSign
        )
    }

    /// +1, -1 for signed verdicts, 0 otherwise.
    pub fn direction(&self) -> i8 {
        match self {
            SignVerdict::PositiveDefinite | SignVerdict::PositiveConstSign => 1,
            SignVerdict::NegativeDefinite | SignVerdict::NegativeConstSign => -1,
            _ => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignVerdict::PositiveDefinite => "PositiveDefinite",
            SignVerdict::NegativeDefinite => "NegativeDefinite",
            SignVerdict::PositiveConstSign => "PositiveConstSign",
            SignVerdict::NegativeConstSign => "NegativeConstSign",
            SignVerdict::IdenticallyZero => "IdenticallyZero",
            SignVerdict::Indefinite { .. } => "Indefinite",
            SignVerdict::Unknown => "Unknown",
        }
    }

    fn signed(dir: i8, definite: bool) -> SignVerdict {
        match (dir > 0, definite) {
            (true, true) => SignVerdict::PositiveDefinite,
            (true, false) => SignVerdict::PositiveConstSign,
            (false, true) => SignVerdict::NegativeDefinite,
            (false, false) => SignVerdict::NegativeConstSign,
        }
    }
}

impl fmt::Display for SignVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignVerdict::Indefinite { pos, neg } => {
                write!(f, "Indefinite (positive at {pos}; negative at {neg})")
            }
            v => write!(f, "{}", v.name()),
        }
    }
}

/// Sampling parameters.
#[derive(Debug, Clone, Copy)]
pub struct SignConfig {
    pub seed: u64,
    pub samples: usize,
    pub parallelism: Parallelism,
}

impl Default for SignConfig {
    fn default() -> Self {
        SignConfig {
            seed: crate::DEFAULT_SEED,
            samples: 1000,
            parallelism: Parallelism::default(),
        }
    }
}

/// Certified sign of a factor: direction and whether it is strict.
#[derive(Clone, Copy)]
struct Cert {
    dir: i8,
    definite: bool,
}

fn poly_cert(p: &Polynomial, d: &Domain) -> Option<Cert> {
    if let Some(c) = p.constant_value() {
        let dir = crate::ring::sign_of_rational(&c);
        return (dir != 0).then_some(Cert {
            dir,
            definite: true,
        });
    }
    if is_even_same_sign(p) {
        let dir = crate::ring::sign_of_rational(p.leading().unwrap().1);
        let definite = d.zero_set_within(p) == Tri::Yes;
        return Some(Cert { dir, definite });
    }
    if d.is_positive_base(p) {
        return Some(Cert {
            dir: 1,
            definite: true,
        });
    }
    let neg = -p;
    if d.is_positive_base(&neg) {
        return Some(Cert {
            dir: -1,
            definite: true,
        });
    }
    None
}

fn combine(a: Cert, b: Cert) -> Cert {
    Cert {
        dir: a.dir * b.dir,
        definite: a.definite && b.definite,
    }
}

fn certificate(e: &ScaledFraction, d: &Domain) -> Option<Cert> {
    let mut c = poly_cert(e.frac().num(), d)?;
    if !e.frac().den().is_one() {
        let den = poly_cert(e.frac().den(), d)?;
        c = combine(c, den);
    }
    for (b, x) in e.powers() {
        let bc = if d.is_positive_base(b) {
            Cert {
                dir: 1,
                definite: true,
            }
        } else if x.is_integer() {
            let bc = poly_cert(b, d)?;
            let odd = x.to_integer() % 2 != num_bigint::BigInt::from(0);
            Cert {
                dir: if odd { bc.dir } else { 1 },
                definite: bc.definite,
            }
        } else {
            let bc = poly_cert(b, d)?;
            if bc.dir < 0 || !bc.definite {
                return None;
            }
            bc
        };
        c = combine(c, bc);
    }
    Some(c)
}

/// Power-factor bases must be declared positive, certified by the
/// polynomial criterion, or carry an integer exponent.
fn bases_admissible(e: &ScaledFraction, d: &Domain) -> bool {
    e.powers().iter().all(|(b, x)| {
        d.is_positive_base(b)
            || x.is_integer()
            || poly_cert(b, d).is_some_and(|c| c.dir > 0 && c.definite)
    })
}

/// Sign of `e` on the domain.
pub fn sign_of(e: &ScaledFraction, d: &Domain, cfg: &SignConfig) -> SignVerdict {
    if e.is_zero() {
        return SignVerdict::IdenticallyZero;
    }
    if !bases_admissible(e, d) {
        return SignVerdict::Unknown;
    }
    if let Some(c) = certificate(e, d) {
        return SignVerdict::signed(c.dir, c.definite);
    }
    match find_opposite_signs(e, d, cfg) {
        Some((pos, neg)) => SignVerdict::Indefinite { pos, neg },
        None => SignVerdict::Unknown,
    }
}

pub fn sign_of_poly(p: &Polynomial, d: &Domain, cfg: &SignConfig) -> SignVerdict {
    sign_of(&ScaledFraction::from_poly(p.clone()), d, cfg)
}

/// Unit points `0, e_1, -e_1, e_2, ...` first, then seeded random points.
fn candidate_points(n: usize, cfg: &SignConfig) -> Vec<Vec<Rational>> {
    let zero = Rational::from_integer(0.into());
    let mut pts = vec![vec![zero.clone(); n]];
    for i in 0..n {
        for s in [1, -1] {
            let mut p = vec![zero.clone(); n];
            p[i] = crate::ring::rat(s);
            pts.push(p);
        }
    }
    pts.extend(PointSampler::new(cfg.seed).points(n, cfg.samples));
    pts
}

const CHUNK: usize = 128;

/// First positive and first negative sample, in candidate order.
fn find_opposite_signs(
    e: &ScaledFraction,
    d: &Domain,
    cfg: &SignConfig,
) -> Option<(Witness, Witness)> {
    let pts = candidate_points(d.n(), cfg);
    let mut pos: Option<Witness> = None;
    let mut neg: Option<Witness> = None;
    for chunk in pts.chunks(CHUNK) {
        let vals = par::map(cfg.parallelism, chunk, |p| {
            if d.contains(p) != Some(true) {
                return None;
            }
            e.eval(p).ok()
        });
        for (p, v) in chunk.iter().zip(vals) {
            let Some(v) = v else { continue };
            let w = || Witness {
                point: p.clone(),
                value: v.clone(),
            };
            match v.sign() {
                1 if pos.is_none() => pos = Some(w()),
                -1 if neg.is_none() => neg = Some(w()),
                _ => {}
            }
        }
        if pos.is_some() && neg.is_some() {
            break;
        }
    }
    Some((pos?, neg?))
}

/// Whether `zero_set_within` certifies that `e` vanishes only on excluded flats.
pub fn zero_set_within(e: &Polynomial, d: &Domain) -> Tri {
    d.zero_set_within(e)
}

pub fn homotopy_rank(d: &Domain, nu: usize) -> Option<usize> {
    d.homotopy_rank(nu)
}
