use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{usage, Result};
use crate::ring::{fmt_rational, Polynomial, Rational, Value};

/// An excluded affine coordinate flat: the coordinates in the map are fixed
/// to the given values, the others are free. Fixing every coordinate gives
/// a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excluded {
    pub fixed: BTreeMap<usize, Rational>,
}

impl Excluded {
    pub fn point(coords: Vec<Rational>) -> Excluded {
        Excluded {
            fixed: coords.into_iter().enumerate().collect(),
        }
    }

    pub fn origin(n: usize) -> Excluded {
        Excluded::point(vec![Rational::zero(); n])
    }

    pub fn codim(&self) -> usize {
        self.fixed.len()
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.fixed.iter().all(|(&i, v)| p[i] == *v)
    }

    fn disjoint(&self, other: &Excluded) -> bool {
        self.fixed
            .iter()
            .any(|(i, v)| other.fixed.get(i).is_some_and(|w| w != v))
    }

    fn is_zero_flat(&self) -> bool {
        self.fixed.values().all(Zero::is_zero)
    }
}

impl fmt::Display for Excluded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fixed
            .iter()
            .map(|(i, v)| format!("x{}={}", i + 1, fmt_rational(v)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Open subset of R^n: the complement of finitely many excluded flats,
/// optionally cut down by strict inequalities `p > 0`.
#[derive(Debug, Clone)]
pub struct Domain {
    n: usize,
    excluded: Vec<Excluded>,
    ranks: BTreeMap<usize, usize>,
    positive_bases: Vec<Polynomial>,
    inequalities: Vec<Polynomial>,
}

/// Three-valued answer of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Domain {
    pub fn whole(n: usize) -> Domain {
        Domain {
            n,
            excluded: Vec::new(),
            ranks: BTreeMap::new(),
            positive_bases: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    /// R^n minus the origin.
    pub fn punctured(n: usize) -> Domain {
        Domain::whole(n).exclude(Excluded::origin(n))
    }

    pub fn exclude(mut self, e: Excluded) -> Domain {
        if !self.excluded.contains(&e) {
            self.excluded.push(e);
        }
        self
    }

    pub fn exclude_point(self, p: Vec<Rational>) -> Result<Domain> {
        if p.len() != self.n {
            return usage(format!("excluded point needs {} coordinates", self.n));
        }
        Ok(self.exclude(Excluded::point(p)))
    }

    pub fn with_rank(mut self, nu: usize, rank: usize) -> Domain {
        self.ranks.insert(nu, rank);
        self
    }

    pub fn with_positive_base(mut self, b: Polynomial) -> Domain {
        if !self.positive_bases.contains(&b) {
            self.positive_bases.push(b);
        }
        self
    }

    pub fn with_inequality(mut self, p: Polynomial) -> Domain {
        self.inequalities.push(p);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn excluded(&self) -> &[Excluded] {
        &self.excluded
    }

    pub fn excluded_points(&self) -> Vec<Vec<Rational>> {
        self.excluded
            .iter()
            .filter(|e| e.codim() == self.n)
            .map(|e| e.fixed.values().cloned().collect())
            .collect()
    }

    pub fn declared_ranks(&self) -> &BTreeMap<usize, usize> {
        &self.ranks
    }

    pub fn positive_bases(&self) -> &[Polynomial] {
        &self.positive_bases
    }

    pub fn inequalities(&self) -> &[Polynomial] {
        &self.inequalities
    }

    pub fn is_positive_base(&self, b: &Polynomial) -> bool {
        self.positive_bases.contains(b)
    }

    /// Membership test; `None` when an inequality could not be decided.
    pub fn contains(&self, p: &[Rational]) -> Option<bool> {
        if self.excluded.iter().any(|e| e.contains(p)) {
            return Some(false);
        }
        for q in self.inequalities.iter().chain(&self.positive_bases) {
            match q.eval(p).ok()? {
                Value::Exact(v) if v > Rational::zero() => {}
                Value::Approx(v) if v > 0.0 => {}
                _ => return Some(false),
            }
        }
        Some(true)
    }

    /// Rank of `pi_{nu-1}` of the domain, when known.
    ///
    /// A declared rank wins. Without inequalities, the complement of `k`
    /// parallel disjoint flats of codimension `c` is `R^(n-c)` times `R^c`
    /// minus `k` points, a wedge of `k` spheres `S^(c-1)` up to homotopy.
    pub fn homotopy_rank(&self, nu: usize) -> Option<usize> {
        if let Some(&r) = self.ranks.get(&nu) {
            return Some(r);
        }
        if !self.inequalities.is_empty() || nu < 2 {
            return None;
        }
        if self.excluded.is_empty() {
            return Some(0);
        }
        let keys: Vec<usize> = self.excluded[0].fixed.keys().copied().collect();
        let parallel = self
            .excluded
            .iter()
            .all(|e| e.fixed.keys().copied().eq(keys.iter().copied()));
        let disjoint = self
            .excluded
            .iter()
            .enumerate()
            .all(|(i, a)| self.excluded[i + 1..].iter().all(|b| a.disjoint(b)));
        if !parallel || !disjoint {
            return None;
        }
        let c = keys.len();
        if nu == c {
            Some(self.excluded.len())
        } else if nu < c {
            Some(0)
        } else {
            None
        }
    }

    /// Whether the common zero set of `e`'s monomials lies inside the
    /// excluded flats. `e` must be a same-signed even-monomial polynomial.
    pub fn zero_set_within(&self, e: &Polynomial) -> Tri {
        let Some(sets) = vanishing_locus(e) else {
            return Tri::Unknown;
        };
        let covered = sets.iter().all(|h| {
            self.excluded
                .iter()
                .any(|ex| ex.is_zero_flat() && ex.fixed.keys().all(|k| h.contains(k)))
        });
        if covered {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

/// True when every monomial is even, radical-free, and all coefficients
/// share one sign.
pub fn is_even_same_sign(e: &Polynomial) -> bool {
    let nb = e.vars().nbase();
    let mut sign = 0i8;
    for (m, c) in e.terms() {
        if !m.is_even(nb) {
            return false;
        }
        let s = crate::ring::sign_of_rational(c);
        if sign != 0 && s != sign {
            return false;
        }
        sign = s;
    }
    !e.is_zero()
}

/// Minimal coordinate sets `H` such that `{x_H = 0}` is a component of the
/// common zero set of `e`'s monomials. Empty list when `e` has a constant
/// term. `None` unless `e` is a same-signed even polynomial.
pub fn vanishing_locus(e: &Polynomial) -> Option<Vec<Vec<usize>>> {
    if !is_even_same_sign(e) {
        return None;
    }
    let n = e.vars().nbase();
    let supports: Vec<Vec<usize>> = e
        .terms()
        .map(|(m, _)| (0..n).filter(|&i| m.exp(i) > 0).collect())
        .collect();
    if supports.iter().any(Vec::is_empty) {
        return Some(Vec::new());
    }
    let mut minimal: Vec<Vec<usize>> = Vec::new();
    let mut subsets: Vec<u64> = (1..(1u64 << n)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        let hits = supports
            .iter()
            .all(|sup| sup.iter().any(|&i| s >> i & 1 == 1));
        if !hits {
            continue;
        }
        if minimal.iter().any(|h| h.iter().all(|&i| s >> i & 1 == 1)) {
            continue;
        }
        minimal.push((0..n).filter(|&i| s >> i & 1 == 1).collect());
    }
    Some(minimal)
}

/// Codimension of the common zero set of a same-signed even polynomial;
/// `Some(usize::MAX)` when it never vanishes.
pub fn vanishing_codimension(e: &Polynomial) -> Option<usize> {
    let sets = vanishing_locus(e)?;
    Some(sets.iter().map(Vec::len).min().unwrap_or(usize::MAX))
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R^{}", self.n)?;
        for e in &self.excluded {
            write!(f, " minus {e}")?;
        }
        for q in &self.inequalities {
            write!(f, " with {q} > 0")?;
        }
        Ok(())
    }
}
