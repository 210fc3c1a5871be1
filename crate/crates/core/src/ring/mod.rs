//! Exact coefficient arithmetic.
//!
//! Polynomials live over a shared [`VarTable`] holding the base variables,
//! the time variables of total systems, and adjoined square roots. Every
//! value is immutable; tables are shared through `Arc`.

mod eval;
mod fraction;
mod monomial;
mod poly;
mod scaled;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{usage, Error, Result};

pub use eval::Value;
pub use fraction::Fraction;
pub use monomial::Monomial;
pub use poly::Polynomial;
pub use scaled::ScaledFraction;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders `p/q`, or just `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

pub(crate) fn is_nonneg_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

/// A square root symbol `s` with `s^2 = square`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalDef {
    pub symbol: String,
    /// Terms of the square, exponent vectors over the base variables only.
    pub square: Vec<(Vec<u32>, Rational)>,
}

/// What a name in a [`VarTable`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRef {
    Base(usize),
    Time(usize),
    Radical(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    base: Vec<String>,
    time: Vec<String>,
    radicals: Vec<RadicalDef>,
}

impl VarTable {
    pub fn new(base: Vec<String>, time: Vec<String>) -> Result<VarTable> {
        if base.is_empty() {
            return usage("at least one base variable is required");
        }
        let vt = VarTable {
            base,
            time,
            radicals: Vec::new(),
        };
        vt.check_unique()?;
        Ok(vt)
    }

    /// Shorthand for tests and examples: base variables only.
    pub fn base_only(names: &[&str]) -> Arc<VarTable> {
        Arc::new(
            VarTable::new(names.iter().map(|s| s.to_string()).collect(), Vec::new())
                .expect("valid variable names"),
        )
    }

    /// Variables `x1..xn`.
    pub fn numbered(n: usize) -> Arc<VarTable> {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Arc::new(VarTable::new(names, Vec::new()).expect("n >= 1"))
    }

    fn check_unique(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for name in self.all_names() {
            if !seen.insert(name) {
                return usage(format!("duplicate variable name `{name}`"));
            }
        }
        Ok(())
    }

    fn all_names(&self) -> impl Iterator<Item = &str> {
        self.base
            .iter()
            .chain(self.time.iter())
            .map(|s| s.as_str())
            .chain(self.radicals.iter().map(|r| r.symbol.as_str()))
    }

    /// Adjoins `symbol` with `symbol^2 = square`. The square must be a
    /// nonzero radical-free polynomial over a table with the same base
    /// variables.
    pub fn add_radical(&mut self, symbol: &str, square: &Polynomial) -> Result<usize> {
        if square.vars().base_vars() != self.base.as_slice() {
            return usage("radical square must be written over the base variables");
        }
        if square.is_zero() {
            return usage(format!("radical `{symbol}` has a zero square"));
        }
        if square.has_radicals() {
            return usage(format!("radical `{symbol}` may not be nested"));
        }
        let nb = self.base.len();
        let terms = square
            .terms()
            .map(|(m, c)| (m.exps()[..nb].to_vec(), c.clone()))
            .collect();
        self.radicals.push(RadicalDef {
            symbol: symbol.to_string(),
            square: terms,
        });
        if let Err(e) = self.check_unique() {
            self.radicals.pop();
            return Err(e);
        }
        Ok(self.radicals.len() - 1)
    }

    pub fn nbase(&self) -> usize {
        self.base.len()
    }

    pub fn nrad(&self) -> usize {
        self.radicals.len()
    }

    /// Length of a monomial exponent vector.
    pub fn width(&self) -> usize {
        self.base.len() + self.radicals.len()
    }

    pub fn base_vars(&self) -> &[String] {
        &self.base
    }

    pub fn time_vars(&self) -> &[String] {
        &self.time
    }

    pub fn radicals(&self) -> &[RadicalDef] {
        &self.radicals
    }

    pub fn lookup(&self, name: &str) -> Option<VarRef> {
        if let Some(i) = self.base.iter().position(|b| b == name) {
            return Some(VarRef::Base(i));
        }
        if let Some(i) = self.time.iter().position(|b| b == name) {
            return Some(VarRef::Time(i));
        }
        self.radicals
            .iter()
            .position(|r| r.symbol == name)
            .map(VarRef::Radical)
    }

    pub fn base_index(&self, name: &str) -> Result<usize> {
        match self.lookup(name) {
            Some(VarRef::Base(i)) => Ok(i),
            _ => usage(format!("`{name}` is not a base variable")),
        }
    }

    pub fn name_at(&self, slot: usize) -> &str {
        if slot < self.base.len() {
            &self.base[slot]
        } else {
            &self.radicals[slot - self.base.len()].symbol
        }
    }

    /// The defining square of radical `r`, as a polynomial over `vt`.
    pub fn radical_square(vt: &Arc<VarTable>, r: usize) -> Polynomial {
        let width = vt.width();
        let terms = vt.radicals[r].square.iter().map(|(e, c)| {
            let mut full = e.clone();
            full.resize(width, 0);
            (Monomial::new(full), c.clone())
        });
        Polynomial::from_terms(vt, terms)
    }
}

pub(crate) fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_tables(a: &Arc<VarTable>, b: &Arc<VarTable>) -> Result<()> {
    if same_table(a, b) {
        Ok(())
    } else {
        Err(Error::Usage(
            "operands use different variable tables".into(),
        ))
    }
}

impl fmt::Display for VarTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "base [{}]", self.base.join(", "))?;
        if !self.time.is_empty() {
            write!(f, " time [{}]", self.time.join(", "))?;
        }
        for r in &self.radicals {
            write!(f, " radical {}", r.symbol)?;
        }
        Ok(())
    }
}

pub(crate) fn sign_of_rational(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn rational_pow(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(Rational::one() / r.clone(), (-e) as usize)
    }
}
