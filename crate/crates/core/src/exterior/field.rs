use std::fmt;
use std::sync::Arc;

use crate::error::{usage, Result};
use crate::ring::{check_tables, Polynomial, ScaledFraction, VarTable};

use super::KForm;

/// A vector field `(f_1, ..., f_n)`, one component per base variable.
#[derive(Clone)]
pub struct VectorField {
    vt: Arc<VarTable>,
    comps: Vec<ScaledFraction>,
}

/// First-order operator `sum X_i d/dx_i`, stored as its coefficient field.
pub type DiffOperator = VectorField;

impl VectorField {
    pub fn new(vt: &Arc<VarTable>, comps: Vec<ScaledFraction>) -> Result<VectorField> {
        if comps.len() != vt.nbase() {
            return usage(format!(
                "vector field needs {} components, got {}",
                vt.nbase(),
                comps.len()
            ));
        }
        for c in &comps {
            check_tables(vt, c.vars())?;
        }
        Ok(VectorField {
            vt: vt.clone(),
            comps,
        })
    }

    pub fn from_polys(vt: &Arc<VarTable>, comps: &[Polynomial]) -> Result<VectorField> {
        VectorField::new(
            vt,
            comps
                .iter()
                .cloned()
                .map(ScaledFraction::from_poly)
                .collect(),
        )
    }

    pub fn zero(vt: &Arc<VarTable>) -> VectorField {
        VectorField {
            vt: vt.clone(),
            comps: vec![ScaledFraction::zero(vt); vt.nbase()],
        }
    }

    /// The coordinate field `d/dx_i`.
    pub fn coordinate(vt: &Arc<VarTable>, i: usize) -> VectorField {
        let mut f = VectorField::zero(vt);
        f.comps[i] = ScaledFraction::one(vt);
        f
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vt
    }

    pub fn components(&self) -> &[ScaledFraction] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &ScaledFraction {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ScaledFraction::is_zero)
    }

    /// Polynomial components, when every component is one.
    pub fn as_polynomials(&self) -> Option<Vec<Polynomial>> {
        self.comps
            .iter()
            .map(ScaledFraction::as_polynomial)
            .collect()
    }

    /// Multiplies every component by `c`.
    pub fn scale_by(&self, c: &ScaledFraction) -> Result<VectorField> {
        let comps = self
            .comps
            .iter()
            .map(|x| x.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(&self.vt, comps)
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField> {
        check_tables(&self.vt, &other.vt)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(&self.vt, comps)
    }

    pub fn try_sub(&self, other: &VectorField) -> Result<VectorField> {
        check_tables(&self.vt, &other.vt)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(&self.vt, comps)
    }

    /// Keeps the components with index in `keep`, zeroing the rest.
    pub fn restricted_to(&self, keep: &[usize]) -> VectorField {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if keep.contains(&i) {
                    c.clone()
                } else {
                    ScaledFraction::zero(&self.vt)
                }
            })
            .collect();
        VectorField {
            vt: self.vt.clone(),
            comps,
        }
    }

    /// `sum_i f_i * a_i`.
    pub fn dot(&self, a: &[ScaledFraction]) -> Result<ScaledFraction> {
        if a.len() != self.comps.len() {
            return usage("dot product of vectors of different lengths");
        }
        let mut acc = ScaledFraction::zero(&self.vt);
        for (f, x) in self.comps.iter().zip(a) {
            acc = acc.try_add(&f.try_mul(x)?)?;
        }
        Ok(acc)
    }

    pub fn divergence(&self) -> Result<ScaledFraction> {
        let all: Vec<usize> = (0..self.comps.len()).collect();
        self.partial_divergence(&Sample { xi: all })
    }

    /// `sum_j d f_{xi_j} / d x_{xi_j}` over the sample's indices.
    pub fn partial_divergence(&self, sample: &Sample) -> Result<ScaledFraction> {
        let mut acc = ScaledFraction::zero(&self.vt);
        for &i in &sample.xi {
            if i >= self.comps.len() {
                return usage(format!("sample index {} out of range", i + 1));
            }
            acc = acc.try_add(&self.comps[i].derivative(i)?)?;
        }
        Ok(acc)
    }

    /// The operator applied to a scalar: `sum_i X_i dw/dx_i`.
    pub fn apply(&self, w: &ScaledFraction) -> Result<ScaledFraction> {
        check_tables(&self.vt, w.vars())?;
        let mut acc = ScaledFraction::zero(&self.vt);
        for (i, x) in self.comps.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let dw = w.derivative(i)?;
            if dw.is_zero() {
                continue;
            }
            acc = acc.try_add(&x.try_mul(&dw)?)?;
        }
        Ok(acc)
    }

    pub fn apply_poly(&self, w: &Polynomial) -> Result<ScaledFraction> {
        self.apply(&ScaledFraction::from_poly(w.clone()))
    }

    /// `[X, Y]_i = X(Y_i) - Y(X_i)`.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField> {
        check_tables(&self.vt, &other.vt)?;
        let comps = (0..self.comps.len())
            .map(|i| {
                let a = self.apply(&other.comps[i])?;
                let b = other.apply(&self.comps[i])?;
                a.try_sub(&b)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(&self.vt, comps)
    }

    /// `sum_i (-1)^(i+1) f_i dx_1 ^ .. (omit i) .. ^ dx_n`, whose exterior
    /// derivative is `div f` times the volume form.
    pub fn flux_form(&self) -> Result<KForm> {
        let n = self.comps.len();
        let terms = self.comps.iter().enumerate().map(|(i, c)| {
            let idx: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            (idx, if i % 2 == 1 { -c } else { c.clone() })
        });
        KForm::from_terms(&self.vt, n - 1, terms)
    }
}

impl PartialEq for VectorField {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({self})")
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A strictly increasing tuple of base-variable indices (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sample {
    xi: Vec<usize>,
}

impl Sample {
    pub fn new(mut xi: Vec<usize>, n: usize) -> Result<Sample> {
        if xi.is_empty() || xi.len() > n {
            return usage(format!("sample size must be between 1 and {n}"));
        }
        xi.sort_unstable();
        if xi.windows(2).any(|w| w[0] == w[1]) {
            return usage("sample indices must be distinct");
        }
        if xi.iter().any(|&i| i >= n) {
            return usage("sample index out of range");
        }
        Ok(Sample { xi })
    }

    /// Parses a one-based label such as `1234` or `1.2.10`.
    pub fn parse(label: &str, n: usize) -> Result<Sample> {
        let parts: Vec<usize> = if label.contains('.') {
            label
                .split('.')
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| crate::Error::Usage(format!("bad sample label `{label}`")))?
        } else {
            label
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| crate::Error::Usage(format!("bad sample label `{label}`")))?
        };
        if parts.contains(&0) {
            return usage(format!("sample label `{label}` is one-based"));
        }
        Sample::new(parts.into_iter().map(|i| i - 1).collect(), n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.xi
    }

    pub fn nu(&self) -> usize {
        self.xi.len()
    }

    /// All samples of size `nu` in lexicographic order.
    pub fn all(n: usize, nu: usize) -> Vec<Sample> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(nu);
        fn rec(start: usize, n: usize, nu: usize, cur: &mut Vec<usize>, out: &mut Vec<Sample>) {
            if cur.len() == nu {
                out.push(Sample { xi: cur.clone() });
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, nu, cur, out);
                cur.pop();
            }
        }
        if nu >= 1 && nu <= n {
            rec(0, n, nu, &mut cur, &mut out);
        }
        out
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.xi.iter().map(|i| (i + 1).to_string()).collect();
        if self.xi.iter().all(|&i| i < 9) {
            write!(f, "{}", one_based.concat())
        } else {
            write!(f, "{}", one_based.join("."))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn bracket_of_shift_and_dilation() {
        let vt = VarTable::numbered(1);
        let x = Polynomial::var(&vt, 0);
        let d1 = VectorField::coordinate(&vt, 0);
        let dil = VectorField::from_polys(&vt, &[x]).unwrap();
        assert_eq!(d1.lie_bracket(&dil).unwrap(), d1);
        assert!(dil.lie_bracket(&dil).unwrap().is_zero());
    }

    #[test]
    fn solenoidal_field() {
        let vt = VarTable::base_only(&["x", "y", "z"]);
        let (x, y, z) = (
            Polynomial::var(&vt, 0),
            Polynomial::var(&vt, 1),
            Polynomial::var(&vt, 2),
        );
        let a = VectorField::from_polys(
            &vt,
            &[&y * &z, (&x * &z).scale(&rat(2)), (&x * &y).scale(&rat(3))],
        )
        .unwrap();
        assert!(a.divergence().unwrap().is_zero());
    }

    #[test]
    fn samples() {
        assert_eq!(Sample::all(5, 4).len(), 5);
        let s = Sample::parse("1235", 5).unwrap();
        assert_eq!(s.indices(), &[0, 1, 2, 4]);
        assert_eq!(s.to_string(), "1235");
        assert!(Sample::parse("1206", 5).is_err());
    }
}
