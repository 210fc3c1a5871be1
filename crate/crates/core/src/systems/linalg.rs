//! Dense rational matrices and univariate polynomials.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{usage, Result};
use crate::ring::{fmt_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<RatMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return usage("matrix rows have different lengths");
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::ring::rat(v)).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return usage("matrix shapes do not match for multiplication");
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(p, rank);
            let pivot = m.get(rank, col).clone();
            for r in rank + 1..m.rows {
                let f = m.get(r, col) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = m.get(r, c) - &f * m.get(rank, c);
                    m.set(r, c, v);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return usage("determinant of a non-square matrix");
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det *= &pivot;
            for r in col + 1..n {
                let f = m.get(r, col) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.get(r, c) - &f * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `det(lambda I - A)` by fraction-free (Bareiss) elimination over Q[lambda].
    pub fn charpoly(&self) -> Result<UPoly> {
        if !self.is_square() {
            return usage("characteristic polynomial of a non-square matrix");
        }
        let n = self.rows;
        if n == 0 {
            return Ok(UPoly::one());
        }
        let mut m: Vec<Vec<UPoly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = -self.get(i, j).clone();
                        if i == j {
                            UPoly::new(vec![a, Rational::one()])
                        } else {
                            UPoly::constant(a)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut sign = false;
        let mut prev = UPoly::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return Ok(UPoly::zero());
                };
                m.swap(k, p);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num.exact_div(&prev).expect("Bareiss quotients are exact");
                }
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if sign { det.neg() } else { det })
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = (0..self.cols)
                    .map(|j| fmt_rational(self.get(i, j)))
                    .collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Dense univariate polynomial, coefficients from degree 0 upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> UPoly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub fn one() -> UPoly {
        UPoly(vec![Rational::one()])
    }

    pub fn constant(c: Rational) -> UPoly {
        UPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_default()
                        + o.0.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &UPoly) -> Option<UPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(UPoly::zero());
        }
        if self.0.len() < d.0.len() {
            return None;
        }
        let mut r = self.0.clone();
        let dl = d.0.last().unwrap();
        let qn = r.len() - d.0.len() + 1;
        let mut q = vec![Rational::zero(); qn];
        for k in (0..qn).rev() {
            let c = &r[k + d.0.len() - 1] / dl;
            for (j, dj) in d.0.iter().enumerate() {
                r[k + j] -= &c * dj;
            }
            q[k] = c;
        }
        r.iter().all(Zero::is_zero).then(|| UPoly::new(q))
    }

    /// `p(-lambda)`.
    pub fn reflect(&self) -> UPoly {
        UPoly(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => fmt_rational(c),
                1 => format!("{}*l", fmt_rational(c)),
                _ => format!("{}*l^{i}", fmt_rational(c)),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n), size (m+n)x(m+n).
pub fn sylvester(p: &UPoly, q: &UPoly) -> RatMatrix {
    let m = p.degree();
    let n = q.degree();
    let size = m + n;
    let mut s = RatMatrix::zeros(size, size);
    // rows hold coefficients from the leading one down
    let pc: Vec<Rational> = p.coeffs().iter().rev().cloned().collect();
    let qc: Vec<Rational> = q.coeffs().iter().rev().cloned().collect();
    for r in 0..n {
        for (k, c) in pc.iter().enumerate() {
            s.set(r, r + k, c.clone());
        }
    }
    for r in 0..m {
        for (k, c) in qc.iter().enumerate() {
            s.set(n + r, r + k, c.clone());
        }
    }
    s
}

pub fn resultant(p: &UPoly, q: &UPoly) -> Rational {
    if p.is_zero() || q.is_zero() {
        return Rational::zero();
    }
    if p.degree() + q.degree() == 0 {
        return Rational::one();
    }
    sylvester(p, q).det().expect("Sylvester matrix is square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn charpoly_of_companion() {
        // companion of l^2 - 3l + 2
        let a = RatMatrix::from_i64(&[&[0, -2], &[1, 3]]);
        assert_eq!(
            a.charpoly().unwrap(),
            UPoly::new(vec![rat(2), rat(-3), rat(1)])
        );
    }

    #[test]
    fn charpoly_needs_pivoting() {
        let a = RatMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[6, -11, 6]]);
        let p = a.charpoly().unwrap();
        for r in [1, 2, 3] {
            assert!(p.eval(&rat(r)).is_zero());
        }
    }

    #[test]
    fn resultant_detects_common_root() {
        let p = UPoly::new(vec![rat(-1), rat(0), rat(1)]); // l^2 - 1
        assert!(resultant(&p, &p.reflect()).is_zero());
        let p = UPoly::new(vec![rat(2), rat(-3), rat(1)]); // roots 1, 2
        assert!(!resultant(&p, &p.reflect()).is_zero());
    }

    #[test]
    fn rank_and_det() {
        let a = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.rank(), 1);
        assert!(a.det().unwrap().is_zero());
        assert_eq!(RatMatrix::identity(3).det().unwrap(), rat(1));
    }
}
