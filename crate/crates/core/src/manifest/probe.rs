//! Numeric sanity probe: integrate a trajectory starting on `w = 0` and
//! watch how far `w` drifts.

use crate::error::{usage, Result};
use crate::exterior::VectorField;
use crate::ring::Polynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    /// The start point after projection onto `w = 0`.
    pub start: Vec<f64>,
    pub max_abs_w: f64,
    pub steps: usize,
    pub diverged: bool,
}

const ESCAPE: f64 = 1e6;

/// Newton projection of `x` onto `w = 0` along the gradient, iterated
/// while `|w|` keeps decreasing.
pub fn project(w: &Polynomial, x: &[f64]) -> Result<Vec<f64>> {
    let mut x = x.to_vec();
    let mut v = w.eval_f64(&x);
    for _ in 0..50 {
        if v == 0.0 {
            break;
        }
        let g = w.grad_f64(&x);
        let n2: f64 = g.iter().map(|c| c * c).sum();
        if n2 == 0.0 || !n2.is_finite() {
            break;
        }
        let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - v * gi / n2).collect();
        let vy = w.eval_f64(&y);
        if !(vy.abs() < v.abs()) {
            break;
        }
        x = y;
        v = vy;
    }
    if v.abs() <= 1e-8 {
        Ok(x)
    } else {
        usage("could not move the start point onto w = 0")
    }
}

fn eval(f: &VectorField, x: &[f64]) -> Vec<f64> {
    f.components().iter().map(|c| c.eval_f64(x)).collect()
}

fn axpy(x: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect()
}

/// Classical fourth-order Runge-Kutta over `|horizon|`; a negative horizon
/// integrates backward in time.
pub fn probe_invariance(
    f: &VectorField,
    w: &Polynomial,
    start: &[f64],
    horizon: f64,
    step: f64,
) -> Result<ProbeResult> {
    if start.len() != f.vars().nbase() {
        return usage(format!("start needs {} coordinates", f.vars().nbase()));
    }
    if !(step > 0.0 && horizon.is_finite()) {
        return usage("step must be positive and the horizon finite");
    }
    let dir = if horizon < 0.0 { -1.0 } else { 1.0 };
    let horizon = horizon.abs();
    let x0 = project(w, start)?;
    let mut x = x0.clone();
    let mut max_abs_w = w.eval_f64(&x).abs();
    let total = (horizon / step).ceil() as usize;
    let mut steps = 0;
    let mut diverged = false;
    while steps < total {
        let h = dir * step.min(horizon - steps as f64 * step);
        let k1 = eval(f, &x);
        let k2 = eval(f, &axpy(&x, h / 2.0, &k1));
        let k3 = eval(f, &axpy(&x, h / 2.0, &k2));
        let k4 = eval(f, &axpy(&x, h, &k3));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        steps += 1;
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > ESCAPE {
            diverged = true;
            break;
        }
        max_abs_w = max_abs_w.max(w.eval_f64(&x).abs());
    }
    Ok(ProbeResult {
        start: x0,
        max_abs_w,
        steps,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, VarTable};

    #[test]
    fn circle_is_invariant_under_rotation() {
        let vt = VarTable::numbered(2);
        let x = Polynomial::var(&vt, 0);
        let y = Polynomial::var(&vt, 1);
        let f = VectorField::from_polys(&vt, &[-&y, x.clone()]).unwrap();
        let w = &(&(&x * &x) + &(&y * &y)) - &Polynomial::constant(&vt, rat(1));
        let r = probe_invariance(&f, &w, &[1.3, 0.1], 6.3, 1e-3).unwrap();
        assert!(!r.diverged);
        assert!(r.max_abs_w < 1e-9, "{}", r.max_abs_w);
    }

    #[test]
    fn non_invariant_curve_drifts() {
        let vt = VarTable::numbered(2);
        let x = Polynomial::var(&vt, 0);
        let y = Polynomial::var(&vt, 1);
        let f = VectorField::from_polys(&vt, &[-&y, x.clone()]).unwrap();
        let w = &x - &Polynomial::constant(&vt, rat(1));
        let r = probe_invariance(&f, &w, &[1.0, 0.0], 1.0, 1e-3).unwrap();
        assert!(r.max_abs_w > 0.1);
    }

    #[test]
    fn blow_up_is_reported() {
        let vt = VarTable::numbered(1);
        let x = Polynomial::var(&vt, 0);
        let f = VectorField::from_polys(&vt, &[&x * &x]).unwrap();
        let w = &x - &Polynomial::constant(&vt, rat(1));
        let r = probe_invariance(&f, &w, &[1.0], 5.0, 1e-3).unwrap();
        assert!(r.diverged);
        let back = probe_invariance(&f, &w, &[1.0], -5.0, 1e-3).unwrap();
        assert!(!back.diverged);
        assert_eq!(back.steps, 5000);
    }
}
