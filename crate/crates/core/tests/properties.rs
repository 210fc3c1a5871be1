mod common;

use std::collections::BTreeMap;

use common::{field, fixture, fixture_names, form, point, poly, rng};
use cyclebound::exterior::{Sample, VectorField};
use cyclebound::manifest::{run_checks, to_json, Manifest, RunOptions, SystemSpec, Task};
use cyclebound::par::Parallelism;
use cyclebound::ring::{rat, Polynomial, Rational, ScaledFraction, VarTable};
use cyclebound::sign::{Domain, SignConfig};
use cyclebound::systems::{LinearTotalSystem, OdeSystem, PfaffSystem, RatMatrix};
use cyclebound::theorems::{
    check_dulac_bound, check_linear_td_eigen, check_pfaff_bound, dulac_divergence,
    partial_divergences, verify_partial_integral, CheckReport, PartialIntegral,
};
use proptest::prelude::*;
use rand::Rng;

fn cfg(seed: u64) -> SignConfig {
    SignConfig {
        seed,
        samples: 200,
        ..SignConfig::default()
    }
}

fn assert_gated(r: &CheckReport) {
    if !r.established() {
        assert!(r.conclusion.is_not_applicable(), "ungated: {r}");
    }
    if r.conclusion.bound().is_some() {
        assert!(r.established(), "bound without hypotheses: {r}");
    }
}

fn sphere_pfaff() -> (Manifest, PfaffSystem, cyclebound::theorems::EdData) {
    let m = fixture("pfaff_sphere_r4");
    let SystemSpec::Pfaff(p) = &m.system else {
        panic!()
    };
    let forms = p.clone();
    let data = m
        .checks
        .iter()
        .find_map(|c| match &c.task {
            Task::Pfaff { data } => Some(data.clone()),
            _ => None,
        })
        .unwrap();
    (m, forms, data)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn corrupted_auxiliary_forms_are_gated(seed in any::<u64>()) {
        let (m, forms, mut data) = sphere_pfaff();
        let mut r = rng(seed);
        let j = r.gen_range(0..data.gammas.len());
        let noise = form(&mut r, m.vars(), 2, 2);
        data.gammas[j] = data.gammas[j].try_add(&noise).unwrap();
        let d = m.domain("punctured").unwrap();
        let rep = check_pfaff_bound(&forms, &data, d, &cfg(seed)).unwrap();
        assert_gated(&rep);
    }

    #[test]
    fn random_dulac_reports_are_gated(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vt = VarTable::numbered(3);
        let s = OdeSystem::new(field(&mut r, &vt, 2)).unwrap();
        let phi: ScaledFraction = poly(&mut r, &vt, 2, 3).into();
        let rep = check_dulac_bound(&s, &phi, &Domain::punctured(3), &cfg(seed)).unwrap();
        assert_gated(&rep);
    }

    #[test]
    fn full_sample_divergence_is_dulac(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=4usize);
        let vt = VarTable::numbered(n);
        let s = OdeSystem::new(field(&mut r, &vt, 3)).unwrap();
        let mu: ScaledFraction = poly(&mut r, &vt, 2, 3).into();
        let all = Sample::new((0..n).collect(), n).unwrap();
        let mus = BTreeMap::from([(all, mu.clone())]);
        let divs = partial_divergences(&s, n, &mus).unwrap();
        prop_assert_eq!(divs.len(), 1);
        let diff = divs[0].1.try_sub(&dulac_divergence(&s, &mu).unwrap()).unwrap();
        prop_assert!(diff.is_zero());
    }

    #[test]
    fn eigen_test_matches_triangular_spectrum(
        diag in prop::collection::vec(-4i64..=4, 2..=4),
        upper in prop::collection::vec(-3i64..=3, 6),
    ) {
        let n = diag.len();
        let mut a = RatMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            a.set(i, i, rat(diag[i]));
            for j in i + 1..n {
                a.set(i, j, rat(upper[k]));
                k += 1;
            }
        }
        let cancels = (0..n).any(|i| (i..n).any(|j| diag[i] + diag[j] == 0));
        let rep = check_linear_td_eigen(&LinearTotalSystem::new(vec![a.clone()]).unwrap()).unwrap();
        prop_assert_eq!(rep.established(), !cancels);
        let at = transpose(&a);
        let rep_t = check_linear_td_eigen(&LinearTotalSystem::new(vec![at]).unwrap()).unwrap();
        prop_assert_eq!(rep_t.established(), rep.established());
    }

    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vt = VarTable::numbered(3);
        let mut w = poly(&mut r, &vt, 2, 3);
        if w.is_constant() {
            w = w.try_add(&Polynomial::var(&vt, 0)).unwrap();
        }
        // X = h (w_2, -w_1, 0) + w Y has X w = w (Y . grad w).
        let h = poly(&mut r, &vt, 1, 2);
        let y = field(&mut r, &vt, 1);
        let ham = VectorField::from_polys(&vt, &[
            w.formal_derivative(1).try_mul(&h).unwrap(),
            -w.formal_derivative(0).try_mul(&h).unwrap(),
            Polynomial::zero(&vt),
        ]).unwrap();
        let x = ham.try_add(&y.scale_by(&w.clone().into()).unwrap()).unwrap();
        let other = field(&mut r, &vt, 2);
        for ops in [vec![x.clone()], vec![x, other]] {
            match verify_partial_integral(&ops, &w).unwrap() {
                PartialIntegral::Certificate(c) => {
                    for (op, lam) in ops.iter().zip(&c.cofactors) {
                        let lhs = op.apply_poly(&w).unwrap();
                        let rhs: ScaledFraction = lam.mul_poly(&w).into();
                        prop_assert!(lhs.try_sub(&rhs).unwrap().is_zero());
                    }
                }
                PartialIntegral::Failure { operator, image } => {
                    prop_assert!(operator >= 2, "the constructed operator always has a cofactor");
                    prop_assert!(!image.is_zero());
                }
            }
        }
    }

    #[test]
    fn positive_multiplier_scaling_keeps_verdict(seed in any::<u64>(), c in 1i64..=9) {
        let mut r = rng(seed);
        let vt = VarTable::numbered(3);
        let s = OdeSystem::new(field(&mut r, &vt, 2)).unwrap();
        let phi: ScaledFraction = poly(&mut r, &vt, 2, 3).into();
        let d = Domain::punctured(3);
        let a = check_dulac_bound(&s, &phi, &d, &cfg(seed)).unwrap();
        let b = check_dulac_bound(&s, &phi.scale(&rat(c)), &d, &cfg(seed)).unwrap();
        let n = check_dulac_bound(&s, &phi.scale(&rat(-c)), &d, &cfg(seed)).unwrap();
        prop_assert_eq!(a.established(), b.established());
        prop_assert_eq!(a.established(), n.established());
        prop_assert_eq!(a.conclusion.bound(), b.conclusion.bound());
    }

    #[test]
    fn printed_polynomials_parse_back(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = fixture("pfaff_sphere_r4");
        let p = poly(&mut r, m.vars(), 4, 6);
        prop_assert_eq!(m.scope.polynomial(&p.to_string()).unwrap(), p);
        let deg = r.gen_range(1..=3);
        let k = form(&mut r, m.vars(), deg, 2);
        prop_assume!(!k.is_zero());
        prop_assert_eq!(m.scope.form(&k.to_string()).unwrap(), k);
    }

    #[test]
    fn polynomial_ring_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vt = VarTable::numbered(3);
        let a = poly(&mut r, &vt, 3, 4);
        let b = poly(&mut r, &vt, 3, 4);
        let c = poly(&mut r, &vt, 3, 4);
        prop_assert_eq!(a.try_mul(&b).unwrap(), b.try_mul(&a).unwrap());
        prop_assert_eq!(
            a.try_mul(&b).unwrap().try_mul(&c).unwrap(),
            a.try_mul(&b.try_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.try_mul(&b.try_add(&c).unwrap()).unwrap(),
            a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap()
        );
        let i = r.gen_range(0..3);
        let lhs = a.try_mul(&b).unwrap().formal_derivative(i);
        let rhs = a.formal_derivative(i).try_mul(&b).unwrap()
            .try_add(&a.try_mul(&b.formal_derivative(i)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let at = point(&mut r, 3);
        let ev = |p: &Polynomial| p.eval(&at).unwrap().to_f64();
        let prod = ev(&a.try_mul(&b).unwrap());
        prop_assert!((prod - ev(&a) * ev(&b)).abs() <= 1e-9 * (1.0 + prod.abs()));
    }
}

fn transpose(a: &RatMatrix) -> RatMatrix {
    let rows: Vec<Vec<Rational>> = (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a.get(i, j).clone()).collect())
        .collect();
    RatMatrix::new(rows).unwrap()
}

#[test]
fn fixture_candidates_parse_back() {
    for name in fixture_names() {
        let m = fixture(&name);
        for (label, w) in &m.candidates {
            assert_eq!(
                &m.scope.polynomial(&w.to_string()).unwrap(),
                w,
                "{name}/{label}"
            );
        }
        match &m.system {
            SystemSpec::Pfaff(p) => {
                for f in &p.forms {
                    assert_eq!(&m.scope.form(&f.to_string()).unwrap(), f, "{name}");
                }
            }
            SystemSpec::Exterior(e) => {
                for f in &e.zetas {
                    assert_eq!(&m.scope.form(&f.to_string()).unwrap(), f, "{name}");
                }
            }
            _ => {}
        }
    }
}

#[test]
fn json_is_deterministic_across_modes() {
    for name in fixture_names() {
        let m = fixture(&name);
        let render = |parallelism| {
            let opts = RunOptions {
                parallelism,
                ..RunOptions::default()
            };
            to_json(opts.seed, &run_checks(&m, &opts, None).unwrap())
        };
        let a = render(Parallelism::Parallel);
        assert_eq!(a, render(Parallelism::Parallel), "{name}");
        assert_eq!(a, render(Parallelism::Sequential), "{name}");
    }
}
