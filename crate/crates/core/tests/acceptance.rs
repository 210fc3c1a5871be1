//! Acceptance run: one line per criterion, exit status 1 if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::{field, fixture, form, point, poly, rng, TestRng};
use cyclebound::exterior::{potential, KForm, VectorField};
use cyclebound::manifest::{probe_invariance, run_checks, Manifest, RunOptions, SystemSpec, Task};
use cyclebound::ring::{rat, Monomial, Polynomial, Rational, ScaledFraction, VarTable};
use cyclebound::sign::{sign_of, SignConfig, SignVerdict};
use cyclebound::systems::{
    frobenius_pfaffian, linalg::RatMatrix, pfaff_from_ode, LinearTotalSystem,
};
use cyclebound::theorems::{
    check_linear_td_eigen, dulac_divergence, ed_analysis, partial_divergences,
    verify_partial_integral, CheckReport, Conclusion, EdAnalysis, EdData, PartialIntegral,
};
use num_traits::Zero;
use rand::Rng;

fn reports(m: &Manifest) -> Vec<CheckReport> {
    run_checks(m, &RunOptions::default(), None)
        .expect("checks run")
        .into_iter()
        .map(|o| o.report)
        .collect()
}

fn by_id<'a>(rs: &'a [CheckReport], id: &str) -> Vec<&'a CheckReport> {
    let v: Vec<_> = rs.iter().filter(|r| r.theorem_id == id).collect();
    assert!(!v.is_empty(), "no {id} report");
    v
}

fn assert_bound_one(rs: &[CheckReport], id: &str) {
    for r in by_id(rs, id) {
        assert_eq!(r.conclusion.bound(), Some(1), "{id}: {r}");
    }
}

fn assert_established(rs: &[CheckReport], id: &str) {
    for r in by_id(rs, id) {
        assert!(r.established(), "{id}: {r}");
    }
}

fn s(m: &Manifest, text: &str) -> ScaledFraction {
    m.scope.scalar(text).unwrap()
}

fn k(m: &Manifest, text: &str) -> KForm {
    m.scope.form(text).unwrap()
}

fn same(a: &ScaledFraction, b: &ScaledFraction) -> bool {
    a.try_sub(b).unwrap().is_zero()
}

fn same_form(a: &KForm, b: &KForm) -> bool {
    a.try_sub(b).unwrap().is_zero()
}

fn ed_data(m: &Manifest, id: &str) -> EdData {
    m.checks
        .iter()
        .filter(|c| c.label == id)
        .find_map(|c| match &c.task {
            Task::Exterior { data, .. }
            | Task::Pfaff { data }
            | Task::OdePfaff { data }
            | Task::InducedPfaff { data, .. } => Some(data.clone()),
            _ => None,
        })
        .unwrap_or_else(|| panic!("no exterior data for {id}"))
}

fn zetas(m: &Manifest, j: usize) -> Vec<KForm> {
    match &m.system {
        SystemSpec::Exterior(e) => e.zetas.clone(),
        SystemSpec::Pfaff(p) => p.forms.clone(),
        sys => {
            pfaff_from_ode(&sys.induced_ode(j).unwrap())
                .unwrap()
                .0
                .forms
        }
    }
}

fn analysis(m: &Manifest, id: &str, j: usize) -> EdAnalysis {
    ed_analysis(&zetas(m, j), &ed_data(m, id)).unwrap()
}

fn cfg() -> SignConfig {
    SignConfig::default()
}

fn fifth_order_divergences() {
    let m = fixture("fifth_order_ode");
    let SystemSpec::Ode(ode) = &m.system else {
        panic!("ode expected")
    };
    let (nu, mus) = m
        .checks
        .iter()
        .find_map(|c| match &c.task {
            Task::PartialDiv { nu, mus } => Some((*nu, mus.clone())),
            _ => None,
        })
        .unwrap();
    let divs = partial_divergences(ode, nu, &mus).unwrap();
    let want = [
        "2*g^(-3)",
        "-(3 + 2*x4^2)",
        "-(3 + 2*x3^2)",
        "-(3 + 2*x2^2)",
        "-(3 + 2*x1^2)",
    ];
    assert_eq!(divs.len(), want.len());
    for ((xi, d), w) in divs.iter().zip(want) {
        assert!(same(d, &s(&m, w)), "sample {xi}: {d} vs {w}");
    }
    assert_bound_one(&reports(&m), "T1.1");
}

fn total_sphere_divergence() {
    let m = fixture("total_sphere_r4");
    let ode = m.system.induced_ode(1).unwrap();
    let div = ode
        .f
        .scale_by(&s(&m, "g^(-3)"))
        .unwrap()
        .divergence()
        .unwrap();
    assert!(same(&div, &s(&m, "2*g^(-3)")), "div = {div}");
    assert_bound_one(&reports(&m), "T1.2");
}

fn exterior_restriction() {
    let m = fixture("exterior_r4");
    let an = analysis(&m, "T2.1", 1);
    let want = k(&m, "x1*(2*x2 - x1^2)*dx2&dx3&dx4");
    assert!(
        same_form(&an.restricted, &want),
        "restricted = {}",
        an.restricted
    );
    assert!(same(&an.b, &s(&m, "-3*x1^2")), "B = {}", an.b);
    let d = m.domain("punctured").unwrap();
    assert_eq!(sign_of(&an.b, d, &cfg()), SignVerdict::NegativeConstSign);
    assert_bound_one(&reports(&m), "T2.1");
}

fn pfaff_sphere_constant() {
    let m = fixture("pfaff_sphere_r4");
    let an = analysis(&m, "T2.3", 1);
    let w1 = k(&m, "x4*dx1&dx2&dx3 - x3*dx1&dx2&dx4");
    let w2 = k(&m, "x1*dx1&dx3&dx4 + x2*dx2&dx3&dx4");
    assert!(same_form(&an.wedges[0], &w1), "wedge 1 = {}", an.wedges[0]);
    assert!(same_form(&an.wedges[1], &w2), "wedge 2 = {}", an.wedges[1]);
    assert_eq!(an.b.constant_value(), Some(rat(-2)));
    let d = m.domain("punctured").unwrap();
    assert_eq!(sign_of(&an.b, d, &cfg()), SignVerdict::NegativeDefinite);
    let rs = reports(&m);
    assert_bound_one(&rs, "T2.3");
    assert_bound_one(&rs, "T2.1");
    assert_established(&rs, "PI-Pf");
}

fn torus_leaf() {
    let m = fixture("pfaff_torus_r3");
    let an = analysis(&m, "T2.3", 1);
    assert_eq!(an.b.constant_value(), Some(rat(1)), "B = {}", an.b);
    let rs = reports(&m);
    assert_bound_one(&rs, "T2.3");
    assert_established(&rs, "PI-Pf");
}

fn orthogonal_field() {
    let m = fixture("pfaff_orthogonal_r4");
    let SystemSpec::Pfaff(p) = &m.system else {
        panic!("pfaff expected")
    };
    let v = m
        .checks
        .iter()
        .find_map(|c| match &c.task {
            Task::OrthogonalField { v } => Some(v.clone()),
            _ => None,
        })
        .unwrap();
    for w in &p.forms {
        let dot = v.dot(&w.components().unwrap()).unwrap();
        assert!(dot.is_zero(), "V . W = {dot}");
    }
    assert!(same(&v.divergence().unwrap(), &s(&m, "2*g^(-3)")));
    let rs = reports(&m);
    assert_bound_one(&rs, "T2.6");
    assert_established(&rs, "PI-Pf");
}

fn solenoidal_leaf() {
    let m = fixture("solenoidal_leaf_r3");
    let SystemSpec::Pfaff(p) = &m.system else {
        panic!("pfaff expected")
    };
    let w = &p.forms[0];
    let a = VectorField::new(m.vars(), w.components().unwrap()).unwrap();
    assert!(a.divergence().unwrap().is_zero());
    assert!(frobenius_pfaffian(w).unwrap().integrable);
    let rs = reports(&m);
    let r = by_id(&rs, "C2.4")[0];
    assert!(matches!(&r.conclusion, Conclusion::Absence { .. }), "{r}");
    assert_eq!(r.object_kind, "compact leaves");
    let f = m.scope.polynomial("x*y^2*z^3").unwrap();
    let quotient = m.scope.polynomial("y*z^2").unwrap();
    for (i, c) in w.components().unwrap().iter().enumerate() {
        let df = f.formal_derivative(i);
        let q = df.exact_divide(&c.as_polynomial().unwrap()).unwrap();
        assert_eq!(q.as_ref(), Some(&quotient), "component {i}");
    }
}

fn ode_sphere() {
    let m = fixture("ode_sphere_r3");
    let ops = m.system.operators().unwrap();
    let sphere = m.candidate("sphere").unwrap();
    match verify_partial_integral(&ops, sphere).unwrap() {
        PartialIntegral::Certificate(c) => {
            let want = m.scope.polynomial("2*x2^2").unwrap();
            assert_eq!(c.cofactors[0].as_polynomial(), Some(&want));
        }
        f => panic!("no certificate: {f:?}"),
    }
    let an = analysis(&m, "T2.3D", 1);
    assert_eq!(an.b.constant_value(), Some(rat(1)), "B = {}", an.b);
    let rs = reports(&m);
    assert_bound_one(&rs, "T2.3D");
    assert_established(&rs, "PI");
}

fn five_spheres() {
    let m = fixture("total_five_spheres");
    let ops = m.system.operators().unwrap();
    for r in 1..=5 {
        let w = m.candidate(&format!("sphere{r}")).unwrap();
        assert!(matches!(
            verify_partial_integral(&ops, w).unwrap(),
            PartialIntegral::Certificate(_)
        ));
    }
    let an = analysis(&m, "T2.12", 1);
    assert_eq!(an.b.constant_value(), Some(rat(1)), "B = {}", an.b);
    let rs = reports(&m);
    let b = by_id(&rs, "T2.12");
    assert_eq!(b.len(), 3);
    assert_bound_one(&rs, "T2.12");
    assert_established(&rs, "PI");
}

fn partial_systems() {
    let m = fixture("partial_sphere_r3");
    let an = analysis(&m, "T2.16", 1);
    assert_eq!(an.b.constant_value(), Some(rat(1)), "B = {}", an.b);
    assert_bound_one(&reports(&m), "T2.16");

    let m = fixture("partial_dulac_r3");
    let ode = m.system.induced_ode(1).unwrap();
    let div = dulac_divergence(&ode, &s(&m, "g^(-5/2)")).unwrap();
    let d = m.domain("punctured").unwrap();
    assert_eq!(
        sign_of(&div, d, &cfg()),
        SignVerdict::PositiveDefinite,
        "{div}"
    );
    assert_bound_one(&reports(&m), "T2.18");
}

fn random_degree(r: &mut TestRng, n: usize) -> usize {
    r.gen_range(0..=n)
}

fn randomized_identities() {
    let mut r = rng(0xACCE_5511);
    let vt3 = VarTable::numbered(3);
    let vt4 = VarTable::numbered(4);
    let pick = |r: &mut TestRng| {
        if r.gen_bool(0.5) {
            vt3.clone()
        } else {
            vt4.clone()
        }
    };

    for _ in 0..100 {
        let vt = pick(&mut r);
        let p = random_degree(&mut r, vt.nbase() - 2);
        let a = form(&mut r, &vt, p, 3);
        assert!(a.d().unwrap().d().unwrap().is_zero(), "d d {a}");
    }

    for _ in 0..100 {
        let vt = pick(&mut r);
        let p = random_degree(&mut r, 2);
        let q = random_degree(&mut r, vt.nbase() - 1 - p);
        let a = form(&mut r, &vt, p, 2);
        let b = form(&mut r, &vt, q, 2);
        let lhs = a.wedge(&b).unwrap().d().unwrap();
        let t1 = a.d().unwrap().wedge(&b).unwrap();
        let t2 = a.wedge(&b.d().unwrap()).unwrap();
        let rhs = if p % 2 == 0 {
            t1.try_add(&t2)
        } else {
            t1.try_sub(&t2)
        }
        .unwrap();
        assert!(same_form(&lhs, &rhs), "Leibniz for {a} and {b}");
    }

    for _ in 0..100 {
        let vt = pick(&mut r);
        let p = random_degree(&mut r, 2);
        let q = random_degree(&mut r, vt.nbase() - p);
        let a = form(&mut r, &vt, p, 2);
        let b = form(&mut r, &vt, q, 2);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let ba = if (p * q) % 2 == 0 { ba } else { ba.neg() };
        assert!(same_form(&ab, &ba), "anticommutativity for {a} and {b}");
    }

    for _ in 0..50 {
        let vt = pick(&mut r);
        let x = field(&mut r, &vt, 2);
        let y = field(&mut r, &vt, 2);
        let z = field(&mut r, &vt, 2);
        let xy = x.lie_bracket(&y).unwrap();
        let yx = y.lie_bracket(&x).unwrap();
        assert!(xy.try_add(&yx).unwrap().is_zero());
        let c1 = x.lie_bracket(&y.lie_bracket(&z).unwrap()).unwrap();
        let c2 = y.lie_bracket(&z.lie_bracket(&x).unwrap()).unwrap();
        let c3 = z.lie_bracket(&x.lie_bracket(&y).unwrap()).unwrap();
        assert!(
            c1.try_add(&c2).unwrap().try_add(&c3).unwrap().is_zero(),
            "Jacobi"
        );
    }

    for _ in 0..100 {
        let vt = pick(&mut r);
        let n = vt.nbase();
        let x = field(&mut r, &vt, 3);
        let mut flux = KForm::zero(&vt, n - 1);
        for i in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let mut t = KForm::scalar(x.component(i).clone());
            for &k in &rest {
                t = t.wedge(&KForm::dx(&vt, k)).unwrap();
            }
            flux = if i % 2 == 0 {
                flux.try_add(&t)
            } else {
                flux.try_sub(&t)
            }
            .unwrap();
        }
        let lhs = flux.d().unwrap().volume_coefficient().unwrap();
        let mut div = ScaledFraction::zero(&vt);
        for i in 0..n {
            div = div.try_add(&x.component(i).derivative(i).unwrap()).unwrap();
        }
        assert!(same(&lhs, &div), "d of flux is div for {x}");
        assert!(same(&lhs, &x.divergence().unwrap()));
    }

    for _ in 0..100 {
        let vt = pick(&mut r);
        let f = poly(&mut r, &vt, 4, 5);
        let f0 = f.coeff(&Monomial::new(vec![0; vt.width()]));
        let f = f.try_sub(&Polynomial::constant(&vt, f0)).unwrap();
        let grad: Vec<Polynomial> = (0..vt.nbase()).map(|i| f.formal_derivative(i)).collect();
        let w = KForm::from_polys(&vt, &grad).unwrap();
        assert_eq!(potential(&w).unwrap(), f.clone(), "potential of d({f})");
    }

    for _ in 0..100 {
        let vt = pick(&mut r);
        let n = vt.nbase();
        let p = r.gen_range(1..n);
        let zeta = form(&mut r, &vt, p, 2);
        let i = r.gen_range(0..n);
        let others: Vec<Polynomial> = (0..n)
            .map(|k| {
                if k == i {
                    Polynomial::zero(&vt)
                } else {
                    poly(&mut r, &vt, 2, 2)
                }
            })
            .collect();
        let img = KForm::from_polys(&vt, &others).unwrap();
        let subst = [(i, img.clone())].into_iter().collect();
        let at = point(&mut r, n);
        let consts: Vec<Polynomial> = at
            .iter()
            .map(|c| Polynomial::constant(&vt, c.clone()))
            .collect();
        let ev = |f: &KForm| {
            f.map_coeffs(|c| {
                let p = c.as_polynomial().expect("polynomial coefficient");
                Ok(p.compose(&consts)?.into())
            })
            .unwrap()
        };
        let lhs = ev(&zeta.restrict(&subst).unwrap());
        let ev_subst = [(i, ev(&img))].into_iter().collect();
        let rhs = ev(&zeta).restrict(&ev_subst).unwrap();
        assert!(
            same_form(&lhs, &rhs),
            "restriction commutes with evaluation"
        );
    }

    for _ in 0..100 {
        let n = r.gen_range(2..=4usize);
        let spectrum: Vec<i64> = (0..n).map(|_| r.gen_range(-3..=3)).collect();
        let mut t = RatMatrix::zeros(n, n);
        let mut l = RatMatrix::identity(n);
        for i in 0..n {
            t.set(i, i, rat(spectrum[i]));
            for j in i + 1..n {
                t.set(i, j, rat(r.gen_range(-2..=2)));
            }
            for j in 0..i {
                l.set(i, j, rat(r.gen_range(-2..=2)));
            }
        }
        let mut linv = RatMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                let mut acc = Rational::zero();
                for k in j..i {
                    acc -= l.get(i, k) * linv.get(k, j);
                }
                linv.set(i, j, acc);
            }
        }
        assert_eq!(l.mul(&linv).unwrap(), RatMatrix::identity(n));
        let a = l.mul(&t).unwrap().mul(&linv).unwrap();
        let pairs_cancel = (0..n).any(|i| (i..n).any(|j| spectrum[i] + spectrum[j] == 0));
        let sys = LinearTotalSystem::new(vec![a]).unwrap();
        let rep = check_linear_td_eigen(&sys).unwrap();
        assert_eq!(
            rep.established(),
            !pairs_cancel,
            "spectrum {spectrum:?}: {rep}"
        );
    }

    for _ in 0..200 {
        let vt = pick(&mut r);
        let a = poly(&mut r, &vt, 3, 4);
        let mut b = poly(&mut r, &vt, 3, 4);
        if b.is_zero() {
            b = Polynomial::one(&vt);
        }
        let ab = a.try_mul(&b).unwrap();
        assert_eq!(ab.exact_divide(&b).unwrap(), Some(a.clone()));
        if !b.is_constant() {
            let off = ab.try_add(&Polynomial::one(&vt)).unwrap();
            assert_eq!(off.exact_divide(&b).unwrap(), None, "{off} / {b}");
        }
    }
}

fn numeric_probes() {
    for name in ["ode_sphere_r3", "total_sphere_r4", "total_five_spheres"] {
        let m = fixture(name);
        for p in &m.probes {
            let f = m.system.induced_ode(p.j).unwrap().f;
            let w = m.candidate(&p.candidate).unwrap();
            let res = probe_invariance(&f, w, &p.start, p.horizon, p.step).unwrap();
            assert!(!res.diverged, "{name}/{}", p.candidate);
            if p.candidate == "control" {
                assert!(res.max_abs_w > 0.1, "{name}/control: {}", res.max_abs_w);
            } else {
                assert!(
                    res.max_abs_w <= 1e-6,
                    "{name}/{}: {}",
                    p.candidate,
                    res.max_abs_w
                );
            }
        }
    }
}

fn main() {
    let criteria: [(&str, fn()); 12] = [
        (
            "fifth-order partial divergences and bound",
            fifth_order_divergences,
        ),
        (
            "total system weighted divergence and bound",
            total_sphere_divergence,
        ),
        (
            "exterior system restriction and constant sign",
            exterior_restriction,
        ),
        (
            "Pfaff sphere wedges and definite constant",
            pfaff_sphere_constant,
        ),
        ("torus leaf constant and integral surface", torus_leaf),
        ("orthogonal field and its divergence", orthogonal_field),
        (
            "solenoidal normal and compact-leaf absence",
            solenoidal_leaf,
        ),
        ("ordinary system sphere cofactor and bound", ode_sphere),
        ("five invariant spheres and three annuli", five_spheres),
        ("linear partial systems", partial_systems),
        ("randomized algebraic identities", randomized_identities),
        ("numeric invariance probes", numeric_probes),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:2} {} {name}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
