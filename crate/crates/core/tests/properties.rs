use moment_core::calculus::{integrate_fixed, Cycle, QuadratureSpec};
use moment_core::lorentz::{apply, b_form, det5, ip, s_eval, wedge, Bivector, LorentzVector};
use moment_core::spaceform::{conformal_field_at, SpaceForm};
use nalgebra::Matrix5;
use proptest::prelude::*;

fn vec5() -> impl Strategy<Value = LorentzVector> {
    prop::array::uniform5(-1.0f64..1.0).prop_map(LorentzVector)
}

fn biv() -> impl Strategy<Value = Bivector> {
    prop::array::uniform10(-1.0f64..1.0).prop_map(Bivector)
}

fn coeffs6() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-1.0f64..1.0)
}

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), Just(-1.0), Just(0.25), Just(-4.0)]
}

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != c)
                        .map(|(_, x)| *x)
                        .collect()
                })
                .collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * cofactor_det(&minor)
        })
        .sum()
}

/// A point of `M_q` built from three free parameters.
fn conic_point(sf: &SpaceForm, a: [f64; 3]) -> LorentzVector {
    let k = sf.curvature();
    if k == 0.0 {
        return sf.lift_euclidean(a).unwrap();
    }
    let s2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    let x0 = if k > 0.0 {
        // on the sphere |x0|² = 1/K in span(e0..e3)
        let w = LorentzVector([a[0], a[1], a[2], 0.7, 0.0]);
        w * (1.0 / (ip(&w, &w) * k).sqrt())
    } else {
        let t = (s2 - 1.0 / k).sqrt();
        LorentzVector([a[0], a[1], a[2], 0.0, t])
    };
    sf.lift_pseudosphere(&x0).unwrap()
}

/// Projection of `w` onto the tangent space `{p, q}^⊥` at `p`.
fn tangent(sf: &SpaceForm, p: &LorentzVector, w: &LorentzVector) -> LorentzVector {
    let q = sf.q();
    let beta = ip(w, p);
    let alpha = ip(w, &q) - sf.curvature() * beta;
    *w + *p * alpha + q * beta
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bivector_action_is_skew(y in biv(), c in vec5(), d in vec5()) {
        let r = ip(&apply(&y, &c), &d) + ip(&c, &apply(&y, &d));
        prop_assert!(r.abs() <= 1e-14 * 10.0);
    }

    #[test]
    fn wedge_action_formula(a in vec5(), b in vec5(), c in vec5()) {
        let lhs = apply(&wedge(&a, &b), &c);
        let rhs = b * ip(&a, &c) - a * ip(&b, &c);
        prop_assert!((lhs - rhs).max_abs() <= 1e-14);
        prop_assert!((wedge(&a, &b) + wedge(&b, &a)).max_abs() == 0.0);
    }

    #[test]
    fn det5_matches_cofactor_expansion(cols in prop::array::uniform5(vec5())) {
        let rows: Vec<Vec<f64>> = (0..5).map(|r| (0..5).map(|c| cols[c].0[r]).collect()).collect();
        let d = det5([&cols[0], &cols[1], &cols[2], &cols[3], &cols[4]]).0;
        prop_assert!((d - cofactor_det(&rows)).abs() <= 1e-13);
    }

    #[test]
    fn matrix_round_trip(y in biv()) {
        prop_assert!((Bivector::from_matrix(&y.to_matrix()) - y).max_abs() <= 1e-15);
    }

    #[test]
    fn b_form_symmetric_and_invariant(y1 in biv(), y2 in biv(), z in biv()) {
        prop_assert!((b_form(&y1, &y2) - b_form(&y2, &y1)).abs() <= 1e-14);
        let g = (z.to_matrix() * 0.5).exp();
        let lhs = b_form(&y1.transformed(&g), &y2.transformed(&g));
        prop_assert!((lhs - b_form(&y1, &y2)).abs() <= 1e-10 * (1.0 + g.amax().powi(4)));
    }

    #[test]
    fn s_pairing_symmetric(k in curvature(), y1 in biv(), y2 in biv()) {
        let o = SpaceForm::new(k).origin();
        prop_assert!((s_eval(&o, &y1, &y2) - s_eval(&o, &y2, &y1)).abs() <= 1e-13);
    }

    #[test]
    fn s_pairing_independent_of_origin(k in curvature(), c1 in coeffs6(), c2 in coeffs6(), w in vec5()) {
        let sf = SpaceForm::new(k);
        let basis = sf.killing_basis();
        let (y1, y2) = (basis.combine(&c1), basis.combine(&c2));
        // o' = o + w with w ∈ q^⊥ keeps <o', q> = -1
        let q = sf.q();
        let qq = ip(&q, &q);
        let w_perp = if qq == 0.0 {
            // project along o: w - <w,q>(-o) direction keeps <., q> = 0
            w + sf.origin() * ip(&w, &q)
        } else {
            w - q * (ip(&w, &q) / qq)
        };
        prop_assert!(ip(&w_perp, &q).abs() <= 1e-14);
        let o2 = sf.origin() + w_perp;
        let d = s_eval(&sf.origin(), &y1, &y2) - s_eval(&o2, &y1, &y2);
        prop_assert!(d.abs() <= 1e-12);
    }

    #[test]
    fn conformal_field_pairing_identity(k in curvature(), a in prop::array::uniform3(-1.0f64..1.0), c in coeffs6(), w in vec5()) {
        let sf = SpaceForm::new(k);
        let p = conic_point(&sf, a);
        let y = sf.killing_basis().combine(&c);
        let v = tangent(&sf, &p, &w);
        let yp = conformal_field_at(&sf, &y, &p).unwrap();
        prop_assert!(ip(&yp, &p).abs() <= 1e-12);
        prop_assert!(ip(&yp, &sf.q()).abs() <= 1e-12);
        prop_assert!((ip(&yp, &v) - b_form(&y, &wedge(&p, &v))).abs() <= 1e-12);
    }

    #[test]
    fn killing_flow_preserves_inner_product(k in curvature(), c in coeffs6(), v in vec5(), w in vec5(), t in -1.0f64..1.0) {
        let sf = SpaceForm::new(k);
        let g: Matrix5<f64> = (sf.killing_basis().combine(&c).to_matrix() * t).exp();
        let gv = LorentzVector::from_vector5(&(g * v.to_vector5()));
        let gw = LorentzVector::from_vector5(&(g * w.to_vector5()));
        let gq = LorentzVector::from_vector5(&(g * sf.q().to_vector5()));
        prop_assert!((ip(&gv, &gw) - ip(&v, &w)).abs() <= 1e-10);
        prop_assert!((gq - sf.q()).max_abs() <= 1e-12);
    }

    #[test]
    fn euclidean_chart_is_isometric(a in prop::array::uniform3(-3.0f64..3.0), b in prop::array::uniform3(-3.0f64..3.0)) {
        let sf = SpaceForm::new(0.0);
        let (x, y) = (sf.lift_euclidean(a).unwrap(), sf.lift_euclidean(b).unwrap());
        let d2: f64 = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum();
        prop_assert!((ip(&(x - y), &(x - y)) - d2).abs() <= 1e-12 * d2.max(1.0));
        prop_assert!(sf.chart_euclidean(&x) == a);
        let (n, aff) = sf.membership_defect(&x);
        prop_assert!(n.abs() <= 1e-12 && aff.abs() <= 1e-12);
    }

    #[test]
    fn conic_points_lie_on_the_conic(k in curvature(), a in prop::array::uniform3(-1.0f64..1.0)) {
        let sf = SpaceForm::new(k);
        prop_assert!(sf.check_on_conic(&conic_point(&sf, a)).is_ok());
    }

    #[test]
    fn periods_are_linear_and_reverse(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, r in 0.1f64..1.0) {
        let f = |u: f64, v: f64| Ok([[v * v * u.cos(), c1 * v], [u * v.sin(), c2 * u]]);
        let c = Cycle::circle([0.3, -0.2], r);
        let q = QuadratureSpec::default();
        let a = integrate_fixed(&f, &c, &q).unwrap();
        let b = integrate_fixed(&f, &c.reversed(), &q).unwrap();
        prop_assert!((a[0] + b[0]).abs() <= 1e-12 && (a[1] + b[1]).abs() <= 1e-12);
        // second component: ∮ c1 v du + c2 u dv = (c2 - c1) π r²
        let exact = (c2 - c1) * std::f64::consts::PI * r * r;
        prop_assert!((a[1] - exact).abs() <= 1e-12);
    }
}
