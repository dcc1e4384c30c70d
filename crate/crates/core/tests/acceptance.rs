//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use moment_core::calculus::{integrate_fixed, kks_integral, meridian_cap, Cycle, QuadratureSpec};
use moment_core::forms::{flux_form, moment_classical_on_basis};
use moment_core::geometry::point_geometry;
use moment_core::lorentz::{b_form, det5, ip, s_eval, wedge, Bivector, LorentzVector, SPairing};
use moment_core::parallel::{m_roots, verify_parallel};
use moment_core::spaceform::{conformal_field_at, SpaceForm};
use moment_core::suites::{
    equivariance_residual, run_suite, sample_motion, Check, Suite, SuiteContext, CIRCULATION_SIDE,
};
use moment_core::surfaces::{catalog, FamilySpec, SurfaceFamily};
use moment_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn cmc_fixtures() -> Vec<FamilySpec> {
    catalog()
        .into_iter()
        .filter(|s| !matches!(s, FamilySpec::PerturbedCylinder { .. }))
        .collect()
}

fn control() -> FamilySpec {
    FamilySpec::PerturbedCylinder {
        radius: 1.0,
        amplitude: 0.1,
    }
}

fn fixture_label(s: &FamilySpec) -> String {
    match s {
        FamilySpec::Sphere { curvature, .. } => format!("sphere(K={curvature})"),
        FamilySpec::ProductTorusS3 { radius, .. } => format!("product_torus_s3(r={radius:.4})"),
        other => other.name().to_string(),
    }
}

fn checks(spec: &FamilySpec, suite: Suite) -> Result<Vec<Check>> {
    let ctx = SuiteContext::new(spec.clone())?;
    Ok(run_suite(suite, &ctx)?.checks)
}

fn residual_of(list: &[Check], name: &str) -> Option<f64> {
    list.iter().find(|c| c.name == name).map(|c| c.residual)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
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

fn random_vector(rng: &mut ChaCha8Rng) -> LorentzVector {
    LorentzVector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

/// Point of `M_q` and a tangent vector there.
fn random_point_and_tangent(
    sf: &SpaceForm,
    rng: &mut ChaCha8Rng,
) -> (LorentzVector, LorentzVector) {
    let k = sf.curvature();
    let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let p = if k == 0.0 {
        sf.lift_euclidean(a).unwrap()
    } else if k > 0.0 {
        let w = LorentzVector([a[0], a[1], a[2], rng.gen_range(0.2..1.0), 0.0]);
        sf.lift_pseudosphere(&(w * (1.0 / (ip(&w, &w) * k).sqrt())))
            .unwrap()
    } else {
        let t = (a.iter().map(|x| x * x).sum::<f64>() - 1.0 / k).sqrt();
        sf.lift_pseudosphere(&LorentzVector([a[0], a[1], a[2], 0.0, t]))
            .unwrap()
    };
    let w = random_vector(rng);
    let q = sf.q();
    let beta = ip(&w, &p);
    let v = w + p * (ip(&w, &q) - k * beta) + q * beta;
    (p, v)
}

fn algebraic_layer() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let curvatures = [0.0, 1.0, -1.0, 0.5, -2.0];
    let (mut eq, mut det, mut sym, mut orig) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000 {
        let sf = SpaceForm::new(curvatures[i % curvatures.len()]);
        let basis = sf.killing_basis();
        let c: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let y = basis.combine(&c);
        let (p, v) = random_point_and_tangent(&sf, &mut rng);
        let yp = conformal_field_at(&sf, &y, &p)?;
        eq = eq.max((ip(&yp, &v) - b_form(&y, &wedge(&p, &v))).abs());

        let cols: [LorentzVector; 5] = std::array::from_fn(|_| random_vector(&mut rng));
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|r| (0..5).map(|c| cols[c].0[r]).collect())
            .collect();
        let d = det5([&cols[0], &cols[1], &cols[2], &cols[3], &cols[4]]).0;
        det = det.max((d - cofactor_det(&rows)).abs());

        let y1 = Bivector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let y2 = Bivector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let o = sf.origin();
        sym = sym.max((s_eval(&o, &y1, &y2) - s_eval(&o, &y2, &y1)).abs());

        // moving o inside {<., q> = -1} leaves S unchanged on Λ²q^⊥
        let c2: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let z = basis.combine(&c2);
        let w = random_vector(&mut rng);
        let q = sf.q();
        let qq = ip(&q, &q);
        let w = if qq == 0.0 {
            w + o * ip(&w, &q)
        } else {
            w - q * (ip(&w, &q) / qq)
        };
        orig = orig.max((s_eval(&o, &y, &z) - s_eval(&(o + w), &y, &z)).abs());
    }
    let worst = eq.max(det).max(sym).max(orig);
    Ok(verdict(
        worst <= 1e-12,
        format!("1000 samples: pairing identity {eq:.2e}, det5 {det:.2e}, S symmetry {sym:.2e}, origin change {orig:.2e} (tol 1e-12)"),
    ))
}

fn closedness() -> Result<Verdict> {
    let mut baseline = 0.0f64;
    let mut worst_name = String::new();
    for spec in cmc_fixtures() {
        let r = residual_of(&checks(&spec, Suite::Closedness)?, "eta_circulation")
            .unwrap_or(f64::INFINITY);
        if r >= baseline {
            baseline = r;
            worst_name = fixture_label(&spec);
        }
    }
    let ctrl =
        residual_of(&checks(&control(), Suite::Closedness)?, "eta_circulation").unwrap_or(0.0);
    let floor = 100.0 * 1e-6f64.max(baseline);
    Ok(verdict(
        baseline <= 1e-6 && ctrl >= floor,
        format!("max CMC ratio {baseline:.2e} ({worst_name}, tol 1e-6); control {ctrl:.2e} (needs >= {floor:.2e})"),
    ))
}

fn classical_periods(spec: &FamilySpec, cycle: &Cycle, quad: &QuadratureSpec) -> Result<[f64; 6]> {
    let family = SurfaceFamily::new(spec.clone())?;
    let sf = SpaceForm::new(family.curvature());
    let s = SPairing::new(sf.origin());
    let basis = sf.killing_basis();
    let form = |u: f64, v: f64| {
        let f = point_geometry(&sf, &family.jet(&sf, u, v)?)?.frame;
        Ok(moment_classical_on_basis(&sf, &s, &f, &basis))
    };
    integrate_fixed(&form, cycle, quad)
}

fn homology() -> Result<Verdict> {
    let quad = QuadratureSpec::new(16, 16)?;
    let mut parts = Vec::new();
    let mut worst = 0.0f64;
    let fixtures = catalog().into_iter().filter(|s| {
        matches!(
            s,
            FamilySpec::Unduloid { .. } | FamilySpec::ProductTorusS3 { .. }
        )
    });
    for spec in fixtures {
        let family = SurfaceFamily::new(spec.clone())?;
        let (a, b) = family.homologous_anchors();
        let period = family.u_period().expect("periodic u");
        let pa = classical_periods(&spec, &Cycle::coordinate_u(a, period), &quad)?;
        let pb = classical_periods(&spec, &Cycle::coordinate_u(b, period), &quad)?;
        let r = (0..6).fold(0.0f64, |m, i| m.max(rel(pa[i], pb[i])));
        worst = worst.max(r);
        parts.push(format!("{} {r:.2e}", fixture_label(&spec)));
    }
    Ok(verdict(
        worst <= 1e-7,
        format!("{} (rel tol 1e-7, 16x16)", parts.join(", ")),
    ))
}

fn cylinder_flux() -> Result<Verdict> {
    let spec = FamilySpec::Cylinder { radius: 1.0 };
    let family = SurfaceFamily::new(spec.clone())?;
    let sf = SpaceForm::new(0.0);
    let quad = QuadratureSpec::default();
    let v = 0.4;
    let meridian = Cycle::coordinate_u(v, 2.0 * PI);
    let axis = sf.killing_basis().0[5];
    let classical = classical_periods(&spec, &meridian, &quad)?[5];
    let cap = meridian_cap(&family, &sf, v)?;
    let kks = kks_integral(&sf, &family, &meridian, &axis, &cap, &quad)?;
    let flux = integrate_fixed(
        &|u, v| {
            let f = flux_form(&point_geometry(&sf, &family.jet(&sf, u, v)?)?.frame);
            Ok([[f.du[2]], [f.dv[2]]])
        },
        &meridian,
        &quad,
    )?[0];
    let abs = (classical - PI).abs();
    let pair = (classical - kks)
        .abs()
        .max((classical - flux).abs())
        .max((kks - flux).abs());
    Ok(verdict(
        abs <= 1e-9 && pair <= 1e-8,
        format!("classical {classical:.15}, capped disk {kks:.15}, flux {flux:.15}; |p - pi| {abs:.2e} (tol 1e-9), pairwise {pair:.2e} (tol 1e-8)"),
    ))
}

fn s_image_representative() -> Result<Verdict> {
    let (mut s_img, mut closed, mut qpart) = (0.0f64, 0.0f64, 0.0f64);
    for spec in cmc_fixtures() {
        let c = checks(&spec, Suite::Theorem9)?;
        let get = |n: &str| residual_of(&c, n).unwrap_or(f64::INFINITY);
        s_img = s_img.max(get("s_image_equals_moment"));
        let name = if spec.curvature() == 0.0 {
            "flux_torque_equals_moment"
        } else {
            "moment_form_equals_moment"
        };
        closed = closed.max(get(name));
        qpart = qpart.max(get("eta_q_component_periods"));
    }
    Ok(verdict(
        s_img <= 1e-7 && qpart <= 1e-9 && closed <= 1e-7,
        format!("S-image vs classical {s_img:.2e} (rel tol 1e-7), closed-form vs classical {closed:.2e}, q-component {qpart:.2e} (tol 1e-9)"),
    ))
}

fn pencil() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for spec in cmc_fixtures() {
        worst = worst.max(
            residual_of(&checks(&spec, Suite::Pencil)?, "pencil_flat").unwrap_or(f64::INFINITY),
        );
    }
    let ctrl = residual_of(&checks(&control(), Suite::Pencil)?, "pencil_flat").unwrap_or(0.0);
    Ok(verdict(
        worst <= 1e-6 && ctrl >= 1e-3,
        format!("max CMC |M - Id| {worst:.2e} (tol 1e-6); control {ctrl:.2e} (needs >= 1e-3)"),
    ))
}

fn parallel() -> Result<Verdict> {
    let tolerances: [(&str, f64); 6] = [
        ("parallel_mean_curvature", 1e-7),
        ("parallel_trace_free_shape", 1e-7),
        ("parallel_hopf", 1e-7),
        ("parallel_conformality", 1e-8),
        ("parallel_moment_periods", 1e-7),
        ("parallel_offset_circulation", 1e-9),
    ];
    let mut ok = true;
    let mut worst = vec![0.0f64; tolerances.len()];
    let mut unit = Vec::new();
    let mut bonnet = f64::INFINITY;
    let mut covered = 0;
    let mut literal = 0.0f64;
    for spec in cmc_fixtures() {
        let c = checks(&spec, Suite::Parallel)?;
        if c.is_empty() {
            continue;
        }
        covered += 1;
        for (i, (name, tol)) in tolerances.iter().enumerate() {
            for chk in c
                .iter()
                .filter(|x| x.name == *name || x.name.starts_with(&format!("{name}_root")))
            {
                worst[i] = worst[i].max(chk.residual);
                ok &= chk.residual <= *tol;
            }
        }
        for chk in c
            .iter()
            .filter(|x| x.name.starts_with("parallel_conformality_unit_offset"))
        {
            unit.push(format!("{} {:.1e}", fixture_label(&spec), chk.residual));
            ok &= chk.residual <= 1e-8;
        }
        literal = literal.max(literal_conformality(&spec)?);
        if matches!(spec, FamilySpec::Cylinder { .. }) {
            bonnet = residual_of(&c, "parallel_offset_by_normal").unwrap_or(f64::INFINITY);
        }
    }
    ok &= bonnet <= 1e-10 && covered > 0;
    let listed: Vec<String> = tolerances
        .iter()
        .zip(&worst)
        .map(|((n, t), w)| format!("{} {w:.1e}/{t:.0e}", n.trim_start_matches("parallel_")))
        .collect();
    Ok(verdict(
        ok,
        format!(
            "{covered} fixtures: {}; literal factor at |m - H| = 1: [{}]; Bonnet {bonnet:.1e}/1e-10; \
             info: factor without 1/(m - H)^2 misses by up to {literal:.2} when |m - H| != 1",
            listed.join(", "),
            unit.join(", ")
        ),
    ))
}

/// Worst residual of `I^ = -det A0 I` (no `1/(m - H)²`) over roots with `|m - H| != 1`.
fn literal_conformality(spec: &FamilySpec) -> Result<f64> {
    let ctx = SuiteContext::new(spec.clone())?;
    let pts = ctx.sample(4);
    let h = ctx.geometry(pts[0].0, pts[0].1)?.mean_curvature();
    let mut worst = 0.0f64;
    for m in m_roots(h, ctx.sf.curvature())?.roots {
        if ((m - h).abs() - 1.0).abs() > 1e-12 {
            let r = verify_parallel(
                &ctx.sf,
                &ctx.family,
                m,
                &pts[..2],
                &[],
                &ctx.quad,
                CIRCULATION_SIDE,
            )?;
            worst = worst.max(r.conformality_unscaled);
        }
    }
    Ok(worst)
}

fn euclidean_alpha() -> Result<Verdict> {
    let c = checks(&FamilySpec::Cylinder { radius: 1.0 }, Suite::EuclideanAlpha)?;
    let r = residual_of(&c, "alpha_y_circulation").unwrap_or(f64::INFINITY);
    Ok(verdict(
        r <= 1e-3,
        format!("20 random translations and rotations: worst {r:.2e} (tol 1e-3)"),
    ))
}

fn equivariance() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut n = 0;
    for spec in cmc_fixtures() {
        let ctx = SuiteContext::new(spec)?;
        if ctx.cycles.is_empty() {
            continue;
        }
        for _ in 0..2 {
            let g = sample_motion(&ctx.sf, &mut rng);
            worst = worst.max(equivariance_residual(&ctx, &g)?);
            n += 1;
        }
    }
    Ok(verdict(
        worst <= 1e-8,
        format!("{n} sampled motions: worst rel {worst:.2e} (tol 1e-8)"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Verdict>); 9] = [
        ("algebraic layer", algebraic_layer),
        ("closedness", closedness),
        ("homology invariance", homology),
        ("cylinder flux", cylinder_flux),
        ("S-image representative", s_image_representative),
        ("flat pencil", pencil),
        ("parallel surfaces", parallel),
        ("euclidean alpha_Y", euclidean_alpha),
        ("equivariance", equivariance),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        let tag = if v.passed { "PASS" } else { "FAIL" };
        if !v.passed {
            failed += 1;
        }
        println!(
            "[{tag}] criterion {} {name}: {} [{:.1}s]",
            i + 1,
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of 9 criteria passed in {:.1}s",
        9 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
