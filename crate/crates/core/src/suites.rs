//! Verification suites: each produces a list of named checks with the
//! measured residual and the tolerance it is held to.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix5, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    circulation_residual, holonomy, integrate_fixed, kks_integral, line_integral, meridian_cap,
    Covector, Cycle, CycleKind, QuadratureSpec,
};
use crate::error::{GeometryError, Result};
use crate::forms::{
    alpha_o_form, alpha_with_origin, alpha_y_euclidean, eta_q_component, euclidean_chart,
    flux_form, moment_classical_on_basis, moment_form_on_basis, moment_via_s_on_basis,
    retraction_form, torque_form, EuclideanKilling,
};
use crate::geometry::{hopf_commutes_residual, point_geometry, PointGeometry};
use crate::lorentz::{wedge, Bivector, LorentzVector, SPairing};
use crate::parallel::{
    m_roots, parallel_point_geometry, reflection_residual, same_sheet, verify_parallel,
};
use crate::spaceform::{KillingBasis, SpaceForm, KILLING_LABELS};
use crate::surfaces::{FamilySpec, SurfaceFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Closedness,
    Homology,
    Theorem9,
    Parallel,
    Pencil,
    Kks,
    EuclideanAlpha,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Closedness,
        Suite::Homology,
        Suite::Theorem9,
        Suite::Parallel,
        Suite::Pencil,
        Suite::Kks,
        Suite::EuclideanAlpha,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Closedness => "closedness",
            Suite::Homology => "homology",
            Suite::Theorem9 => "theorem9",
            Suite::Parallel => "parallel",
            Suite::Pencil => "pencil",
            Suite::Kks => "kks",
            Suite::EuclideanAlpha => "euclidean_alpha",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// One measured identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being tested, in words.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Where the residual was attained, if meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Everything a suite needs.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub sf: SpaceForm,
    pub family: SurfaceFamily,
    pub cycles: Vec<Cycle>,
    pub quad: QuadratureSpec,
    pub seed: u64,
    pub sample_points: usize,
    pub tolerance_scale: f64,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

impl SuiteContext {
    /// Context with the default cycles of the family.
    pub fn new(spec: FamilySpec) -> Result<Self> {
        let family = SurfaceFamily::new(spec)?;
        let sf = SpaceForm::new(family.curvature());
        let cycles = default_cycles(&family);
        Ok(Self {
            sf,
            family,
            cycles,
            quad: QuadratureSpec::default(),
            seed: 0,
            sample_points: 8,
            tolerance_scale: 1.0,
            tolerance_overrides: BTreeMap::new(),
        })
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerance_overrides
            .get(name)
            .copied()
            .unwrap_or(default)
            * self.tolerance_scale
    }

    fn check(&self, name: &str, anchor: &str, residual: f64, default_tol: f64) -> Check {
        let tolerance = self.tolerance(name, default_tol);
        Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            location: None,
        }
    }

    /// Check that must exceed a floor (negative controls).
    fn check_at_least(&self, name: &str, anchor: &str, value: f64, floor: f64) -> Check {
        Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            residual: value,
            tolerance: floor,
            passed: value >= floor,
            location: None,
        }
    }

    pub fn geometry(&self, u: f64, v: f64) -> Result<PointGeometry> {
        point_geometry(&self.sf, &self.family.jet(&self.sf, u, v)?)
    }

    /// Seeded sample points inside the family's sampling rectangle.
    pub fn sample(&self, salt: u64) -> Vec<(f64, f64)> {
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let r = self.family.sample_rect();
        let pad = |(a, b): (f64, f64)| (a + 0.05 * (b - a), b - 0.05 * (b - a));
        let (u, v) = (pad(r.u), pad(r.v));
        (0..self.sample_points)
            .map(|_| (rng.gen_range(u.0..u.1), rng.gen_range(v.0..v.1)))
            .collect()
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Coordinate circles at two anchors of each periodic coordinate.
pub fn default_cycles(family: &SurfaceFamily) -> Vec<Cycle> {
    let (a, b) = family.homologous_anchors();
    let mut out = Vec::new();
    if let Some(p) = family.u_period() {
        out.push(Cycle::coordinate_u(a, p));
        out.push(Cycle::coordinate_u(b, p));
    }
    if let Some(p) = family.v_period() {
        out.push(Cycle::coordinate_v(a, p));
        out.push(Cycle::coordinate_v(b, p));
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn max_rel<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    (0..N).fold(0.0f64, |m, i| m.max(rel(a[i], b[i])))
}

fn max_abs<const N: usize>(a: &[f64; N]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn cycle_label(c: &Cycle) -> String {
    match (c.kind(), c.anchor()) {
        (CycleKind::CoordinateU, Some(a)) => format!("u-circle at v = {a}"),
        (CycleKind::CoordinateV, Some(a)) => format!("v-circle at u = {a}"),
        _ => "parametric cycle".to_string(),
    }
}

/// Euclidean Killing field of each flat basis bivector, so that
/// `Y(p) = -Yp - <Yp,q>p` has chart image `field(p)`.
pub fn euclidean_killing_fields() -> [EuclideanKilling; 6] {
    let e = |i: usize| {
        let mut v = Vector3::zeros();
        v[i] = 1.0;
        v
    };
    // e_i∧e_j rotates with angular velocity -(e_i × e_j); e_i∧q translates by -e_i
    [
        EuclideanKilling::Rotation(-e(2)),
        EuclideanKilling::Rotation(e(1)),
        EuclideanKilling::Translation(-e(0)),
        EuclideanKilling::Rotation(-e(0)),
        EuclideanKilling::Translation(-e(1)),
        EuclideanKilling::Translation(-e(2)),
    ]
}

/// Flux and torque periods in the Killing basis order: the moment against
/// `e_i∧q` is `<F, e_i>` and against `e_i∧e_j` is `-<τ, e_i × e_j>`.
pub fn flux_torque_on_basis(flux: &Vector3<f64>, torque: &Vector3<f64>) -> [f64; 6] {
    [-torque[2], torque[1], flux[0], -torque[0], flux[1], flux[2]]
}

/// Pointwise flux and torque forms arranged as moment values.
pub fn flux_torque_covector(g: &PointGeometry) -> Covector<6> {
    let f = flux_form(&g.frame);
    let t = torque_form(&g.frame);
    [
        flux_torque_on_basis(&f.du, &t.du),
        flux_torque_on_basis(&f.dv, &t.dv),
    ]
}

/// Named period groups over one cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    pub cycle: String,
    pub kind: CycleKind,
    pub anchor: Option<f64>,
    pub groups: Vec<(String, [f64; 6])>,
}

/// Classical, S-image and closed-form moment periods for every cycle.
pub fn period_table(ctx: &SuiteContext) -> Result<Vec<PeriodRow>> {
    let s = SPairing::new(ctx.sf.origin());
    let basis = ctx.sf.killing_basis();
    let mut rows = Vec::new();
    for c in &ctx.cycles {
        let classical = line_integral(
            &|u, v| classical_covector(ctx, &s, &basis, u, v),
            c,
            &ctx.quad,
        )?
        .value;
        let s_image = line_integral(
            &|u, v| {
                Ok(moment_via_s_on_basis(
                    &s,
                    &ctx.geometry(u, v)?.frame,
                    &basis,
                ))
            },
            c,
            &ctx.quad,
        )?
        .value;
        let (name, closed) = if ctx.sf.is_flat() {
            let p = line_integral(
                &|u, v| Ok(flux_torque_covector(&ctx.geometry(u, v)?)),
                c,
                &ctx.quad,
            )?;
            ("flux_torque", p.value)
        } else {
            let p = line_integral(
                &|u, v| {
                    Ok(moment_form_on_basis(
                        &ctx.sf,
                        &ctx.geometry(u, v)?.frame,
                        &basis,
                    ))
                },
                c,
                &ctx.quad,
            )?;
            ("moment_form", p.value)
        };
        rows.push(PeriodRow {
            cycle: cycle_label(c),
            kind: c.kind(),
            anchor: c.anchor(),
            groups: vec![
                ("classical".into(), classical),
                ("s_image".into(), s_image),
                (name.into(), closed),
            ],
        });
    }
    Ok(rows)
}

fn classical_covector(
    ctx: &SuiteContext,
    s: &SPairing,
    basis: &KillingBasis,
    u: f64,
    v: f64,
) -> Result<Covector<6>> {
    Ok(moment_classical_on_basis(
        &ctx.sf,
        s,
        &ctx.geometry(u, v)?.frame,
        basis,
    ))
}

fn eta_covector(ctx: &SuiteContext, u: f64, v: f64) -> Result<Covector<10>> {
    let e = retraction_form(&ctx.geometry(u, v)?);
    Ok([e.du.0, e.dv.0])
}

pub fn run_suite(suite: Suite, ctx: &SuiteContext) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome {
        suite,
        checks: Vec::new(),
        notes: Vec::new(),
    };
    match suite {
        Suite::Closedness => closedness(ctx, &mut out)?,
        Suite::Homology => homology(ctx, &mut out)?,
        Suite::Theorem9 => theorem9(ctx, &mut out)?,
        Suite::Parallel => parallel(ctx, &mut out)?,
        Suite::Pencil => pencil(ctx, &mut out)?,
        Suite::Kks => kks(ctx, &mut out)?,
        Suite::EuclideanAlpha => euclidean_alpha(ctx, &mut out)?,
    }
    Ok(out)
}

/// Side of the squares used for circulation checks.
pub const CIRCULATION_SIDE: f64 = 1e-2;

fn closedness(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    let pts = ctx.sample(1);
    let mut worst = (0.0f64, (0.0, 0.0));
    let mut alpha_err = 0.0f64;
    let mut commute = 0.0f64;
    for &(u, v) in &pts {
        let c = circulation_residual(
            &|u, v| eta_covector(ctx, u, v),
            [u, v],
            CIRCULATION_SIDE,
            &ctx.quad,
        )?;
        if c.max_ratio() >= worst.0 {
            worst = (c.max_ratio(), (u, v));
        }
        // dα^o(∂u, ∂v) = 2 xu ∧ xv
        let g = ctx.geometry(u, v)?;
        let alpha = |u: f64, v: f64| {
            let a = alpha_o_form(&ctx.sf, &ctx.geometry(u, v)?.frame);
            Ok([a.du.0, a.dv.0])
        };
        let ca = circulation_residual(&alpha, [u, v], CIRCULATION_SIDE, &ctx.quad)?;
        let expect = wedge(&g.frame.dx[0], &g.frame.dx[1]) * 2.0;
        let scale = expect.max_abs().max(f64::MIN_POSITIVE);
        alpha_err = alpha_err.max((Bivector(ca.ratio) - expect).max_abs() / scale);
        commute = commute.max(hopf_commutes_residual(&g));
    }
    let mut c = ctx.check(
        "eta_circulation",
        "the retraction form is closed: circulation over area vanishes",
        worst.0,
        1e-6,
    );
    c.location = Some(format!("(u, v) = ({:.6}, {:.6})", worst.1 .0, worst.1 .1));
    out.checks.push(c);
    out.checks.push(ctx.check(
        "alpha_o_circulation",
        "d alpha^o = 2 xu ^ xv, relative",
        alpha_err,
        1e-3,
    ));
    out.checks.push(ctx.check(
        "hopf_commutes_with_shape",
        "Q(A., .) is symmetric: the Hopf form commutes with the shape operator",
        commute,
        1e-10,
    ));
    // α^o - α^{o'} is exact
    let o = ctx.sf.origin();
    let shifted = shifted_origin(&ctx.sf);
    let mut diff = 0.0f64;
    for c in &ctx.cycles {
        let p = line_integral(
            &|u, v| {
                let f = ctx.geometry(u, v)?.frame;
                let a = alpha_with_origin(&o, &f) - alpha_with_origin(&shifted, &f);
                Ok([a.du.0, a.dv.0])
            },
            c,
            &ctx.quad,
        )?;
        diff = diff.max(max_abs(&p.value));
    }
    out.checks.push(ctx.check(
        "alpha_origin_change_exact",
        "alpha^o - alpha^o' has no periods",
        diff,
        1e-10,
    ));
    if !ctx.family.is_cmc() {
        out.notes.push(format!(
            "{} is not CMC: the retraction form is expected to fail closedness",
            ctx.family.name()
        ));
    }
    Ok(())
}

/// Another point of `E_q ∩ L`, `o' = exp(Z) o` for a fixed Killing `Z`.
fn shifted_origin(sf: &SpaceForm) -> LorentzVector {
    let z = sf
        .killing_basis()
        .combine(&[0.2, -0.1, 0.3, 0.25, -0.15, 0.4]);
    let g = z.to_matrix().exp();
    LorentzVector::from_vector5(&(g * sf.origin().to_vector5()))
}

fn homology(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    let s = SPairing::new(ctx.sf.origin());
    let basis = ctx.sf.killing_basis();
    let form = |u: f64, v: f64| classical_covector(ctx, &s, &basis, u, v);
    let mut periods: Vec<(CycleKind, [f64; 6])> = Vec::new();
    let mut reversal = 0.0f64;
    let mut change = 0.0f64;
    for c in &ctx.cycles {
        let p = line_integral(&form, c, &ctx.quad)?;
        change = change.max(p.change);
        let r = integrate_fixed(&form, &c.reversed(), &ctx.quad.doubled())?;
        for i in 0..6 {
            reversal = reversal.max((p.value[i] + r[i]).abs());
        }
        periods.push((c.kind(), p.value));
    }
    out.checks.push(ctx.check(
        "quadrature_convergence",
        "doubling the panel count changes no period",
        change,
        1e-10,
    ));
    out.checks.push(ctx.check(
        "cycle_reversal",
        "reversing a cycle negates its periods",
        reversal,
        1e-12,
    ));
    if ctx.family.has_trivial_cohomology() {
        let worst = periods.iter().fold(0.0f64, |m, (_, p)| m.max(max_abs(p)));
        out.checks.push(ctx.check(
            "trivial_cohomology_periods",
            "every cycle bounds, so all moment periods vanish",
            worst,
            1e-10,
        ));
    } else {
        let mut worst = 0.0f64;
        let mut pairs = 0;
        for i in 0..periods.len() {
            for j in i + 1..periods.len() {
                if periods[i].0 == periods[j].0 && periods[i].0 != CycleKind::Parametric {
                    worst = worst.max(max_rel(&periods[i].1, &periods[j].1));
                    pairs += 1;
                }
            }
        }
        if pairs > 0 {
            out.checks.push(ctx.check(
                "homology_invariance",
                "moment periods depend only on the homology class",
                worst,
                1e-7,
            ));
        } else {
            out.notes
                .push("no homologous cycle pairs configured".into());
        }
    }
    out.checks.push(equivariance_check(ctx)?);
    Ok(())
}

/// `μ_{gx}(Y) = μ_x(Ad(g)⁻¹ Y)` for sampled `g = exp(Z)`, `Z ∈ Λ²q^⊥`.
pub fn equivariance_residual(ctx: &SuiteContext, g: &Matrix5<f64>) -> Result<f64> {
    let s = SPairing::new(ctx.sf.origin());
    let basis = ctx.sf.killing_basis();
    let moved = ctx.family.with_motion(&ctx.sf, g)?;
    let ginv = g
        .try_inverse()
        .ok_or_else(|| GeometryError::InvalidParameters("singular motion".into()))?;
    let pulled: Vec<Bivector> = basis.iter().map(|y| y.transformed(&ginv)).collect();
    let mut worst = 0.0f64;
    for c in &ctx.cycles {
        let a = line_integral(
            &|u, v| {
                let f = point_geometry(&ctx.sf, &moved.jet(&ctx.sf, u, v)?)?.frame;
                Ok(moment_classical_on_basis(&ctx.sf, &s, &f, &basis))
            },
            c,
            &ctx.quad,
        )?
        .value;
        let b = line_integral(
            &|u, v| {
                let f = ctx.geometry(u, v)?.frame;
                let mut o = [[0.0; 6]; 2];
                for (i, y) in pulled.iter().enumerate() {
                    let r = crate::forms::moment_rep_classical(&ctx.sf, &s, &f, y);
                    o[0][i] = r[0];
                    o[1][i] = r[1];
                }
                Ok(o)
            },
            c,
            &ctx.quad,
        )?
        .value;
        worst = worst.max(max_rel(&a, &b));
    }
    Ok(worst)
}

/// Random `exp(Z)` with `Z` in the Killing algebra, coefficients in `[-½, ½]`.
pub fn sample_motion(sf: &SpaceForm, rng: &mut impl Rng) -> Matrix5<f64> {
    let c: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-0.5..0.5));
    sf.killing_basis().combine(&c).to_matrix().exp()
}

fn equivariance_check(ctx: &SuiteContext) -> Result<Check> {
    let mut rng = ctx.rng(2);
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let g = sample_motion(&ctx.sf, &mut rng);
        worst = worst.max(equivariance_residual(ctx, &g)?);
    }
    Ok(ctx.check(
        "equivariance",
        "moment periods of g.x against Y equal those of x against Ad(g)^-1 Y",
        worst,
        1e-8,
    ))
}

fn theorem9(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    let rows = period_table(ctx)?;
    let mut s_vs_classical = 0.0f64;
    let mut closed_vs_classical = 0.0f64;
    for r in &rows {
        s_vs_classical = s_vs_classical.max(max_rel(&r.groups[0].1, &r.groups[1].1));
        closed_vs_classical = closed_vs_classical.max(max_rel(&r.groups[0].1, &r.groups[2].1));
    }
    out.checks.push(ctx.check(
        "s_image_equals_moment",
        "S applied to the retraction form represents the moment class",
        s_vs_classical,
        1e-7,
    ));
    let (name, anchor, tol) = if ctx.sf.is_flat() {
        (
            "flux_torque_equals_moment",
            "flux and torque forms represent the moment class",
            1e-8,
        )
    } else {
        (
            "moment_form_equals_moment",
            "(K x0 - H N) ^ *dx0 represents the moment class",
            1e-7,
        )
    };
    out.checks
        .push(ctx.check(name, anchor, closed_vs_classical, tol));
    // η q = d(N + Hx): no periods, and S(η) itself matches the S-image
    let s = SPairing::new(ctx.sf.origin());
    let basis = ctx.sf.killing_basis();
    let mut q_part = 0.0f64;
    let mut eta_vs_rep = 0.0f64;
    for (c, r) in ctx.cycles.iter().zip(&rows) {
        let p = line_integral(
            &|u, v| {
                let e = eta_q_component(&ctx.sf, &ctx.geometry(u, v)?);
                Ok([e[0].0, e[1].0])
            },
            c,
            &ctx.quad,
        )?;
        q_part = q_part.max(max_abs(&p.value));
        let direct = line_integral(
            &|u, v| {
                let e = retraction_form(&ctx.geometry(u, v)?);
                let mut o = [[0.0; 6]; 2];
                for (i, y) in basis.iter().enumerate() {
                    o[0][i] = s.eval(&e.du, y);
                    o[1][i] = s.eval(&e.dv, y);
                }
                Ok(o)
            },
            c,
            &ctx.quad,
        )?;
        eta_vs_rep = eta_vs_rep.max(max_rel(&direct.value, &r.groups[1].1));
    }
    out.checks.push(ctx.check(
        "eta_q_component_periods",
        "eta q = d(N + Hx) is exact, so eta's periods lie in the Killing algebra",
        q_part,
        1e-9,
    ));
    out.checks.push(ctx.check(
        "eta_cohomologous_to_dx_wedge",
        "eta and dx ^ (N + Hx) have the same S-periods",
        eta_vs_rep,
        1e-7,
    ));
    // pointwise: η q against finite differences of N + Hx
    let h = 1e-5;
    let mut fd = 0.0f64;
    for &(u, v) in &ctx.sample(3) {
        let g = ctx.geometry(u, v)?;
        let eq = eta_q_component(&ctx.sf, &g);
        let w = |u: f64, v: f64| -> Result<LorentzVector> {
            let g = ctx.geometry(u, v)?;
            Ok(g.frame.normal + g.frame.x * g.mean_curvature())
        };
        let du = (w(u + h, v)? - w(u - h, v)?) * (0.5 / h);
        let dv = (w(u, v + h)? - w(u, v - h)?) * (0.5 / h);
        fd = fd.max((eq[0] - du).max_abs()).max((eq[1] - dv).max_abs());
    }
    out.checks.push(ctx.check(
        "eta_q_pointwise",
        "eta q = d(N + Hx) pointwise, against central differences",
        fd,
        1e-8,
    ));
    if !ctx.family.is_cmc() {
        out.notes.push(format!(
            "{} is not CMC: the identities above need not hold",
            ctx.family.name()
        ));
    }
    Ok(())
}

fn parallel(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    if ctx.family.is_totally_umbilic() {
        out.notes
            .push("totally umbilic surface: the parallel surface does not immerse".into());
        return Ok(());
    }
    if !ctx.family.is_cmc() {
        out.notes
            .push("surface is not CMC: no parallel CMC surface to verify".into());
        return Ok(());
    }
    let pts = ctx.sample(4);
    let h = ctx.geometry(pts[0].0, pts[0].1)?.mean_curvature();
    let k = ctx.sf.curvature();
    let roots = match m_roots(h, k) {
        Ok(r) => r,
        Err(e) => {
            out.notes.push(format!("no parallel surface: {e}"));
            return Ok(());
        }
    };
    for r in &roots.rejected {
        out.notes
            .push(format!("root m = {} rejected: {}", r.m, r.reason));
    }
    if roots.roots.is_empty() {
        out.notes.push("no admissible root m".into());
        return Ok(());
    }
    for (idx, &m) in roots.roots.iter().enumerate() {
        let tag = if idx == 0 {
            String::new()
        } else {
            format!("_root{idx}")
        };
        let r = verify_parallel(
            &ctx.sf,
            &ctx.family,
            m,
            &pts,
            &ctx.cycles,
            &ctx.quad,
            CIRCULATION_SIDE,
        )?;
        let items: [(&str, &str, f64, f64); 11] = [
            (
                "membership",
                "the parallel surface lies on the conic",
                r.membership,
                1e-10,
            ),
            ("derivative", "d x^ = -dx o A0/(m - H)", r.derivative, 1e-9),
            (
                "normal",
                "N^ = (Kx - HN - q)/(m - H) is the oriented normal",
                r.normal,
                1e-9,
            ),
            (
                "conformality",
                "I^ = -det A0/(m - H)^2 I",
                r.conformality,
                1e-8,
            ),
            (
                "mean_curvature",
                "the parallel surface has the same mean curvature",
                r.mean_curvature,
                1e-7,
            ),
            (
                "trace_free_shape",
                "A0^ = (H^2 + K) A0^-1",
                r.trace_free_shape,
                1e-7,
            ),
            ("hopf", "the Hopf forms coincide", r.hopf, 1e-7),
            (
                "moment_periods",
                "x and its parallel surface have the same moment class",
                r.periods,
                1e-7,
            ),
            (
                "offset_circulation",
                "eta_x - eta_x^ - (m - H) d(x^ ^ x) is closed",
                r.offset_circulation,
                1e-9,
            ),
            (
                "offset_pointwise",
                "eta_x - eta_x^ = (m - H) d(x^ ^ x) pointwise",
                r.offset_pointwise,
                1e-9,
            ),
            (
                "double_parallel",
                "the construction applied twice with the same m returns x",
                r.double_parallel,
                1e-9,
            ),
        ];
        for (name, anchor, res, tol) in items {
            let mut c = ctx.check(&format!("parallel_{name}{tag}"), anchor, res, tol);
            c.anchor = format!("{anchor} (m = {m})");
            out.checks.push(c);
        }
        if ((m - h).abs() - 1.0).abs() < 1e-12 {
            out.checks.push(ctx.check(
                &format!("parallel_conformality_unit_offset{tag}"),
                "I^ = -det A0 I when |m - H| = 1",
                r.conformality_unscaled,
                1e-8,
            ));
        }
    }
    if ctx.sf.is_flat() {
        let mut worst = 0.0f64;
        for &(u, v) in &pts {
            let p = parallel_point_geometry(&ctx.sf, &ctx.family, roots.roots[0], u, v)?;
            let x0 = ctx.sf.chart_euclidean(&p.base.frame.x);
            let xh = ctx.sf.chart_euclidean(&p.dual.frame.x);
            let n = p.base.frame.normal;
            for i in 0..3 {
                worst = worst.max((xh[i] - x0[i] - n[i] / h).abs());
            }
        }
        out.checks.push(ctx.check(
            "parallel_offset_by_normal",
            "in the Euclidean chart x^ = x + N/H",
            worst,
            1e-10,
        ));
    } else if roots.roots.len() == 2 {
        let mut worst = 0.0f64;
        for &(u, v) in &pts {
            worst = worst.max(reflection_residual(&ctx.sf, &ctx.family, u, v)?);
        }
        out.checks.push(ctx.check(
            "parallel_reflection",
            "the two parallel surfaces differ by minus the reflection orthogonal to q",
            worst,
            1e-9,
        ));
    }
    if k < 0.0 {
        let mut off = 0.0;
        for &(u, v) in &pts {
            if !same_sheet(&ctx.sf, &ctx.family, roots.roots[0], u, v)? {
                off += 1.0;
            }
        }
        out.checks.push(ctx.check(
            "parallel_same_sheet",
            "with |m| maximal the parallel surface stays on the sheet of x (points off sheet)",
            off,
            0.0,
        ));
    }
    Ok(())
}

/// Side, step and pencil parameters of the holonomy checks.
pub const PENCIL_SIDE: f64 = 0.3;
pub const PENCIL_STEP: f64 = 1e-3;
pub const PENCIL_PARAMETERS: [f64; 3] = [0.5, 1.0, 2.0];

/// Centre of the contractible loop used for holonomy.
pub fn pencil_center(family: &SurfaceFamily) -> [f64; 2] {
    [1.0, family.homologous_anchors().0]
}

fn pencil(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    let loop_ = Cycle::square(pencil_center(&ctx.family), PENCIL_SIDE);
    let mut worst = 0.0f64;
    let mut single = Matrix5::identity();
    for &t in &PENCIL_PARAMETERS {
        let m = holonomy(&ctx.sf, &ctx.family, t, &loop_, PENCIL_STEP)?;
        worst = worst.max((m - Matrix5::identity()).norm());
        if t == 1.0 {
            single = m;
        }
    }
    if ctx.family.is_cmc() {
        out.checks.push(ctx.check(
            "pencil_flat",
            "d + t eta is flat: holonomy around a contractible loop is the identity",
            worst,
            1e-6,
        ));
    } else {
        out.checks.push(ctx.check_at_least(
            "pencil_not_flat",
            "non-CMC control: holonomy of d + t eta is far from the identity",
            worst,
            1e-3,
        ));
        out.checks.push(ctx.check(
            "pencil_flat",
            "d + t eta is flat: holonomy around a contractible loop is the identity",
            worst,
            1e-6,
        ));
    }
    let zero = holonomy(&ctx.sf, &ctx.family, 0.0, &loop_, PENCIL_STEP)?;
    out.checks.push(ctx.check(
        "pencil_t0_identity",
        "at t = 0 the holonomy is the identity",
        (zero - Matrix5::identity()).amax(),
        0.0,
    ));
    let twice = holonomy(&ctx.sf, &ctx.family, 1.0, &loop_.repeated(2), PENCIL_STEP)?;
    out.checks.push(ctx.check(
        "pencil_representation",
        "holonomy of the doubled loop is the square of the holonomy",
        (twice - single * single).amax(),
        1e-9,
    ));
    out.checks.push(ctx.check(
        "pencil_group",
        "holonomy preserves the Lorentz metric",
        crate::calculus::group_drift(&single),
        1e-8,
    ));
    Ok(())
}

fn kks(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    if !ctx.sf.is_flat() {
        out.notes
            .push("capped-disk integral is Euclidean only".into());
        return Ok(());
    }
    if ctx.family.motion().is_some() {
        out.notes
            .push("capped-disk integral needs the family in its standard position".into());
        return Ok(());
    }
    let s = SPairing::new(ctx.sf.origin());
    let basis = ctx.sf.killing_basis();
    let mut worst = 0.0f64;
    let mut count = 0;
    for c in &ctx.cycles {
        let (CycleKind::CoordinateU, Some(v)) = (c.kind(), c.anchor()) else {
            continue;
        };
        let cap = meridian_cap(&ctx.family, &ctx.sf, v)?;
        let p = line_integral(
            &|u, v| classical_covector(ctx, &s, &basis, u, v),
            c,
            &ctx.quad,
        )?;
        for (i, y) in basis.iter().enumerate() {
            let k = kks_integral(&ctx.sf, &ctx.family, c, y, &cap, &ctx.quad)?;
            worst = worst.max((k - p.value[i]).abs());
        }
        count += 1;
        if let FamilySpec::Cylinder { radius } = ctx.family.spec() {
            let mut chk = ctx.check(
                "cylinder_axis_flux",
                "meridian flux of the axis translation is pi r",
                (p.value[5] - PI * radius).abs(),
                1e-9,
            );
            chk.location = Some(cycle_label(c));
            out.checks.push(chk);
        }
    }
    if count == 0 {
        out.notes.push("no meridian cycles to cap".into());
        return Ok(());
    }
    out.checks.push(ctx.check(
        "kks_equals_moment",
        "boundary flux minus 2H times the cap flux equals the moment period",
        worst,
        1e-8,
    ));
    Ok(())
}

/// Relative error of `(1/s²)∮α_Y` against `vol(Y, a, b)` over a square of side
/// `s` spanned by orthonormal `a, b` at `p`.
pub fn alpha_y_circulation_error(
    y: &EuclideanKilling,
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    side: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let form = |s: f64, t: f64| {
        let x = p + a * s + b * t;
        Ok([[alpha_y_euclidean(y, &x, a)], [alpha_y_euclidean(y, &x, b)]])
    };
    let c = circulation_residual(&form, [0.0, 0.0], side, quad)?;
    let exact = y.field(p).dot(&a.cross(b));
    Ok((c.ratio[0] - exact).abs() / exact.abs().max(1.0))
}

fn euclidean_alpha(ctx: &SuiteContext, out: &mut SuiteOutcome) -> Result<()> {
    if !ctx.sf.is_flat() {
        out.notes
            .push("closed-form alpha_Y is Euclidean only".into());
        return Ok(());
    }
    let mut rng = ctx.rng(5);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let w = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let y = if i % 2 == 0 {
            EuclideanKilling::Translation(w)
        } else {
            EuclideanKilling::Rotation(w)
        };
        let p = Vector3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let n = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
        .normalize();
        let a = n.cross(&Vector3::new(0.3, -0.5, 0.8)).normalize();
        let b = n.cross(&a);
        worst = worst.max(alpha_y_circulation_error(
            &y,
            &p,
            &a,
            &b,
            CIRCULATION_SIDE,
            &ctx.quad,
        )?);
    }
    out.checks.push(ctx.check(
        "alpha_y_circulation",
        "d alpha_Y = i_Y vol for translations (1/2) and rotations (1/3)",
        worst,
        1e-3,
    ));
    // ½ S(α^o)(Y) and -α_Y (orientation of the chart is reversed) share periods
    let s = SPairing::new(ctx.sf.origin());
    let basis = ctx.sf.killing_basis();
    let fields = euclidean_killing_fields();
    let mut diff = 0.0f64;
    for c in &ctx.cycles {
        let p = line_integral(
            &|u, v| {
                let f = ctx.geometry(u, v)?.frame;
                let a = alpha_o_form(&ctx.sf, &f);
                let (x0, _) = euclidean_chart(&f);
                let d = |k: usize| Vector3::new(f.dx[k][0], f.dx[k][1], f.dx[k][2]);
                let mut o = [[0.0; 6]; 2];
                for (i, y) in basis.iter().enumerate() {
                    o[0][i] = 0.5 * s.eval(&a.du, y) + alpha_y_euclidean(&fields[i], &x0, &d(0));
                    o[1][i] = 0.5 * s.eval(&a.dv, y) + alpha_y_euclidean(&fields[i], &x0, &d(1));
                }
                Ok(o)
            },
            c,
            &ctx.quad,
        )?;
        diff = diff.max(max_abs(&p.value));
    }
    out.checks.push(ctx.check(
        "alpha_y_matches_s_alpha_o",
        "S(alpha^o)(Y)/2 and the closed-form alpha_Y differ by an exact form",
        diff,
        1e-9,
    ));
    Ok(())
}

/// Labels of the period columns.
pub fn killing_labels() -> [&'static str; 6] {
    KILLING_LABELS
}

/// Full default run on one fixture.
pub fn run_all(ctx: &SuiteContext, suites: &[Suite]) -> Result<Vec<SuiteOutcome>> {
    suites.iter().map(|s| run_suite(*s, ctx)).collect()
}
