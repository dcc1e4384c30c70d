//! Cycles in the parameter domain, composite Gauss–Legendre line integrals,
//! circulation around small squares, the capped-disk integral and holonomy of
//! the pencil `d + tη`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix5, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::forms::{retraction_form, BivectorCovector};
use crate::geometry::point_geometry;
use crate::lorentz::{metric_matrix, Bivector};
use crate::spaceform::{conformal_field_unchecked, SpaceForm};
use crate::surfaces::SurfaceFamily;

/// Relative change allowed when the panel count is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Allowed drift `‖MᵀGM - G‖` of a holonomy matrix.
pub const GROUP_DRIFT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub order: usize,
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 16,
            panels: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        let q = Self { order, panels };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 8 || self.panels < 4 {
            return Err(GeometryError::InvalidQuadrature(format!(
                "need order >= 8 and panels >= 4, got {}x{}",
                self.order, self.panels
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            order: self.order,
            panels: 2 * self.panels,
        }
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of `P_n` by Newton iteration from Chebyshev guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    CoordinateU,
    CoordinateV,
    Parametric,
}

/// Smooth piece of a cycle, parametrized over `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Line {
        from: [f64; 2],
        to: [f64; 2],
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn point(&self, t: f64) -> [f64; 2] {
        match *self {
            Piece::Line { from, to } => [
                from[0] + t * (to[0] - from[0]),
                from[1] + t * (to[1] - from[1]),
            ],
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let (s, c) = (start + t * sweep).sin_cos();
                [center[0] + radius * c, center[1] + radius * s]
            }
        }
    }

    pub fn tangent(&self, t: f64) -> [f64; 2] {
        match *self {
            Piece::Line { from, to } => [to[0] - from[0], to[1] - from[1]],
            Piece::Arc {
                radius,
                start,
                sweep,
                ..
            } => {
                let (s, c) = (start + t * sweep).sin_cos();
                [-radius * sweep * s, radius * sweep * c]
            }
        }
    }

    /// Length in the parameter domain.
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to[0] - from[0]).hypot(to[1] - from[1]),
            Piece::Arc { radius, sweep, .. } => (radius * sweep).abs(),
        }
    }

    fn reversed(&self) -> Self {
        match *self {
            Piece::Line { from, to } => Piece::Line { from: to, to: from },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }
}

/// Closed curve on the surface given in parameter coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    kind: CycleKind,
    anchor: Option<f64>,
    pieces: Vec<Piece>,
}

impl Cycle {
    /// `u ↦ (u, v)` over one period of `u`.
    pub fn coordinate_u(v: f64, period: f64) -> Self {
        Self {
            kind: CycleKind::CoordinateU,
            anchor: Some(v),
            pieces: vec![Piece::Line {
                from: [0.0, v],
                to: [period, v],
            }],
        }
    }

    /// `v ↦ (u, v)` over one period of `v`.
    pub fn coordinate_v(u: f64, period: f64) -> Self {
        Self {
            kind: CycleKind::CoordinateV,
            anchor: Some(u),
            pieces: vec![Piece::Line {
                from: [u, 0.0],
                to: [u, period],
            }],
        }
    }

    /// Counterclockwise boundary of the square of side `side` centred at `center`.
    pub fn square(center: [f64; 2], side: f64) -> Self {
        let h = 0.5 * side;
        let c = [
            [center[0] - h, center[1] - h],
            [center[0] + h, center[1] - h],
            [center[0] + h, center[1] + h],
            [center[0] - h, center[1] + h],
        ];
        Self::polygon(&c)
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Self {
        let n = vertices.len();
        let pieces = (0..n)
            .map(|i| Piece::Line {
                from: vertices[i],
                to: vertices[(i + 1) % n],
            })
            .collect();
        Self {
            kind: CycleKind::Parametric,
            anchor: None,
            pieces,
        }
    }

    /// Counterclockwise circle in the parameter domain.
    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Self {
            kind: CycleKind::Parametric,
            anchor: None,
            pieces: vec![Piece::Arc {
                center,
                radius,
                start: 0.0,
                sweep: TAU,
            }],
        }
    }

    pub fn kind(&self) -> CycleKind {
        self.kind
    }

    pub fn anchor(&self) -> Option<f64> {
        self.anchor
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Domain displacement `γ(1) - γ(0)`.
    pub fn closure_gap(&self) -> [f64; 2] {
        let a = self.pieces[0].point(0.0);
        let b = self.pieces[self.pieces.len() - 1].point(1.0);
        [b[0] - a[0], b[1] - a[1]]
    }

    /// Whether the gap is a lattice vector of the given periods.
    pub fn is_closed(&self, u_period: Option<f64>, v_period: Option<f64>) -> bool {
        let gap = self.closure_gap();
        let ok = |g: f64, p: Option<f64>| {
            if g.abs() < 1e-12 {
                return true;
            }
            match p {
                Some(p) => {
                    let k = (g / p).round();
                    k != 0.0 && (g - k * p).abs() < 1e-12 * p.abs().max(1.0)
                }
                None => false,
            }
        };
        ok(gap[0], u_period) && ok(gap[1], v_period)
    }

    pub fn reversed(&self) -> Self {
        Self {
            kind: self.kind,
            anchor: self.anchor,
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }

    /// The cycle traversed `n` times.
    pub fn repeated(&self, n: usize) -> Self {
        let mut pieces = Vec::with_capacity(n * self.pieces.len());
        for _ in 0..n {
            pieces.extend_from_slice(&self.pieces);
        }
        Self {
            kind: self.kind,
            anchor: self.anchor,
            pieces,
        }
    }
}

/// `R^N`-valued 1-form evaluated at a point: values on `∂u` and `∂v`.
pub type Covector<const N: usize> = [[f64; N]; 2];

pub fn bivector_covector(b: &BivectorCovector) -> Covector<10> {
    [b.du.0, b.dv.0]
}

/// Value of an `R^N`-valued period with its convergence estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Period<const N: usize> {
    pub value: [f64; N],
    /// Max change when the panel count was doubled.
    pub change: f64,
}

/// Periods against the six Killing basis elements, with the bivector period
/// for `Λ²V`-valued forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodVector {
    pub killing: [f64; 6],
    pub raw: Option<Bivector>,
    pub change: f64,
}

fn max_abs<const N: usize>(a: &[f64; N]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Composite Gauss–Legendre of `form(γ)·γ'` over every piece, no gate.
pub fn integrate_fixed<const N: usize>(
    form: &impl Fn(f64, f64) -> Result<Covector<N>>,
    cycle: &Cycle,
    quad: &QuadratureSpec,
) -> Result<[f64; N]> {
    let gl = GaussLegendre::new(quad.order);
    let mut total = [0.0; N];
    let width = 1.0 / quad.panels as f64;
    for piece in &cycle.pieces {
        let mut piece_sum = [0.0; N];
        for p in 0..quad.panels {
            let mid = (p as f64 + 0.5) * width;
            let mut panel_sum = [0.0; N];
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let t = mid + 0.5 * width * x;
                let [u, v] = piece.point(t);
                let [du, dv] = piece.tangent(t);
                let c = form(u, v)?;
                for i in 0..N {
                    panel_sum[i] += w * (c[0][i] * du + c[1][i] * dv);
                }
            }
            for i in 0..N {
                piece_sum[i] += 0.5 * width * panel_sum[i];
            }
        }
        for i in 0..N {
            total[i] += piece_sum[i];
        }
    }
    Ok(total)
}

/// Line integral with the doubling-panels convergence gate.
pub fn line_integral<const N: usize>(
    form: &impl Fn(f64, f64) -> Result<Covector<N>>,
    cycle: &Cycle,
    quad: &QuadratureSpec,
) -> Result<Period<N>> {
    quad.validate()?;
    let coarse = integrate_fixed(form, cycle, quad)?;
    let fine = integrate_fixed(form, cycle, &quad.doubled())?;
    let mut change = 0.0f64;
    for i in 0..N {
        change = change.max((fine[i] - coarse[i]).abs());
    }
    let tolerance = CONVERGENCE_TOL * max_abs(&fine).max(1.0);
    if !(change <= tolerance) {
        return Err(GeometryError::NotConverged { change, tolerance });
    }
    Ok(Period {
        value: fine,
        change,
    })
}

/// Circulation of a form around a square, and its ratio to the area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circulation<const N: usize> {
    pub value: [f64; N],
    pub ratio: [f64; N],
}

impl<const N: usize> Circulation<N> {
    pub fn max_ratio(&self) -> f64 {
        max_abs(&self.ratio)
    }
}

pub fn circulation_residual<const N: usize>(
    form: &impl Fn(f64, f64) -> Result<Covector<N>>,
    center: [f64; 2],
    side: f64,
    quad: &QuadratureSpec,
) -> Result<Circulation<N>> {
    let value = integrate_fixed(form, &Cycle::square(center, side), quad)?;
    let area = side * side;
    let mut ratio = [0.0; N];
    for i in 0..N {
        ratio[i] = value[i] / area;
    }
    Ok(Circulation { value, ratio })
}

/// Flat disk in `R³` with boundary circle `θ ↦ c + R(cos θ e1 + sin θ e2)`,
/// where `θ = start + turn·2πt` follows the cycle parameter `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapDisk {
    pub center: Vector3<f64>,
    pub axes: [Vector3<f64>; 2],
    pub radius: f64,
    pub start: f64,
    pub turn: f64,
}

impl CapDisk {
    pub fn point(&self, rho: f64, theta: f64) -> Vector3<f64> {
        let (s, c) = theta.sin_cos();
        self.center + (self.axes[0] * c + self.axes[1] * s) * rho
    }

    pub fn boundary(&self, t: f64) -> Vector3<f64> {
        self.point(self.radius, self.start + self.turn * TAU * t)
    }
}

/// Disk spanning the meridian circle `u ↦ x(u, v)` of a surface of
/// revolution about the `e2` axis.
pub fn meridian_cap(family: &SurfaceFamily, sf: &SpaceForm, v: f64) -> Result<CapDisk> {
    let x = sf.chart_euclidean(&family.jet(sf, 0.0, v)?.x);
    let radius = x[0].hypot(x[1]);
    Ok(CapDisk {
        center: Vector3::new(0.0, 0.0, x[2]),
        axes: [Vector3::x(), Vector3::y()],
        radius,
        start: x[1].atan2(x[0]),
        turn: 1.0,
    })
}

fn det3(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    a.dot(&b.cross(c))
}

/// Capped-disk integral `∫_γ vol(N, Y, γ') - 2H ∫_D vol(Y, ∂ρ, ∂θ)` computed
/// entirely in the Euclidean chart, where the ambient orientation of the flat
/// space form is `vol = -det` in chart coordinates.
pub fn kks_integral(
    sf: &SpaceForm,
    family: &SurfaceFamily,
    cycle: &Cycle,
    y: &Bivector,
    cap: &CapDisk,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !sf.is_flat() {
        return Err(GeometryError::WrongCurvature {
            expected: "K = 0",
            got: sf.curvature(),
        });
    }
    if cycle.pieces.len() != 1 {
        return Err(GeometryError::InvalidParameters(
            "capped cycle must be a single smooth piece".into(),
        ));
    }
    let piece = cycle.pieces[0];
    let field = |p: &Vector3<f64>| -> Result<Vector3<f64>> {
        let x = sf.lift_euclidean([p[0], p[1], p[2]])?;
        let w = conformal_field_unchecked(sf, y, &x);
        Ok(Vector3::new(w[0], w[1], w[2]))
    };
    let gl = GaussLegendre::new(quad.order);
    let width = 1.0 / quad.panels as f64;
    let mut boundary = 0.0;
    let mut mismatch = 0.0f64;
    let mut h = None;
    for p in 0..quad.panels {
        let mid = (p as f64 + 0.5) * width;
        for (s, w) in gl.nodes.iter().zip(&gl.weights) {
            let t = mid + 0.5 * width * s;
            let [u, v] = piece.point(t);
            let [du, dv] = piece.tangent(t);
            let g = point_geometry(sf, &family.jet(sf, u, v)?)?;
            h.get_or_insert(g.mean_curvature());
            let f = &g.frame;
            let x0 = Vector3::new(f.x[0], f.x[1], f.x[2]);
            let n0 = Vector3::new(f.normal[0], f.normal[1], f.normal[2]);
            let tangent = Vector3::new(
                f.dx[0][0] * du + f.dx[1][0] * dv,
                f.dx[0][1] * du + f.dx[1][1] * dv,
                f.dx[0][2] * du + f.dx[1][2] * dv,
            );
            mismatch = mismatch.max((x0 - cap.boundary(t)).amax());
            boundary += 0.5 * width * w * -det3(&n0, &field(&x0)?, &tangent);
        }
    }
    if mismatch > 1e-10 {
        return Err(GeometryError::CapMismatch(mismatch));
    }
    // cap flux over (ρ, θ) ∈ [0, R] × [θ0, θ0 + 2π·turn]
    let sweep = cap.turn * TAU;
    let mut flux = 0.0;
    for pr in 0..quad.panels {
        for (sr, wr) in gl.nodes.iter().zip(&gl.weights) {
            let rho = cap.radius * ((pr as f64 + 0.5) + 0.5 * sr) * width;
            for pt in 0..quad.panels {
                for (st, wt) in gl.nodes.iter().zip(&gl.weights) {
                    let theta = cap.start + sweep * ((pt as f64 + 0.5) + 0.5 * st) * width;
                    let (sn, cs) = theta.sin_cos();
                    let d_rho = cap.axes[0] * cs + cap.axes[1] * sn;
                    let d_theta = (cap.axes[1] * cs - cap.axes[0] * sn) * rho;
                    let jac = 0.25 * width * width * cap.radius * sweep;
                    flux +=
                        wr * wt * jac * -det3(&field(&cap.point(rho, theta))?, &d_rho, &d_theta);
                }
            }
        }
    }
    Ok(boundary - 2.0 * h.unwrap_or(0.0) * flux)
}

/// Holonomy of `d + tη` around `cycle`: solves `M' = -t η(γ') M` with RK4.
pub fn holonomy_of(
    eta: &impl Fn(f64, f64) -> Result<BivectorCovector>,
    t: f64,
    cycle: &Cycle,
    step: f64,
) -> Result<Matrix5<f64>> {
    let mut m = Matrix5::identity();
    if t == 0.0 {
        return Ok(m);
    }
    let generator = |piece: &Piece, s: f64| -> Result<Matrix5<f64>> {
        let [u, v] = piece.point(s);
        let [du, dv] = piece.tangent(s);
        let e = eta(u, v)?.eval(&Vector2::new(du, dv));
        Ok(e.to_matrix() * -t)
    };
    for piece in &cycle.pieces {
        let n = (piece.length() / step).ceil().max(1.0) as usize;
        let h = 1.0 / n as f64;
        for i in 0..n {
            let s = i as f64 * h;
            let a0 = generator(piece, s)?;
            let a1 = generator(piece, s + 0.5 * h)?;
            let a2 = generator(piece, s + h)?;
            let k1 = a0 * m;
            let k2 = a1 * (m + k1 * (0.5 * h));
            let k3 = a1 * (m + k2 * (0.5 * h));
            let k4 = a2 * (m + k3 * h);
            m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
    }
    let drift = group_drift(&m);
    if drift > GROUP_DRIFT_TOL {
        return Err(GeometryError::GroupDrift(drift));
    }
    Ok(m)
}

/// Holonomy of the retraction-form pencil of a surface.
pub fn holonomy(
    sf: &SpaceForm,
    family: &SurfaceFamily,
    t: f64,
    cycle: &Cycle,
    step: f64,
) -> Result<Matrix5<f64>> {
    let eta = |u: f64, v: f64| {
        Ok(retraction_form(&point_geometry(
            sf,
            &family.jet(sf, u, v)?,
        )?))
    };
    holonomy_of(&eta, t, cycle, step)
}

/// `max |MᵀGM - G|`.
pub fn group_drift(m: &Matrix5<f64>) -> f64 {
    let g = metric_matrix();
    (m.transpose() * g * m - g).amax()
}
