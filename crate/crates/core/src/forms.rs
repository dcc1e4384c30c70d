//! Lie-algebra and vector valued 1-forms on a surface, evaluated pointwise in
//! the coordinate coframe `(du, dv)`.
//!
//! Every form is returned as its values on `∂u` and `∂v`.

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::geometry::{Frame, PointGeometry};
use crate::lorentz::{apply, b_form, ip, wedge, Bivector, LorentzVector, SPairing};
use crate::spaceform::{conformal_field_unchecked, KillingBasis, SpaceForm};

/// A `Λ²V`-valued 1-form at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BivectorCovector {
    pub du: Bivector,
    pub dv: Bivector,
}

impl BivectorCovector {
    pub fn get(&self, a: usize) -> Bivector {
        if a == 0 {
            self.du
        } else {
            self.dv
        }
    }

    /// Value on the tangent vector with coefficients `c`.
    pub fn eval(&self, c: &Vector2<f64>) -> Bivector {
        self.du * c[0] + self.dv * c[1]
    }

    /// Pair each value with `Y` through `f`.
    pub fn pair(&self, f: impl Fn(&Bivector) -> f64) -> [f64; 2] {
        [f(&self.du), f(&self.dv)]
    }
}

impl std::ops::Sub for BivectorCovector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            du: self.du - rhs.du,
            dv: self.dv - rhs.dv,
        }
    }
}

/// An `R³`-valued 1-form at a point, in the chart frame `e0, e1, e2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector3Covector {
    pub du: Vector3<f64>,
    pub dv: Vector3<f64>,
}

fn chart3(v: &LorentzVector) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// `η(∂) = x ∧ dx(Q♯ ∂)`.
pub fn retraction_form(g: &PointGeometry) -> BivectorCovector {
    let f = &g.frame;
    let col = |a: usize| f.push(&g.hopf_sharp.column(a).into_owned());
    BivectorCovector {
        du: wedge(&f.x, &col(0)),
        dv: wedge(&f.x, &col(1)),
    }
}

/// `Q(Y^⊤, ∂)`, the retraction form paired with `Y` from its definition.
pub fn retraction_pairing(sf: &SpaceForm, g: &PointGeometry, y: &Bivector) -> [f64; 2] {
    let f = &g.frame;
    let yx = conformal_field_unchecked(sf, y, &f.x);
    let c = f.tangential_coefficients(&yx);
    let row = c.transpose() * g.hopf;
    [row[0], row[1]]
}

/// `η(∂) q`, which equals `∂(N + Hx)` on CMC surfaces.
pub fn eta_q_component(sf: &SpaceForm, g: &PointGeometry) -> [LorentzVector; 2] {
    let eta = retraction_form(g);
    let q = sf.q();
    [apply(&eta.du, &q), apply(&eta.dv, &q)]
}

/// `α^o(∂) = (x - o) ∧ dx(∂)`.
pub fn alpha_o_form(sf: &SpaceForm, f: &Frame) -> BivectorCovector {
    alpha_with_origin(&sf.origin(), f)
}

/// `α^p` for an arbitrary `p ∈ E_q`.
pub fn alpha_with_origin(origin: &LorentzVector, f: &Frame) -> BivectorCovector {
    let r = f.x - *origin;
    BivectorCovector {
        du: wedge(&r, &f.dx[0]),
        dv: wedge(&r, &f.dx[1]),
    }
}

/// `dx ∧ (N + Hx)`, cohomologous to the retraction form on CMC surfaces.
pub fn retraction_form_representative(f: &Frame) -> BivectorCovector {
    let w = f.normal + f.x * f.mean_curvature;
    BivectorCovector {
        du: wedge(&f.dx[0], &w),
        dv: wedge(&f.dx[1], &w),
    }
}

/// `i_{Y^⊤} vol_x` from the induced metric: with `Y^⊤ = c_u ∂u + c_v ∂v`,
/// `vol_x(Y^⊤, ∂u) = -c_v √g` and `vol_x(Y^⊤, ∂v) = c_u √g`.
pub fn volume_contraction(sf: &SpaceForm, f: &Frame, y: &Bivector) -> [f64; 2] {
    let yx = conformal_field_unchecked(sf, y, &f.x);
    let c = f.tangential_coefficients(&yx);
    let s = f.area_density();
    [-c[1] * s, c[0] * s]
}

/// `i_{Y^⊤} vol_x - 2H x*α_Y`, with `α_Y` represented by `½ S(α^o)(Y)`.
pub fn moment_rep_classical(sf: &SpaceForm, s: &SPairing, f: &Frame, y: &Bivector) -> [f64; 2] {
    let vol = volume_contraction(sf, f, y);
    let alpha = alpha_o_form(sf, f);
    let h = f.mean_curvature;
    [
        vol[0] - h * s.eval(&alpha.du, y),
        vol[1] - h * s.eval(&alpha.dv, y),
    ]
}

/// `S(dx ∧ (N + Hx))(Y)`.
pub fn moment_rep_via_s(s: &SPairing, f: &Frame, y: &Bivector) -> [f64; 2] {
    retraction_form_representative(f).pair(|b| s.eval(b, y))
}

/// `S(η)(Y)` applied to the retraction form itself.
pub fn s_of_retraction(s: &SPairing, g: &PointGeometry, y: &Bivector) -> [f64; 2] {
    retraction_form(g).pair(|b| s.eval(b, y))
}

/// Classical representative paired with every Killing basis element:
/// `out[a][i]` is the value on `∂_a` against `Y_i`.
pub fn moment_classical_on_basis(
    sf: &SpaceForm,
    s: &SPairing,
    f: &Frame,
    basis: &KillingBasis,
) -> [[f64; 6]; 2] {
    let mut out = [[0.0; 6]; 2];
    for (i, y) in basis.iter().enumerate() {
        let v = moment_rep_classical(sf, s, f, y);
        out[0][i] = v[0];
        out[1][i] = v[1];
    }
    out
}

pub fn moment_via_s_on_basis(s: &SPairing, f: &Frame, basis: &KillingBasis) -> [[f64; 6]; 2] {
    let mut out = [[0.0; 6]; 2];
    for (i, y) in basis.iter().enumerate() {
        let v = moment_rep_via_s(s, f, y);
        out[0][i] = v[0];
        out[1][i] = v[1];
    }
    out
}

/// Euclidean chart data `(x0, N0)` of a frame in the flat space form.
pub fn euclidean_chart(f: &Frame) -> (Vector3<f64>, Vector3<f64>) {
    (chart3(&f.x), chart3(&f.normal))
}

/// Flux form `dx0 × (N0 + H x0)` with the cross product of `R³`.
pub fn flux_form(f: &Frame) -> Vector3Covector {
    let (x0, n0) = euclidean_chart(f);
    let w = n0 + x0 * f.mean_curvature;
    Vector3Covector {
        du: chart3(&f.dx[0]).cross(&w),
        dv: chart3(&f.dx[1]).cross(&w),
    }
}

/// Torque form `-(N0∧dx0)x0 - H|x0|² dx0`, with
/// `(N0∧dx0)x0 = <N0,x0>dx0 - <dx0,x0>N0`.
pub fn torque_form(f: &Frame) -> Vector3Covector {
    let (x0, n0) = euclidean_chart(f);
    let h = f.mean_curvature;
    let term = |d: Vector3<f64>| -(d * n0.dot(&x0) - n0 * d.dot(&x0)) - d * (h * x0.dot(&x0));
    Vector3Covector {
        du: term(chart3(&f.dx[0])),
        dv: term(chart3(&f.dx[1])),
    }
}

/// Hodge star of `dx`: `(*dx)(∂) = -dx(J∂)`.
pub fn hodge_star_dx(f: &Frame) -> [LorentzVector; 2] {
    let j: Matrix2<f64> = f.complex_structure();
    [
        -f.push(&j.column(0).into_owned()),
        -f.push(&j.column(1).into_owned()),
    ]
}

/// Moment form `(K x0 - H N) ∧ *dx0` for `K != 0`, where `x0 = x - o`.
pub fn moment_form_pseudosphere(sf: &SpaceForm, f: &Frame) -> BivectorCovector {
    let x0 = f.x - sf.origin();
    let lead = x0 * sf.curvature() - f.normal * f.mean_curvature;
    let star = hodge_star_dx(f);
    BivectorCovector {
        du: wedge(&lead, &star[0]),
        dv: wedge(&lead, &star[1]),
    }
}

/// Metric on `Λ²q^⊥` induced from `q^⊥`: `<a∧b, c∧d> = <a,c><b,d> - <a,d><b,c>`,
/// which is `-B`.
pub fn complement_pairing(y1: &Bivector, y2: &Bivector) -> f64 {
    -b_form(y1, y2)
}

/// Pairing of the moment form with `Y`: the `q^⊥` metric scaled by `-sgn K`,
/// which matches the classical representative with the orientation used here.
pub fn moment_form_pairing(sf: &SpaceForm, m: &Bivector, y: &Bivector) -> f64 {
    -sf.curvature().signum() * complement_pairing(m, y)
}

/// [`moment_form_pseudosphere`] paired with every Killing basis element.
pub fn moment_form_on_basis(sf: &SpaceForm, f: &Frame, basis: &KillingBasis) -> [[f64; 6]; 2] {
    let m = moment_form_pseudosphere(sf, f);
    let mut out = [[0.0; 6]; 2];
    for (i, y) in basis.iter().enumerate() {
        out[0][i] = moment_form_pairing(sf, &m.du, y);
        out[1][i] = moment_form_pairing(sf, &m.dv, y);
    }
    out
}

/// Killing fields of `R³` with closed-form `α_Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EuclideanKilling {
    /// Constant field `Y(p) = v`.
    Translation(Vector3<f64>),
    /// Rotation about the origin, `Y(p) = ω × p`.
    Rotation(Vector3<f64>),
}

impl EuclideanKilling {
    pub fn field(&self, p: &Vector3<f64>) -> Vector3<f64> {
        match self {
            EuclideanKilling::Translation(v) => *v,
            EuclideanKilling::Rotation(w) => w.cross(p),
        }
    }
}

/// `α_Y(v) = c · vol(Y(x0), x0, v)` with `c = 1/2` for translations and
/// `c = 1/3` for rotations, so that `dα_Y = i_Y vol`.
pub fn alpha_y_euclidean(y: &EuclideanKilling, x0: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    let c = match y {
        EuclideanKilling::Translation(_) => 0.5,
        EuclideanKilling::Rotation(_) => 1.0 / 3.0,
    };
    c * y.field(x0).cross(x0).dot(v)
}

/// `<η(∂)q>`-free check helper: `|b_form(Y, η(∂)) - Q(Y^⊤, ∂)|`.
pub fn retraction_cross_check(sf: &SpaceForm, g: &PointGeometry, y: &Bivector) -> f64 {
    let eta = retraction_form(g);
    let direct = eta.pair(|b| b_form(y, b));
    let defn = retraction_pairing(sf, g, y);
    (direct[0] - defn[0]).abs().max((direct[1] - defn[1]).abs())
}

/// `ip(Y(x), dx(∂))` for each coordinate vector.
pub fn killing_on_frame(sf: &SpaceForm, f: &Frame, y: &Bivector) -> [f64; 2] {
    let yx = conformal_field_unchecked(sf, y, &f.x);
    [ip(&yx, &f.dx[0]), ip(&yx, &f.dx[1])]
}
