//! Pointwise surface geometry computed in the ambient space `V`.
//!
//! Matrices act on coefficient columns in the coordinate frame
//! `(∂u, ∂v)`: a tangent vector `c_u ∂u + c_v ∂v` maps to `A·(c_u, c_v)ᵀ`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{GeometryError, Result};
use crate::lorentz::{det5, ip, LorentzVector, SIGNATURE};
use crate::spaceform::SpaceForm;
use crate::surfaces::{Jet3, SurfaceJet};

/// A point is umbilic when `|A0|_F < UMBILIC_RATIO · |I⁻¹II|_F`.
pub const UMBILIC_RATIO: f64 = 1e-8;

/// First-order data of an oriented immersion at a point: everything the
/// moment forms need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub x: LorentzVector,
    pub dx: [LorentzVector; 2],
    pub normal: LorentzVector,
    pub mean_curvature: f64,
    pub metric: Matrix2<f64>,
}

impl Frame {
    /// `dx(c)` for coefficient column `c`.
    pub fn push(&self, c: &Vector2<f64>) -> LorentzVector {
        self.dx[0] * c[0] + self.dx[1] * c[1]
    }

    pub fn area_density(&self) -> f64 {
        self.metric.determinant().sqrt()
    }

    /// Coefficients of the tangential projection of an ambient vector.
    pub fn tangential_coefficients(&self, w: &LorentzVector) -> Vector2<f64> {
        let rhs = Vector2::new(ip(w, &self.dx[0]), ip(w, &self.dx[1]));
        self.metric.try_inverse().expect("immersed frame") * rhs
    }

    /// Complex structure: rotation by a right angle in the tangent plane,
    /// positive with respect to the orientation.
    pub fn complex_structure(&self) -> Matrix2<f64> {
        let g = &self.metric;
        let s = self.area_density();
        Matrix2::new(-g[(0, 1)], -g[(1, 1)], g[(0, 0)], g[(0, 1)]) / s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointGeometry {
    pub frame: Frame,
    /// Second fundamental form `II_ab = <x_ab, N>`.
    pub second_form: Matrix2<f64>,
    /// Shape operator `A = I⁻¹ II`.
    pub shape: Matrix2<f64>,
    /// Trace-free shape operator `A0 = A - H·Id`.
    pub trace_free_shape: Matrix2<f64>,
    /// Real part of twice the Hopf differential, `Q = II - H·I`.
    pub hopf: Matrix2<f64>,
    /// `Q♯ = I⁻¹ Q`.
    pub hopf_sharp: Matrix2<f64>,
}

impl PointGeometry {
    pub fn metric(&self) -> Matrix2<f64> {
        self.frame.metric
    }

    pub fn normal(&self) -> LorentzVector {
        self.frame.normal
    }

    pub fn mean_curvature(&self) -> f64 {
        self.frame.mean_curvature
    }

    pub fn is_umbilic(&self) -> bool {
        self.trace_free_shape.norm() < UMBILIC_RATIO * self.shape.norm().max(f64::MIN_POSITIVE)
    }
}

/// The vector `n` with `<n, w> = det5(a, b, c, d, w)` for all `w`.
pub fn dual_of_four(
    a: &LorentzVector,
    b: &LorentzVector,
    c: &LorentzVector,
    d: &LorentzVector,
) -> LorentzVector {
    LorentzVector(std::array::from_fn(|i| {
        SIGNATURE[i] * det5([a, b, c, d, &LorentzVector::basis(i)]).0
    }))
}

/// Oriented unit normal: `det5(x, q, N, xu, xv) > 0`.
pub fn oriented_normal(
    sf: &SpaceForm,
    x: &LorentzVector,
    xu: &LorentzVector,
    xv: &LorentzVector,
) -> LorentzVector {
    let n = dual_of_four(x, &sf.q(), xu, xv);
    n * (1.0 / ip(&n, &n).sqrt())
}

pub fn point_geometry(sf: &SpaceForm, j: &SurfaceJet) -> Result<PointGeometry> {
    let metric = Matrix2::new(
        ip(&j.xu, &j.xu),
        ip(&j.xu, &j.xv),
        ip(&j.xv, &j.xu),
        ip(&j.xv, &j.xv),
    );
    let det = metric.determinant();
    if !(det > 0.0) {
        return Err(GeometryError::DegenerateMetric(det));
    }
    let normal = oriented_normal(sf, &j.x, &j.xu, &j.xv);
    let second_form = Matrix2::new(
        ip(&j.xuu, &normal),
        ip(&j.xuv, &normal),
        ip(&j.xuv, &normal),
        ip(&j.xvv, &normal),
    );
    let inv = metric
        .try_inverse()
        .ok_or(GeometryError::DegenerateMetric(det))?;
    let shape = inv * second_form;
    let h = 0.5 * shape.trace();
    let trace_free_shape = shape - Matrix2::identity() * h;
    let hopf = second_form - metric * h;
    let hopf_sharp = inv * hopf;
    Ok(PointGeometry {
        frame: Frame {
            x: j.x,
            dx: [j.xu, j.xv],
            normal,
            mean_curvature: h,
            metric,
        },
        second_form,
        shape,
        trace_free_shape,
        hopf,
        hopf_sharp,
    })
}

/// `max |Q(A·∂a, ∂b) - Q(∂a, A·∂b)|` over the coordinate frame.
pub fn hopf_commutes_residual(g: &PointGeometry) -> f64 {
    let lhs = g.shape.transpose() * g.hopf;
    let rhs = g.hopf * g.shape;
    (lhs - rhs).abs().max()
}

/// Normal and its first and second coordinate derivatives, by differentiating
/// the normalized dual of `(x, q, xu, xv)` with the product rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalJet {
    pub n: LorentzVector,
    pub d1: [LorentzVector; 2],
    /// `[N_uu, N_uv, N_vv]`
    pub d2: [LorentzVector; 3],
}

impl NormalJet {
    pub fn second(&self, a: usize, b: usize) -> LorentzVector {
        self.d2[a + b]
    }
}

pub fn normal_jet(sf: &SpaceForm, j: &Jet3) -> NormalJet {
    let q = sf.q();
    // n = C(x, xu, xv) with C trilinear
    let c = |a: &LorentzVector, b: &LorentzVector, d: &LorentzVector| dual_of_four(a, &q, b, d);
    let x = j.d0;
    let xa = |a: usize| j.first(a);
    let xab = |a: usize, b: usize| j.second(a, b);
    let xabc = |a: usize, b: usize, e: usize| j.third(a, b, e);

    let n = c(&x, &xa(0), &xa(1));
    let n1 = |a: usize| {
        c(&xa(a), &xa(0), &xa(1)) + c(&x, &xab(0, a), &xa(1)) + c(&x, &xa(0), &xab(1, a))
    };
    let n2 = |a: usize, b: usize| {
        // ∂_b of each term in n1(a)
        c(&xab(a, b), &xa(0), &xa(1))
            + c(&xa(a), &xab(0, b), &xa(1))
            + c(&xa(a), &xa(0), &xab(1, b))
            + c(&xa(b), &xab(0, a), &xa(1))
            + c(&x, &xabc(0, a, b), &xa(1))
            + c(&x, &xab(0, a), &xab(1, b))
            + c(&xa(b), &xa(0), &xab(1, a))
            + c(&x, &xab(0, b), &xab(1, a))
            + c(&x, &xa(0), &xabc(1, a, b))
    };
    let dn = [n1(0), n1(1)];
    let ddn = [n2(0, 0), n2(0, 1), n2(1, 1)];

    // N = n / s with s = <n,n>^{1/2}
    let nn = ip(&n, &n);
    let s = nn.sqrt();
    let s1 = |a: usize| ip(&n, &dn[a]) / s;
    let idx = |a: usize, b: usize| a + b;
    let s2 =
        |a: usize, b: usize| (ip(&dn[b], &dn[a]) + ip(&n, &ddn[idx(a, b)])) / s - s1(a) * s1(b) / s;
    let big_n = n * (1.0 / s);
    let d1 = [0, 1].map(|a| dn[a] * (1.0 / s) - n * (s1(a) / nn));
    let second = |a: usize, b: usize| {
        ddn[idx(a, b)] * (1.0 / s)
            - dn[a] * (s1(b) / nn)
            - dn[b] * (s1(a) / nn)
            - n * (s2(a, b) / nn)
            + n * (2.0 * s1(a) * s1(b) / (nn * s))
    };
    NormalJet {
        n: big_n,
        d1,
        d2: [second(0, 0), second(0, 1), second(1, 1)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{FamilySpec, SurfaceFamily};
    use approx::assert_abs_diff_eq;

    fn geometry_at(spec: FamilySpec, u: f64, v: f64) -> (SpaceForm, PointGeometry) {
        let fam = SurfaceFamily::new(spec).unwrap();
        let sf = SpaceForm::new(fam.curvature());
        let j = fam.jet(&sf, u, v).unwrap();
        (sf, point_geometry(&sf, &j).unwrap())
    }

    #[test]
    fn normal_invariants_and_orientation() {
        let (sf, g) = geometry_at(
            FamilySpec::Unduloid {
                mean_curvature: 1.0,
                necksize: 0.3,
            },
            0.4,
            0.9,
        );
        let f = &g.frame;
        let n = f.normal;
        assert_abs_diff_eq!(ip(&n, &n), 1.0, epsilon = 1e-12);
        for w in [f.x, sf.q(), f.dx[0], f.dx[1]] {
            assert_abs_diff_eq!(ip(&n, &w), 0.0, epsilon = 1e-12);
        }
        assert!(det5([&f.dx[0], &f.dx[1], &n, &f.x, &sf.q()]).0 > 0.0);
        assert!(g.hopf_sharp.trace().abs() < 1e-12);
    }

    #[test]
    fn sphere_is_totally_umbilic() {
        let (_, g) = geometry_at(
            FamilySpec::Sphere {
                radius: 1.0,
                curvature: 0.0,
            },
            1.0,
            0.3,
        );
        assert_abs_diff_eq!(g.mean_curvature(), 1.0, epsilon = 1e-12);
        assert!(g.trace_free_shape.norm() < 1e-12);
        assert!(g.is_umbilic());
        assert_eq!(
            hopf_commutes_residual(&g),
            0.0_f64.max(hopf_commutes_residual(&g))
        );
        assert!(hopf_commutes_residual(&g) < 1e-12);
    }

    #[test]
    fn cylinder_principal_curvatures() {
        let (_, g) = geometry_at(FamilySpec::Cylinder { radius: 1.0 }, 0.8, 0.1);
        assert_abs_diff_eq!(g.mean_curvature(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(g.trace_free_shape.determinant(), -0.25, epsilon = 1e-12);
        let ev = g.shape.symmetric_eigenvalues();
        let (lo, hi) = (ev.min(), ev.max());
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
        assert!(hopf_commutes_residual(&g) < 1e-12);
        assert!(!g.is_umbilic());
    }

    #[test]
    fn clifford_torus_is_minimal() {
        let (_, g) = geometry_at(
            FamilySpec::ProductTorusS3 {
                radius: std::f64::consts::FRAC_1_SQRT_2,
                curvature: 1.0,
            },
            0.3,
            1.7,
        );
        assert_abs_diff_eq!(g.mean_curvature(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn weingarten_by_finite_differences() {
        let fam = SurfaceFamily::new(FamilySpec::Cylinder { radius: 1.0 }).unwrap();
        let sf = SpaceForm::new(0.0);
        let h = 1e-4;
        let (u, v) = (0.6, -0.3);
        let g = point_geometry(&sf, &fam.jet(&sf, u, v).unwrap()).unwrap();
        let nat = |u: f64, v: f64| {
            point_geometry(&sf, &fam.jet(&sf, u, v).unwrap())
                .unwrap()
                .normal()
        };
        let fd = [
            (nat(u + h, v) - nat(u - h, v)) * (0.5 / h),
            (nat(u, v + h) - nat(u, v - h)) * (0.5 / h),
        ];
        for a in 0..2 {
            let col = g.shape.column(a).into_owned();
            let expected = -g.frame.push(&col);
            assert!((fd[a] - expected).max_abs() < 1e-6);
        }
    }

    #[test]
    fn normal_jet_matches_finite_differences() {
        let fam = SurfaceFamily::new(FamilySpec::Unduloid {
            mean_curvature: 1.0,
            necksize: 0.3,
        })
        .unwrap();
        let sf = SpaceForm::new(0.0);
        let (u, v) = (1.1, 0.7);
        let h = 1e-4;
        let nj = |u: f64, v: f64| normal_jet(&sf, &fam.jet3(&sf, u, v).unwrap());
        let c = nj(u, v);
        let g = point_geometry(&sf, &fam.jet(&sf, u, v).unwrap()).unwrap();
        assert!((c.n - g.normal()).max_abs() < 1e-14);
        let (pu, mu, pv, mv) = (nj(u + h, v), nj(u - h, v), nj(u, v + h), nj(u, v - h));
        assert!(((pu.n - mu.n) * (0.5 / h) - c.d1[0]).max_abs() < 1e-6);
        assert!(((pv.n - mv.n) * (0.5 / h) - c.d1[1]).max_abs() < 1e-6);
        assert!(((pu.d1[0] - mu.d1[0]) * (0.5 / h) - c.d2[0]).max_abs() < 1e-6);
        assert!(((pv.d1[0] - mv.d1[0]) * (0.5 / h) - c.d2[1]).max_abs() < 1e-6);
        assert!(((pu.d1[1] - mu.d1[1]) * (0.5 / h) - c.d2[1]).max_abs() < 1e-6);
        assert!(((pv.d1[1] - mv.d1[1]) * (0.5 / h) - c.d2[2]).max_abs() < 1e-6);
    }

    #[test]
    fn degenerate_metric_rejected() {
        let sf = SpaceForm::new(0.0);
        let x = sf.origin();
        let j = SurfaceJet {
            x,
            xu: LorentzVector::basis(0),
            xv: LorentzVector::basis(0),
            xuu: LorentzVector::ZERO,
            xuv: LorentzVector::ZERO,
            xvv: LorentzVector::ZERO,
        };
        assert!(matches!(
            point_geometry(&sf, &j),
            Err(GeometryError::DegenerateMetric(_))
        ));
    }
}
