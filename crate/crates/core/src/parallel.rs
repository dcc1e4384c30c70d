//! The parallel CMC surface `x̂ = (N + Hx + q/m)/(m - H)` with
//! `m² - 2Hm - K = 0`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::calculus::{circulation_residual, line_integral, Cycle, QuadratureSpec};
use crate::error::{GeometryError, Result};
use crate::forms::{moment_classical_on_basis, retraction_form};
use crate::geometry::{normal_jet, point_geometry, PointGeometry};
use crate::lorentz::{wedge, LorentzVector, SPairing};
use crate::spaceform::SpaceForm;
use crate::surfaces::{Jet3, SurfaceFamily, SurfaceJet};

/// Tolerance on the quadratic `m² - 2Hm - K`.
const ROOT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectedRoot {
    pub m: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MRoots {
    /// Admissible roots, preferred first.
    pub roots: Vec<f64>,
    pub rejected: Vec<RejectedRoot>,
}

/// Roots `H ± √(H² + K)`, without `0` and `H`. For `K < 0` the root of
/// largest modulus comes first.
pub fn m_roots(h: f64, k: f64) -> Result<MRoots> {
    let disc = h * h + k;
    if disc < 0.0 {
        return Err(GeometryError::NoParallelSurface(disc));
    }
    let r = disc.sqrt();
    let mut cands = if r == 0.0 {
        vec![h]
    } else {
        vec![h + r, h - r]
    };
    if k < 0.0 {
        cands.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    }
    let scale = 1e-12 * h.abs().max(k.abs().sqrt()).max(1.0);
    let mut out = MRoots::default();
    for m in cands {
        if m.abs() <= scale {
            out.rejected.push(RejectedRoot {
                m,
                reason: "m = 0".into(),
            });
        } else if (m - h).abs() <= scale {
            out.rejected.push(RejectedRoot {
                m,
                reason: "m = H".into(),
            });
        } else {
            out.roots.push(m);
        }
    }
    Ok(out)
}

/// Admissible `m` together with `m - H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelData {
    pub m: f64,
    pub m_minus_h: f64,
}

impl ParallelData {
    pub fn new(h: f64, k: f64, m: f64) -> Result<Self> {
        let defect = m * m - 2.0 * h * m - k;
        if defect.abs() > ROOT_TOL * (m * m).max(k.abs()).max(1.0) {
            return Err(GeometryError::InvalidParameters(format!(
                "m = {m} does not solve m² - 2Hm - K = 0 (defect {defect:e})"
            )));
        }
        let d = m - h;
        if m == 0.0 || d == 0.0 {
            return Err(GeometryError::InvalidParameters(format!(
                "m = {m} is excluded (0 or H)"
            )));
        }
        Ok(Self { m, m_minus_h: d })
    }
}

/// `(N + Hx + q/m)/(m - H)` from zeroth-order data.
pub fn parallel_point(
    sf: &SpaceForm,
    x: &LorentzVector,
    n: &LorentzVector,
    h: f64,
    m: f64,
) -> LorentzVector {
    (*n + *x * h + sf.q() * (1.0 / m)) * (1.0 / (m - h))
}

/// `N̂ = (Kx - HN - q)/(m - H)`.
pub fn parallel_normal(
    sf: &SpaceForm,
    x: &LorentzVector,
    n: &LorentzVector,
    h: f64,
    m: f64,
) -> LorentzVector {
    (*x * sf.curvature() - *n * h - sf.q()) * (1.0 / (m - h))
}

/// Second-order jet of `x̂`, with `x̂_a = (N_a + H x_a)/(m - H)` and likewise
/// for second derivatives, using the constant mean curvature at the point.
pub fn parallel_jet(sf: &SpaceForm, j: &Jet3, m: f64) -> Result<SurfaceJet> {
    let g = point_geometry(sf, &j.surface_jet())?;
    if g.is_umbilic() {
        return Err(GeometryError::Umbilic(g.trace_free_shape.norm()));
    }
    let h = g.mean_curvature();
    let data = ParallelData::new(h, sf.curvature(), m)?;
    let nj = normal_jet(sf, j);
    let s = 1.0 / data.m_minus_h;
    let lift = |n: LorentzVector, x: LorentzVector| (n + x * h) * s;
    Ok(SurfaceJet {
        x: parallel_point(sf, &j.d0, &nj.n, h, m),
        xu: lift(nj.d1[0], j.first(0)),
        xv: lift(nj.d1[1], j.first(1)),
        xuu: lift(nj.second(0, 0), j.second(0, 0)),
        xuv: lift(nj.second(0, 1), j.second(0, 1)),
        xvv: lift(nj.second(1, 1), j.second(1, 1)),
    })
}

/// `x` and `x̂` geometry at one parameter point.
pub struct ParallelPoint {
    pub base: PointGeometry,
    pub dual: PointGeometry,
    pub dual_jet: SurfaceJet,
    pub predicted_normal: LorentzVector,
}

pub fn parallel_point_geometry(
    sf: &SpaceForm,
    family: &SurfaceFamily,
    m: f64,
    u: f64,
    v: f64,
) -> Result<ParallelPoint> {
    let j3 = family.jet3(sf, u, v)?;
    let base = point_geometry(sf, &j3.surface_jet())?;
    let dual_jet = parallel_jet(sf, &j3, m)?;
    let dual = point_geometry(sf, &dual_jet)?;
    let predicted_normal = parallel_normal(
        sf,
        &base.frame.x,
        &base.frame.normal,
        base.mean_curvature(),
        m,
    );
    Ok(ParallelPoint {
        base,
        dual,
        dual_jet,
        predicted_normal,
    })
}

/// Maximal residuals of the parallel-surface identities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParallelReport {
    pub m: f64,
    /// `|⟨x̂,x̂⟩| + |⟨x̂,q⟩ + 1|`
    pub membership: f64,
    /// `x̂_a + dx(A0 ∂a)/(m - H)`
    pub derivative: f64,
    /// `N̂` against the oriented normal of `x̂`
    pub normal: f64,
    /// `Î - (-det A0)/(m - H)² I`, relative to `|I|`
    pub conformality: f64,
    /// `Î - (-det A0) I` without the `(m - H)²` factor; vanishes only when
    /// `|m - H| = 1`
    pub conformality_unscaled: f64,
    pub mean_curvature: f64,
    /// `Â0 - (H² + K) A0⁻¹`
    pub trace_free_shape: f64,
    pub hopf: f64,
    /// Relative difference of the moment periods of `x` and `x̂`.
    pub periods: f64,
    /// Max circulation ratio of `η_x - η_x̂ - (m - H) d(x̂ ∧ x)`.
    pub offset_circulation: f64,
    /// Pointwise residual of the same identity.
    pub offset_pointwise: f64,
    /// `x̂` built again from `x̂` with the same `m`, against `x`.
    pub double_parallel: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn mat_rel(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    (a - b).amax() / a.amax().max(b.amax()).max(1.0)
}

/// Residual of `η_x - η_x̂ - (m - H) d(x̂ ∧ x)` on both coordinate vectors.
fn offset_residual(p: &ParallelPoint, m: f64) -> [[f64; 10]; 2] {
    let d = m - p.base.mean_curvature();
    let eta = retraction_form(&p.base);
    let eta_hat = retraction_form(&p.dual);
    let x = p.base.frame.x;
    let xh = p.dual.frame.x;
    let mut out = [[0.0; 10]; 2];
    for (a, row) in out.iter_mut().enumerate() {
        let exact = wedge(&p.dual.frame.dx[a], &x) + wedge(&xh, &p.base.frame.dx[a]);
        *row = (eta.get(a) - eta_hat.get(a) - exact * d).0;
    }
    out
}

/// Check the parallel-surface identities at `points` and the equality of the
/// moment periods over `cycles`.
pub fn verify_parallel(
    sf: &SpaceForm,
    family: &SurfaceFamily,
    m: f64,
    points: &[(f64, f64)],
    cycles: &[Cycle],
    quad: &QuadratureSpec,
    circulation_side: f64,
) -> Result<ParallelReport> {
    let k = sf.curvature();
    let mut r = ParallelReport {
        m,
        ..Default::default()
    };
    for &(u, v) in points {
        let p = parallel_point_geometry(sf, family, m, u, v)?;
        let (b, dh) = (&p.base, &p.dual);
        let h = b.mean_curvature();
        let d = m - h;
        let xh = dh.frame.x;
        r.membership = r
            .membership
            .max(xh.ip(&xh).abs() + (xh.ip(&sf.q()) + 1.0).abs());
        for a in 0..2 {
            let col = b.trace_free_shape.column(a).into_owned();
            let predicted = -b.frame.push(&col) * (1.0 / d);
            r.derivative = r.derivative.max((dh.frame.dx[a] - predicted).max_abs());
        }
        r.normal = r
            .normal
            .max((dh.frame.normal - p.predicted_normal).max_abs());
        let scale = -b.trace_free_shape.determinant();
        r.conformality = r.conformality.max(mat_rel(
            &dh.frame.metric,
            &(b.frame.metric * (scale / (d * d))),
        ));
        r.conformality_unscaled = r
            .conformality_unscaled
            .max(mat_rel(&dh.frame.metric, &(b.frame.metric * scale)));
        r.mean_curvature = r.mean_curvature.max(rel(dh.mean_curvature(), h));
        let inv = b
            .trace_free_shape
            .try_inverse()
            .ok_or(GeometryError::Umbilic(0.0))?;
        r.trace_free_shape = r
            .trace_free_shape
            .max(mat_rel(&dh.trace_free_shape, &(inv * (h * h + k))));
        r.hopf = r.hopf.max(mat_rel(&dh.hopf, &b.hopf));
        let off = offset_residual(&p, m);
        r.offset_pointwise = r
            .offset_pointwise
            .max(off.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs())));
        let back = parallel_point(sf, &xh, &dh.frame.normal, dh.mean_curvature(), m);
        r.double_parallel = r.double_parallel.max((back - b.frame.x).max_abs());
        let form = |u: f64, v: f64| {
            Ok(offset_residual(
                &parallel_point_geometry(sf, family, m, u, v)?,
                m,
            ))
        };
        let c = circulation_residual(&form, [u, v], circulation_side, quad)?;
        r.offset_circulation = r.offset_circulation.max(c.max_ratio());
    }
    let s = SPairing::new(sf.origin());
    let basis = sf.killing_basis();
    for cycle in cycles {
        let base = |u: f64, v: f64| {
            let g = point_geometry(sf, &family.jet(sf, u, v)?)?;
            Ok(moment_classical_on_basis(sf, &s, &g.frame, &basis))
        };
        let dual = |u: f64, v: f64| {
            let p = parallel_point_geometry(sf, family, m, u, v)?;
            Ok(moment_classical_on_basis(sf, &s, &p.dual.frame, &basis))
        };
        let a = line_integral(&base, cycle, quad)?.value;
        let b = line_integral(&dual, cycle, quad)?.value;
        for i in 0..6 {
            r.periods = r.periods.max(rel(a[i], b[i]));
        }
    }
    Ok(r)
}

/// `x̂₊ + R(x̂₋)` for the two roots, with `R` the reflection orthogonal to `q`;
/// vanishes for `K != 0`.
pub fn reflection_residual(sf: &SpaceForm, family: &SurfaceFamily, u: f64, v: f64) -> Result<f64> {
    let g = point_geometry(sf, &family.jet(sf, u, v)?)?;
    let h = g.mean_curvature();
    let roots = m_roots(h, sf.curvature())?;
    if roots.roots.len() != 2 {
        return Err(GeometryError::InvalidParameters(format!(
            "need two admissible roots, got {}",
            roots.roots.len()
        )));
    }
    let (x, n) = (g.frame.x, g.frame.normal);
    let plus = parallel_point(sf, &x, &n, h, roots.roots[0]);
    let minus = parallel_point(sf, &x, &n, h, roots.roots[1]);
    Ok((plus + sf.reflect(&minus)).max_abs())
}

/// `x̂` built from `x̂` with the conjugate root `2H - m`, in the form
/// `-x + c q`; returns `(|x̂̂ + x - c q|, c)`.
pub fn conjugate_double_parallel(
    sf: &SpaceForm,
    family: &SurfaceFamily,
    m: f64,
    u: f64,
    v: f64,
) -> Result<(f64, f64)> {
    let p = parallel_point_geometry(sf, family, m, u, v)?;
    let h = p.base.mean_curvature();
    let back = parallel_point(sf, &p.dual.frame.x, &p.dual.frame.normal, h, 2.0 * h - m);
    let diff = back + p.base.frame.x;
    // diff is a multiple of q; <diff, o> = -c
    let c = -diff.ip(&sf.origin());
    Ok(((diff - sf.q() * c).max_abs(), c))
}

/// Whether `x̂` lies on the same sheet of the hyperboloid as `x` (`K < 0`).
pub fn same_sheet(sf: &SpaceForm, family: &SurfaceFamily, m: f64, u: f64, v: f64) -> Result<bool> {
    let p = parallel_point_geometry(sf, family, m, u, v)?;
    let o = sf.origin();
    let t = |w: &LorentzVector| (*w - o)[4];
    Ok(t(&p.base.frame.x) * t(&p.dual.frame.x) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::FamilySpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn roots_of_the_quadratic() {
        let r = m_roots(0.0, 1.0).unwrap();
        assert_eq!(r.roots, vec![1.0, -1.0]);
        let r = m_roots(0.5, 0.0).unwrap();
        assert_eq!(r.roots, vec![1.0]);
        assert_eq!(r.rejected[0].reason, "m = 0");
        let r = m_roots(0.0, 0.0).unwrap();
        assert!(r.roots.is_empty());
        assert!(m_roots(0.5, -1.0).is_err());
        let r = m_roots(1.2, -1.0).unwrap();
        assert!(r.roots[0].abs() > r.roots[1].abs());
        for m in r.roots {
            assert_abs_diff_eq!(m * m - 2.4 * m + 1.0, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cylinder_parallel_is_offset_by_normal_over_h() {
        let sf = SpaceForm::new(0.0);
        let fam = SurfaceFamily::new(FamilySpec::Cylinder { radius: 1.0 }).unwrap();
        for &(u, v) in &[(0.3, 0.1), (2.0, -1.0), (4.4, 0.7)] {
            let p = parallel_point_geometry(&sf, &fam, 1.0, u, v).unwrap();
            let x0 = sf.chart_euclidean(&p.base.frame.x);
            let n = p.base.frame.normal;
            let xh = sf.chart_euclidean(&p.dual.frame.x);
            for i in 0..3 {
                assert_abs_diff_eq!(xh[i], x0[i] + n[i] / 0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn umbilic_points_are_rejected() {
        let sf = SpaceForm::new(0.0);
        let fam = SurfaceFamily::new(FamilySpec::Sphere {
            radius: 1.0,
            curvature: 0.0,
        })
        .unwrap();
        let j = fam.jet3(&sf, 0.2, 0.3).unwrap();
        assert!(matches!(
            parallel_jet(&sf, &j, 2.0),
            Err(GeometryError::Umbilic(_))
        ));
    }

    #[test]
    fn wrong_root_is_rejected() {
        assert!(ParallelData::new(0.5, 0.0, 0.7).is_err());
        assert!(ParallelData::new(0.5, 0.0, 0.0).is_err());
        assert!(ParallelData::new(0.5, 0.0, 1.0).is_ok());
    }
}
