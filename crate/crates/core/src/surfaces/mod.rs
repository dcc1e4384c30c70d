//! Catalog of analytic immersions into `M_q` used as verification fixtures.
//!
//! Every family is written as a finite sum of separable terms
//! `f(u) g(v) E` with `E` a constant vector of `V`, which gives closed-form
//! derivatives of any order. Flat families are written in `span(e0, e1, e2)`
//! and lifted through the Euclidean chart; curved families live directly in
//! the (pseudo-)sphere `<x0,x0> = 1/K` of `q^⊥`.

mod profile;

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix5;
use serde::{Deserialize, Serialize};

pub use profile::{DelaunayProfile, ProfileJet};

use crate::error::{GeometryError, Result};
use crate::lorentz::{ip, metric_matrix, LorentzVector};
use crate::spaceform::SpaceForm;

/// Value and first and second partial derivatives of an immersion chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceJet {
    pub x: LorentzVector,
    pub xu: LorentzVector,
    pub xv: LorentzVector,
    pub xuu: LorentzVector,
    pub xuv: LorentzVector,
    pub xvv: LorentzVector,
}

impl SurfaceJet {
    pub fn first(&self) -> [LorentzVector; 2] {
        [self.xu, self.xv]
    }

    pub fn second(&self) -> [[LorentzVector; 2]; 2] {
        [[self.xuu, self.xuv], [self.xuv, self.xvv]]
    }

    /// Apply a linear map of `V` to every component.
    pub fn map(&self, f: impl Fn(&LorentzVector) -> LorentzVector) -> Self {
        Self {
            x: f(&self.x),
            xu: f(&self.xu),
            xv: f(&self.xv),
            xuu: f(&self.xuu),
            xuv: f(&self.xuv),
            xvv: f(&self.xvv),
        }
    }

    /// Largest violation of the membership, tangency and immersion conditions.
    pub fn constraint_defect(&self, sf: &SpaceForm) -> f64 {
        let q = sf.q();
        [
            ip(&self.x, &self.x),
            ip(&self.x, &q) + 1.0,
            ip(&self.xu, &q),
            ip(&self.xv, &q),
            ip(&self.xu, &self.x),
            ip(&self.xv, &self.x),
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

/// Jet including all third partials: `[x, xu, xv, xuu, xuv, xvv, xuuu, xuuv, xuvv, xvvv]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub d0: LorentzVector,
    pub d1: [LorentzVector; 2],
    pub d2: [LorentzVector; 3],
    pub d3: [LorentzVector; 4],
}

impl Jet3 {
    /// Partial derivative with `i` derivatives in `u` and `j` in `v`.
    pub fn partial(&self, i: usize, j: usize) -> LorentzVector {
        match i + j {
            0 => self.d0,
            1 => self.d1[j],
            2 => self.d2[j],
            3 => self.d3[j],
            _ => panic!("jet only holds derivatives up to order 3"),
        }
    }

    /// `∂_a ∂_b ∂_c` with `a, b, c ∈ {0, 1}` (0 = u).
    pub fn third(&self, a: usize, b: usize, c: usize) -> LorentzVector {
        self.d3[a + b + c]
    }

    pub fn second(&self, a: usize, b: usize) -> LorentzVector {
        self.d2[a + b]
    }

    pub fn first(&self, a: usize) -> LorentzVector {
        self.d1[a]
    }

    pub fn surface_jet(&self) -> SurfaceJet {
        SurfaceJet {
            x: self.d0,
            xu: self.d1[0],
            xv: self.d1[1],
            xuu: self.d2[0],
            xuv: self.d2[1],
            xvv: self.d2[2],
        }
    }

    pub fn map(&self, f: impl Fn(&LorentzVector) -> LorentzVector) -> Self {
        Self {
            d0: f(&self.d0),
            d1: self.d1.map(|v| f(&v)),
            d2: self.d2.map(|v| f(&v)),
            d3: self.d3.map(|v| f(&v)),
        }
    }
}

/// `f(u) g(v) E`, with each scalar function given by its value and first
/// three derivatives.
struct Term {
    fu: [f64; 4],
    fv: [f64; 4],
    dir: LorentzVector,
}

fn trig(a: f64, t: f64) -> ([f64; 4], [f64; 4]) {
    // cos(a t), sin(a t) with derivatives
    let (s, c) = (a * t).sin_cos();
    (
        [c, -a * s, -a * a * c, a * a * a * s],
        [s, a * c, -a * a * s, -a * a * a * c],
    )
}

fn hyp(a: f64, t: f64) -> ([f64; 4], [f64; 4]) {
    // cosh(a t), sinh(a t) with derivatives
    let (c, s) = ((a * t).cosh(), (a * t).sinh());
    (
        [c, a * s, a * a * c, a * a * a * s],
        [s, a * c, a * a * s, a * a * a * c],
    )
}

const ONE: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

fn linear(t: f64) -> [f64; 4] {
    [t, 1.0, 0.0, 0.0]
}

fn scaled(f: [f64; 4], s: f64) -> [f64; 4] {
    f.map(|c| c * s)
}

fn sum_terms(terms: &[Term]) -> Jet3 {
    let eval = |i: usize, j: usize| {
        terms.iter().fold(LorentzVector::ZERO, |acc, t| {
            acc + t.dir * (t.fu[i] * t.fv[j])
        })
    };
    Jet3 {
        d0: eval(0, 0),
        d1: [eval(1, 0), eval(0, 1)],
        d2: [eval(2, 0), eval(1, 1), eval(0, 2)],
        d3: [eval(3, 0), eval(2, 1), eval(1, 2), eval(0, 3)],
    }
}

/// Lift a Euclidean jet through `x = o + x0 + ½|x0|² q`.
fn lift_flat(sf: &SpaceForm, x0: &Jet3) -> Jet3 {
    let q = sf.q();
    let p = |i: usize, j: usize| x0.partial(i, j);
    // multi-index as a list of directions (0 = u, 1 = v)
    let d = |dirs: &[usize]| {
        let i = dirs.iter().filter(|&&a| a == 0).count();
        p(i, dirs.len() - i)
    };
    // derivatives of F = ½<x0,x0>
    let f1 = |a: usize| ip(&p(0, 0), &d(&[a]));
    let f2 = |a: usize, b: usize| ip(&d(&[a]), &d(&[b])) + ip(&p(0, 0), &d(&[a, b]));
    let f3 = |a: usize, b: usize, c: usize| {
        ip(&d(&[a, c]), &d(&[b]))
            + ip(&d(&[a]), &d(&[b, c]))
            + ip(&d(&[c]), &d(&[a, b]))
            + ip(&p(0, 0), &d(&[a, b, c]))
    };
    let f0 = 0.5 * ip(&p(0, 0), &p(0, 0));
    Jet3 {
        d0: sf.origin() + x0.d0 + q * f0,
        d1: [x0.d1[0] + q * f1(0), x0.d1[1] + q * f1(1)],
        d2: [
            x0.d2[0] + q * f2(0, 0),
            x0.d2[1] + q * f2(0, 1),
            x0.d2[2] + q * f2(1, 1),
        ],
        d3: [
            x0.d3[0] + q * f3(0, 0, 0),
            x0.d3[1] + q * f3(0, 0, 1),
            x0.d3[2] + q * f3(0, 1, 1),
            x0.d3[3] + q * f3(1, 1, 1),
        ],
    }
}

/// Parameters of a catalog family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Geodesic sphere of the given radius in the space form of curvature `curvature`.
    Sphere {
        radius: f64,
        #[serde(default)]
        curvature: f64,
    },
    /// Round cylinder about the `e2` axis in `R³`.
    Cylinder { radius: f64 },
    /// Delaunay unduloid about the `e2` axis in `R³`.
    Unduloid { mean_curvature: f64, necksize: f64 },
    /// Product of circles of radii `radius` and `√(1/K - radius²)` in `S³`.
    ProductTorusS3 {
        radius: f64,
        #[serde(default = "default_positive_curvature")]
        curvature: f64,
    },
    /// Tube at fixed distance from a geodesic in `H³`.
    EquidistantTubeH3 {
        distance: f64,
        #[serde(default = "default_negative_curvature")]
        curvature: f64,
    },
    /// Cylinder with radius `radius + amplitude·cos 2v`; not CMC for `amplitude != 0`.
    PerturbedCylinder { radius: f64, amplitude: f64 },
}

fn default_positive_curvature() -> f64 {
    1.0
}

fn default_negative_curvature() -> f64 {
    -1.0
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Sphere { .. } => "sphere",
            FamilySpec::Cylinder { .. } => "cylinder",
            FamilySpec::Unduloid { .. } => "unduloid",
            FamilySpec::ProductTorusS3 { .. } => "product_torus_s3",
            FamilySpec::EquidistantTubeH3 { .. } => "equidistant_tube_h3",
            FamilySpec::PerturbedCylinder { .. } => "perturbed_cylinder",
        }
    }

    pub fn curvature(&self) -> f64 {
        match *self {
            FamilySpec::Sphere { curvature, .. }
            | FamilySpec::ProductTorusS3 { curvature, .. }
            | FamilySpec::EquidistantTubeH3 { curvature, .. } => curvature,
            FamilySpec::Cylinder { .. }
            | FamilySpec::Unduloid { .. }
            | FamilySpec::PerturbedCylinder { .. } => 0.0,
        }
    }
}

/// Coordinate range suitable for sampling points away from chart singularities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRect {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

#[derive(Clone, Debug)]
enum Shape {
    Sphere { radius: f64 },
    Cylinder { radius: f64 },
    Unduloid(DelaunayProfile),
    ProductTorus { a: f64, b: f64 },
    Tube { distance: f64 },
    PerturbedCylinder { radius: f64, amplitude: f64 },
}

/// A validated family with any precomputed data (the unduloid profile).
#[derive(Clone, Debug)]
pub struct SurfaceFamily {
    spec: FamilySpec,
    shape: Shape,
    motion: Option<Matrix5<f64>>,
}

impl SurfaceFamily {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        let bad = |msg: String| Err(GeometryError::InvalidParameters(msg));
        let shape = match spec {
            FamilySpec::Sphere { radius, curvature } => {
                if !(radius > 0.0) {
                    return bad(format!("sphere radius must be positive, got {radius}"));
                }
                if curvature > 0.0 && radius * curvature.sqrt() >= PI {
                    return bad(format!(
                        "geodesic radius {radius} exceeds the diameter of S³ of curvature {curvature}"
                    ));
                }
                Shape::Sphere { radius }
            }
            FamilySpec::Cylinder { radius } => {
                if !(radius > 0.0) {
                    return bad(format!("cylinder radius must be positive, got {radius}"));
                }
                Shape::Cylinder { radius }
            }
            FamilySpec::Unduloid {
                mean_curvature,
                necksize,
            } => Shape::Unduloid(DelaunayProfile::new(mean_curvature, necksize)?),
            FamilySpec::ProductTorusS3 { radius, curvature } => {
                if !(curvature > 0.0) {
                    return bad(format!("product torus needs K > 0, got {curvature}"));
                }
                let outer = 1.0 / curvature;
                if !(radius > 0.0 && radius * radius < outer) {
                    return bad(format!(
                        "torus radius must lie in (0, 1/√K) = (0, {}), got {radius}",
                        outer.sqrt()
                    ));
                }
                Shape::ProductTorus {
                    a: radius,
                    b: (outer - radius * radius).sqrt(),
                }
            }
            FamilySpec::EquidistantTubeH3 {
                distance,
                curvature,
            } => {
                if !(curvature < 0.0) {
                    return bad(format!("equidistant tube needs K < 0, got {curvature}"));
                }
                if !(distance > 0.0) {
                    return bad(format!("tube distance must be positive, got {distance}"));
                }
                Shape::Tube { distance }
            }
            FamilySpec::PerturbedCylinder { radius, amplitude } => {
                if !(radius > 0.0 && amplitude.abs() < radius) {
                    return bad(format!(
                        "perturbed cylinder needs radius > |amplitude|, got {radius}, {amplitude}"
                    ));
                }
                Shape::PerturbedCylinder { radius, amplitude }
            }
        };
        Ok(Self {
            spec,
            shape,
            motion: None,
        })
    }

    /// The family moved by a Lorentz transformation `g` fixing `q`, which acts
    /// as an isometry of the space form. Motions compose on the left.
    pub fn with_motion(&self, sf: &SpaceForm, g: &Matrix5<f64>) -> Result<Self> {
        let q = sf.q();
        let gq = LorentzVector::from_vector5(&(g * q.to_vector5()));
        let fixes_q = (gq - q).max_abs() <= 1e-12 * q.max_abs().max(1.0);
        let metric = metric_matrix();
        let isometry = (g.transpose() * metric * g - metric).amax() <= 1e-10;
        if !fixes_q || !isometry || g.determinant() <= 0.0 {
            return Err(GeometryError::InvalidParameters(
                "motion must lie in SO(4,1) and fix q".into(),
            ));
        }
        let motion = match self.motion {
            Some(m) => g * m,
            None => *g,
        };
        Ok(Self {
            motion: Some(motion),
            ..self.clone()
        })
    }

    pub fn motion(&self) -> Option<&Matrix5<f64>> {
        self.motion.as_ref()
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn curvature(&self) -> f64 {
        self.spec.curvature()
    }

    /// Closed-form mean curvature for the CMC families, with the sign
    /// produced by the orientation convention; `None` for the control.
    pub fn analytic_mean_curvature(&self) -> Option<f64> {
        let k = self.curvature();
        match &self.shape {
            Shape::Sphere { radius } => Some(if k == 0.0 {
                1.0 / radius
            } else if k > 0.0 {
                k.sqrt() / (k.sqrt() * radius).tan()
            } else {
                (-k).sqrt() / ((-k).sqrt() * radius).tanh()
            }),
            Shape::Cylinder { radius } => Some(0.5 / radius),
            Shape::Unduloid(p) => Some(p.mean_curvature()),
            Shape::ProductTorus { a, b } => Some((b * b - a * a) / (2.0 * a * b)),
            Shape::Tube { distance } => {
                let s = (-k).sqrt();
                Some(s / (2.0 * s * distance).tanh())
            }
            Shape::PerturbedCylinder { .. } => None,
        }
    }

    pub fn is_cmc(&self) -> bool {
        self.analytic_mean_curvature().is_some()
    }

    /// Whether every point is umbilic.
    pub fn is_totally_umbilic(&self) -> bool {
        matches!(self.shape, Shape::Sphere { .. })
    }

    pub fn u_period(&self) -> Option<f64> {
        Some(TAU)
    }

    pub fn v_period(&self) -> Option<f64> {
        match self.shape {
            Shape::ProductTorus { .. } => Some(TAU),
            _ => None,
        }
    }

    /// Whether `H¹` of the surface is trivial (all cycles bound).
    pub fn has_trivial_cohomology(&self) -> bool {
        matches!(self.shape, Shape::Sphere { .. })
    }

    pub fn sample_rect(&self) -> SampleRect {
        let v = match &self.shape {
            Shape::Sphere { .. } => (-1.2, 1.2),
            Shape::Unduloid(p) => (0.0, p.period()),
            Shape::ProductTorus { .. } => (0.0, TAU),
            Shape::Tube { .. } => (-1.0, 1.0),
            Shape::Cylinder { .. } | Shape::PerturbedCylinder { .. } => (-2.0, 2.0),
        };
        SampleRect { u: (0.0, TAU), v }
    }

    /// Two anchor values for homologous coordinate circles.
    pub fn homologous_anchors(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Sphere { .. } => (-0.6, 0.9),
            Shape::Unduloid(p) => (0.13 * p.period(), 0.71 * p.period()),
            Shape::ProductTorus { .. } => (0.4, 2.9),
            Shape::Tube { .. } => (-0.7, 0.5),
            Shape::Cylinder { .. } | Shape::PerturbedCylinder { .. } => (-0.8, 1.3),
        }
    }

    /// Jet of `x0` in the model (Euclidean chart or `q^⊥`).
    fn model_jet(&self, sf: &SpaceForm, u: f64, v: f64) -> Jet3 {
        let e = LorentzVector::basis;
        let (cu, su) = trig(1.0, u);
        match &self.shape {
            Shape::Sphere { radius } => {
                let k = sf.curvature();
                let (cv, sv) = trig(1.0, v);
                // unit 2-sphere ω(u, v) = (cos v cos u, cos v sin u, sin v)
                // the curved models reverse the sign of e1 to keep H > 0
                let flip = if k == 0.0 { 1.0 } else { -1.0 };
                let omega = |scale: f64| {
                    vec![
                        Term {
                            fu: cu,
                            fv: scaled(cv, scale),
                            dir: e(0),
                        },
                        Term {
                            fu: su,
                            fv: scaled(cv, scale),
                            dir: e(1) * flip,
                        },
                        Term {
                            fu: ONE,
                            fv: scaled(sv, scale),
                            dir: e(2),
                        },
                    ]
                };
                if k == 0.0 {
                    sum_terms(&omega(*radius))
                } else if k > 0.0 {
                    let s = 1.0 / k.sqrt();
                    let t = radius / s;
                    let mut terms = omega(s * t.sin());
                    terms.push(Term {
                        fu: ONE,
                        fv: scaled(ONE, s * t.cos()),
                        dir: e(3),
                    });
                    sum_terms(&terms)
                } else {
                    let s = 1.0 / (-k).sqrt();
                    let t = radius / s;
                    let mut terms = omega(s * t.sinh());
                    terms.push(Term {
                        fu: ONE,
                        fv: scaled(ONE, s * t.cosh()),
                        dir: e(4),
                    });
                    sum_terms(&terms)
                }
            }
            Shape::Cylinder { radius } => sum_terms(&[
                Term {
                    fu: scaled(cu, *radius),
                    fv: ONE,
                    dir: e(0),
                },
                Term {
                    fu: scaled(su, *radius),
                    fv: ONE,
                    dir: e(1),
                },
                Term {
                    fu: ONE,
                    fv: linear(v),
                    dir: e(2),
                },
            ]),
            Shape::PerturbedCylinder { radius, amplitude } => {
                let (cv, _) = trig(2.0, v);
                let rv = [
                    radius + amplitude * cv[0],
                    amplitude * cv[1],
                    amplitude * cv[2],
                    amplitude * cv[3],
                ];
                sum_terms(&[
                    Term {
                        fu: cu,
                        fv: rv,
                        dir: e(0),
                    },
                    Term {
                        fu: su,
                        fv: rv,
                        dir: e(1),
                    },
                    Term {
                        fu: ONE,
                        fv: linear(v),
                        dir: e(2),
                    },
                ])
            }
            Shape::Unduloid(p) => {
                let j = p.jet(v);
                sum_terms(&[
                    Term {
                        fu: cu,
                        fv: j.r,
                        dir: e(0),
                    },
                    Term {
                        fu: su,
                        fv: j.r,
                        dir: e(1),
                    },
                    Term {
                        fu: ONE,
                        fv: j.z,
                        dir: e(2),
                    },
                ])
            }
            Shape::ProductTorus { a, b } => {
                let (cv, sv) = trig(1.0, v);
                sum_terms(&[
                    Term {
                        fu: scaled(cu, *a),
                        fv: ONE,
                        dir: e(0),
                    },
                    Term {
                        fu: scaled(su, *a),
                        fv: ONE,
                        dir: e(1),
                    },
                    Term {
                        fu: ONE,
                        fv: scaled(cv, *b),
                        dir: e(2),
                    },
                    Term {
                        fu: ONE,
                        fv: scaled(sv, *b),
                        dir: e(3),
                    },
                ])
            }
            Shape::Tube { distance } => {
                let k = sf.curvature();
                let s = 1.0 / (-k).sqrt();
                let rho = distance / s;
                // geodesic cosh(v/s) e4 + sinh(v/s) e2, arclength-parametrized
                let (chv, shv) = hyp(1.0 / s, v);
                sum_terms(&[
                    Term {
                        fu: scaled(cu, s * rho.sinh()),
                        fv: ONE,
                        dir: e(0),
                    },
                    Term {
                        fu: scaled(su, s * rho.sinh()),
                        fv: ONE,
                        dir: e(1),
                    },
                    Term {
                        fu: ONE,
                        fv: scaled(shv, s * rho.cosh()),
                        dir: e(2),
                    },
                    Term {
                        fu: ONE,
                        fv: scaled(chv, s * rho.cosh()),
                        dir: e(4),
                    },
                ])
            }
        }
    }

    fn check_spaceform(&self, sf: &SpaceForm) -> Result<()> {
        let k = self.curvature();
        if (k - sf.curvature()).abs() > 1e-14 * k.abs().max(1.0) {
            return Err(GeometryError::CurvatureMismatch {
                family: k,
                spaceform: sf.curvature(),
            });
        }
        Ok(())
    }

    /// Jet with all third partials.
    pub fn jet3(&self, sf: &SpaceForm, u: f64, v: f64) -> Result<Jet3> {
        self.check_spaceform(sf)?;
        let model = self.model_jet(sf, u, v);
        let jet = if sf.is_flat() {
            lift_flat(sf, &model)
        } else {
            let o = sf.origin();
            Jet3 {
                d0: model.d0 + o,
                ..model
            }
        };
        Ok(match &self.motion {
            Some(g) => jet.map(|w| LorentzVector::from_vector5(&(g * w.to_vector5()))),
            None => jet,
        })
    }

    pub fn jet(&self, sf: &SpaceForm, u: f64, v: f64) -> Result<SurfaceJet> {
        Ok(self.jet3(sf, u, v)?.surface_jet())
    }

    /// Alias for [`SurfaceFamily::jet3`].
    pub fn third_order_data(&self, sf: &SpaceForm, u: f64, v: f64) -> Result<Jet3> {
        self.jet3(sf, u, v)
    }
}

/// Built-in fixtures with default parameters.
pub fn catalog() -> Vec<FamilySpec> {
    vec![
        FamilySpec::Sphere {
            radius: 1.0,
            curvature: 0.0,
        },
        FamilySpec::Sphere {
            radius: 1.0,
            curvature: 1.0,
        },
        FamilySpec::Cylinder { radius: 1.0 },
        FamilySpec::Unduloid {
            mean_curvature: 1.0,
            necksize: 0.3,
        },
        FamilySpec::ProductTorusS3 {
            radius: std::f64::consts::FRAC_1_SQRT_2,
            curvature: 1.0,
        },
        FamilySpec::ProductTorusS3 {
            radius: 0.6,
            curvature: 1.0,
        },
        FamilySpec::EquidistantTubeH3 {
            distance: 0.7,
            curvature: -1.0,
        },
        FamilySpec::PerturbedCylinder {
            radius: 1.0,
            amplitude: 0.1,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fd_check(fam: &SurfaceFamily, sf: &SpaceForm, u: f64, v: f64) {
        let h = 1e-4;
        let j = fam.jet3(sf, u, v).unwrap();
        let ju = (
            fam.jet3(sf, u + h, v).unwrap(),
            fam.jet3(sf, u - h, v).unwrap(),
        );
        let jv = (
            fam.jet3(sf, u, v + h).unwrap(),
            fam.jet3(sf, u, v - h).unwrap(),
        );
        let scale = j.d0.max_abs().max(1.0);
        // d/du of second partials gives the u-leading third partials
        for k in 0..3 {
            let fd = (ju.0.d2[k] - ju.1.d2[k]) * (0.5 / h);
            assert!(
                (fd - j.d3[k]).max_abs() < 1e-6 * scale,
                "u-derivative of d2[{k}]"
            );
            let fd = (jv.0.d2[k] - jv.1.d2[k]) * (0.5 / h);
            assert!(
                (fd - j.d3[k + 1]).max_abs() < 1e-6 * scale,
                "v-derivative of d2[{k}]"
            );
        }
        for k in 0..2 {
            let fd = (ju.0.d1[k] - ju.1.d1[k]) * (0.5 / h);
            assert!((fd - j.d2[k]).max_abs() < 1e-6 * scale);
        }
        let fd = (jv.0.d0 - jv.1.d0) * (0.5 / h);
        assert!((fd - j.d1[1]).max_abs() < 1e-6 * scale);
    }

    #[test]
    fn jets_satisfy_constraints_and_finite_differences() {
        for spec in catalog() {
            let fam = SurfaceFamily::new(spec.clone()).unwrap();
            let sf = SpaceForm::new(fam.curvature());
            for &(u, v) in &[(0.3, 0.2), (2.1, -0.4), (4.4, 0.9)] {
                let j = fam.jet(&sf, u, v).unwrap();
                assert!(j.constraint_defect(&sf) < 1e-10, "{spec:?} at ({u},{v})");
                fd_check(&fam, &sf, u, v);
            }
        }
    }

    #[test]
    fn periodic_in_u() {
        for spec in catalog() {
            let fam = SurfaceFamily::new(spec).unwrap();
            let sf = SpaceForm::new(fam.curvature());
            let a = fam.jet(&sf, 0.7, 0.3).unwrap();
            let b = fam.jet(&sf, 0.7 + TAU, 0.3).unwrap();
            assert!((a.x - b.x).max_abs() < 1e-12);
            assert!((a.xuv - b.xuv).max_abs() < 1e-12);
        }
        let fam = SurfaceFamily::new(FamilySpec::ProductTorusS3 {
            radius: 0.6,
            curvature: 1.0,
        })
        .unwrap();
        let sf = SpaceForm::new(1.0);
        let a = fam.jet(&sf, 0.7, 0.3).unwrap();
        let b = fam.jet(&sf, 0.7, 0.3 + TAU).unwrap();
        assert!((a.xvv - b.xvv).max_abs() < 1e-12);
    }

    #[test]
    fn cylinder_third_derivatives() {
        let fam = SurfaceFamily::new(FamilySpec::Cylinder { radius: 1.0 }).unwrap();
        let sf = SpaceForm::new(0.0);
        let model = fam.model_jet(&sf, 0.4, 0.0);
        // ∂uuu of (cos u, sin u) is (sin u, -cos u)
        assert_abs_diff_eq!(model.d3[0][0], 0.4_f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(model.d3[0][1], -0.4_f64.cos(), epsilon = 1e-15);
        assert_eq!(model.d3[3], LorentzVector::ZERO);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SurfaceFamily::new(FamilySpec::Unduloid {
            mean_curvature: 1.0,
            necksize: 0.7
        })
        .is_err());
        assert!(SurfaceFamily::new(FamilySpec::ProductTorusS3 {
            radius: 1.2,
            curvature: 1.0
        })
        .is_err());
        assert!(SurfaceFamily::new(FamilySpec::Cylinder { radius: -1.0 }).is_err());
        assert!(SurfaceFamily::new(FamilySpec::EquidistantTubeH3 {
            distance: 0.5,
            curvature: 1.0
        })
        .is_err());
    }

    #[test]
    fn curvature_mismatch_is_reported() {
        let fam = SurfaceFamily::new(FamilySpec::Cylinder { radius: 1.0 }).unwrap();
        assert!(matches!(
            fam.jet(&SpaceForm::new(1.0), 0.0, 0.0),
            Err(GeometryError::CurvatureMismatch { .. })
        ));
    }
}
