//! The conic-section model `M_q = L ∩ E_q` of a 3-dimensional space form.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::lorentz::{apply, ip, wedge, Bivector, LorentzVector};

/// Tolerance for membership of a point in `M_q`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// A space form of curvature `K = -<q,q>` together with a chart origin `o ∈ E_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    q: LorentzVector,
    o: LorentzVector,
    curvature: f64,
}

impl SpaceForm {
    /// Standard coordinates: `q = e3 + e4`, `o = (e4 - e3)/2` when `K = 0`;
    /// otherwise `q = √K e4` (K > 0) or `q = √-K e3` (K < 0) and `o = q/K`.
    pub fn new(curvature: f64) -> Self {
        let e3 = LorentzVector::basis(3);
        let e4 = LorentzVector::basis(4);
        if curvature == 0.0 {
            Self {
                q: e3 + e4,
                o: (e4 - e3) * 0.5,
                curvature,
            }
        } else {
            let q = if curvature > 0.0 {
                e4 * curvature.sqrt()
            } else {
                e3 * (-curvature).sqrt()
            };
            Self {
                q,
                o: q * (1.0 / curvature),
                curvature,
            }
        }
    }

    /// Explicit `q` and `o`, validated against the invariants.
    pub fn with_vectors(q: LorentzVector, o: LorentzVector) -> Result<Self> {
        let curvature = -ip(&q, &q);
        if q.max_abs() == 0.0 {
            return Err(GeometryError::InvalidParameters("q must be nonzero".into()));
        }
        let affine = ip(&o, &q) + 1.0;
        if affine.abs() > MEMBERSHIP_TOL {
            return Err(GeometryError::InvalidParameters(format!(
                "origin must satisfy <o,q> = -1 (off by {affine:e})"
            )));
        }
        if curvature.abs() <= MEMBERSHIP_TOL {
            let n = ip(&o, &o);
            if n.abs() > MEMBERSHIP_TOL {
                return Err(GeometryError::InvalidParameters(format!(
                    "flat space form needs a null origin, <o,o> = {n:e}"
                )));
            }
            return Ok(Self {
                q,
                o,
                curvature: 0.0,
            });
        }
        let expected = q * (1.0 / curvature);
        if (o - expected).max_abs() > MEMBERSHIP_TOL {
            return Err(GeometryError::InvalidParameters(
                "curved space form needs o = q/K".into(),
            ));
        }
        Ok(Self { q, o, curvature })
    }

    pub fn q(&self) -> LorentzVector {
        self.q
    }

    pub fn origin(&self) -> LorentzVector {
        self.o
    }

    /// Sectional curvature `K`.
    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn is_flat(&self) -> bool {
        self.curvature == 0.0
    }

    /// `(<p,p>, <p,q> + 1)`.
    pub fn membership_defect(&self, p: &LorentzVector) -> (f64, f64) {
        (ip(p, p), ip(p, &self.q) + 1.0)
    }

    pub fn check_on_conic(&self, p: &LorentzVector) -> Result<()> {
        let (norm, affine) = self.membership_defect(p);
        let scale = p.max_abs().max(1.0);
        if norm.abs() > MEMBERSHIP_TOL * scale * scale || affine.abs() > MEMBERSHIP_TOL * scale {
            return Err(GeometryError::OffConic { norm, affine });
        }
        Ok(())
    }

    /// `x = o + x0 + ½|x0|² q` for `x0 ∈ span(e0, e1, e2)`.
    pub fn lift_euclidean(&self, x0: [f64; 3]) -> Result<LorentzVector> {
        if !self.is_flat() {
            return Err(GeometryError::WrongCurvature {
                expected: "K = 0",
                got: self.curvature,
            });
        }
        let v = LorentzVector([x0[0], x0[1], x0[2], 0.0, 0.0]);
        Ok(self.o + v + self.q * (0.5 * ip(&v, &v)))
    }

    /// Inverse of [`SpaceForm::lift_euclidean`] for the standard coordinates.
    pub fn chart_euclidean(&self, x: &LorentzVector) -> [f64; 3] {
        [x[0], x[1], x[2]]
    }

    /// `x = x0 + o` for `x0 ∈ q^⊥` with `<x0,x0> = 1/K`.
    pub fn lift_pseudosphere(&self, x0: &LorentzVector) -> Result<LorentzVector> {
        if self.is_flat() {
            return Err(GeometryError::WrongCurvature {
                expected: "K != 0",
                got: self.curvature,
            });
        }
        let perp = ip(x0, &self.q);
        if perp.abs() > MEMBERSHIP_TOL {
            return Err(GeometryError::ChartPointNotInComplement(perp));
        }
        let expected = 1.0 / self.curvature;
        let got = ip(x0, x0);
        if (got - expected).abs() > MEMBERSHIP_TOL {
            return Err(GeometryError::MalformedChartPoint { got, expected });
        }
        Ok(*x0 + self.o)
    }

    /// An orthogonal basis `a0..a3` of `q^⊥`. For `K = 0` this is
    /// `(e0, e1, e2, q)`; otherwise an orthonormal basis.
    pub fn complement_basis(&self) -> [LorentzVector; 4] {
        let e = LorentzVector::basis;
        if self.is_flat() {
            [e(0), e(1), e(2), self.q]
        } else if self.curvature > 0.0 {
            [e(0), e(1), e(2), e(3)]
        } else {
            [e(0), e(1), e(2), e(4)]
        }
    }

    pub fn killing_basis(&self) -> KillingBasis {
        killing_basis(self)
    }

    /// Reflection in the hyperplane orthogonal to `q` (curved case only).
    pub fn reflect(&self, v: &LorentzVector) -> LorentzVector {
        let qq = ip(&self.q, &self.q);
        *v - self.q * (2.0 * ip(v, &self.q) / qq)
    }
}

pub fn make_spaceform(curvature: f64) -> SpaceForm {
    SpaceForm::new(curvature)
}

/// Six bivectors spanning `Λ²q^⊥`, ordered
/// `(a0∧a1, a0∧a2, a0∧a3, a1∧a2, a1∧a3, a2∧a3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillingBasis(pub [Bivector; 6]);

pub const KILLING_LABELS: [&str; 6] = ["a0^a1", "a0^a2", "a0^a3", "a1^a2", "a1^a3", "a2^a3"];

impl KillingBasis {
    pub fn iter(&self) -> impl Iterator<Item = &Bivector> {
        self.0.iter()
    }

    /// Combination `Σ c_i Y_i`.
    pub fn combine(&self, coeffs: &[f64; 6]) -> Bivector {
        self.0
            .iter()
            .zip(coeffs)
            .fold(Bivector::ZERO, |acc, (y, c)| acc + *y * *c)
    }
}

pub fn killing_basis(sf: &SpaceForm) -> KillingBasis {
    let a = sf.complement_basis();
    KillingBasis([
        wedge(&a[0], &a[1]),
        wedge(&a[0], &a[2]),
        wedge(&a[0], &a[3]),
        wedge(&a[1], &a[2]),
        wedge(&a[1], &a[3]),
        wedge(&a[2], &a[3]),
    ])
}

/// Conformal vector field of `Y` at `p ∈ M_q`: `Y(p) = -Yp - <Yp,q>p`.
pub fn conformal_field_at(
    sf: &SpaceForm,
    y: &Bivector,
    p: &LorentzVector,
) -> Result<LorentzVector> {
    sf.check_on_conic(p)?;
    Ok(conformal_field_unchecked(sf, y, p))
}

pub(crate) fn conformal_field_unchecked(
    sf: &SpaceForm,
    y: &Bivector,
    p: &LorentzVector,
) -> LorentzVector {
    let yp = apply(y, p);
    -yp - *p * ip(&yp, &sf.q)
}
