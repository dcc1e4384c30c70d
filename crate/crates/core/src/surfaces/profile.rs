//! Profile curve of a Delaunay unduloid.
//!
//! The meridian `(r(s), z(s))` is parametrized by arclength with tangent angle
//! `φ`, and solves `r' = cos φ`, `z' = sin φ`, `φ' = 2H - sin φ / r` starting
//! from the neck (`r = necksize`, `φ = π/2`). The solution is periodic in `s`
//! up to a translation `Δz` along the axis.

use std::f64::consts::FRAC_PI_2;

use crate::error::{GeometryError, Result};

/// Steps per period of the stored table.
const TABLE_STEPS: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq)]
struct State {
    r: f64,
    z: f64,
    phi: f64,
}

/// Value and first three arclength derivatives of the profile coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet {
    pub r: [f64; 4],
    pub z: [f64; 4],
}

#[derive(Clone, Debug)]
pub struct DelaunayProfile {
    mean_curvature: f64,
    necksize: f64,
    period: f64,
    axial_shift: f64,
    step: f64,
    table: Vec<State>,
}

impl DelaunayProfile {
    pub fn new(mean_curvature: f64, necksize: f64) -> Result<Self> {
        if !(mean_curvature > 0.0) || !mean_curvature.is_finite() {
            return Err(GeometryError::InvalidParameters(format!(
                "unduloid needs H > 0, got {mean_curvature}"
            )));
        }
        let max_neck = 0.5 / mean_curvature;
        if !(necksize > 0.0 && necksize < max_neck) {
            return Err(GeometryError::InvalidParameters(format!(
                "unduloid necksize must lie in (0, 1/(2H)) = (0, {max_neck}), got {necksize}"
            )));
        }
        let start = State {
            r: necksize,
            z: 0.0,
            phi: FRAC_PI_2,
        };
        let period = 2.0 * half_period(mean_curvature, start);
        let step = period / TABLE_STEPS as f64;
        let mut table = Vec::with_capacity(TABLE_STEPS + 1);
        let mut s = start;
        table.push(s);
        for _ in 0..TABLE_STEPS {
            s = rk4_step(mean_curvature, s, step);
            table.push(s);
        }
        let axial_shift = table[TABLE_STEPS].z;
        Ok(Self {
            mean_curvature,
            necksize,
            period,
            axial_shift,
            step,
            table,
        })
    }

    pub fn mean_curvature(&self) -> f64 {
        self.mean_curvature
    }

    pub fn necksize(&self) -> f64 {
        self.necksize
    }

    /// Bulge radius `1/H - necksize`.
    pub fn bulge(&self) -> f64 {
        1.0 / self.mean_curvature - self.necksize
    }

    /// Arclength period of `r(s)`.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Axial translation of the profile over one period.
    pub fn axial_shift(&self) -> f64 {
        self.axial_shift
    }

    /// First integral `r sin φ - H r²`, constant along exact solutions.
    pub fn first_integral(&self, s: f64) -> f64 {
        let st = self.state(s);
        st.r * st.phi.sin() - self.mean_curvature * st.r * st.r
    }

    fn state(&self, s: f64) -> State {
        let k = (s / self.period).floor();
        let t = s - k * self.period;
        let idx = ((t / self.step).round() as usize).min(TABLE_STEPS);
        let delta = t - idx as f64 * self.step;
        let mut st = self.table[idx];
        if delta != 0.0 {
            st = rk4_step(self.mean_curvature, st, delta);
        }
        st.z += k * self.axial_shift;
        st
    }

    /// Profile derivatives from the ODE right-hand side.
    pub fn jet(&self, s: f64) -> ProfileJet {
        let State { r, z, phi } = self.state(s);
        let h = self.mean_curvature;
        let (sp, cp) = phi.sin_cos();
        let dphi = 2.0 * h - sp / r;
        let ddphi = -cp * dphi / r + sp * cp / (r * r);
        ProfileJet {
            r: [r, cp, -sp * dphi, -cp * dphi * dphi - sp * ddphi],
            z: [z, sp, cp * dphi, -sp * dphi * dphi + cp * ddphi],
        }
    }
}

fn rhs(h: f64, s: State) -> State {
    State {
        r: s.phi.cos(),
        z: s.phi.sin(),
        phi: 2.0 * h - s.phi.sin() / s.r,
    }
}

fn axpy(a: State, k: f64, b: State) -> State {
    State {
        r: a.r + k * b.r,
        z: a.z + k * b.z,
        phi: a.phi + k * b.phi,
    }
}

fn rk4_step(h: f64, s: State, dt: f64) -> State {
    let k1 = rhs(h, s);
    let k2 = rhs(h, axpy(s, 0.5 * dt, k1));
    let k3 = rhs(h, axpy(s, 0.5 * dt, k2));
    let k4 = rhs(h, axpy(s, dt, k3));
    State {
        r: s.r + dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
        z: s.z + dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
        phi: s.phi + dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
    }
}

/// Arclength from the neck to the bulge, where `φ` returns to `π/2`.
fn half_period(h: f64, start: State) -> f64 {
    let dt = 1e-4 / h.max(1e-3);
    let mut s = 0.0;
    let mut st = start;
    // leave the neck first: φ dips below π/2 immediately
    loop {
        let next = rk4_step(h, st, dt);
        if s > 0.0 && st.phi - FRAC_PI_2 < 0.0 && next.phi - FRAC_PI_2 >= 0.0 {
            break;
        }
        st = next;
        s += dt;
        assert!(s < 1e4 / h, "profile failed to reach the bulge");
    }
    // bisection on the step length from the last state below π/2
    let (mut lo, mut hi) = (0.0, dt);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if rk4_step(h, st, mid).phi - FRAC_PI_2 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    s + 0.5 * (lo + hi)
}
