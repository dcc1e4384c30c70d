//! Multilinear algebra in the Minkowski space `R^{4,1}`.
//!
//! The basis is `e0..e4` with `e4` timelike, so the inner product has
//! signature `(+,+,+,+,-)`. Bivectors are identified with `so(4,1)` through
//! `(a∧b)c = <a,c>b - <b,c>a`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

/// Diagonal of the metric in the fixed basis.
pub const SIGNATURE: [f64; 5] = [1.0, 1.0, 1.0, 1.0, -1.0];

/// Index pairs `(i, j)` with `i < j`, in storage order for [`Bivector`].
pub const BIVECTOR_PAIRS: [(usize, usize); 10] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
];

fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < 5);
    BIVECTOR_PAIRS
        .iter()
        .position(|&p| p == (i, j))
        .expect("valid pair")
}

/// Element of `V = R^{4,1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LorentzVector(pub [f64; 5]);

impl LorentzVector {
    pub const ZERO: Self = Self([0.0; 5]);

    pub const fn new(c: [f64; 5]) -> Self {
        Self(c)
    }

    /// Basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 5];
        c[i] = 1.0;
        Self(c)
    }

    pub fn ip(&self, other: &Self) -> f64 {
        ip(self, other)
    }

    pub fn wedge(&self, other: &Self) -> Bivector {
        wedge(self, other)
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn to_vector5(self) -> Vector5<f64> {
        Vector5::from_column_slice(&self.0)
    }

    pub fn from_vector5(v: &Vector5<f64>) -> Self {
        Self([v[0], v[1], v[2], v[3], v[4]])
    }
}

impl Index<usize> for LorentzVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for LorentzVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for LorentzVector {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..5 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for LorentzVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl SubAssign for LorentzVector {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..5 {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl Neg for LorentzVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl Mul<f64> for LorentzVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }
}

impl Mul<LorentzVector> for f64 {
    type Output = LorentzVector;
    fn mul(self, v: LorentzVector) -> LorentzVector {
        v * self
    }
}

/// Element of `Λ²V ≅ so(4,1)`, stored on the basis `e_i∧e_j`, `i < j`,
/// in the order of [`BIVECTOR_PAIRS`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bivector(pub [f64; 10]);

impl Bivector {
    pub const ZERO: Self = Self([0.0; 10]);

    /// Basis bivector `e_i∧e_j` (with sign when `i > j`).
    pub fn basis(i: usize, j: usize) -> Self {
        wedge(&LorentzVector::basis(i), &LorentzVector::basis(j))
    }

    pub fn apply(&self, c: &LorentzVector) -> LorentzVector {
        apply(self, c)
    }

    /// Coefficient of `e_i∧e_j`; antisymmetric in `(i, j)`.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.0[pair_index(i, j)],
            std::cmp::Ordering::Greater => -self.0[pair_index(j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// The endomorphism `c ↦ Yc` as a matrix acting on component columns.
    pub fn to_matrix(&self) -> Matrix5<f64> {
        let mut m = Matrix5::zeros();
        for (k, &(i, j)) in BIVECTOR_PAIRS.iter().enumerate() {
            let y = self.0[k];
            // (e_i∧e_j)c = g_i c_i e_j - g_j c_j e_i
            m[(j, i)] += y * SIGNATURE[i];
            m[(i, j)] -= y * SIGNATURE[j];
        }
        m
    }

    /// Inverse of [`Bivector::to_matrix`] on skew (w.r.t. the metric) matrices.
    pub fn from_matrix(m: &Matrix5<f64>) -> Self {
        Self(std::array::from_fn(|k| {
            let (i, j) = BIVECTOR_PAIRS[k];
            0.5 * (m[(j, i)] * SIGNATURE[i] - m[(i, j)] * SIGNATURE[j])
        }))
    }

    /// Image under the linear map `L` acting on `V`: `a∧b ↦ La∧Lb`.
    pub fn transformed(&self, l: &Matrix5<f64>) -> Self {
        let mut out = [0.0; 10];
        for (k, &(i, j)) in BIVECTOR_PAIRS.iter().enumerate() {
            out[k] = BIVECTOR_PAIRS
                .iter()
                .enumerate()
                .map(|(n, &(a, b))| self.0[n] * (l[(i, a)] * l[(j, b)] - l[(j, a)] * l[(i, b)]))
                .sum();
        }
        Self(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl Add for Bivector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for Bivector {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..10 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for Bivector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Bivector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Bivector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }
}

impl Mul<Bivector> for f64 {
    type Output = Bivector;
    fn mul(self, y: Bivector) -> Bivector {
        y * self
    }
}

/// Coefficient of a 5-vector against `e0∧e1∧e2∧e3∧e4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FiveForm(pub f64);

pub fn ip(u: &LorentzVector, v: &LorentzVector) -> f64 {
    (0..5).map(|i| SIGNATURE[i] * u.0[i] * v.0[i]).sum()
}

pub fn wedge(a: &LorentzVector, b: &LorentzVector) -> Bivector {
    Bivector(std::array::from_fn(|k| {
        let (i, j) = BIVECTOR_PAIRS[k];
        a.0[i] * b.0[j] - a.0[j] * b.0[i]
    }))
}

pub fn apply(y: &Bivector, c: &LorentzVector) -> LorentzVector {
    let mut out = [0.0; 5];
    for (k, &(i, j)) in BIVECTOR_PAIRS.iter().enumerate() {
        let coef = y.0[k];
        if coef == 0.0 {
            continue;
        }
        out[j] += coef * SIGNATURE[i] * c.0[i];
        out[i] -= coef * SIGNATURE[j] * c.0[j];
    }
    LorentzVector(out)
}

/// Invariant form `B(Y1, Y2) = ½ trace(Y1 Y2)`.
pub fn b_form(y1: &Bivector, y2: &Bivector) -> f64 {
    0.5 * (y1.to_matrix() * y2.to_matrix()).trace()
}

/// Determinant of the matrix whose columns are `v1..v5`, normalized so that
/// `det5(e0, .., e4) = 1`.
pub fn det5(vs: [&LorentzVector; 5]) -> FiveForm {
    let m = Matrix5::from_fn(|r, c| vs[c].0[r]);
    FiveForm(m.determinant())
}

/// Table of `det5(o, e_i, e_j, e_k, e_l)` over pairs of basis bivectors, so
/// that `S(Y1)(Y2) = Y1ᵀ · table · Y2`.
#[derive(Clone, Debug)]
pub struct SPairing {
    origin: LorentzVector,
    table: [[f64; 10]; 10],
}

impl SPairing {
    pub fn new(origin: LorentzVector) -> Self {
        let e: [LorentzVector; 5] = std::array::from_fn(LorentzVector::basis);
        let mut table = [[0.0; 10]; 10];
        for (a, &(i, j)) in BIVECTOR_PAIRS.iter().enumerate() {
            for (b, &(k, l)) in BIVECTOR_PAIRS.iter().enumerate() {
                table[a][b] = det5([&origin, &e[i], &e[j], &e[k], &e[l]]).0;
            }
        }
        Self { origin, table }
    }

    pub fn origin(&self) -> LorentzVector {
        self.origin
    }

    pub fn eval(&self, y1: &Bivector, y2: &Bivector) -> f64 {
        let mut acc = 0.0;
        for a in 0..10 {
            if y1.0[a] == 0.0 {
                continue;
            }
            let row = &self.table[a];
            let inner: f64 = (0..10).map(|b| row[b] * y2.0[b]).sum();
            acc += y1.0[a] * inner;
        }
        acc
    }
}

/// `S(Y1)(Y2) = det(o∧Y1∧Y2)`.
pub fn s_eval(o: &LorentzVector, y1: &Bivector, y2: &Bivector) -> f64 {
    SPairing::new(*o).eval(y1, y2)
}

/// Metric matrix `diag(1,1,1,1,-1)`.
pub fn metric_matrix() -> Matrix5<f64> {
    Matrix5::from_diagonal(&Vector5::from_column_slice(&SIGNATURE))
}
