//! Moment class and retraction form of constant mean curvature surfaces in
//! 3-dimensional space forms, realized in the lightcone model of `R^{4,1}`.

pub mod calculus;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod lorentz;
pub mod parallel;
pub mod spaceform;
pub mod suites;
pub mod surfaces;

pub use error::{GeometryError, Result};
