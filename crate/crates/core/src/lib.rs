//! Numerical almost-product geometry on the product of the positive and
//! negative twistor spaces of an oriented Riemannian four-manifold.
//!
//! The crate evaluates the closed-form Levi-Civita data of the fibre
//! metrics G_t on the product bundle, the Nijenhuis tensors of the four
//! compatible almost product structures, decides the Gil-Medrano
//! conditions for their distributions, and infers Naveira class labels.
//! Everything runs numerically on desk-scale coordinate charts, with an
//! independent finite-difference oracle for every closed form.

pub mod bivector;
pub mod catalog;
pub mod chart;
pub mod classify;
pub mod connection;
pub mod coords;
pub mod dual;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod report;
pub mod sample;
pub mod twistor;

pub use bivector::{Bivector, CurvatureDecomposition, PointGeometry};
pub use chart::{riemann, christoffel, orthonormal_frame, CurvatureTensor, MetricChart, OrthonormalFrame, Point};
pub use error::{Error, Result};
pub use twistor::{MetricParams, Nu, TangentP, TwistorPoint, VerticalVector};
