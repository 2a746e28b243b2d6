//! Regression as an integral operator under grid measures.
//!
//! Scalar, multivariate and functional linear regression are all the operator
//! `(T_β X)(t) = ∫ β(s, t) X(s) dμ_X(s)` evaluated under different measures.
//! This crate provides the measures ([`measures`]), the operator and its
//! discretizations ([`operator`]), a Karhunen–Loève data simulator
//! ([`simulate`]), least-squares estimators ([`estimate`]) and the error
//! measures used to study them ([`metrics`]).

pub mod config;
pub mod error;
pub mod estimate;
pub mod measures;
pub mod metrics;
pub mod operator;
pub mod simulate;

pub use config::SimulationConfig;
pub use error::{Error, Result};
pub use measures::{Domain, GridMeasure, MeasureKind};
pub use operator::{apply_operator, CoefficientMatrix, CoefficientSurface, Convention, Kernel};
