//! Numerical curvature engine for almost-Hermitian manifolds given in a chart.
//!
//! The pipeline evaluates user-defined (or built-in) metric and almost complex
//! structure components through truncated Taylor jets, so every derivative it
//! needs is exact up to rounding. On top of that it computes the Riemann
//! tensor, its covariant derivative, the Ricci-type contractions `S`, `S′`,
//! their traces `τ`, `τ′`, the covariant derivative of `J`, and it checks the
//! curvature identities and constancy statements for quasi-Kähler manifolds of
//! pointwise constant antiholomorphic sectional curvature.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod exprlang;
pub mod geometry;
pub mod hermitian;
pub mod jets;
pub mod modelspaces;
pub mod planes;
pub mod report;
pub mod sampling;
pub mod verify;

pub use error::{CurvError, Result};
pub use exprlang::{parse, Expr};
pub use geometry::{ManifoldSpec, PointGeometry, SampleBox, TensorField};
pub use hermitian::{ClassificationReport, HermitianData};
pub use jets::Jet;
