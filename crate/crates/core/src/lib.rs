//! Exact verification that the centralizer `g_L` of a g-symmetric operator `L`
//! is a Berger algebra, an explicit quadratic metric realizing it as a holonomy
//! algebra, and floating-point loop probes of that metric.
//!
//! Pipeline: [`canonical`] builds `(g, L)` from Jordan data, [`liealg`] spans
//! `so(g)` and `g_L`, [`berger`] constructs the formal curvature tensor and
//! certifies it, [`realize`] builds the metric and matches its curvature, and
//! [`probe`] integrates parallel transport around small loops.

pub mod berger;
pub mod canonical;
pub mod error;
pub mod exactla;
pub mod liealg;
pub mod probe;
pub mod realize;
