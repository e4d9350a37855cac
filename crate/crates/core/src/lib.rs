//! Compact Runge-Kutta flux reconstruction for conservation laws and
//! balance laws with non-conservative products.

pub mod basis;
pub mod config;
pub mod harness;
pub mod kernels;
pub mod mesh;
pub mod physics;
pub mod problems;
pub mod stepper;
pub mod tableau;
