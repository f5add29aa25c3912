//! Numerical toolkit for homogeneous plane waves given by constant matrices
//! (ω skew, p symmetric): algebraic and differential Sachs/Riccati equations,
//! the one-parameter symplectic-group orbit realizing the spacetime's curve in
//! the Lagrangian Grassmannian, and conjugate-point location — with closed
//! forms validated against an independent ODE oracle.

pub mod error;
pub mod matcore;

pub mod efuncs;
pub mod sachs_series;

pub mod oracle;

pub mod riccati;
pub mod sachs_flow;

pub mod orbit;
pub mod planewave;

pub mod dim2;

pub use error::{Error, Result};
pub use matcore::{CMatrix, C64};
