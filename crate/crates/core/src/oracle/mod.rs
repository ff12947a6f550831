//! Independent reference solutions: a finite-difference time stepper and contour quadrature.

pub mod cn;
pub mod contour;

pub use cn::{evolve_cn, self_convergence, GridField, GridSpec, RightBoundary, SelfConvergence};
pub use contour::{pole_distance, psi_dx_quadrature, psi_quadrature, psi_quadrature_with, ContourSettings};
