//! High-degree continuous-Galerkin solver for the mixed Cahn-Hilliard system
//! with constant mobility.
//!
//! The crate provides:
//! * Lagrange nodal reference elements of degree 1..=10 on Gauss-Lobatto
//!   points ([`ref_element`])
//! * structured segment/rectangle meshes, quad-mesh import, and C0 DoF
//!   numbering for any degree ([`mesh`])
//! * sparse mass/stiffness assembly and the nonlinear load/Jacobian blocks
//!   ([`assembly`])
//! * the free-energy model family: logarithmic, quartic, and 2n-th order
//!   polynomial expansions, with binodal/spinodal solvers ([`energy`])
//! * the backward-Euler / Newton / BiCGStab time stepper ([`solver`])
//! * Laplace-Neumann eigenpairs for bifurcation studies ([`eigen`])
//! * energy/error/profile-fit diagnostics ([`diagnostics`])

pub mod assembly;
pub mod diagnostics;
pub mod eigen;
pub mod energy;
mod error;
pub mod linalg;
pub mod mesh;
pub mod ref_element;
pub mod solver;

pub use error::{Error, Result};
