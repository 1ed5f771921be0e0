//! Topology optimization of plane-stress plates.
//!
//! The crate covers the whole lightweighting loop on regular Q4 grids:
//!
//! * [`fem`]: static analysis (stiffness assembly, direct solve, compliance, von Mises stress,
//!   strength check)
//! * [`modal`]: natural frequencies and mode shapes with a lumped mass matrix
//! * [`simp`]: SIMP compliance minimization with a density filter and optimality-criteria updates
//! * [`reconstruct`]: threshold, mirror symmetry and connectivity cleanup of a gray design, then
//!   reanalysis of the binary layout
//! * [`report`]: mass, stress, displacement and frequency comparison tables
//! * [`io`]: problem files, density/PGM/VTK/CSV output and the `densleg` command line
//!
//! Units are SI internally; problem files carry millimetres, GPa, MPa and g/cm³ and are
//! converted once when parsed.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod io;
pub mod modal;
pub mod model;
pub mod reconstruct;
pub mod report;
pub mod simp;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use model::{
    build_grid, validate_problem, Component, DesignField, GridMesh, LoadCase, Material, OptimizationProblem,
    PointLoad, SimpParams,
};
