//! Lowest-order primal-dual weak Galerkin discretization of the three-dimensional
//! div-curl system `div(eps u) = f`, `curl u = g` with tangential boundary data
//! `u x n = chi` and prescribed fluxes through cavity boundaries.
//!
//! The numerical core is generic over [`Real`]; the `*64` aliases fix it to `f64`.

pub mod compat;
pub mod data;
pub mod dof;
pub mod element;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod manufactured;
pub mod mesh;
pub mod permittivity;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod sparse;
pub mod vtk;
pub mod weak;

pub use data::{ProblemData, ZeroData};
pub use element::{element_load, element_matrix, ElementSystem, StabilizationWeights, LOCAL_DOFS};
pub use compat::{check_compatibility, CompatibilityReport};
pub use dof::{assemble, build_dof_map, DofMap, GlobalSystem};
pub use error::{Error, Result};
pub use geometry::{Mat3, Vec3};
pub use harness::{compare_to_reference, compute_error, run_study, ConvergenceReport, ReferenceTable, RunConfig, Tolerance};
pub use manufactured::{ManufacturedProblem, Solution};
pub use mesh::{build_domain_mesh, build_unit_cube_mesh, DomainTag, Element, Face, Mesh};
pub use permittivity::Permittivity;
pub use quadrature::QuadratureRule;
pub use scalar::Real;
pub use solver::{solve, SolveConfig, SolveReport, SolverMethod};
pub use sparse::CsrMatrix;
pub use vtk::export_vtk;
pub use weak::{tangential_basis, weak_operator_table, TangentialBasis, WeakOperatorTable};

pub type Vec3d = Vec3<f64>;
pub type Mat3d = Mat3<f64>;
pub type Mesh64 = Mesh<f64>;
pub type Permittivity64 = Permittivity<f64>;
