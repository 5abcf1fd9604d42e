//! Finite-dimensional operator systems over the diagonal algebra `D_n`.
//!
//! The crate builds the amalgamated coproduct `S ⊕_{D_n} T` of two
//! operator `D_n`-systems as the quotient `(S ⊕ T)/J` with
//! `J = {a ⊕ −a : a ∈ D_n}`, and decides membership in its matrix cones by
//! convex feasibility.
//!
//! * [`matrix`]: dense complex matrices, Jacobi eigendecomposition, PSD tests.
//! * [`operator_system`]: concrete systems `S ⊆ M_n`, levels, bimodule checks.
//! * [`graph_systems`]: graph operator systems, the diagonal expectation,
//!   generated C*-algebras.
//! * [`feasibility`]: the Dykstra cone-feasibility engine and a 2×2 oracle.
//! * [`coproduct`]: the quotient, its cones, embeddings and universal map.
//! * [`cp_maps`]: Choi and sampled k-positivity, bimodule-map checks.

pub mod coproduct;
pub mod cp_maps;
pub mod error;
pub mod feasibility;
pub mod graph_systems;
pub mod matrix;
pub mod operator_system;
pub mod subspace;

pub use coproduct::{build_coproduct, r_subsystem_demo, CoproductSystem, CosetElement, MemberVerdict};
pub use cp_maps::{DiagonalAction, KPositivity, LinearMatrixMap};
pub use error::{Error, Result};
pub use feasibility::{brute_force_2x2, solve, FeasibilityOutcome, FeasibilityProblem, SolverOptions, Verdict};
pub use graph_systems::{diagonal_expectation, generated_algebra, graph_system, Graph};
pub use matrix::{ComplexMatrix, HermitianMatrix, Tolerance, C64};
pub use operator_system::{make_system, DiagonalAlgebra, LevelElement, MatrixOperatorSystem};
