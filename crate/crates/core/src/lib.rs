//! Discontinuous Galerkin (symmetric interior penalty) solver for dynamic
//! linear viscoelasticity in two dimensions.
//!
//! The stress relaxation function is a Prony series
//! `φ(t) = φ₀ + Σ φ_q exp(-t/τ_q)`. The hereditary integral is replaced by
//! internal variables, either in displacement form (ψ_q) or velocity form
//! (ζ_q), and the resulting systems are advanced in time with a
//! Crank–Nicolson scheme. A manufactured solution on the unit square, error
//! norms and convergence-rate helpers make up the verification harness.

pub mod assembly;
pub mod dg_space;
pub mod error;
pub mod linalg;
pub mod manufactured;
pub mod material;
pub mod mesh;
pub mod norms;
pub mod stepper;
pub mod tensor;

pub use assembly::{AssembledSystem, FnField, LoadData, VectorField, ZeroField, ZeroLoads};
pub use dg_space::{DgSpace, EdgeRule, ElementRule};
pub use error::{Error, Result};
pub use linalg::{Factorization, SolverKind, SparseMatrix};
pub use manufactured::ManufacturedCase;
pub use material::{ElasticTensor, PronyMaterial};
pub use mesh::{EdgeInfo, EdgeTag, TriMesh};
pub use norms::{convergence_rate, error_norms, ErrorReport, ExactSolution, FieldErrors};
pub use stepper::{run, InitialData, Scheme, SchemeCoefficients, State, StepOperator};
pub use tensor::{Mat2, Point, Vec2};
