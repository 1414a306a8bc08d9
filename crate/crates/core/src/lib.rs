//! One-pass bolt tightening plans for circular flange joints.
//!
//! Two planning methods are provided, both producing the initial load of
//! every bolt so that the whole ring ends at a uniform target load:
//!
//! - [`eicm`]: run a complete sequence on the bench, derive the interaction
//!   matrix from the load history, back-substitute.
//! - [`tam`]: measure four interaction coefficients with two short load
//!   steps, lay the matrix out for any pattern, back-substitute.
//!
//! The [`bench`] module simulates sequential tightening and stands in for a
//! finite-element model or physical rig.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix the
//! scalar to `f64`, `f32` or the exact rational [`Exact`].

pub mod bench;
pub mod eicm;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pattern;
pub mod scalar;
pub mod tam;

pub use bench::{run_sequence, BenchModel, BenchState, BenchVariant, LoadHistory};
pub use eicm::{
    build_sh, compute_a, iterative_eicm, run_eicm, solve_initial_loads, InteractionMatrix,
    IterativeOutcome,
};
pub use error::{Error, Result, SpecViolation};
pub use metrics::{avg_relative_error, load_stats, matrix_max_abs_diff, yield_check, LoadStats};
pub use model::{validate_spec, AssemblyPlan, ForceUnit, JointSpec, LoadVector};
pub use pattern::{make_pattern, ring_distance, PatternKind, TighteningPattern};
pub use scalar::{Exact, Scalar};
pub use tam::{
    assemble_a, design_protocol, execute_protocol, extract_coefficients, run_tam,
    run_tam_with_coefficients, Coefficient, MeasurementLog, TamCoefficients, TamExtraction,
    TamOutcome, TwoStepProtocol,
};

pub type JointSpecF64 = JointSpec<f64>;
pub type LoadVectorF64 = LoadVector<f64>;
pub type LoadHistoryF64 = LoadHistory<f64>;
pub type InteractionMatrixF64 = InteractionMatrix<f64>;
pub type TamCoefficientsF64 = TamCoefficients<f64>;
pub type BenchModelF64 = BenchModel<f64>;
pub type AssemblyPlanF64 = AssemblyPlan<f64>;

pub type JointSpecF32 = JointSpec<f32>;
pub type LoadVectorF32 = LoadVector<f32>;
pub type InteractionMatrixF32 = InteractionMatrix<f32>;
pub type TamCoefficientsF32 = TamCoefficients<f32>;
pub type BenchModelF32 = BenchModel<f32>;

pub type ExactLoadVector = LoadVector<Exact>;
pub type ExactLoadHistory = LoadHistory<Exact>;
pub type ExactInteractionMatrix = InteractionMatrix<Exact>;
pub type ExactTamCoefficients = TamCoefficients<Exact>;
pub type ExactBenchModel = BenchModel<Exact>;
