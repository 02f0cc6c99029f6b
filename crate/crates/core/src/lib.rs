//! Characteristic functions of the half-line difference equation
//!
//! ```text
//! z_{n-1} - z_{n+1} + b_n c_n z_n = lambda z_n,   n >= 0,   z_{-1} = 0,
//! ```
//!
//! for `lambda` off the band `[-2i, 2i]`: two finite-section Fredholm
//! determinants (`det(I - K)`, `det(I - T)`), the Evans function, the Jost
//! function and, for Euler-type coefficients, a continued-fraction function.
//! All five agree; their zeros are the eigenvalues. The [`euler2d`] module
//! applies them to lattice slices of the linearized 2D Euler equation.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contfrac;
pub mod determinants;
pub mod error;
pub mod euler2d;
pub mod jost;
pub mod json;
pub mod linalg;
pub mod policy;
pub mod problem;
pub mod rootfind;
pub mod spectral;

pub use contfrac::{g_plus, ContFracPolicy, ContinuedFractionValue};
pub use determinants::{
    det_adaptive, det_k, det_t, DeterminantReport, DeterminantValue, ReportPolicy, Section,
};
pub use error::{Error, Result};
pub use euler2d::{
    classify, instability_pipeline, CaseLabel, EulerSlice, InstabilityReport, PipelinePolicy,
};
pub use jost::{
    evans, jost_function, jost_scalar, matrix_jost, regular_solution, wronskian, JostSolution,
};
pub use policy::TruncationPolicy;
pub use problem::{ProblemModel, ProblemSpec, RhoModel};
pub use rootfind::{
    bracket_real_roots, refine_complex_root, refine_root, winding_number, ContourCount,
    ContourPolicy, Rectangle, RootResult,
};
pub use spectral::{matrix_power, spectral_frame, Mat2, SpectralFrame};
