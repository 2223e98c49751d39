//! Riemannian logarithm and geodesic distance on the compact Stiefel
//! manifold St(n,p) = {Y ∈ R^{n×p} : YᵀY = I_p} under the canonical metric.
//!
//! The endpoint geodesic problem Exp_{Y0}(ξ) = Y1 is solved by single
//! shooting: Newton's method on the mismatch F(ξ) = Z1(1, ξ) − Y1, where
//! Z1 is the closed-form geodesic. Each Newton step linearizes the matrix
//! exponential with its truncated Fréchet derivative E + ½(AE + EA), which
//! collapses the correction equation to one small Sylvester equation plus a
//! back-substitution. When p < n/2 the solve runs on an equivalent reduced
//! problem on St(2p,p), so the per-iteration cost is O(np²) + O(p³)
//! regardless of n.
//!
//! Crate layout:
//! - [`dense`]: matrix kernels (QR, orthonormal completion, `expm`, Fréchet
//!   derivatives, real Schur, Sylvester).
//! - [`geometry`]: Stiefel points, frames, tangent vectors, canonical
//!   metric, closed-form geodesics.
//! - [`solver`]: the shooting iteration, initial guess, reduced
//!   formulation, distance.
//! - [`probgen`]: seeded generation of points, tangents, and endpoint
//!   pairs with prescribed geodesic distance.
//! - [`oracle`]: independent reference computations used by tests
//!   (analytic sphere distance, Kronecker Sylvester solve, exact-Fréchet
//!   Newton step, finite differences).
//! - [`rng`]: portable seeded Gaussian generator.
//!
//! All public operations are pure functions of their inputs and safe to
//! call from multiple threads.

pub mod dense;
pub mod geometry;
pub mod oracle;
pub mod probgen;
pub mod rng;
pub mod solver;

/// Re-export of the matrix crate used in all public signatures, so
/// downstream code can name the exact types without a version pin.
pub use ndarray;

pub use dense::{DenseError, RealMatrix, ThinQr};
pub use geometry::{
    AmbientTangent, GeometryError, StiefelFrame, StiefelPoint, TangentFactors,
};
pub use probgen::{GeneratorSpec, PlantedPair};
pub use solver::{
    GeodesicProblem, MismatchPartition, NonconvergenceCause, NormChoice, SolverError,
    SolverOptions, SsafReport,
};
