//! Single-shooting Newton solver for the Riemannian logarithm on the
//! Stiefel manifold under the canonical metric.
//!
//! Given endpoints Y0, Y1 ∈ St(n,p), the solver seeks a tangent vector ξ
//! at Y0 whose geodesic reaches Y1 at time 1, i.e. a root of
//! F(ξ) = Z1(1, ξ) − Y1. Each Newton step works in the factor
//! coordinates (Ω, K) of ξ and solves a small Sylvester equation
//!
//!   (I + ½Ω + ¼KᵀK)·δΩ + δΩ·(½Ω − ¼KᵀK) = W + ½KᵀN + ½NᵀK,
//!   δK = N − ½K·δΩ,
//!
//! where [W; N] = Qᵀ(Y1 − Z1) is the current mismatch in frame
//! coordinates. The equation comes from a first-order truncation of the
//! directional derivative of the matrix exponential, so the step is an
//! inexact Newton step; full steps are taken (no line search).
//!
//! For p < n/2 the solve can be reduced to an equivalent problem on
//! St(2p,p) spanned by [Y0 Qr], which makes the per-iteration cost
//! independent of n up to O(np²) setup.

use crate::dense::{expm, frob_norm, skew_part, solve_sylvester, DenseError, RealMatrix};
use crate::geometry::{
    ambient_from_factors, build_a, factors_from_ambient, make_frame, project_tangent,
    AmbientTangent, GeometryError, StiefelPoint, TangentFactors,
};
use ndarray::s;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Norm used for the Algorithm-2 rescaling of the initial guess and for
/// the stopping test on the factor update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormChoice {
    #[default]
    Frobenius,
    Canonical,
}

/// Solver configuration.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Stopping tolerance on the norm of the factor update [δΩ; δK].
    pub tol: f64,
    /// Maximum number of Newton iterations.
    pub max_iter: usize,
    /// Reduce to St(2p,p) when p < n/2.
    pub use_small_formulation: bool,
    /// Norm for the initial-guess rescaling and the stopping test.
    pub norm_choice: NormChoice,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            max_iter: 100,
            use_small_formulation: true,
            norm_choice: NormChoice::Frobenius,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(SolverError::InvalidOptions {
                context: format!("tol must be a positive finite number, got {}", self.tol),
            });
        }
        if self.max_iter < 1 {
            return Err(SolverError::InvalidOptions {
                context: "max_iter must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// A two-point boundary value problem on St(n,p) with solver options.
#[derive(Debug, Clone)]
pub struct GeodesicProblem {
    y0: StiefelPoint,
    y1: StiefelPoint,
    options: SolverOptions,
}

impl GeodesicProblem {
    pub fn new(
        y0: StiefelPoint,
        y1: StiefelPoint,
        options: SolverOptions,
    ) -> Result<Self, SolverError> {
        if y0.y().dim() != y1.y().dim() {
            return Err(SolverError::DimensionMismatch {
                context: format!(
                    "endpoints live on different manifolds: St({},{}) vs St({},{})",
                    y0.n(),
                    y0.p(),
                    y1.n(),
                    y1.p()
                ),
            });
        }
        options.validate()?;
        Ok(Self { y0, y1, options })
    }

    pub fn y0(&self) -> &StiefelPoint {
        &self.y0
    }

    pub fn y1(&self) -> &StiefelPoint {
        &self.y1
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }
}

/// The frame-coordinate mismatch [W; N] = Qᵀ(Y1 − Z1), split into its
/// top p×p block W and bottom (n−p)×p block N.
#[derive(Debug, Clone)]
pub struct MismatchPartition {
    pub w: RealMatrix,
    pub n: RealMatrix,
}

impl MismatchPartition {
    /// Frobenius norm of the stacked mismatch, equal to ‖Y1 − Z1‖_F.
    pub fn norm(&self) -> f64 {
        let w = frob_norm(&self.w);
        let n = frob_norm(&self.n);
        (w * w + n * n).sqrt()
    }
}

/// Why a solve stopped without converging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonconvergenceCause {
    /// The iteration cap was reached with the update norm above tol.
    MaxIterReached,
    /// The Sylvester coefficient pencil became numerically singular,
    /// which signals an iterate far outside the step model's regime.
    SingularPencil,
}

/// Full record of one solve.
#[derive(Debug, Clone)]
pub struct SsafReport {
    /// Final tangent vector at Y0 (the log candidate).
    pub xi_star: AmbientTangent,
    /// Canonical norm of `xi_star`.
    pub distance: f64,
    /// Number of Newton iterations performed.
    pub iterations: usize,
    /// Stopping-norm of the factor update, one entry per iteration.
    pub update_norm_history: Vec<f64>,
    /// ‖F‖_F at the start of each iteration.
    pub residual_norm_history: Vec<f64>,
    /// Whether the update norm reached tol.
    pub converged: bool,
    /// Wall-clock time of the solve.
    pub wall_time: Duration,
    /// Whether the St(2p,p) reduction was used.
    pub used_small_formulation: bool,
    /// Set when `converged` is false.
    pub cause: Option<NonconvergenceCause>,
}

/// Errors from the solver layer.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("invalid solver options: {context}")]
    InvalidOptions { context: String },
    #[error("reduction to St(2p,p) unavailable for St({n},{p}): {reason}")]
    ReductionUnavailable { n: usize, p: usize, reason: String },
    #[error(
        "solver did not converge after {iterations} iterations \
         (cause: {cause:?}, last update norm {last_update_norm:.3e})"
    )]
    Nonconverged {
        cause: NonconvergenceCause,
        iterations: usize,
        last_update_norm: f64,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Dense(#[from] DenseError),
}

/// Canonical norm extended to arbitrary ambient matrices via the trace
/// formula ‖M‖² = ‖M‖²_F − ½‖YᵀM‖²_F (coincides with the canonical norm
/// on tangent vectors).
fn ambient_norm(y: &StiefelPoint, m: &RealMatrix, choice: NormChoice) -> f64 {
    match choice {
        NormChoice::Frobenius => frob_norm(m),
        NormChoice::Canonical => {
            let f = frob_norm(m);
            let ytm = frob_norm(&y.y().t().dot(m));
            (f * f - 0.5 * ytm * ytm).max(0.0).sqrt()
        }
    }
}

/// Initial guess for the log: project the chord ξ̄ = Y1 − Y0 onto the
/// tangent space at Y0 and rescale it back to the chord's length in the
/// chosen norm. Returns the zero tangent when the projection is
/// degenerate (‖Pξ̄‖ < 1e-14·‖ξ̄‖, which includes Y1 = Y0).
pub fn initial_guess(
    y0: &StiefelPoint,
    y1: &StiefelPoint,
    norm_choice: NormChoice,
) -> Result<AmbientTangent, SolverError> {
    if y0.y().dim() != y1.y().dim() {
        return Err(SolverError::DimensionMismatch {
            context: "initial_guess endpoints have different shapes".to_string(),
        });
    }
    let chord = y1.y() - y0.y();
    let projected = project_tangent(y0, &chord)?;
    let chord_norm = ambient_norm(y0, &chord, norm_choice);
    let proj_norm = ambient_norm(y0, projected.xi(), norm_choice);
    if proj_norm < 1e-14 * chord_norm || proj_norm == 0.0 {
        return Ok(AmbientTangent::zero(y0.clone()));
    }
    let scaled = projected.xi() * (chord_norm / proj_norm);
    Ok(AmbientTangent::new_unchecked(y0.clone(), scaled))
}

/// Frame-coordinate residual: QᵀZ1 = expm(A)·I_{n,p} by column
/// truncation, mismatch = qty1 − QᵀZ1 where qty1 = QᵀY1 is cached by the
/// caller. Returns the partition and ‖F‖_F (equal to the stacked
/// mismatch norm by orthogonal invariance). Everything stays in frame
/// coordinates, so no n×n product is needed per iteration.
fn residual_in_frame(
    f: &TangentFactors,
    qty1: &RealMatrix,
) -> Result<(MismatchPartition, f64), SolverError> {
    let p = f.p();
    let a = build_a(f);
    let e = expm(&a)?;
    let diff = qty1 - &e.slice(s![.., 0..p]);
    let part = MismatchPartition {
        w: diff.slice(s![0..p, ..]).to_owned(),
        n: diff.slice(s![p.., ..]).to_owned(),
    };
    let f_norm = frob_norm(&diff);
    Ok((part, f_norm))
}

/// Newton residual at the factors f: the ambient mismatch
/// F = Z1(1, ξ) − Y1, the geodesic endpoint Z1, and the frame-coordinate
/// partition [W; N] = Qᵀ(Y1 − Z1).
pub fn residual(
    frame: &crate::geometry::StiefelFrame,
    f: &TangentFactors,
    y1: &StiefelPoint,
) -> Result<(RealMatrix, StiefelPoint, MismatchPartition), SolverError> {
    if y1.y().dim() != frame.base().y().dim() {
        return Err(SolverError::DimensionMismatch {
            context: "residual target has a different shape than the frame base".to_string(),
        });
    }
    let p = frame.p();
    let a = build_a(f);
    let e = expm(&a)?;
    let e_cols = e.slice(s![.., 0..p]).to_owned();
    let z1 = StiefelPoint::new_unchecked(frame.apply_q(&e_cols));
    let f_mat = z1.y() - y1.y();
    let qty1 = frame.apply_qt(y1.y());
    let diff = &qty1 - &e_cols;
    let part = MismatchPartition {
        w: diff.slice(s![0..p, ..]).to_owned(),
        n: diff.slice(s![p.., ..]).to_owned(),
    };
    Ok((f_mat, z1, part))
}

/// The raw Sylvester-step solution, before δΩ is re-skewed. The stopping
/// test uses this raw update: at stalled iterates the antisymmetric part
/// of δΩ can vanish while the equation residual does not, and measuring
/// the raw update prevents such stalls from being reported as converged.
struct RawNewtonStep {
    d_omega_raw: RealMatrix,
    d_k: RealMatrix,
}

impl RawNewtonStep {
    fn norm(&self, choice: NormChoice) -> f64 {
        let o = frob_norm(&self.d_omega_raw);
        let k = frob_norm(&self.d_k);
        match choice {
            NormChoice::Frobenius => (o * o + k * k).sqrt(),
            NormChoice::Canonical => (0.5 * o * o + k * k).sqrt(),
        }
    }
}

fn raw_newton_step(
    f: &TangentFactors,
    part: &MismatchPartition,
) -> Result<RawNewtonStep, SolverError> {
    let p = f.p();
    let omega = f.omega();
    let k = f.k();
    if part.w.dim() != (p, p) || part.n.dim() != (k.nrows(), p) {
        return Err(SolverError::DimensionMismatch {
            context: format!(
                "partition blocks {}x{} / {}x{} do not match factors with p={}, K rows={}",
                part.w.nrows(),
                part.w.ncols(),
                part.n.nrows(),
                part.n.ncols(),
                p,
                k.nrows()
            ),
        });
    }
    let ktk = k.t().dot(k);
    let half_omega = omega * 0.5;
    let quarter_ktk = &ktk * 0.25;
    let lhs_p = &(&RealMatrix::eye(p) + &half_omega) + &quarter_ktk;
    let lhs_s = &half_omega - &quarter_ktk;
    let ktn = k.t().dot(&part.n);
    let rhs = &part.w + &((&ktn + &ktn.t()) * 0.5);
    let d_omega_raw = solve_sylvester(&lhs_p, &lhs_s, &rhs)?;
    let d_k = &part.n - &(k.dot(&d_omega_raw) * 0.5);
    Ok(RawNewtonStep { d_omega_raw, d_k })
}

/// One Newton step in factor coordinates: solves the Sylvester equation
/// for δΩ, forms δK = N − ½K·δΩ, and returns (skew_part(δΩ), δK). The
/// returned δΩ is exactly antisymmetric; the δK uses the raw Sylvester
/// solution, whose symmetric part is a floating-point/model artifact
/// that the update projection removes.
pub fn newton_step(
    f: &TangentFactors,
    part: &MismatchPartition,
) -> Result<(RealMatrix, RealMatrix), SolverError> {
    let raw = raw_newton_step(f, part)?;
    let d_omega = skew_part(&raw.d_omega_raw).map_err(DenseError::from)?;
    Ok((d_omega, raw.d_k))
}

/// Lift context produced by `reduce_to_small`: the original base point
/// and the orthonormal basis Qr of the out-of-span part of Y1.
#[derive(Debug, Clone)]
pub struct LiftContext {
    y0: StiefelPoint,
    qr: RealMatrix,
}

/// Reduces the boundary value problem to St(2p,p): with M = Y0ᵀY1 and
/// Y1 − Y0·M = Qr·R (thin QR), the reduced endpoints are X̂0 = [I; 0]
/// and X̂1 = [M; R], and tangents lift through [Y0 Qr].
///
/// Errors with `ReductionUnavailable` when p ≥ n/2 or when the QR
/// factor is numerically rank-deficient (then Qr has columns that are
/// not determined by the data and the lift would be unsafe); the caller
/// falls back to the full formulation.
pub fn reduce_to_small(
    y0: &StiefelPoint,
    y1: &StiefelPoint,
    options: SolverOptions,
) -> Result<(GeodesicProblem, LiftContext), SolverError> {
    let (n, p) = y0.y().dim();
    if y1.y().dim() != (n, p) {
        return Err(SolverError::DimensionMismatch {
            context: "reduction endpoints have different shapes".to_string(),
        });
    }
    if 2 * p >= n {
        return Err(SolverError::ReductionUnavailable {
            n,
            p,
            reason: "requires p < n/2".to_string(),
        });
    }
    let m = y0.y().t().dot(y1.y());
    let c = y1.y() - &y0.y().dot(&m);
    // When Y1 sits (numerically) inside the span of Y0, the difference
    // carries no information about the out-of-span directions and the
    // lift basis would be rounding noise.
    if frob_norm(&c) <= 1e-12 * (p as f64).sqrt() {
        return Err(SolverError::ReductionUnavailable {
            n,
            p,
            reason: "Y1 - Y0 (Y0^T Y1) is numerically zero".to_string(),
        });
    }
    let qr = crate::dense::thin_qr(&c)?;
    if qr.rank_deficient {
        return Err(SolverError::ReductionUnavailable {
            n,
            p,
            reason: "Y1 - Y0 (Y0^T Y1) is numerically rank-deficient".to_string(),
        });
    }
    let mut x0 = RealMatrix::zeros((2 * p, p));
    for i in 0..p {
        x0[(i, i)] = 1.0;
    }
    let mut x1 = RealMatrix::zeros((2 * p, p));
    x1.slice_mut(s![0..p, ..]).assign(&m);
    x1.slice_mut(s![p.., ..]).assign(&qr.r);
    let x0 = StiefelPoint::new(x0).map_err(SolverError::Geometry)?;
    let x1 = StiefelPoint::new(x1).map_err(SolverError::Geometry)?;
    let reduced_options = SolverOptions {
        use_small_formulation: false,
        ..options
    };
    let problem = GeodesicProblem::new(x0, x1, reduced_options)?;
    let ctx = LiftContext {
        y0: y0.clone(),
        qr: qr.q,
    };
    Ok((problem, ctx))
}

/// Lifts a tangent at the reduced base X̂0 = [I; 0] back to the original
/// manifold: ξ = Y0·Ω̂ + Qr·K̂ where Ω̂, K̂ are the top and bottom p×p
/// blocks of the reduced tangent.
pub fn lift_tangent(
    ctx: &LiftContext,
    reduced: &AmbientTangent,
) -> Result<AmbientTangent, SolverError> {
    let p = ctx.y0.p();
    if reduced.xi().dim() != (2 * p, p) {
        return Err(SolverError::DimensionMismatch {
            context: format!(
                "reduced tangent is {}x{}, expected {}x{}",
                reduced.xi().nrows(),
                reduced.xi().ncols(),
                2 * p,
                p
            ),
        });
    }
    let base = reduced.base().y();
    let is_identity_prefix = (0..2 * p).all(|i| {
        (0..p).all(|j| base[(i, j)] == if i == j { 1.0 } else { 0.0 })
    });
    if !is_identity_prefix {
        return Err(SolverError::DimensionMismatch {
            context: "reduced tangent is not based at [I; 0]".to_string(),
        });
    }
    let omega_hat = reduced.xi().slice(s![0..p, ..]);
    let k_hat = reduced.xi().slice(s![p.., ..]);
    let xi = &ctx.y0.y().dot(&omega_hat) + &ctx.qr.dot(&k_hat);
    Ok(AmbientTangent::new_unchecked(ctx.y0.clone(), xi))
}

struct CoreOutcome {
    xi_star: AmbientTangent,
    distance: f64,
    iterations: usize,
    update_norm_history: Vec<f64>,
    residual_norm_history: Vec<f64>,
    converged: bool,
    cause: Option<NonconvergenceCause>,
}

/// The Newton loop on one (possibly reduced) problem. All iteration
/// work happens in factor coordinates; Y0's frame is used once for
/// QᵀY1 and once to assemble the final ambient tangent.
fn solve_core(
    y0: &StiefelPoint,
    y1: &StiefelPoint,
    options: &SolverOptions,
) -> Result<CoreOutcome, SolverError> {
    let frame = make_frame(y0)?;
    let qty1 = frame.apply_qt(y1.y());

    let xi0 = initial_guess(y0, y1, options.norm_choice)?;
    let mut factors = factors_from_ambient(&frame, &xi0)?;

    let mut update_norm_history = Vec::new();
    let mut residual_norm_history = Vec::new();
    let mut converged = false;
    let mut cause = None;

    for _ in 0..options.max_iter {
        let (part, f_norm) = residual_in_frame(&factors, &qty1)?;
        let step = match raw_newton_step(&factors, &part) {
            Ok(step) => step,
            Err(SolverError::Dense(DenseError::SingularPencil)) => {
                cause = Some(NonconvergenceCause::SingularPencil);
                break;
            }
            Err(e) => return Err(e),
        };
        let update_norm = step.norm(options.norm_choice);

        let omega_next = factors.omega() + &step.d_omega_raw;
        let k_next = factors.k() + &step.d_k;
        factors = TangentFactors::new(omega_next, k_next)?;

        residual_norm_history.push(f_norm);
        update_norm_history.push(update_norm);
        if update_norm <= options.tol {
            converged = true;
            break;
        }
    }

    if !converged && cause.is_none() {
        cause = Some(NonconvergenceCause::MaxIterReached);
    }

    let xi_star = ambient_from_factors(&frame, &factors)?;
    let distance = factors.canonical_norm();
    Ok(CoreOutcome {
        iterations: update_norm_history.len(),
        xi_star,
        distance,
        update_norm_history,
        residual_norm_history,
        converged,
        cause,
    })
}

/// Solves the log problem by single-shooting Newton iteration.
///
/// Returns a report in all cases reachable without an input or linear
/// algebra failure; nonconvergence is reported through the `converged`
/// and `cause` fields, not as an error. Identical endpoints short-circuit
/// to the zero tangent with zero iterations. When
/// `use_small_formulation` is set and p < n/2, the iteration runs on the
/// reduced St(2p,p) problem and the result is lifted back; if the
/// reduction is unavailable the full formulation is used silently.
pub fn solve_log(problem: &GeodesicProblem) -> Result<SsafReport, SolverError> {
    problem.options.validate()?;
    let start = Instant::now();
    let y0 = &problem.y0;
    let y1 = &problem.y1;

    if frob_norm(&(y1.y() - y0.y())) <= 1e-14 {
        return Ok(SsafReport {
            xi_star: AmbientTangent::zero(y0.clone()),
            distance: 0.0,
            iterations: 0,
            update_norm_history: Vec::new(),
            residual_norm_history: Vec::new(),
            converged: true,
            wall_time: start.elapsed(),
            used_small_formulation: false,
            cause: None,
        });
    }

    if problem.options.use_small_formulation && 2 * problem.y0.p() < problem.y0.n() {
        match reduce_to_small(y0, y1, problem.options) {
            Ok((reduced, ctx)) => {
                let out = solve_core(&reduced.y0, &reduced.y1, &reduced.options)?;
                let xi_star = lift_tangent(&ctx, &out.xi_star)?;
                return Ok(SsafReport {
                    xi_star,
                    distance: out.distance,
                    iterations: out.iterations,
                    update_norm_history: out.update_norm_history,
                    residual_norm_history: out.residual_norm_history,
                    converged: out.converged,
                    wall_time: start.elapsed(),
                    used_small_formulation: true,
                    cause: out.cause,
                });
            }
            Err(SolverError::ReductionUnavailable { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let out = solve_core(y0, y1, &problem.options)?;
    Ok(SsafReport {
        xi_star: out.xi_star,
        distance: out.distance,
        iterations: out.iterations,
        update_norm_history: out.update_norm_history,
        residual_norm_history: out.residual_norm_history,
        converged: out.converged,
        wall_time: start.elapsed(),
        used_small_formulation: false,
        cause: out.cause,
    })
}

/// Geodesic distance d(Y0, Y1): the canonical norm of the converged log.
/// Errors with `Nonconverged` when the solve does not converge.
pub fn distance(
    y0: &StiefelPoint,
    y1: &StiefelPoint,
    options: SolverOptions,
) -> Result<f64, SolverError> {
    let problem = GeodesicProblem::new(y0.clone(), y1.clone(), options)?;
    let report = solve_log(&problem)?;
    if !report.converged {
        return Err(SolverError::Nonconverged {
            cause: report.cause.unwrap_or(NonconvergenceCause::MaxIterReached),
            iterations: report.iterations,
            last_update_norm: report.update_norm_history.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok(report.distance)
}
