//! Dense real matrix kernels.
//!
//! Everything operates on [`RealMatrix`] (row-major `ndarray::Array2<f64>`).
//! The kernels here are deliberately self-contained: QR, orthonormal
//! completion, the matrix exponential with its Fréchet derivatives, a real
//! Schur decomposition, and a Schur-based Sylvester solver. No structure
//! beyond "dense real" is exploited for computation; skew-symmetry etc. are
//! used only by callers for validation.

mod expm;
mod lu;
mod qr;
mod schur;
mod sylvester;

pub use expm::{expm, frechet_expm_exact, frechet_expm_truncated};
pub use lu::solve_linear;
pub use qr::{orthonormal_complement, thin_qr, ThinQr};
pub use schur::{real_schur, RealSchur};
pub use sylvester::solve_sylvester;

use thiserror::Error;

/// Dense real matrix, the universal numeric carrier of this crate.
/// Row-major storage; rows ≥ 1 and cols ≥ 1 except where a 0-column or
/// 0-row edge matrix is explicitly allowed (e.g. the K factor when p = n).
pub type RealMatrix = ndarray::Array2<f64>;

/// Errors from the dense kernels.
#[derive(Debug, Error)]
pub enum DenseError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("matrix is numerically singular")]
    Singular,
    #[error("sylvester pencil is numerically singular")]
    SingularPencil,
    #[error("matrix is not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },
}

/// Antisymmetric part ½(M − Mᵀ). The result is exactly antisymmetric:
/// entry (i,j) is the exact IEEE negation of entry (j,i) and the diagonal
/// is exactly zero.
pub fn skew_part(m: &RealMatrix) -> Result<RealMatrix, DenseError> {
    require_square(m)?;
    let n = m.nrows();
    let mut out = RealMatrix::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] - m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = -v;
        }
    }
    Ok(out)
}

/// Symmetric part ½(M + Mᵀ); `skew_part(m) + sym_part(m)` recomposes M to
/// machine precision.
pub fn sym_part(m: &RealMatrix) -> Result<RealMatrix, DenseError> {
    require_square(m)?;
    let n = m.nrows();
    let mut out = RealMatrix::zeros((n, n));
    for i in 0..n {
        out[(i, i)] = m[(i, i)];
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Frobenius norm.
pub fn frob_norm(m: &RealMatrix) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Frobenius inner product trace(AᵀB).
pub fn frob_inner(a: &RealMatrix, b: &RealMatrix) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Identity matrix.
pub fn eye(n: usize) -> RealMatrix {
    RealMatrix::eye(n)
}

pub(crate) fn require_square(m: &RealMatrix) -> Result<(), DenseError> {
    if m.nrows() != m.ncols() {
        return Err(DenseError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn require_same_shape(
    a: &RealMatrix,
    b: &RealMatrix,
    context: &str,
) -> Result<(), DenseError> {
    if a.dim() != b.dim() {
        return Err(DenseError::ShapeMismatch {
            context: format!(
                "{context}: {}x{} vs {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            ),
        });
    }
    Ok(())
}

pub(crate) fn require_finite(m: &RealMatrix) -> Result<(), DenseError> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(DenseError::NonFinite);
    }
    Ok(())
}

/// Maximum column sum of absolute values (operator 1-norm).
pub(crate) fn norm_1(m: &RealMatrix) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..m.ncols() {
        let s: f64 = m.column(j).iter().map(|v| v.abs()).sum();
        best = best.max(s);
    }
    best
}
