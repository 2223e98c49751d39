//! Householder QR: thin factorization and orthonormal completion.

use super::{frob_norm, require_finite, DenseError, RealMatrix};

/// Thin QR factorization M = Q·R with Q n×p orthonormal and R p×p upper
/// triangular with nonnegative diagonal (fixed sign convention so seeded
/// runs are bit-reproducible).
#[derive(Debug, Clone)]
pub struct ThinQr {
    pub q: RealMatrix,
    pub r: RealMatrix,
    /// Set when a diagonal entry of R falls below 1e-12·‖M‖_F. Not an
    /// abort: callers decide (e.g. the problem generator redraws, the
    /// reduced-formulation builder falls back to the full problem).
    pub rank_deficient: bool,
}

/// Elementary reflectors for the columns of an n×p matrix, kept in the
/// factored form v/beta so both Q·x and the trailing complement columns
/// can be assembled without forming Q densely.
struct Reflectors {
    /// Transformed matrix; upper triangle of the first p columns is R.
    a: RealMatrix,
    /// Householder vectors; v[j] has length n−j with v[j][0] = 1 implied
    /// stored explicitly for simplicity.
    vs: Vec<Vec<f64>>,
    /// beta[j] = 2/‖v‖² scale of reflector j; 0.0 means identity.
    betas: Vec<f64>,
}

/// Runs Householder elimination on the columns of `m`.
fn householder(m: &RealMatrix) -> Reflectors {
    let (n, p) = m.dim();
    let mut a = m.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);

    for j in 0..p.min(n) {
        // Build the reflector annihilating a[j+1.., j].
        let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
        let norm_x = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let beta;
        if norm_x == 0.0 {
            beta = 0.0;
        } else {
            // v = x + sign(x0)·‖x‖·e1 avoids cancellation.
            let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
            v[0] += sign * norm_x;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                beta = 0.0;
            } else {
                beta = 2.0 / vnorm2;
                // Apply H = I − beta·vvᵀ to the remaining columns.
                for col in j..p {
                    let mut dot = 0.0;
                    for (off, vi) in v.iter().enumerate() {
                        dot += vi * a[(j + off, col)];
                    }
                    let s = beta * dot;
                    for (off, vi) in v.iter().enumerate() {
                        a[(j + off, col)] -= s * vi;
                    }
                }
            }
        }
        vs.push(v);
        betas.push(beta);
    }
    Reflectors { a, vs, betas }
}

impl Reflectors {
    /// Applies H_0·H_1·…·H_{k−1} to the j-th identity column, yielding one
    /// column of the full Q factor.
    fn q_column(&self, n: usize, j: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        x[j] = 1.0;
        for k in (0..self.vs.len()).rev() {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let v = &self.vs[k];
            let mut dot = 0.0;
            for (off, vi) in v.iter().enumerate() {
                dot += vi * x[k + off];
            }
            let s = beta * dot;
            for (off, vi) in v.iter().enumerate() {
                x[k + off] -= s * vi;
            }
        }
        x
    }
}

/// Thin QR of an n×p matrix, n ≥ p. See [`ThinQr`] for the conventions.
pub fn thin_qr(m: &RealMatrix) -> Result<ThinQr, DenseError> {
    let (n, p) = m.dim();
    if n < p {
        return Err(DenseError::ShapeMismatch {
            context: format!("thin_qr needs n >= p, got {n}x{p}"),
        });
    }
    require_finite(m)?;
    if p == 0 {
        return Ok(ThinQr {
            q: RealMatrix::zeros((n, 0)),
            r: RealMatrix::zeros((0, 0)),
            rank_deficient: false,
        });
    }
    let refl = householder(m);

    let mut q = RealMatrix::zeros((n, p));
    for j in 0..p {
        let col = refl.q_column(n, j);
        for i in 0..n {
            q[(i, j)] = col[i];
        }
    }
    let mut r = RealMatrix::zeros((p, p));
    for i in 0..p {
        for j in i..p {
            r[(i, j)] = refl.a[(i, j)];
        }
    }

    // Sign fix: nonnegative R diagonal.
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for c in j..p {
                r[(j, c)] = -r[(j, c)];
            }
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }

    let scale = frob_norm(m);
    let rank_deficient = (0..p).any(|j| r[(j, j)] < 1e-12 * scale);
    Ok(ThinQr {
        q,
        r,
        rank_deficient,
    })
}

/// Orthonormal complement of an orthonormal Y (n×p): the trailing n−p
/// columns of the full Householder Q factor of Y. Returns an n×0 matrix
/// when p = n.
///
/// Errors with `NotOrthonormal` when ‖YᵀY − I‖_F > 1e-10.
pub fn orthonormal_complement(y: &RealMatrix) -> Result<RealMatrix, DenseError> {
    let (n, p) = y.dim();
    if n < p {
        return Err(DenseError::ShapeMismatch {
            context: format!("orthonormal_complement needs n >= p, got {n}x{p}"),
        });
    }
    require_finite(y)?;
    let gram = y.t().dot(y);
    let residual = frob_norm(&(&gram - &RealMatrix::eye(p)));
    if residual > 1e-10 {
        return Err(DenseError::NotOrthonormal { residual });
    }
    let mut out = RealMatrix::zeros((n, n - p));
    if p == n {
        return Ok(out);
    }
    let refl = householder(y);
    for (idx, j) in (p..n).enumerate() {
        let col = refl.q_column(n, j);
        for i in 0..n {
            out[(i, idx)] = col[i];
        }
    }
    Ok(out)
}
