//! LU factorization with partial pivoting and multi-RHS solve.

use super::{require_finite, require_square, DenseError, RealMatrix};

/// Solves A·X = B for square A by LU with partial pivoting.
///
/// Used by `expm` (the Padé denominator is well conditioned by
/// construction) and by the small corner systems of the Sylvester solver.
pub fn solve_linear(a: &RealMatrix, b: &RealMatrix) -> Result<RealMatrix, DenseError> {
    require_square(a)?;
    require_finite(a)?;
    require_finite(b)?;
    let n = a.nrows();
    if b.nrows() != n {
        return Err(DenseError::ShapeMismatch {
            context: format!("solve_linear: A is {n}x{n}, B has {} rows", b.nrows()),
        });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let nrhs = b.ncols();

    for k in 0..n {
        // Partial pivot: largest magnitude in column k at or below the diagonal.
        let mut piv = k;
        let mut best = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Err(DenseError::Singular);
        }
        if piv != k {
            for j in 0..n {
                lu.swap((k, j), (piv, j));
            }
            for j in 0..nrhs {
                x.swap((k, j), (piv, j));
            }
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor != 0.0 {
                for j in (k + 1)..n {
                    let s = lu[(k, j)];
                    lu[(i, j)] -= factor * s;
                }
                for j in 0..nrhs {
                    let s = x[(k, j)];
                    x[(i, j)] -= factor * s;
                }
            }
        }
    }

    // Back substitution on the upper factor.
    for j in 0..nrhs {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in (i + 1)..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    require_finite(&x)?;
    Ok(x)
}
