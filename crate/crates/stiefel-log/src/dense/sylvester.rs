//! Schur-based (Bartels–Stewart) solver for the Sylvester equation
//! P·X + X·S = C.

use super::{
    real_schur, require_finite, require_same_shape, require_square, solve_linear, DenseError,
    RealMatrix,
};
use ndarray::s;

/// Diagonal block boundaries of a real quasi-triangular matrix: list of
/// (start, size) with size ∈ {1, 2}.
fn quasi_blocks(t: &RealMatrix) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            out.push((i, 2));
            i += 2;
        } else {
            out.push((i, 1));
            i += 1;
        }
    }
    out
}

/// Solves the small (≤ 2×2 blocks, so ≤ 4×4 system) corner equation
/// Tp_II·Y + Y·Ts_JJ = R by Kronecker vectorization in column-major order.
fn solve_corner(
    tp: &RealMatrix,
    ts: &RealMatrix,
    rhs: &RealMatrix,
) -> Result<RealMatrix, DenseError> {
    let bi = tp.nrows();
    let bj = ts.nrows();
    let dim = bi * bj;
    let mut m = RealMatrix::zeros((dim, dim));
    for c in 0..bj {
        for r in 0..bi {
            let row = c * bi + r;
            for r2 in 0..bi {
                m[(row, c * bi + r2)] += tp[(r, r2)];
            }
            for c2 in 0..bj {
                m[(row, c2 * bi + r)] += ts[(c2, c)];
            }
        }
    }
    let mut b = RealMatrix::zeros((dim, 1));
    for c in 0..bj {
        for r in 0..bi {
            b[(c * bi + r, 0)] = rhs[(r, c)];
        }
    }
    let v = solve_linear(&m, &b).map_err(|e| match e {
        DenseError::Singular => DenseError::SingularPencil,
        other => other,
    })?;
    Ok(RealMatrix::from_shape_fn((bi, bj), |(r, c)| {
        v[(c * bi + r, 0)]
    }))
}

/// Solves P·X + X·S = C for X (all p×p) in O(p³) via two real Schur
/// decompositions and blockwise back-substitution.
///
/// Errors with `SingularPencil` when the spectra of P and −S overlap
/// within 1e-12 relative to the spectral scale (the linear operator is
/// then numerically singular).
pub fn solve_sylvester(
    p: &RealMatrix,
    s_mat: &RealMatrix,
    c: &RealMatrix,
) -> Result<RealMatrix, DenseError> {
    require_square(p)?;
    require_square(s_mat)?;
    require_same_shape(p, s_mat, "solve_sylvester coefficients")?;
    require_same_shape(p, c, "solve_sylvester right-hand side")?;
    require_finite(c)?;
    let n = p.nrows();
    if n == 0 {
        return Ok(RealMatrix::zeros((0, 0)));
    }

    let sp = real_schur(p)?;
    let ss = real_schur(s_mat)?;

    // Solvability: no eigenvalue of P may cancel one of −S.
    let ep = sp.eigenvalues();
    let es = ss.eigenvalues();
    let spectral_scale = ep
        .iter()
        .chain(es.iter())
        .map(|(re, im)| (re * re + im * im).sqrt())
        .fold(1.0f64, f64::max);
    for (re_p, im_p) in &ep {
        for (re_s, im_s) in &es {
            let gap = ((re_p + re_s).powi(2) + (im_p + im_s).powi(2)).sqrt();
            if gap <= 1e-12 * spectral_scale {
                return Err(DenseError::SingularPencil);
            }
        }
    }

    // Transform to Schur coordinates: Tp·Y + Y·Ts = D, D = Upᵀ·C·Us.
    let d = sp.q.t().dot(c).dot(&ss.q);
    let tp = &sp.t;
    let ts = &ss.t;
    let blocks_p = quasi_blocks(tp);
    let blocks_s = quasi_blocks(ts);
    let mut y = RealMatrix::zeros((n, n));

    // Column blocks of Ts left to right; row blocks of Tp bottom to top.
    for &(js, bj) in &blocks_s {
        for &(is, bi) in blocks_p.iter().rev() {
            let mut rhs = d.slice(s![is..is + bi, js..js + bj]).to_owned();
            // Subtract Tp[I, K]·Y[K, J] for blocks K below I (already solved).
            let below = is + bi;
            if below < n {
                let contrib = tp
                    .slice(s![is..is + bi, below..n])
                    .dot(&y.slice(s![below..n, js..js + bj]));
                rhs -= &contrib;
            }
            // Subtract Y[I, L]·Ts[L, J] for blocks L left of J (already solved).
            if js > 0 {
                let contrib = y
                    .slice(s![is..is + bi, 0..js])
                    .dot(&ts.slice(s![0..js, js..js + bj]));
                rhs -= &contrib;
            }
            let tp_block = tp.slice(s![is..is + bi, is..is + bi]).to_owned();
            let ts_block = ts.slice(s![js..js + bj, js..js + bj]).to_owned();
            let sol = solve_corner(&tp_block, &ts_block, &rhs)?;
            y.slice_mut(s![is..is + bi, js..js + bj]).assign(&sol);
        }
    }

    // Back to the original coordinates.
    let x = sp.q.dot(&y).dot(&ss.q.t());
    require_finite(&x)?;
    Ok(x)
}
