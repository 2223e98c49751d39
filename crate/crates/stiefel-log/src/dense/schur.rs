//! Real Schur decomposition A = Q·T·Qᵀ with T quasi-upper-triangular
//! (1×1 blocks for real eigenvalues, 2×2 blocks for complex pairs).
//!
//! Householder Hessenberg reduction followed by Francis double-shift QR
//! iteration, structured after the classic EISPACK/JAMA hqr2 routine
//! (exceptional shifts after 10 and 20 stalled sweeps, diagonal exshift
//! bookkeeping restored on deflation). Only the Schur form is kept; no
//! eigenvector back-substitution.

use super::{eye, require_finite, require_square, DenseError, RealMatrix};

/// Result of [`real_schur`]: `a = q · t · qᵀ`.
#[derive(Debug, Clone)]
pub struct RealSchur {
    pub t: RealMatrix,
    pub q: RealMatrix,
}

impl RealSchur {
    /// Eigenvalues read off the diagonal blocks of T as (re, im) pairs;
    /// complex pairs appear as consecutive conjugates.
    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        let n = self.t.nrows();
        let mut out = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            if i + 1 < n && self.t[(i + 1, i)] != 0.0 {
                let a = self.t[(i, i)];
                let b = self.t[(i, i + 1)];
                let c = self.t[(i + 1, i)];
                let d = self.t[(i + 1, i + 1)];
                let mid = 0.5 * (a + d);
                let disc = 0.25 * (a - d) * (a - d) + b * c;
                if disc >= 0.0 {
                    // Unsplit real pair (only reachable on exotic inputs).
                    let s = disc.sqrt();
                    out.push((mid + s, 0.0));
                    out.push((mid - s, 0.0));
                } else {
                    let s = (-disc).sqrt();
                    out.push((mid, s));
                    out.push((mid, -s));
                }
                i += 2;
            } else {
                out.push((self.t[(i, i)], 0.0));
                i += 1;
            }
        }
        out
    }
}

/// Householder reduction to upper Hessenberg form; returns (H, V) with
/// A = V·H·Vᵀ.
fn hessenberg(a: &RealMatrix) -> (RealMatrix, RealMatrix) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut ort = vec![0.0f64; n];
    let (low, high) = (0usize, n - 1);

    for m in (low + 1)..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[(i, m - 1)].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hsum = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hsum += ort[i] * ort[i];
        }
        let mut g = hsum.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        let hdiv = hsum - ort[m] * g;
        ort[m] -= g;

        // Apply the reflector I − uuᵀ/hdiv from both sides.
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hdiv;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hdiv;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }

    // Accumulate the transformation.
    let mut v = eye(n);
    for m in ((low + 1)..high).rev() {
        if h[(m, m - 1)] != 0.0 {
            for i in (m + 1)..=high {
                ort[i] = h[(i, m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[(i, j)];
                }
                // Double division avoids possible underflow.
                g = (g / ort[m]) / h[(m, m - 1)];
                for i in m..=high {
                    v[(i, j)] += g * ort[i];
                }
            }
        }
    }

    // Zero the below-subdiagonal storage left by the reduction.
    for i in 2..n {
        for j in 0..(i - 1) {
            h[(i, j)] = 0.0;
        }
    }
    (h, v)
}

/// Real Schur decomposition of a square matrix.
///
/// Fails with `SingularPencil` if the QR iteration exceeds 30·n sweeps
/// (non-convergence; effectively unreachable for finite input).
pub fn real_schur(a: &RealMatrix) -> Result<RealSchur, DenseError> {
    require_square(a)?;
    require_finite(a)?;
    let nn = a.nrows();
    if nn == 0 {
        return Ok(RealSchur {
            t: RealMatrix::zeros((0, 0)),
            q: RealMatrix::zeros((0, 0)),
        });
    }
    if nn == 1 {
        return Ok(RealSchur {
            t: a.clone(),
            q: eye(1),
        });
    }

    let (mut h, mut v) = hessenberg(a);

    let low: isize = 0;
    let high: isize = nn as isize - 1;
    let eps = 2.0f64.powi(-52);
    let mut exshift = 0.0f64;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut s, mut z, mut w, mut x, mut y);

    // Norm of the Hessenberg part, used as the negligibility scale.
    let mut norm = 0.0f64;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }
    if norm == 0.0 {
        return Ok(RealSchur { t: h, q: v });
    }

    let hh = |h: &RealMatrix, i: isize, j: isize| h[(i as usize, j as usize)];

    let mut en = high;
    let mut iter = 0usize;
    let mut total_sweeps = 0usize;
    let sweep_cap = 30 * nn;

    while en >= low {
        // Look for a single small subdiagonal element.
        let mut l = en;
        while l > low {
            s = hh(&h, l - 1, l - 1).abs() + hh(&h, l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if hh(&h, l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == en {
            // One real eigenvalue found.
            let eu = en as usize;
            h[(eu, eu)] += exshift;
            if en > low {
                h[(eu, eu - 1)] = 0.0;
            }
            en -= 1;
            iter = 0;
        } else if l == en - 1 {
            // A 2x2 block splits off.
            let eu = en as usize;
            w = h[(eu, eu - 1)] * h[(eu - 1, eu)];
            p = (h[(eu - 1, eu - 1)] - h[(eu, eu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(eu, eu)] += exshift;
            h[(eu - 1, eu - 1)] += exshift;

            if q >= 0.0 {
                // Real eigenvalue pair: rotate the block to triangular form.
                z = if p >= 0.0 { p + z } else { p - z };
                x = h[(eu, eu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in (eu - 1)..nn {
                    let zz = h[(eu - 1, j)];
                    h[(eu - 1, j)] = q * zz + p * h[(eu, j)];
                    h[(eu, j)] = q * h[(eu, j)] - p * zz;
                }
                for i in 0..=eu {
                    let zz = h[(i, eu - 1)];
                    h[(i, eu - 1)] = q * zz + p * h[(i, eu)];
                    h[(i, eu)] = q * h[(i, eu)] - p * zz;
                }
                for i in 0..nn {
                    let zz = v[(i, eu - 1)];
                    v[(i, eu - 1)] = q * zz + p * v[(i, eu)];
                    v[(i, eu)] = q * v[(i, eu)] - p * zz;
                }
                h[(eu, eu - 1)] = 0.0;
            }
            if en - 1 > low {
                h[(eu - 1, eu - 2)] = 0.0;
            }
            en -= 2;
            iter = 0;
        } else {
            // No convergence yet: perform one double-shift QR sweep.
            let eu = en as usize;
            x = h[(eu, eu)];
            y = h[(eu - 1, eu - 1)];
            w = h[(eu, eu - 1)] * h[(eu - 1, eu)];

            if iter == 10 || iter == 20 {
                // Exceptional shift.
                exshift += x;
                for i in (low as usize)..=eu {
                    h[(i, i)] -= x;
                }
                s = h[(eu, eu - 1)].abs() + h[(eu - 1, eu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            iter += 1;
            total_sweeps += 1;
            if total_sweeps > sweep_cap {
                return Err(DenseError::SingularPencil);
            }

            // Find two consecutive small subdiagonal elements.
            let mut m = en - 2;
            while m >= l {
                let mu = m as usize;
                z = h[(mu, mu)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(mu + 1, mu)] + h[(mu, mu + 1)];
                q = h[(mu + 1, mu + 1)] - z - r - s;
                r = h[(mu + 2, mu + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(mu, mu - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[(mu - 1, mu - 1)].abs()
                                + z.abs()
                                + h[(mu + 1, mu + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            let mu = m as usize;
            for i in (mu + 2)..=eu {
                h[(i, i - 2)] = 0.0;
                if i > mu + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows m..en.
            for k in mu..eu {
                let notlast = k != eu - 1;
                if k != mu {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != mu {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            pp += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= pp * z;
                        }
                        h[(k, j)] -= pp * x;
                        h[(k + 1, j)] -= pp * y;
                    }
                    for i in 0..=eu.min(k + 3) {
                        let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            pp += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= pp * r;
                        }
                        h[(i, k)] -= pp;
                        h[(i, k + 1)] -= pp * q;
                    }
                    for i in 0..nn {
                        let mut pp = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            pp += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= pp * r;
                        }
                        v[(i, k)] -= pp;
                        v[(i, k + 1)] -= pp * q;
                    }
                }
            }
        }
    }

    // Scrub negligible leftovers below the quasi-triangular structure so
    // downstream block logic can test subdiagonals against exact zero.
    let mut i = 0;
    while i < nn {
        let block2 = i + 1 < nn && {
            let sub = h[(i + 1, i)].abs();
            let diag = h[(i, i)].abs() + h[(i + 1, i + 1)].abs();
            sub > eps * if diag == 0.0 { norm } else { diag }
        };
        if block2 {
            if i + 2 < nn {
                h[(i + 2, i)] = 0.0;
                h[(i + 2, i + 1)] = 0.0;
            }
            i += 2;
        } else {
            if i + 1 < nn {
                h[(i + 1, i)] = 0.0;
            }
            i += 1;
        }
    }
    for i in 2..nn {
        for j in 0..(i - 1) {
            h[(i, j)] = 0.0;
        }
    }

    Ok(RealSchur { t: h, q: v })
}
