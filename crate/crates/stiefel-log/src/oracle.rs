//! Independent reference computations used by tests and acceptance
//! runs: the analytic sphere distance, a Kronecker-vectorized Sylvester
//! solve, a finite-difference Fréchet derivative, and a brute-force
//! exact-derivative Newton step.
//!
//! Every oracle avoids the code path it certifies: the Kronecker solve
//! never calls the Schur-based Sylvester solver, and the finite
//! difference uses only the exponential itself.

use crate::dense::{
    expm, frechet_expm_exact, frob_norm, solve_linear, DenseError, RealMatrix,
};
use crate::geometry::{build_a, GeometryError, TangentFactors};
use crate::solver::MismatchPartition;
use ndarray::s;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("input is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("size guard: {context}")]
    SizeGuard { context: String },
    #[error("invalid parameter: {context}")]
    InvalidParameter { context: String },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Geodesic distance on the unit sphere S^{n−1}: arccos(xᵀy), with the
/// inner product clamped to [−1, 1]. Inputs are n×1 columns with unit
/// norm within 1e-10.
pub fn sphere_distance(x: &RealMatrix, y: &RealMatrix) -> Result<f64, OracleError> {
    if x.ncols() != 1 || y.ncols() != 1 || x.nrows() != y.nrows() {
        return Err(OracleError::InvalidParameter {
            context: format!(
                "expected two n x 1 columns, got {}x{} and {}x{}",
                x.nrows(),
                x.ncols(),
                y.nrows(),
                y.ncols()
            ),
        });
    }
    for v in [x, y] {
        let norm = frob_norm(v);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(OracleError::NotUnit { norm });
        }
    }
    let dot: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    Ok(dot.clamp(-1.0, 1.0).acos())
}

/// Solves P·X + X·S = C by vectorization: with column-major vec, the
/// system is (I ⊗ P + Sᵀ ⊗ I)·vec(X) = vec(C), solved densely by LU.
/// Guarded to coefficient sizes ≤ 30 (the system is km×km).
pub fn kronecker_sylvester(
    p_mat: &RealMatrix,
    s_mat: &RealMatrix,
    c: &RealMatrix,
) -> Result<RealMatrix, OracleError> {
    let k = p_mat.nrows();
    let m = s_mat.nrows();
    if p_mat.ncols() != k || s_mat.ncols() != m {
        return Err(OracleError::InvalidParameter {
            context: "coefficient matrices must be square".to_string(),
        });
    }
    if c.dim() != (k, m) {
        return Err(OracleError::InvalidParameter {
            context: format!(
                "right side is {}x{}, expected {}x{}",
                c.nrows(),
                c.ncols(),
                k,
                m
            ),
        });
    }
    if k > 30 || m > 30 {
        return Err(OracleError::SizeGuard {
            context: format!("kronecker_sylvester limited to sizes <= 30, got {k} and {m}"),
        });
    }
    let dim = k * m;
    let mut big = RealMatrix::zeros((dim, dim));
    // Column-major vec: entry X[r, c] sits at index c·k + r.
    for col in 0..m {
        for r in 0..k {
            let row = col * k + r;
            for r2 in 0..k {
                big[(row, col * k + r2)] += p_mat[(r, r2)];
            }
            for c2 in 0..m {
                big[(row, c2 * k + r)] += s_mat[(c2, col)];
            }
        }
    }
    let mut rhs = RealMatrix::zeros((dim, 1));
    for col in 0..m {
        for r in 0..k {
            rhs[(col * k + r, 0)] = c[(r, col)];
        }
    }
    let sol = solve_linear(&big, &rhs)?;
    let mut x = RealMatrix::zeros((k, m));
    for col in 0..m {
        for r in 0..k {
            x[(r, col)] = sol[(col * k + r, 0)];
        }
    }
    Ok(x)
}

/// Central finite difference of the matrix exponential in direction E:
/// (expm(A + hE) − expm(A − hE)) / (2h), accurate to O(h²). The step is
/// guarded to [1e-7, 1e-3].
pub fn finite_difference_frechet(
    a: &RealMatrix,
    e: &RealMatrix,
    h: f64,
) -> Result<RealMatrix, OracleError> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(OracleError::InvalidParameter {
            context: format!("step must lie in [1e-7, 1e-3], got {h}"),
        });
    }
    if a.dim() != e.dim() {
        return Err(OracleError::InvalidParameter {
            context: "direction must have the base point's shape".to_string(),
        });
    }
    let plus = expm(&(a + &(e * h)))?;
    let minus = expm(&(a - &(e * h)))?;
    Ok((&plus - &minus) / (2.0 * h))
}

/// Orthonormal-free basis of the factor space: all strictly-lower skew
/// generators of Ω followed by all entries of K, dimension
/// p(p−1)/2 + (n−p)p (= dim St(n,p)).
fn factor_basis(n: usize, p: usize) -> Vec<TangentFactors> {
    let mut basis = Vec::new();
    for i in 0..p {
        for j in 0..i {
            let mut omega = RealMatrix::zeros((p, p));
            omega[(i, j)] = 1.0;
            omega[(j, i)] = -1.0;
            basis.push(TangentFactors::new(omega, RealMatrix::zeros((n - p, p))).unwrap());
        }
    }
    for r in 0..n - p {
        for c in 0..p {
            let mut k = RealMatrix::zeros((n - p, p));
            k[(r, c)] = 1.0;
            basis.push(TangentFactors::new(RealMatrix::zeros((p, p)), k).unwrap());
        }
    }
    basis
}

/// Brute-force Newton step with the exact (untruncated) derivative of
/// the exponential: assembles the linear map
/// δ ↦ (D expm(A)[A(δ)])·I_{n,p} columnwise over a basis of the factor
/// space and solves the least-squares system against the stacked
/// mismatch [W; N]. Small sizes only (n ≤ 12); this is the desk-scale
/// stand-in for an exact-Jacobian shooting step.
pub fn exact_step_reference(
    f: &TangentFactors,
    part: &MismatchPartition,
) -> Result<(RealMatrix, RealMatrix), OracleError> {
    let p = f.p();
    let n = p + f.k().nrows();
    if n > 12 {
        return Err(OracleError::SizeGuard {
            context: format!("exact_step_reference limited to n <= 12, got n = {n}"),
        });
    }
    if part.w.dim() != (p, p) || part.n.dim() != (n - p, p) {
        return Err(OracleError::InvalidParameter {
            context: "partition blocks do not match the factors".to_string(),
        });
    }
    let a = build_a(f);
    let basis = factor_basis(n, p);
    let dim = basis.len();
    let rows = n * p;
    let mut system = RealMatrix::zeros((rows, dim));
    for (b, dir) in basis.iter().enumerate() {
        let da = build_a(dir);
        let de = frechet_expm_exact(&a, &da)?;
        let cols = de.slice(s![.., 0..p]);
        for c in 0..p {
            for r in 0..n {
                system[(c * n + r, b)] = cols[(r, c)];
            }
        }
    }
    let mut rhs = RealMatrix::zeros((rows, 1));
    for c in 0..p {
        for r in 0..p {
            rhs[(c * n + r, 0)] = part.w[(r, c)];
        }
        for r in 0..n - p {
            rhs[(c * n + p + r, 0)] = part.n[(r, c)];
        }
    }
    // Least squares via the normal equations; the basis is tiny and the
    // operator is well conditioned at moderate ‖ξ‖.
    let gram = system.t().dot(&system);
    let proj = system.t().dot(&rhs);
    let coeffs = solve_linear(&gram, &proj)?;
    let mut d_omega = RealMatrix::zeros((p, p));
    let mut d_k = RealMatrix::zeros((n - p, p));
    for (b, dir) in basis.iter().enumerate() {
        let w = coeffs[(b, 0)];
        d_omega = d_omega + dir.omega() * w;
        d_k = d_k + dir.k() * w;
    }
    Ok((d_omega, d_k))
}

/// Dimension of the factor basis used by `exact_step_reference`.
pub fn factor_basis_dimension(n: usize, p: usize) -> usize {
    factor_basis(n, p).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{skew_part, solve_sylvester, thin_qr};
    use crate::rng::SplitMix64;
    use crate::solver::newton_step;

    fn random_matrix(n: usize, m: usize, rng: &mut SplitMix64) -> RealMatrix {
        RealMatrix::from_shape_fn((n, m), |_| rng.next_normal())
    }

    fn unit_column(n: usize, rng: &mut SplitMix64) -> RealMatrix {
        let v = random_matrix(n, 1, rng);
        let s = frob_norm(&v);
        v / s
    }

    #[test]
    fn sphere_distance_trivials() {
        let mut rng = SplitMix64::new(20);
        let x = unit_column(5, &mut rng);
        assert_eq!(sphere_distance(&x, &x).unwrap(), 0.0);
        let minus = &x * -1.0;
        assert!((sphere_distance(&x, &minus).unwrap() - std::f64::consts::PI).abs() <= 1e-15);
        // Orthogonal pair: π/2.
        let mut e1 = RealMatrix::zeros((4, 1));
        e1[(0, 0)] = 1.0;
        let mut e2 = RealMatrix::zeros((4, 1));
        e2[(2, 0)] = 1.0;
        assert!(
            (sphere_distance(&e1, &e2).unwrap() - std::f64::consts::FRAC_PI_2).abs() <= 1e-15
        );
    }

    #[test]
    fn sphere_distance_rejects_non_unit() {
        let mut rng = SplitMix64::new(21);
        let x = unit_column(5, &mut rng);
        let bad = &x * 1.5;
        assert!(matches!(
            sphere_distance(&x, &bad),
            Err(OracleError::NotUnit { .. })
        ));
    }

    #[test]
    fn kronecker_identity_coefficients() {
        let mut rng = SplitMix64::new(22);
        let c = random_matrix(4, 4, &mut rng);
        let x = kronecker_sylvester(&RealMatrix::eye(4), &RealMatrix::zeros((4, 4)), &c).unwrap();
        assert!(frob_norm(&(&x - &c)) <= 1e-12);
    }

    #[test]
    fn kronecker_scalar_case() {
        let p = RealMatrix::from_elem((1, 1), 2.0);
        let s = RealMatrix::from_elem((1, 1), 3.0);
        let c = RealMatrix::from_elem((1, 1), 10.0);
        let x = kronecker_sylvester(&p, &s, &c).unwrap();
        assert!((x[(0, 0)] - 2.0).abs() <= 1e-14);
    }

    #[test]
    fn kronecker_size_guard() {
        let big = RealMatrix::eye(31);
        let c = RealMatrix::zeros((31, 31));
        assert!(matches!(
            kronecker_sylvester(&big, &big, &c),
            Err(OracleError::SizeGuard { .. })
        ));
    }

    #[test]
    fn kronecker_matches_schur_solver() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..50 {
            let p = random_matrix(5, 5, &mut rng) + RealMatrix::eye(5) * 3.0;
            let s = random_matrix(5, 5, &mut rng) * 0.3;
            let c = random_matrix(5, 5, &mut rng);
            let via_kron = kronecker_sylvester(&p, &s, &c).unwrap();
            let via_schur = solve_sylvester(&p, &s, &c).unwrap();
            let gap = frob_norm(&(&via_kron - &via_schur));
            let scale = frob_norm(&via_kron).max(1.0);
            assert!(gap <= 1e-11 * scale, "gap {gap}");
        }
    }

    #[test]
    fn finite_difference_at_zero_base() {
        let mut rng = SplitMix64::new(24);
        let e = random_matrix(4, 4, &mut rng);
        let fd = finite_difference_frechet(&RealMatrix::zeros((4, 4)), &e, 1e-5).unwrap();
        let gap = frob_norm(&(&fd - &e));
        assert!(gap <= 1e-9, "gap {gap}");
    }

    #[test]
    fn finite_difference_matches_exact() {
        let mut rng = SplitMix64::new(25);
        let a = random_matrix(4, 4, &mut rng) * 0.5;
        let e = random_matrix(4, 4, &mut rng);
        let fd = finite_difference_frechet(&a, &e, 1e-5).unwrap();
        let exact = frechet_expm_exact(&a, &e).unwrap();
        let gap = frob_norm(&(&fd - &exact));
        assert!(gap <= 1e-8, "gap {gap}");
    }

    #[test]
    fn finite_difference_is_second_order() {
        let mut rng = SplitMix64::new(26);
        let a = random_matrix(4, 4, &mut rng) * 0.5;
        let e = random_matrix(4, 4, &mut rng);
        let exact = frechet_expm_exact(&a, &e).unwrap();
        let e1 = frob_norm(&(&finite_difference_frechet(&a, &e, 1e-3).unwrap() - &exact));
        let e2 = frob_norm(&(&finite_difference_frechet(&a, &e, 5e-4).unwrap() - &exact));
        let ratio = e1 / e2;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn finite_difference_step_guard() {
        let a = RealMatrix::zeros((3, 3));
        assert!(finite_difference_frechet(&a, &a, 1e-8).is_err());
        assert!(finite_difference_frechet(&a, &a, 1e-2).is_err());
    }

    #[test]
    fn basis_dimension_matches_manifold() {
        assert_eq!(factor_basis_dimension(6, 2), 2 * 1 / 2 + 4 * 2);
        assert_eq!(factor_basis_dimension(12, 3), 3 + 27);
        assert_eq!(
            factor_basis_dimension(9, 4),
            crate::probgen::manifold_dimension(9, 4)
        );
    }

    #[test]
    fn exact_step_at_zero_matches_truncated() {
        let mut rng = SplitMix64::new(27);
        let f = TangentFactors::zeros(6, 2);
        let w = random_matrix(2, 2, &mut rng);
        let n = random_matrix(4, 2, &mut rng);
        let part = MismatchPartition { w: w.clone(), n: n.clone() };
        let (eo, ek) = exact_step_reference(&f, &part).unwrap();
        let (to, tk) = newton_step(&f, &part).unwrap();
        assert!(frob_norm(&(&eo - &to)) <= 1e-12);
        assert!(frob_norm(&(&ek - &tk)) <= 1e-12);
        // Both reduce to the closed form (skew(W), N).
        let skew_w = skew_part(&w).unwrap();
        assert!(frob_norm(&(&eo - &skew_w)) <= 1e-12);
        assert!(frob_norm(&(&ek - &n)) <= 1e-12);
    }

    #[test]
    fn truncation_error_is_first_order_in_xi() {
        let mut rng = SplitMix64::new(28);
        // Fixed mismatch, factor norm swept: the difference between the
        // truncated and exact steps scales linearly with ‖ξ‖.
        let base = {
            let o = random_matrix(2, 2, &mut rng);
            let k = random_matrix(4, 2, &mut rng);
            let f = TangentFactors::new(o, k).unwrap();
            f.scaled(1.0 / f.canonical_norm())
        };
        let w = random_matrix(2, 2, &mut rng) * 0.1;
        let n = random_matrix(4, 2, &mut rng) * 0.1;
        let part = MismatchPartition { w, n };
        let diff_at = |s: f64| -> f64 {
            let f = base.scaled(s);
            let (eo, ek) = exact_step_reference(&f, &part).unwrap();
            let (to, tk) = newton_step(&f, &part).unwrap();
            let d_o = frob_norm(&(&eo - &to));
            let d_k = frob_norm(&(&ek - &tk));
            (d_o * d_o + d_k * d_k).sqrt()
        };
        let ratio = diff_at(0.1) / diff_at(0.05);
        assert!((1.4..=2.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn exact_step_size_guard() {
        let f = TangentFactors::zeros(13, 2);
        let part = MismatchPartition {
            w: RealMatrix::zeros((2, 2)),
            n: RealMatrix::zeros((11, 2)),
        };
        assert!(matches!(
            exact_step_reference(&f, &part),
            Err(OracleError::SizeGuard { .. })
        ));
    }

    #[test]
    fn exact_step_contracts_planted_error() {
        // One exact-derivative Newton step from a perturbed iterate must
        // move the factors much closer to the planted solution (the
        // contraction is quadratic; we assert a comfortable factor).
        let mut rng = SplitMix64::new(29);
        let y = thin_qr(&random_matrix(6, 2, &mut rng)).unwrap().q;
        let y0 = crate::geometry::StiefelPoint::new(y).unwrap();
        let frame = crate::geometry::make_frame(&y0).unwrap();
        let f0 = {
            let o = random_matrix(2, 2, &mut rng);
            let k = random_matrix(4, 2, &mut rng);
            let f = TangentFactors::new(o, k).unwrap();
            f.scaled(0.4 / f.canonical_norm())
        };
        let (y1, _) = crate::geometry::geodesic(&frame, &f0, 1.0).unwrap();
        let f = f0.scaled(0.95);
        let (_, _, part) = crate::solver::residual(&frame, &f, &y1).unwrap();
        let (d_omega, d_k) = exact_step_reference(&f, &part).unwrap();
        let factor_gap = |a: &TangentFactors, b: &TangentFactors| -> f64 {
            let o = frob_norm(&(a.omega() - b.omega()));
            let k = frob_norm(&(a.k() - b.k()));
            (o * o + k * k).sqrt()
        };
        let before = factor_gap(&f, &f0);
        let stepped =
            TangentFactors::new(f.omega() + &d_omega, f.k() + &d_k).unwrap();
        let after = factor_gap(&stepped, &f0);
        assert!(
            after <= 0.5 * before,
            "exact step barely contracted: {before} -> {after}"
        );
    }
}
