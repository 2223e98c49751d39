//! Matrix exponential (scaling and squaring, diagonal Padé) and its
//! Fréchet derivatives: the two-term truncation used by the shooting
//! solver and the exact block-matrix oracle.

use super::{
    eye, norm_1, require_finite, require_same_shape, require_square, solve_linear, DenseError,
    RealMatrix,
};

// Degree-m Padé validity thresholds for the 1-norm (Higham 2005).
const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_230e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068e0;
const THETA_13: f64 = 5.371_920_351_148_152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Evaluates the degree-m diagonal Padé approximant r_m(A) for m ≤ 9,
/// given the required even powers of A.
fn pade_low(
    a: &RealMatrix,
    powers: &[&RealMatrix],
    b: &[f64],
) -> Result<RealMatrix, DenseError> {
    let n = a.nrows();
    let id = eye(n);
    // U = A·(Σ b_{2k+1} A^{2k}), V = Σ b_{2k} A^{2k}.
    let mut u_inner = &id * b[1];
    let mut v = &id * b[0];
    for (k, a2k) in powers.iter().enumerate() {
        u_inner = u_inner + &(*a2k * b[2 * k + 3]);
        v = v + &(*a2k * b[2 * k + 2]);
    }
    let u = a.dot(&u_inner);
    solve_linear(&(&v - &u), &(&v + &u))
}

/// Degree-13 Padé with the factored evaluation scheme.
fn pade13(
    a: &RealMatrix,
    a2: &RealMatrix,
    a4: &RealMatrix,
    a6: &RealMatrix,
) -> Result<RealMatrix, DenseError> {
    let n = a.nrows();
    let id = eye(n);
    let b = &B13;
    let w1 = &(a6 * b[13]) + &(a4 * b[11]) + &(a2 * b[9]);
    let w2 = &(a6 * b[7]) + &(a4 * b[5]) + &(a2 * b[3]) + &(&id * b[1]);
    let u = a.dot(&(&a6.dot(&w1) + &w2));
    let z1 = &(a6 * b[12]) + &(a4 * b[10]) + &(a2 * b[8]);
    let v = &a6.dot(&z1) + &(a6 * b[6]) + &(a4 * b[4]) + &(a2 * b[2]) + &(&id * b[0]);
    solve_linear(&(&v - &u), &(&v + &u))
}

/// Matrix exponential e^A by scaling and squaring with diagonal Padé
/// approximants of degree 3/5/7/9/13. For skew-symmetric A the result is
/// orthogonal within 1e-12·n.
pub fn expm(a: &RealMatrix) -> Result<RealMatrix, DenseError> {
    require_square(a)?;
    require_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(RealMatrix::zeros((0, 0)));
    }
    let nrm = norm_1(a);

    if nrm <= THETA_9 {
        let a2 = a.dot(a);
        if nrm <= THETA_3 {
            return pade_low(a, &[&a2], &B3);
        }
        let a4 = a2.dot(&a2);
        if nrm <= THETA_5 {
            return pade_low(a, &[&a2, &a4], &B5);
        }
        let a6 = a4.dot(&a2);
        if nrm <= THETA_7 {
            return pade_low(a, &[&a2, &a4, &a6], &B7);
        }
        let a8 = a6.dot(&a2);
        return pade_low(a, &[&a2, &a4, &a6, &a8], &B9);
    }

    // Scale so the 1-norm falls under the degree-13 threshold, then square.
    let s = ((nrm / THETA_13).log2().ceil() as i32).max(0);
    let scaled = a / 2f64.powi(s);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let mut x = pade13(&scaled, &a2, &a4, &a6)?;
    for _ in 0..s {
        x = x.dot(&x);
    }
    Ok(x)
}

/// Two-term truncation of the Fréchet derivative of the exponential:
/// exactly E + ½(A·E + E·A). This is the linearization the shooting
/// solver uses; its error is O(‖A‖²) relative to [`frechet_expm_exact`].
pub fn frechet_expm_truncated(
    a: &RealMatrix,
    e: &RealMatrix,
) -> Result<RealMatrix, DenseError> {
    require_square(a)?;
    require_same_shape(a, e, "frechet_expm_truncated")?;
    let anti = a.dot(e) + e.dot(a);
    Ok(e + &(anti * 0.5))
}

/// Exact Fréchet derivative D expm(A)\[E\] via the block identity
/// expm(\[\[A, E\], \[0, A\]\]) = \[\[e^A, D expm(A)\[E\]\], \[0, e^A\]\].
/// Linear in E to the accuracy of `expm`.
pub fn frechet_expm_exact(a: &RealMatrix, e: &RealMatrix) -> Result<RealMatrix, DenseError> {
    require_square(a)?;
    require_same_shape(a, e, "frechet_expm_exact")?;
    let n = a.nrows();
    let mut block = RealMatrix::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = a[(i, j)];
            block[(i, n + j)] = e[(i, j)];
            block[(n + i, n + j)] = a[(i, j)];
        }
    }
    let big = expm(&block)?;
    Ok(RealMatrix::from_shape_fn((n, n), |(i, j)| big[(i, n + j)]))
}
