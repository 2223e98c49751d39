//! Deterministic, seeded generation of Stiefel points, tangent vectors
//! of prescribed canonical norm, and endpoint pairs with a planted
//! geodesic of prescribed length.
//!
//! Every output is a pure function of (seed, trial_index, dimensions,
//! distance): each trial gets its own counter-derived RNG stream, so
//! trials can be generated in any order or in parallel.

use crate::dense::{frob_norm, skew_part, thin_qr, RealMatrix};
use crate::geometry::{
    ambient_from_factors, build_a, geodesic, make_frame, AmbientTangent, GeometryError,
    StiefelFrame, StiefelPoint, TangentFactors,
};
use crate::rng::{trial_rng, SplitMix64};
use crate::solver::{GeodesicProblem, SolverError, SolverOptions};
use ndarray::s;

/// Parameters of one benchmark family: dimensions, the prescribed
/// geodesic distance of planted pairs, the master seed, and how many
/// trials to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub trials: usize,
}

/// The planted distance is deliberately not a field: it is passed per
/// call so one `GeneratorSpec` can be reused across distances.
impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.p < 1 || self.p > self.n {
            return Err(SolverError::DimensionMismatch {
                context: format!("need 1 <= p <= n, got n={}, p={}", self.n, self.p),
            });
        }
        Ok(())
    }
}

/// An endpoint pair with a known geodesic between them: Y1 is the time-1
/// point of the geodesic from Y0 with initial velocity `planted_xi`,
/// whose canonical norm is `planted_norm`.
#[derive(Debug, Clone)]
pub struct PlantedPair {
    pub problem: GeodesicProblem,
    pub planted_xi: AmbientTangent,
    pub planted_norm: f64,
}

fn gaussian(rows: usize, cols: usize, rng: &mut SplitMix64) -> RealMatrix {
    RealMatrix::from_shape_fn((rows, cols), |_| rng.next_normal())
}

/// A point drawn by orthonormalizing an n×p matrix of independent
/// standard normal entries (redrawn in the probability-zero event of
/// rank deficiency).
pub fn random_stiefel(
    n: usize,
    p: usize,
    rng: &mut SplitMix64,
) -> Result<StiefelPoint, GeometryError> {
    if p < 1 || p > n {
        return Err(GeometryError::InvalidDimensions { n, p });
    }
    loop {
        let f = thin_qr(&gaussian(n, p, rng))?;
        if !f.rank_deficient {
            return StiefelPoint::new(f.q);
        }
    }
}

/// Tangent factors with standard normal entries (Ω skew-projected),
/// jointly rescaled so the canonical norm is exactly `d`. d = 0 returns
/// zero factors. For p = 1 the skew projection forces Ω = 0, so the
/// whole norm sits in K.
pub fn random_tangent_with_norm(
    frame: &StiefelFrame,
    d: f64,
    rng: &mut SplitMix64,
) -> Result<TangentFactors, GeometryError> {
    if !d.is_finite() || d < 0.0 {
        return Err(GeometryError::InvalidParameter {
            context: format!("prescribed norm must be finite and nonnegative, got {d}"),
        });
    }
    let (n, p) = (frame.n(), frame.p());
    if d == 0.0 {
        return Ok(TangentFactors::zeros(n, p));
    }
    if manifold_dimension(n, p) == 0 {
        return Err(GeometryError::InvalidParameter {
            context: format!("St({n},{p}) has no nonzero tangent vectors"),
        });
    }
    loop {
        let f = TangentFactors::new(gaussian(p, p, rng), gaussian(n - p, p, rng))?;
        let c = f.canonical_norm();
        if c > 0.0 {
            return Ok(f.scaled(d / c));
        }
    }
}

/// Dimension of St(n,p) as a manifold: p(p−1)/2 + (n−p)p.
pub fn manifold_dimension(n: usize, p: usize) -> usize {
    p * (p - 1) / 2 + (n - p) * p
}

/// Builds the endpoint pair for one trial: Y0 random, ξ random with
/// ‖ξ‖ = d, Y1 = Exp_{Y0}(ξ). The planted tangent is retained so tests
/// can compare the recovered log against it.
///
/// When n ≥ 2p the exponential is evaluated in the 2p-dimensional
/// subspace spanned by [Y0, Qc] where Qc·Rc is the thin QR of the
/// out-of-span tangent component; this avoids building an n×n frame and
/// keeps the cost at O(np²), while producing the same distribution as
/// the frame-based construction (the complement coordinates of a
/// Gaussian matrix are Gaussian).
pub fn pair_with_distance(
    spec: &GeneratorSpec,
    trial_index: u64,
    d: f64,
    options: SolverOptions,
) -> Result<PlantedPair, SolverError> {
    spec.validate()?;
    if !d.is_finite() || d < 0.0 {
        return Err(SolverError::InvalidOptions {
            context: format!("prescribed distance must be finite and nonnegative, got {d}"),
        });
    }
    let (n, p) = (spec.n, spec.p);
    let mut rng = trial_rng(spec.seed, trial_index);
    let y0 = random_stiefel(n, p, &mut rng)?;

    if d == 0.0 {
        let problem = GeodesicProblem::new(y0.clone(), y0.clone(), options)?;
        return Ok(PlantedPair {
            problem,
            planted_xi: AmbientTangent::zero(y0),
            planted_norm: 0.0,
        });
    }

    if n >= 2 * p {
        // Subspace route: ξ = Y0·Ω + Qc·Rc with C = (I − Y0Y0ᵀ)G
        // Gaussian; the geodesic stays in span[Y0 Qc].
        let (omega, qc, rc) = loop {
            let omega = skew_part(&gaussian(p, p, &mut rng))?;
            let g = gaussian(n, p, &mut rng);
            let c = &g - &y0.y().dot(&y0.y().t().dot(&g));
            let scale = {
                let o = frob_norm(&omega);
                let k = frob_norm(&c);
                let norm = (0.5 * o * o + k * k).sqrt();
                if norm == 0.0 {
                    continue;
                }
                d / norm
            };
            let qr = thin_qr(&c)?;
            if qr.rank_deficient {
                continue;
            }
            break (&omega * scale, qr.q, &qr.r * scale);
        };
        let f_hat = TangentFactors::new(omega.clone(), rc.clone())?;
        let e = crate::dense::expm(&build_a(&f_hat))?;
        let e_cols = e.slice(s![.., 0..p]);
        let top = e_cols.slice(s![0..p, ..]);
        let bot = e_cols.slice(s![p.., ..]);
        let y1_mat = &y0.y().dot(&top) + &qc.dot(&bot);
        let y1 = StiefelPoint::new(y1_mat)?;
        let xi = &y0.y().dot(&omega) + &qc.dot(&rc);
        let planted_xi = AmbientTangent::new_unchecked(y0.clone(), xi);
        let problem = GeodesicProblem::new(y0, y1, options)?;
        return Ok(PlantedPair {
            problem,
            planted_xi,
            planted_norm: d,
        });
    }

    // Wide case (p > n/2): the complement is smaller than p, so the full
    // frame is the natural (and cheap) route.
    let frame = make_frame(&y0)?;
    let f = random_tangent_with_norm(&frame, d, &mut rng)?;
    let (y1, _) = geodesic(&frame, &f, 1.0)?;
    let planted_xi = ambient_from_factors(&frame, &f)?;
    let problem = GeodesicProblem::new(y0, y1.clone(), options)?;
    Ok(PlantedPair {
        problem,
        planted_xi,
        planted_norm: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{canonical_norm, factors_from_ambient};
    use crate::solver::SolverOptions;

    fn spec(n: usize, p: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            n,
            p,
            seed,
            trials: 1,
        }
    }

    #[test]
    fn random_stiefel_is_orthonormal() {
        let mut rng = SplitMix64::new(7);
        for &(n, p) in &[(5, 2), (6, 6), (10, 1), (12, 5)] {
            let y = random_stiefel(n, p, &mut rng).unwrap();
            let r = frob_norm(&(&y.y().t().dot(y.y()) - &RealMatrix::eye(p)));
            assert!(r <= 1e-12, "St({n},{p}) residual {r}");
        }
    }

    #[test]
    fn random_stiefel_is_deterministic() {
        let a = random_stiefel(8, 3, &mut SplitMix64::new(123)).unwrap();
        let b = random_stiefel(8, 3, &mut SplitMix64::new(123)).unwrap();
        assert_eq!(a.y(), b.y());
    }

    #[test]
    fn random_stiefel_mean_gram_is_identity() {
        let mut rng = SplitMix64::new(8);
        let mut mean = RealMatrix::zeros((2, 2));
        for _ in 0..1000 {
            let y = random_stiefel(5, 2, &mut rng).unwrap();
            mean = mean + y.y().t().dot(y.y());
        }
        mean = mean / 1000.0;
        let r = frob_norm(&(&mean - &RealMatrix::eye(2)));
        assert!(r <= 1e-12, "mean Gram residual {r}");
    }

    #[test]
    fn random_stiefel_rejects_bad_dims() {
        let mut rng = SplitMix64::new(9);
        assert!(random_stiefel(3, 4, &mut rng).is_err());
        assert!(random_stiefel(3, 0, &mut rng).is_err());
    }

    #[test]
    fn tangent_norm_is_exact() {
        let mut rng = SplitMix64::new(10);
        let y = random_stiefel(9, 3, &mut rng).unwrap();
        let frame = make_frame(&y).unwrap();
        let d = 0.5 * std::f64::consts::PI;
        let f = random_tangent_with_norm(&frame, d, &mut rng).unwrap();
        let o = frob_norm(f.omega());
        let k = frob_norm(f.k());
        let sq = 0.5 * o * o + k * k;
        assert!((sq - d * d).abs() <= 1e-13, "norm² {sq}");
        assert!((f.canonical_norm() - d).abs() <= 1e-14);
    }

    #[test]
    fn tangent_zero_distance() {
        let mut rng = SplitMix64::new(11);
        let y = random_stiefel(6, 2, &mut rng).unwrap();
        let frame = make_frame(&y).unwrap();
        let f = random_tangent_with_norm(&frame, 0.0, &mut rng).unwrap();
        assert_eq!(frob_norm(f.omega()), 0.0);
        assert_eq!(frob_norm(f.k()), 0.0);
    }

    #[test]
    fn tangent_p1_has_zero_omega() {
        let mut rng = SplitMix64::new(12);
        let y = random_stiefel(7, 1, &mut rng).unwrap();
        let frame = make_frame(&y).unwrap();
        let f = random_tangent_with_norm(&frame, 1.3, &mut rng).unwrap();
        assert_eq!(frob_norm(f.omega()), 0.0);
        assert!((frob_norm(f.k()) - 1.3).abs() <= 1e-14);
    }

    #[test]
    fn tangent_rejects_zero_dimensional_manifold() {
        let mut rng = SplitMix64::new(13);
        let y = random_stiefel(1, 1, &mut rng).unwrap();
        let frame = make_frame(&y).unwrap();
        assert!(random_tangent_with_norm(&frame, 0.5, &mut rng).is_err());
        assert!(random_tangent_with_norm(&frame, 0.0, &mut rng).is_ok());
    }

    #[test]
    fn manifold_dimension_formula() {
        assert_eq!(manifold_dimension(1, 1), 0);
        assert_eq!(manifold_dimension(2, 1), 1);
        assert_eq!(manifold_dimension(6, 2), 9);
        assert_eq!(manifold_dimension(500, 16), 7864);
    }

    #[test]
    fn pair_zero_distance_returns_same_point() {
        let pair =
            pair_with_distance(&spec(10, 3, 42), 0, 0.0, SolverOptions::default()).unwrap();
        assert_eq!(pair.problem.y0().y(), pair.problem.y1().y());
        assert_eq!(pair.planted_norm, 0.0);
        assert_eq!(frob_norm(pair.planted_xi.xi()), 0.0);
    }

    #[test]
    fn pair_planted_norm_and_manifold_residual() {
        let d = 0.5 * std::f64::consts::PI;
        let pair = pair_with_distance(&spec(20, 3, 42), 0, d, SolverOptions::default()).unwrap();
        let got = canonical_norm(pair.problem.y0(), &pair.planted_xi).unwrap();
        assert!((got - d).abs() <= 1e-13, "planted norm {got}");
        let y1 = pair.problem.y1();
        let r = frob_norm(&(&y1.y().t().dot(y1.y()) - &RealMatrix::eye(3)));
        assert!(r <= 1e-11, "Y1 manifold residual {r}");
    }

    #[test]
    fn pair_is_deterministic_and_streams_are_independent() {
        let d = 0.7;
        let o = SolverOptions::default();
        let a = pair_with_distance(&spec(12, 2, 99), 4, d, o).unwrap();
        let b = pair_with_distance(&spec(12, 2, 99), 4, d, o).unwrap();
        assert_eq!(a.problem.y0().y(), b.problem.y0().y());
        assert_eq!(a.problem.y1().y(), b.problem.y1().y());
        let c = pair_with_distance(&spec(12, 2, 99), 5, d, o).unwrap();
        assert!(a.problem.y0().y() != c.problem.y0().y());
    }

    /// The subspace planting must agree with the direct frame-based
    /// exponential: re-extract factors of the planted tangent through a
    /// full frame and shoot the geodesic; the endpoint must be Y1.
    #[test]
    fn fast_plant_matches_full_geodesic() {
        let d = 0.5 * std::f64::consts::PI;
        let pair = pair_with_distance(&spec(20, 3, 7), 2, d, SolverOptions::default()).unwrap();
        let frame = make_frame(pair.problem.y0()).unwrap();
        let f = factors_from_ambient(&frame, &pair.planted_xi).unwrap();
        let (y1_direct, _) = geodesic(&frame, &f, 1.0).unwrap();
        let gap = frob_norm(&(y1_direct.y() - pair.problem.y1().y()));
        assert!(gap <= 1e-12, "plant/geodesic gap {gap}");
    }

    #[test]
    fn wide_case_plants_correctly() {
        // p > n/2 exercises the frame route.
        let d = 0.8;
        let pair = pair_with_distance(&spec(7, 4, 5), 1, d, SolverOptions::default()).unwrap();
        let got = canonical_norm(pair.problem.y0(), &pair.planted_xi).unwrap();
        assert!((got - d).abs() <= 1e-13);
        let frame = make_frame(pair.problem.y0()).unwrap();
        let f = factors_from_ambient(&frame, &pair.planted_xi).unwrap();
        let (y1_direct, _) = geodesic(&frame, &f, 1.0).unwrap();
        let gap = frob_norm(&(y1_direct.y() - pair.problem.y1().y()));
        assert!(gap <= 1e-12, "plant/geodesic gap {gap}");
    }

    #[test]
    fn boundary_case_n_equals_2p() {
        let d = 0.6;
        let pair = pair_with_distance(&spec(8, 4, 3), 0, d, SolverOptions::default()).unwrap();
        let got = canonical_norm(pair.problem.y0(), &pair.planted_xi).unwrap();
        assert!((got - d).abs() <= 1e-13);
    }

    #[test]
    fn spec_validation() {
        assert!(spec(3, 4, 0).validate().is_err());
        assert!(spec(3, 3, 0).validate().is_ok());
        assert!(
            pair_with_distance(&spec(5, 2, 0), 0, -1.0, SolverOptions::default()).is_err()
        );
    }
}
