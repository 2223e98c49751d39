//! Portable seeded random number generation.
//!
//! SplitMix64 with the reference constants, plus Box–Muller for Gaussians.
//! Chosen over an external RNG crate so that every constant is written out
//! here and a seed reproduces the same stream in any other implementation
//! of these two textbook algorithms (the benchmark protocol depends on
//! cross-implementation reproducibility, not statistical exotica).

/// SplitMix64 finalizer/step constants (Steele, Lea & Flood 2014).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output mixing function.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream with a cached Box–Muller spare.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in the half-open interval (0, 1]: 53 random bits, shifted
    /// away from zero so it is safe inside a logarithm.
    pub fn next_uniform(&mut self) -> f64 {
        let bits = self.next_u64() >> 11;
        (bits as f64 + 1.0) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw via Box–Muller; the paired value is cached so
    /// consecutive draws consume uniforms deterministically two at a time.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Independent per-trial stream: both inputs pass through the SplitMix64
/// finalizer so trials are order-independent and parallelizable, and
/// adjacent seeds or trial indices do not produce correlated streams.
pub fn trial_rng(seed: u64, trial_index: u64) -> SplitMix64 {
    SplitMix64::new(mix64(seed).wrapping_add(mix64(trial_index ^ GOLDEN_GAMMA)))
}
