//! Deterministic counter-based random numbers.
//!
//! Every stochastic step in this crate draws from [`CounterRng`], a SplitMix64
//! generator. Output `i` of a stream seeded with `s` is
//!
//! ```text
//! out_i = mix64(s + (i + 1) * 0x9E3779B97F4A7C15)
//! mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB;
//!           z ^= z >> 31
//! ```
//!
//! i.e. a pure function of a 64-bit counter, so streams are reproducible
//! across implementations from the written algorithm alone. Integer output is
//! bit-exact on every platform; floating-point variates additionally depend on
//! the platform's `ln`/`tan` rounding.
//!
//! Sub-streams (per scan point, per molecule, per detector channel) are keyed
//! with [`derive_seed`] so that concurrent execution order cannot change any
//! result.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a master seed and a stream index.
///
/// `derive_seed(m, k) = mix64(m ^ mix64(k + GOLDEN_GAMMA))`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix64(master ^ mix64(stream.wrapping_add(GOLDEN_GAMMA)))
}

/// SplitMix64 counter generator with a small stock of variate samplers.
#[derive(Debug, Clone)]
pub struct CounterRng {
    counter: u64,
    gauss_cache: Option<f64>,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            counter: seed,
            gauss_cache: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(GOLDEN_GAMMA);
        mix64(self.counter)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// `true` with probability `p` (clamped to `[0, 1]`).
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Exponential waiting time with the given rate (mean `1/rate`).
    ///
    /// Returns `f64::INFINITY` for `rate <= 0`: a transition that can never
    /// fire.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        // 1 - u is in (0, 1], so the log is finite and the result >= 0.
        -(1.0 - self.uniform()).ln() / rate
    }

    /// Zero-mean Gaussian with standard deviation `sigma` (Box-Muller, with
    /// the second variate cached).
    pub fn normal(&mut self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            return 0.0;
        }
        if let Some(z) = self.gauss_cache.take() {
            return z * sigma;
        }
        let r = (-2.0 * (1.0 - self.uniform()).ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        self.gauss_cache = Some(r * theta.sin());
        r * theta.cos() * sigma
    }

    /// Lorentzian (Cauchy) variate centered on `center` with full width at
    /// half maximum `fwhm`.
    #[inline]
    pub fn lorentzian(&mut self, center: f64, fwhm: f64) -> f64 {
        center + 0.5 * fwhm * (std::f64::consts::PI * (self.uniform() - 0.5)).tan()
    }
}
