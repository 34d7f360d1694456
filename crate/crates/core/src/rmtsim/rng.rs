//! Seed derivation and Gaussian sampling.
//!
//! The generator is pinned so fixtures stay stable: ChaCha8 (counter based)
//! seeded through [`derive_seed`], with Box–Muller on pairs of 53-bit
//! uniforms. Each complex entry consumes exactly two `u64` draws.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` in repetition `rep`:
/// `splitmix64(splitmix64(seed ^ splitmix64(rep)) ^ stream)`.
pub fn derive_seed(seed: u64, rep: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(rep)) ^ stream)
}

/// Stream indices used inside one repetition.
pub mod streams {
    pub const NOISE: u64 = 0;
    pub const ROTATION: u64 = 1;
    pub const NOISE_COPY: u64 = 2;
}

pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on `(0, 1]`.
    fn open_unit(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        (r * t.cos(), r * t.sin())
    }

    /// Complex Gaussian with `E|x|^2 = 1` (each part has variance 1/2).
    pub fn complex_normal(&mut self) -> Complex64 {
        let (a, b) = self.normal_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// `(±1 ± i)/√2`, also with `E|x|^2 = 1`.
    pub fn complex_rademacher(&mut self) -> Complex64 {
        let bits = self.rng.next_u64();
        let re = if bits & 1 == 0 { 1.0 } else { -1.0 };
        let im = if bits & 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}
