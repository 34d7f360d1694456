//! Moment-level information-plus-noise maps and the `G²` estimator.
//!
//! With `c = n/N`, the spectra of `Γ = (1/N) R R*` and
//! `W = (1/N)(R + σX)(R + σX)*` are related through
//!
//! ```text
//! μ_W ⊠⁻¹ μ_c = (μ_Γ ⊠⁻¹ μ_c) ⊞ δ_{σ²}
//! ```
//!
//! where `μ_c` is the mean-one Marčenko–Pastur law.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::freeconv::{mp_conv, mp_deconv, shift};
use crate::rmtsim::CMatrix;
use crate::transforms::{dozier_silverstein_mw, stieltjes_atoms, stieltjes_moments, EvalPoint};
use crate::types::{AtomicMeasure, MomentSequence};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoNoiseParams {
    pub c: f64,
    pub sigma2: f64,
    pub order: usize,
}

impl InfoNoiseParams {
    pub fn new(c: f64, sigma2: f64, order: usize) -> Result<Self> {
        let p = InfoNoiseParams { c, sigma2, order };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::domain(format!("ratio must be positive, got {}", self.c)));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::domain(format!(
                "noise variance must be nonnegative, got {}",
                self.sigma2
            )));
        }
        if self.order == 0 {
            return Err(Error::domain("order must be >= 1"));
        }
        Ok(())
    }
}

fn at_order(m: &MomentSequence, order: usize) -> Result<MomentSequence> {
    if m.order() < order {
        return Err(Error::OrderMismatch {
            left: m.order(),
            right: order,
        });
    }
    m.truncate(order)
}

/// Moments of `μ_W` from moments of `μ_Γ`.
pub fn info_noise_forward(gamma: &MomentSequence, p: &InfoNoiseParams) -> Result<MomentSequence> {
    p.validate()?;
    let g = at_order(gamma, p.order)?;
    mp_conv(&shift(&mp_deconv(&g, p.c)?, p.sigma2), p.c)
}

/// Moments of `μ_Γ` from moments of `μ_W`.
pub fn info_noise_inverse(w: &MomentSequence, p: &InfoNoiseParams) -> Result<MomentSequence> {
    p.validate()?;
    let w = at_order(w, p.order)?;
    mp_conv(&shift(&mp_deconv(&w, p.c)?, -p.sigma2), p.c)
}

/// [`info_noise_forward`] over many inputs.
pub fn info_noise_forward_batch(
    gammas: &[MomentSequence],
    p: &InfoNoiseParams,
    mode: ExecMode,
) -> Vec<Result<MomentSequence>> {
    map_indexed(mode, gammas.len(), |i| info_noise_forward(&gammas[i], p))
}

/// Real Stieltjes transform `m(x) = ∫ dμ(t)/(t - x)` left of the support.
pub trait StieltjesSource {
    fn stieltjes_below(&self, x: f64) -> Result<f64>;
}

impl StieltjesSource for AtomicMeasure {
    fn stieltjes_below(&self, x: f64) -> Result<f64> {
        if !(x < self.min_position()) {
            return Err(Error::domain(format!(
                "{x} is not below the support starting at {}",
                self.min_position()
            )));
        }
        Ok(stieltjes_atoms(self, EvalPoint::real(x)?)?.re)
    }
}

/// Empirical spectral distribution of a Hermitian matrix.
impl StieltjesSource for CMatrix {
    fn stieltjes_below(&self, x: f64) -> Result<f64> {
        Ok(self.resolvent_trace(x)? / self.rows() as f64)
    }
}

/// `G²(z) = ∫ dμ_Θ(t)/(t - z)` estimated from the moments of the sample
/// spectrum `Γ` with `Θ`'s moments obtained as `μ_Γ ⊠⁻¹ μ_c`.
///
/// Requires `z < 0` and `|z| >= 2 support_bound`, where `support_bound`
/// bounds the support of `μ_Θ`. Accuracy is then about `2^-order`.
pub fn g2_moment_route(
    gamma: &MomentSequence,
    c: f64,
    z: f64,
    support_bound: f64,
) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::domain(format!("z must be negative, got {z}")));
    }
    if !(support_bound >= 0.0 && support_bound.is_finite()) {
        return Err(Error::domain(format!("support bound {support_bound} is invalid")));
    }
    if z.abs() < 2.0 * support_bound {
        return Err(Error::Convergence(format!(
            "|z| = {} is below twice the support bound {support_bound}",
            z.abs()
        )));
    }
    let theta = mp_deconv(gamma, c)?;
    Ok(stieltjes_moments(&theta, EvalPoint::real(z)?, support_bound)?
        .value
        .re)
}

/// Root `θ < 0` of `h(θ) = θ c m(θ) - (1 - c) + θ/z` with `G²(z) = (θ/z) m(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Solution {
    pub theta: f64,
    pub value: f64,
    pub evaluations: usize,
}

const MAX_BRACKET_STEPS: usize = 2000;
const MAX_ROOT_ITERATIONS: usize = 200;

/// `G²(z)` from the spectrum of `Γ` through the scalar fixed point, so no
/// moment truncation is involved. Requires `z < 0` and `0 < c`; for
/// `c >= 1` a root exists only when `m(0⁻)` is large enough.
pub fn g2_fixed_point<S: StieltjesSource + ?Sized>(gamma: &S, c: f64, z: f64) -> Result<f64> {
    Ok(g2_fixed_point_solution(gamma, c, z)?.value)
}

pub fn g2_fixed_point_solution<S: StieltjesSource + ?Sized>(
    gamma: &S,
    c: f64,
    z: f64,
) -> Result<G2Solution> {
    if !(z < 0.0 && z.is_finite()) {
        return Err(Error::domain(format!("z must be negative, got {z}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("ratio must be positive, got {c}")));
    }
    let mut evaluations = 0;
    let mut h = |t: f64| -> Result<f64> {
        evaluations += 1;
        Ok(t * c * gamma.stieltjes_below(t)? - (1.0 - c) + t / z)
    };
    // h -> +inf as θ -> -inf; look for a sign change from θ = z outwards
    // and towards zero.
    let (mut lo, mut f_lo) = (z, h(z)?);
    let (mut hi, mut f_hi) = (z, f_lo);
    let mut steps = 0;
    while f_lo <= 0.0 {
        lo *= 2.0;
        f_lo = h(lo)?;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !lo.is_finite() {
            return Err(Error::NoBracket(format!("h stays nonpositive down to {lo}")));
        }
    }
    while f_hi >= 0.0 {
        hi *= 0.5;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || hi == 0.0 {
            return Err(Error::NoBracket(format!(
                "h stays nonnegative up to 0 (c = {c}, z = {z})"
            )));
        }
        f_hi = h(hi)?;
    }
    // Illinois regula falsi on lo < θ* < hi.
    let mut side = 0i8;
    let mut theta = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for _ in 0..MAX_ROOT_ITERATIONS {
        theta = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(theta > lo && theta < hi) {
            theta = 0.5 * (lo + hi);
        }
        let f = h(theta)?;
        residual = f.abs();
        if residual <= 1e-15 || hi - lo <= 4.0 * f64::EPSILON * theta.abs() {
            converged = true;
            break;
        }
        if f > 0.0 {
            lo = theta;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = theta;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    if !converged {
        return Err(Error::Solver {
            iterations: MAX_ROOT_ITERATIONS,
            residual,
        });
    }
    let m = gamma.stieltjes_below(theta)?;
    Ok(G2Solution {
        theta,
        value: theta / z * m,
        evaluations: evaluations + 1,
    })
}

/// A-priori bound on the support of `μ_W` when `μ_Γ` is supported in
/// `[0, max |x|]`: `(sqrt(γ_max) + σ(1 + sqrt(c)))²`.
pub fn info_noise_support_bound(gamma: &AtomicMeasure, c: f64, sigma2: f64) -> f64 {
    (gamma.max_abs_position().sqrt() + sigma2.sqrt() * (1.0 + c.sqrt())).powi(2)
}

/// One comparison of two independent routes to the same number.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub name: &'static str,
    pub z: f64,
    pub first: f64,
    pub second: f64,
    pub tolerance: f64,
}

impl CrossCheck {
    pub fn diff(&self) -> f64 {
        (self.first - self.second).abs()
    }

    pub fn passed(&self) -> bool {
        self.diff() <= self.tolerance
    }
}

/// The Stieltjes transform of `μ_W` at each `z`, once from the moment
/// pipeline and once from the Dozier–Silverstein fixed point.
pub fn check_info_noise_routes(
    gamma: &AtomicMeasure,
    p: &InfoNoiseParams,
    zs: &[f64],
) -> Result<Vec<CrossCheck>> {
    let w = info_noise_forward(&gamma.moments(p.order)?, p)?;
    let radius = info_noise_support_bound(gamma, p.c, p.sigma2);
    zs.iter()
        .map(|&z| {
            let at = EvalPoint::real(z)?;
            Ok(CrossCheck {
                name: "info-noise",
                z,
                first: stieltjes_moments(&w, at, radius)?.value.re,
                second: dozier_silverstein_mw(gamma, p.c, p.sigma2, at)?.re,
                tolerance: 1e-7,
            })
        })
        .collect()
}

/// `G²(z)` from the moment route and from the fixed point, with `gamma`
/// the sample spectrum.
pub fn check_g2_routes(
    gamma: &AtomicMeasure,
    c: f64,
    zs: &[f64],
    order: usize,
    support_bound: f64,
) -> Result<Vec<CrossCheck>> {
    let m = gamma.moments(order)?;
    zs.iter()
        .map(|&z| {
            Ok(CrossCheck {
                name: "g2",
                z,
                first: g2_moment_route(&m, c, z, support_bound)?,
                second: g2_fixed_point(gamma, c, z)?,
                tolerance: 1e-6,
            })
        })
        .collect()
}
