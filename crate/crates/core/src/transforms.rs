//! Numeric Stieltjes, η and S transforms, and the fixed-point
//! characterization of information-plus-noise spectra.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::types::{AtomicMeasure, MomentSequence};

/// A point where Stieltjes transforms are evaluated: either in the open
/// upper half plane or on the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint(Complex64);

impl EvalPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::domain(format!("evaluation point {z} is not finite")));
        }
        if z.im > 0.0 || (z.im == 0.0 && z.re < 0.0) {
            Ok(EvalPoint(z))
        } else {
            Err(Error::domain(format!(
                "evaluation point {z} is neither in the upper half plane nor negative real"
            )))
        }
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.im == 0.0
    }
}

/// `sum_i w_i / (x_i - z)`.
pub fn stieltjes_atoms(mu: &AtomicMeasure, z: EvalPoint) -> Result<Complex64> {
    let z = z.z();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in mu.atoms() {
        let d = Complex64::new(x, 0.0) - z;
        if d.norm() == 0.0 {
            return Err(Error::Pole(format!("{z}")));
        }
        acc += w / d;
    }
    Ok(acc)
}

/// Value of a truncated asymptotic series together with a bound on the
/// omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `(r/|z|)^(K+1) / (1 - r/|z|) / |z|`, valid when `|m_k| <= r^k`.
    pub truncation_bound: f64,
}

/// Stieltjes transform from moments, `m(z) = -sum_{k>=0} m_k z^-(k+1)`,
/// truncated at the sequence order.
///
/// `radius` must bound the support (more precisely `|m_k| <= radius^k`).
/// Points with `|z| <= radius` are rejected; closer than `2 radius` the
/// returned bound is the only accuracy guarantee.
pub fn stieltjes_moments(m: &MomentSequence, z: EvalPoint, radius: f64) -> Result<SeriesValue> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("support radius {radius} is invalid")));
    }
    let z = z.z();
    let modulus = z.norm();
    if modulus <= radius {
        return Err(Error::Convergence(format!(
            "|z| = {modulus} does not exceed the support radius {radius}"
        )));
    }
    let w = z.inv();
    // Horner: -w (1 + w (m_1 + w (m_2 + ...)))
    let mut acc = Complex64::new(0.0, 0.0);
    for &mk in m.as_slice().iter().rev() {
        acc = (acc + mk) * w;
    }
    let value = -(acc + 1.0) * w;
    let ratio = radius / modulus;
    let truncation_bound = ratio.powi(m.order() as i32 + 1) / (1.0 - ratio) / modulus;
    Ok(SeriesValue {
        value,
        truncation_bound,
    })
}

/// Error-checked variant of [`stieltjes_moments`] that also rejects
/// results whose tail bound exceeds `tolerance`.
pub fn stieltjes_moments_within(
    m: &MomentSequence,
    z: EvalPoint,
    radius: f64,
    tolerance: f64,
) -> Result<Complex64> {
    let s = stieltjes_moments(m, z, radius)?;
    if s.truncation_bound > tolerance {
        return Err(Error::Convergence(format!(
            "truncation bound {:e} exceeds {tolerance:e} at order {}",
            s.truncation_bound,
            m.order()
        )));
    }
    Ok(s.value)
}

/// `eta(z) = sum_i w_i / (1 + z x_i)` for `z >= 0`.
pub fn eta_atoms(mu: &AtomicMeasure, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain(format!("eta argument must be >= 0, got {z}")));
    }
    let mut acc = 0.0;
    for &(x, w) in mu.atoms() {
        let d = 1.0 + z * x;
        if d == 0.0 {
            return Err(Error::Pole(format!("{z}")));
        }
        acc += w / d;
    }
    Ok(acc)
}

/// `eta(x) = m(-1/x) / x` with `m` from the moment series.
pub fn eta_moments(m: &MomentSequence, x: f64, radius: f64) -> Result<SeriesValue> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("eta argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(SeriesValue {
            value: Complex64::new(1.0, 0.0),
            truncation_bound: 0.0,
        });
    }
    let s = stieltjes_moments(m, EvalPoint::real(-1.0 / x)?, radius)?;
    Ok(SeriesValue {
        value: s.value / x,
        truncation_bound: s.truncation_bound / x,
    })
}

pub const ETA_INVERSE_BRACKET: (f64, f64) = (1e-9, 1e6);

/// Inverts a strictly decreasing η-transform by bisection on
/// [`ETA_INVERSE_BRACKET`], to `1e-12` in the argument.
pub fn eta_inverse<F>(eta: F, target: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = ETA_INVERSE_BRACKET;
    let (f_lo, f_hi) = (eta(lo)?, eta(hi)?);
    if !(target <= f_lo && target >= f_hi) {
        return Err(Error::NoBracket(format!(
            "eta target {target} outside [{f_hi}, {f_lo}]"
        )));
    }
    // Bisect in log scale first so the tiny end of the bracket is resolved,
    // then finish linearly.
    for _ in 0..200 {
        let mid = if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if eta(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// S-transform `1/(1 + c z)` of the Marčenko–Pastur law, on `(-1, 0)`.
pub fn s_transform_mp(c: f64, z: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("ratio must be positive, got {c}")));
    }
    if !(z > -1.0 && z < 0.0) {
        return Err(Error::domain(format!("S-transform argument {z} outside (-1, 0)")));
    }
    let d = 1.0 + c * z;
    if d.abs() < 1e-15 {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(1.0 / d)
}

/// `S(z) = -(z + 1)/z * eta^{-1}(z + 1)` for a nonnegative atomic measure.
pub fn s_transform_atoms(mu: &AtomicMeasure, z: f64) -> Result<f64> {
    if !(z > -1.0 && z < 0.0) {
        return Err(Error::domain(format!("S-transform argument {z} outside (-1, 0)")));
    }
    let x = eta_inverse(|t| eta_atoms(mu, t), z + 1.0)?;
    Ok(-(z + 1.0) / z * x)
}

/// Settings of the damped fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig {
    pub damping: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            damping: 0.5,
            max_iterations: 10_000,
            tolerance: 1e-12,
        }
    }
}

/// Stieltjes transform of the limiting spectrum of
/// `W = (1/N)(R + σX)(R + σX)*` from the spectrum of `(1/N) R R*`, as the
/// fixed point of
///
/// ```text
/// m = sum_t w_t / ( t/(1 + σ²c m) - (1 + σ²c m) z + σ²(1 - c) ).
/// ```
pub fn dozier_silverstein_mw(
    gamma: &AtomicMeasure,
    c: f64,
    sigma2: f64,
    z: EvalPoint,
) -> Result<Complex64> {
    dozier_silverstein_with(gamma, c, sigma2, z, FixedPointConfig::default())
}

pub fn dozier_silverstein_with(
    gamma: &AtomicMeasure,
    c: f64,
    sigma2: f64,
    z: EvalPoint,
    cfg: FixedPointConfig,
) -> Result<Complex64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("ratio must be positive, got {c}")));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!(
            "noise variance must be nonnegative, got {sigma2}"
        )));
    }
    let zc = z.z();
    let map = |m: Complex64| -> Result<Complex64> {
        let s = 1.0 + sigma2 * c * m;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(t, w) in gamma.atoms() {
            let d = t / s - s * zc + sigma2 * (1.0 - c);
            if d.norm() == 0.0 {
                return Err(Error::Pole(format!("{zc}")));
            }
            acc += w / d;
        }
        Ok(acc)
    };
    let mut m = -zc.inv();
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let next = map(m)?;
        residual = (next - m).norm();
        if residual <= cfg.tolerance * m.norm().max(1.0) {
            let out = next;
            if z.z().im > 0.0 && out.im <= 0.0 {
                return Err(Error::Solver {
                    iterations: cfg.max_iterations,
                    residual,
                });
            }
            return Ok(out);
        }
        m = (1.0 - cfg.damping) * m + cfg.damping * next;
    }
    Err(Error::Solver {
        iterations: cfg.max_iterations,
        residual,
    })
}

/// [`dozier_silverstein_mw`] on a grid of points.
pub fn dozier_silverstein_grid(
    gamma: &AtomicMeasure,
    c: f64,
    sigma2: f64,
    points: &[EvalPoint],
    mode: ExecMode,
) -> Vec<Result<Complex64>> {
    map_indexed(mode, points.len(), |i| {
        dozier_silverstein_mw(gamma, c, sigma2, points[i])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{moments_of, LawSpec};

    fn re(z: f64) -> EvalPoint {
        EvalPoint::real(z).unwrap()
    }

    /// Root of `c z m^2 + (z - 1 + c) m + 1 = 0` that behaves like `-1/z`.
    fn mp_stieltjes(c: f64, z: f64) -> f64 {
        let (a, b) = (c * z, z - 1.0 + c);
        let disc = (b * b - 4.0 * a).sqrt();
        let roots = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
        *roots
            .iter()
            .min_by(|x, y| {
                ((*x + 1.0 / z).abs())
                    .partial_cmp(&(*y + 1.0 / z).abs())
                    .unwrap()
            })
            .unwrap()
    }

    #[test]
    fn eval_point_domain() {
        assert!(EvalPoint::real(1.0).is_err());
        assert!(EvalPoint::real(0.0).is_err());
        assert!(EvalPoint::new(Complex64::new(1.0, -0.1)).is_err());
        assert!(EvalPoint::new(Complex64::new(1.0, 0.1)).is_ok());
    }

    #[test]
    fn atoms_examples() {
        let d0 = AtomicMeasure::point_mass(0.0).unwrap();
        let d1 = AtomicMeasure::point_mass(1.0).unwrap();
        let two = AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        assert_eq!(stieltjes_atoms(&d0, re(-1.0)).unwrap().re, 1.0);
        assert_eq!(stieltjes_atoms(&d1, re(-1.0)).unwrap().re, 0.5);
        assert_eq!(stieltjes_atoms(&two, re(-1.0)).unwrap().re, 0.375);
        let neg = AtomicMeasure::point_mass(-2.0).unwrap();
        assert!(matches!(
            stieltjes_atoms(&neg, re(-2.0)),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn moment_series_examples() {
        let d1 = moments_of(&LawSpec::PointMass(1.0), 30).unwrap();
        let v = stieltjes_moments(&d1, re(-10.0), 1.0).unwrap();
        assert!((v.value.re - 1.0 / 11.0).abs() < 1e-12);

        let mp = moments_of(&LawSpec::MarchenkoPastur(1.0), 40).unwrap();
        let v = stieltjes_moments(&mp, re(-10.0), 4.0).unwrap();
        assert!((v.value.re - mp_stieltjes(1.0, -10.0)).abs() < 1e-10);

        let mu = AtomicMeasure::new(vec![(0.5, 0.2), (1.5, 0.5), (4.0, 0.3)]).unwrap();
        let v = stieltjes_moments(&mu.moments(40).unwrap(), re(-8.0), 4.0).unwrap();
        let exact = stieltjes_atoms(&mu, re(-8.0)).unwrap();
        assert!((v.value - exact).norm() < 1e-10);

        assert!(matches!(
            stieltjes_moments(&mp, re(-3.0), 4.0),
            Err(Error::Convergence(_))
        ));
        assert!(stieltjes_moments_within(&mp, re(-4.5), 4.0, 1e-10).is_err());
    }

    #[test]
    fn eta_examples() {
        let mu = AtomicMeasure::new(vec![(0.3, 0.4), (2.0, 0.6)]).unwrap();
        assert_eq!(eta_atoms(&mu, 0.0).unwrap(), 1.0);
        let d1 = AtomicMeasure::point_mass(1.0).unwrap();
        assert_eq!(eta_atoms(&d1, 1.0).unwrap(), 0.5);
        let via_m = stieltjes_atoms(&d1, re(-0.5)).unwrap().re / 2.0;
        assert!((via_m - 1.0 / 3.0).abs() < 1e-15);
        assert!((eta_atoms(&d1, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(eta_atoms(&mu, -1.0).is_err());
    }

    #[test]
    fn eta_inverse_roundtrip() {
        let mu = AtomicMeasure::new(vec![(0.3, 0.4), (2.0, 0.6)]).unwrap();
        for x in [0.01, 0.3, 1.0, 7.0, 250.0] {
            let v = eta_atoms(&mu, x).unwrap();
            let back = eta_inverse(|t| eta_atoms(&mu, t), v).unwrap();
            assert!((back - x).abs() < 1e-9 * x.max(1.0), "{x} -> {back}");
        }
        assert!(eta_inverse(|t| eta_atoms(&mu, t), 1.5).is_err());
    }

    #[test]
    fn s_transform_examples() {
        assert_eq!(s_transform_mp(1.0, -0.5).unwrap(), 2.0);
        assert!((s_transform_mp(1e-12, -0.7).unwrap() - 1.0).abs() < 1e-11);
        assert!(s_transform_mp(2.0, -0.5).is_err());
        assert!(s_transform_mp(1.0, 0.5).is_err());

        let d2 = AtomicMeasure::point_mass(2.0).unwrap();
        let d3 = AtomicMeasure::point_mass(3.0).unwrap();
        let d6 = AtomicMeasure::point_mass(6.0).unwrap();
        for z in [-0.8, -0.5, -0.1] {
            let s2 = s_transform_atoms(&d2, z).unwrap();
            let s3 = s_transform_atoms(&d3, z).unwrap();
            let s6 = s_transform_atoms(&d6, z).unwrap();
            assert!((s2 - 0.5).abs() < 1e-9);
            assert!((s2 * s3 - s6).abs() < 1e-9);
        }
    }

    #[test]
    fn dozier_silverstein_examples() {
        let gamma = AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        let direct = stieltjes_atoms(&gamma, re(-4.0)).unwrap();
        let fp = dozier_silverstein_mw(&gamma, 0.5, 0.0, re(-4.0)).unwrap();
        assert!((fp - direct).norm() < 1e-13);

        let d0 = AtomicMeasure::point_mass(0.0).unwrap();
        let fp = dozier_silverstein_mw(&d0, 1.0, 1.0, re(-10.0)).unwrap();
        assert!((fp.re - mp_stieltjes(1.0, -10.0)).abs() < 1e-8);

        let a = dozier_silverstein_mw(&gamma, 0.5, 1e-6, re(-10.0)).unwrap();
        let b = dozier_silverstein_mw(&gamma, 0.5, 0.0, re(-10.0)).unwrap();
        assert!((a - b).norm() < 1e-4);

        assert!(dozier_silverstein_mw(&gamma, 0.0, 1.0, re(-1.0)).is_err());
        assert!(dozier_silverstein_mw(&gamma, 0.5, -1.0, re(-1.0)).is_err());
    }

    #[test]
    fn dozier_silverstein_upper_half_plane() {
        let gamma = AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        let m = dozier_silverstein_mw(&gamma, 0.5, 0.25, EvalPoint::new(Complex64::new(2.0, 0.5)).unwrap()).unwrap();
        assert!(m.im > 0.0);
        // approaching the negative axis from above agrees with the real solution
        let near = dozier_silverstein_mw(&gamma, 0.5, 0.25, EvalPoint::new(Complex64::new(-2.0, 1e-9)).unwrap()).unwrap();
        let real = dozier_silverstein_mw(&gamma, 0.5, 0.25, re(-2.0)).unwrap();
        assert!((near - real).norm() < 1e-7);
    }

    #[test]
    fn grid_modes_agree() {
        let gamma = AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        let pts: Vec<EvalPoint> = (1..20).map(|i| re(-(i as f64))).collect();
        let a = dozier_silverstein_grid(&gamma, 0.5, 0.25, &pts, ExecMode::Sequential);
        let b = dozier_silverstein_grid(&gamma, 0.5, 0.25, &pts, ExecMode::Parallel);
        assert_eq!(a, b);
    }
}
