//! Named laws and their moment sequences.
//!
//! Marčenko–Pastur laws are normalized to mean one: the law with ratio `c`
//! has free cumulants `alpha_k = c^(k-1)`. For `c > 1` this includes the atom
//! of mass `1 - 1/c` at zero.

use crate::error::{Error, Result};
use crate::series::{cumulants_to_moments_coeffs, scale_coeffs, zeta_coeffs, Scalar};
use crate::types::{AtomicMeasure, MomentSequence};

#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    PointMass(f64),
    MarchenkoPastur(f64),
    /// Centered semicircle with the given variance.
    Semicircle(f64),
    Atomic(AtomicMeasure),
}

impl LawSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LawSpec::PointMass(a) if !a.is_finite() => {
                Err(Error::domain(format!("point mass at {a}")))
            }
            LawSpec::MarchenkoPastur(c) if !(c > 0.0 && c.is_finite()) => Err(Error::domain(
                format!("Marchenko-Pastur ratio must be positive, got {c}"),
            )),
            LawSpec::Semicircle(v) if !(v >= 0.0 && v.is_finite()) => Err(Error::domain(
                format!("semicircle variance must be nonnegative, got {v}"),
            )),
            _ => Ok(()),
        }
    }
}

pub fn moments_of(law: &LawSpec, order: usize) -> Result<MomentSequence> {
    if order == 0 {
        return Err(Error::domain("order must be >= 1"));
    }
    law.validate()?;
    match law {
        LawSpec::PointMass(a) => {
            let mut p = 1.0;
            MomentSequence::new(
                (0..order)
                    .map(|_| {
                        p *= a;
                        p
                    })
                    .collect(),
            )
        }
        LawSpec::MarchenkoPastur(c) => MomentSequence::new(marchenko_pastur_moments(c, order)),
        LawSpec::Semicircle(v) => {
            let mut alpha = vec![0.0; order];
            if order >= 2 {
                alpha[1] = *v;
            }
            MomentSequence::new(cumulants_to_moments_coeffs(&alpha))
        }
        LawSpec::Atomic(mu) => mu.moments(order),
    }
}

/// Free cumulants `c^(k-1)` of the Marčenko–Pastur law.
pub fn marchenko_pastur_cumulants<T: Scalar>(c: &T, order: usize) -> Vec<T> {
    scale_coeffs(&zeta_coeffs::<T>(order), c, -1)
}

/// Moments of the Marčenko–Pastur law, in any scalar field.
pub fn marchenko_pastur_moments<T: Scalar>(c: &T, order: usize) -> Vec<T> {
    cumulants_to_moments_coeffs(&marchenko_pastur_cumulants(c, order))
}

/// Moments of the point mass at `a` in any scalar field.
pub fn point_mass_moments<T: Scalar>(a: &T, order: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(order);
    let mut p = T::one();
    for _ in 0..order {
        p = p * a.clone();
        out.push(p.clone());
    }
    out
}
