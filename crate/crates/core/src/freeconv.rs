//! Free convolution and deconvolution of moment sequences.
//!
//! Additive operations add or subtract free cumulants. Multiplicative ones
//! take the boxed convolution of the cumulant series. Deconvolutions are
//! formal triangular solves: the result need not be the moment sequence of
//! a measure (see [`MomentSequence::is_plausible`]).
//!
//! The Marčenko–Pastur fast paths use the identity
//! `(c M_mu) ⊠ Zeta = c M_{mu ⊠ mu_c}`: scaling the moment series by `c`,
//! reading it as a cumulant series and mapping it to moments, then scaling
//! back by `1/c`.

use crate::error::{Error, Result};
use crate::series::{
    boxed_convolve_coeffs, boxed_deconvolve_coeffs, check_orders, cumulants_to_moments_coeffs,
    moments_to_cumulants_coeffs, Scalar,
};
use crate::types::MomentSequence;

/// `a ⊞ b`.
pub fn add_conv(a: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence> {
    check_orders(a.order(), b.order())?;
    Ok(wrap(add_conv_coeffs(a.as_slice(), b.as_slice())))
}

/// The `x` with `x ⊞ b = c`.
pub fn add_deconv(c: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence> {
    check_orders(c.order(), b.order())?;
    Ok(wrap(add_deconv_coeffs(c.as_slice(), b.as_slice())))
}

/// `a ⊠ b`.
pub fn mult_conv(a: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence> {
    check_orders(a.order(), b.order())?;
    Ok(wrap(mult_conv_coeffs(a.as_slice(), b.as_slice())))
}

/// The `x` with `x ⊠ b = c`. Needs `b_1 != 0`.
pub fn mult_deconv(c: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence> {
    check_orders(c.order(), b.order())?;
    if b.get(1) == 0.0 {
        return Err(Error::SingularDeconvolution(
            "divisor has zero first moment".into(),
        ));
    }
    Ok(wrap(mult_deconv_coeffs(c.as_slice(), b.as_slice())?))
}

/// `a ⊠ mu_c`.
pub fn mp_conv(a: &MomentSequence, c: f64) -> Result<MomentSequence> {
    check_ratio(c)?;
    Ok(wrap(mp_conv_coeffs(a.as_slice(), &c)))
}

/// The `x` with `x ⊠ mu_c = a`.
pub fn mp_deconv(a: &MomentSequence, c: f64) -> Result<MomentSequence> {
    check_ratio(c)?;
    Ok(wrap(mp_deconv_coeffs(a.as_slice(), &c)))
}

/// Shift by a point mass, `a ⊞ delta_s`: only the first cumulant moves.
pub fn shift(a: &MomentSequence, s: f64) -> MomentSequence {
    wrap(shift_coeffs(a.as_slice(), &s))
}

/// Converts moments of the `N x N` Gram matrix `(1/N) A* A` under `tr_N`
/// into moments of the `n x n` Gram matrix `(1/N) A A*` under `tr_n`, where
/// `c = n / N`. Both traces of `(A A*)^k` and `(A* A)^k` agree, so only the
/// normalization changes: `out_k = a_k / c`.
pub fn aspect_flip(a: &MomentSequence, c: f64) -> Result<MomentSequence> {
    check_ratio(c)?;
    Ok(wrap(a.as_slice().iter().map(|v| v / c).collect()))
}

/// Inverse of [`aspect_flip`]: `out_k = a_k c`.
pub fn aspect_flip_back(a: &MomentSequence, c: f64) -> Result<MomentSequence> {
    check_ratio(c)?;
    Ok(wrap(a.as_slice().iter().map(|v| v * c).collect()))
}

fn check_ratio(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!(
            "aspect ratio must be positive, got {c}"
        )));
    }
    Ok(())
}

fn wrap(v: Vec<f64>) -> MomentSequence {
    MomentSequence::from_vec_unchecked(v)
}

// Scalar-generic kernels. They assume equal orders and valid parameters.

pub fn add_conv_coeffs<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let ra = moments_to_cumulants_coeffs(a);
    let rb = moments_to_cumulants_coeffs(b);
    let sum: Vec<T> = ra.into_iter().zip(rb).map(|(x, y)| x + y).collect();
    cumulants_to_moments_coeffs(&sum)
}

pub fn add_deconv_coeffs<T: Scalar>(c: &[T], b: &[T]) -> Vec<T> {
    let rc = moments_to_cumulants_coeffs(c);
    let rb = moments_to_cumulants_coeffs(b);
    let diff: Vec<T> = rc.into_iter().zip(rb).map(|(x, y)| x - y).collect();
    cumulants_to_moments_coeffs(&diff)
}

pub fn mult_conv_coeffs<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let ra = moments_to_cumulants_coeffs(a);
    let rb = moments_to_cumulants_coeffs(b);
    cumulants_to_moments_coeffs(&boxed_convolve_coeffs(&ra, &rb))
}

pub fn mult_deconv_coeffs<T: Scalar>(c: &[T], b: &[T]) -> Result<Vec<T>> {
    let rc = moments_to_cumulants_coeffs(c);
    let rb = moments_to_cumulants_coeffs(b);
    Ok(cumulants_to_moments_coeffs(&boxed_deconvolve_coeffs(
        &rc, &rb,
    )?))
}

pub fn mp_conv_coeffs<T: Scalar>(a: &[T], c: &T) -> Vec<T> {
    let scaled: Vec<T> = a.iter().map(|v| v.clone() * c.clone()).collect();
    cumulants_to_moments_coeffs(&scaled)
        .into_iter()
        .map(|v| v / c.clone())
        .collect()
}

pub fn mp_deconv_coeffs<T: Scalar>(a: &[T], c: &T) -> Vec<T> {
    let scaled: Vec<T> = a.iter().map(|v| v.clone() * c.clone()).collect();
    moments_to_cumulants_coeffs(&scaled)
        .into_iter()
        .map(|v| v / c.clone())
        .collect()
}

/// Moments of `a ⊞ δ_s`. Moving only the first cumulant is the same as
/// translating by `s`, so this is the binomial expansion
/// `sum_j C(k, j) s^(k-j) a_j` (with `a_0 = 1`), which avoids two passes
/// through the moment-cumulant recursion.
pub fn shift_coeffs<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    let order = a.len();
    let mut binom = vec![T::one()];
    let mut out = Vec::with_capacity(order);
    for k in 1..=order {
        let mut next = vec![T::one(); k + 1];
        for j in 1..k {
            next[j] = binom[j - 1].clone() + binom[j].clone();
        }
        binom = next;
        // Horner in s: the a_0 = 1 term carries s^k
        let mut acc = T::one();
        for j in 1..=k {
            acc = acc * s.clone() + binom[j].clone() * a[j - 1].clone();
        }
        out.push(acc);
    }
    out
}
