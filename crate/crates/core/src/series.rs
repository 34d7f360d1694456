//! Truncated one-variable power series with vanishing constant term, the
//! boxed convolution and the moment-cumulant maps.
//!
//! Every kernel is generic over [`Scalar`] so the same code runs in `f64`
//! and in exact rational arithmetic. A series of order `K` stores the
//! coefficients of `z^1..z^K`; all kernels are triangular, i.e. output
//! coefficient `k` depends only on input coefficients `1..=k`.

use std::collections::HashMap;
use std::fmt::Debug;

use num_traits::Num;

use crate::error::{Error, Result};
use crate::ncpart::{for_each_nc, kreweras};
use crate::types::{CumulantSequence, MomentSequence};

/// Coefficient field for the series kernels.
pub trait Scalar: Num + Clone + Debug {}

impl<T: Num + Clone + Debug> Scalar for T {}

/// Largest order accepted by [`boxed_convolve_bruteforce`].
pub const MAX_BRUTEFORCE_ORDER: usize = 12;

/// Coefficients of `z^1..z^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries {
    coef: Vec<f64>,
}

impl FormalSeries {
    pub fn new(coef: Vec<f64>) -> Result<Self> {
        if coef.is_empty() {
            return Err(Error::domain("series must have order >= 1"));
        }
        Ok(FormalSeries { coef })
    }

    pub fn order(&self) -> usize {
        self.coef.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coef
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coef
    }
}

impl From<MomentSequence> for FormalSeries {
    fn from(m: MomentSequence) -> Self {
        FormalSeries { coef: m.into_vec() }
    }
}

impl From<CumulantSequence> for FormalSeries {
    fn from(a: CumulantSequence) -> Self {
        FormalSeries { coef: a.into_vec() }
    }
}

impl From<FormalSeries> for MomentSequence {
    fn from(f: FormalSeries) -> Self {
        MomentSequence::from_vec_unchecked(f.coef)
    }
}

impl From<FormalSeries> for CumulantSequence {
    fn from(f: FormalSeries) -> Self {
        CumulantSequence::from_vec_unchecked(f.coef)
    }
}

pub fn zeta(order: usize) -> FormalSeries {
    FormalSeries {
        coef: zeta_coeffs(order),
    }
}

/// Inverse of zeta under boxed convolution, by triangular solve.
pub fn moeb(order: usize) -> FormalSeries {
    FormalSeries {
        coef: moeb_coeffs(order),
    }
}

/// Unit of the boxed convolution: `(1, 0, 0, ...)`.
pub fn id_series(order: usize) -> FormalSeries {
    FormalSeries {
        coef: id_coeffs(order),
    }
}

pub fn zeta_coeffs<T: Scalar>(order: usize) -> Vec<T> {
    vec![T::one(); order]
}

pub fn id_coeffs<T: Scalar>(order: usize) -> Vec<T> {
    let mut v = vec![T::zero(); order];
    if let Some(first) = v.first_mut() {
        *first = T::one();
    }
    v
}

pub fn moeb_coeffs<T: Scalar>(order: usize) -> Vec<T> {
    boxed_deconvolve_coeffs(&id_coeffs::<T>(order), &zeta_coeffs::<T>(order))
        .expect("zeta has unit leading coefficient")
}

/// `coef_n(out) = c^(n + offset) coef_n(f)`.
pub fn scale_coeff(f: &FormalSeries, c: f64, exponent_offset: i32) -> FormalSeries {
    FormalSeries {
        coef: f
            .coef
            .iter()
            .enumerate()
            .map(|(i, v)| v * c.powi(i as i32 + 1 + exponent_offset))
            .collect(),
    }
}

/// Exact-arithmetic form of [`scale_coeff`]. Negative exponents require an
/// invertible `c`.
pub fn scale_coeffs<T: Scalar>(f: &[T], c: &T, exponent_offset: i32) -> Vec<T> {
    f.iter()
        .enumerate()
        .map(|(i, v)| v.clone() * int_pow(c, i as i32 + 1 + exponent_offset))
        .collect()
}

fn int_pow<T: Scalar>(c: &T, e: i32) -> T {
    let mut out = T::one();
    for _ in 0..e.unsigned_abs() {
        out = out * c.clone();
    }
    if e < 0 {
        T::one() / out
    } else {
        out
    }
}

// ---------------------------------------------------------------------------
// Dense polynomial helpers. These work on full coefficient vectors where
// index `j` is the coefficient of `z^j` (constant term included).

fn poly_mul_trunc<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// `p^0, p^1, ..., p^count` truncated to `len` coefficients.
fn poly_powers<T: Scalar>(p: &[T], count: usize, len: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(count + 1);
    let mut cur = vec![T::zero(); len];
    if len > 0 {
        cur[0] = T::one();
    }
    out.push(cur.clone());
    for _ in 0..count {
        cur = poly_mul_trunc(&cur, p, len);
        out.push(cur.clone());
    }
    out
}

/// Lifts a `z^1..z^K` series to a full vector with zero constant term.
fn lift<T: Scalar>(f: &[T]) -> Vec<T> {
    let mut v = Vec::with_capacity(f.len() + 1);
    v.push(T::zero());
    v.extend_from_slice(f);
    v
}

/// `outer(inner(z))` for series without constant term, truncated at the
/// common order.
pub fn compose_coeffs<T: Scalar>(outer: &[T], inner: &[T]) -> Vec<T> {
    let order = outer.len().min(inner.len());
    let powers = poly_powers(&lift(&inner[..order]), order, order + 1);
    (1..=order)
        .map(|n| {
            (1..=n).fold(T::zero(), |acc, s| {
                acc + outer[s - 1].clone() * powers[s][n].clone()
            })
        })
        .collect()
}

/// Solves `f(inner(z)) = target` for `f`; requires `inner_1 != 0`.
pub fn solve_outer_coeffs<T: Scalar>(target: &[T], inner: &[T]) -> Result<Vec<T>> {
    let order = target.len().min(inner.len());
    if order == 0 {
        return Ok(Vec::new());
    }
    if inner[0].is_zero() {
        return Err(Error::SingularDeconvolution(
            "inner series has vanishing linear coefficient".into(),
        ));
    }
    let powers = poly_powers(&lift(&inner[..order]), order, order + 1);
    let mut f: Vec<T> = Vec::with_capacity(order);
    for n in 1..=order {
        let mut rest = target[n - 1].clone();
        for s in 1..n {
            rest = rest - f[s - 1].clone() * powers[s][n].clone();
        }
        f.push(rest / powers[n][n].clone());
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Moment-cumulant maps.

/// Table `P[k][d] = [z^d] (1 + M(z))^k` for `k + d <= K`, built column by
/// column so that moments can be discovered on the fly.
struct OnePlusPowers<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> OnePlusPowers<T> {
    fn new(order: usize) -> Self {
        // rows[k] holds coefficients d = 0..=order-k; rows[0] = (1).
        let mut rows = Vec::with_capacity(order + 1);
        rows.push(vec![T::one()]);
        for _ in 1..=order {
            rows.push(Vec::new());
        }
        OnePlusPowers { rows }
    }

    /// Fills every entry with `k + d = total`, given moments `m_1..m_{total-1}`.
    fn fill_antidiagonal(&mut self, total: usize, moments: &[T]) {
        for k in 1..=total {
            let d = total - k;
            let value = if d == 0 {
                T::one()
            } else if k == 1 {
                moments[d - 1].clone()
            } else {
                // (1+M)^k = (1+M)^(k-1) * (1+M)
                let prev = &self.rows[k - 1];
                (0..=d).fold(T::zero(), |acc, j| {
                    let mj = if j == 0 {
                        T::one()
                    } else {
                        moments[j - 1].clone()
                    };
                    acc + prev[d - j].clone() * mj
                })
            };
            debug_assert_eq!(self.rows[k].len(), d);
            self.rows[k].push(value);
        }
    }

    fn get(&self, k: usize, d: usize) -> &T {
        &self.rows[k][d]
    }
}

/// Moments from free cumulants by the recursion
/// `m_n = sum_{k=1}^{n} alpha_k [z^{n-k}] (1 + M(z))^k`.
pub fn cumulants_to_moments_coeffs<T: Scalar>(alpha: &[T]) -> Vec<T> {
    let order = alpha.len();
    let mut m: Vec<T> = Vec::with_capacity(order);
    let mut table = OnePlusPowers::new(order);
    for n in 1..=order {
        table.fill_antidiagonal(n, &m);
        let v = (1..=n).fold(T::zero(), |acc, k| {
            acc + alpha[k - 1].clone() * table.get(k, n - k).clone()
        });
        m.push(v);
    }
    m
}

/// Inverse of [`cumulants_to_moments_coeffs`]; `alpha_n` enters the
/// recursion with coefficient one, so this is a triangular solve.
pub fn moments_to_cumulants_coeffs<T: Scalar>(m: &[T]) -> Vec<T> {
    let order = m.len();
    let mut alpha: Vec<T> = Vec::with_capacity(order);
    let mut table = OnePlusPowers::new(order);
    for n in 1..=order {
        table.fill_antidiagonal(n, &m[..n - 1]);
        let rest = (1..n).fold(T::zero(), |acc, k| {
            acc + alpha[k - 1].clone() * table.get(k, n - k).clone()
        });
        alpha.push(m[n - 1].clone() - rest);
    }
    alpha
}

pub fn cumulants_to_moments(alpha: &CumulantSequence) -> MomentSequence {
    MomentSequence::from_vec_unchecked(cumulants_to_moments_coeffs(alpha.as_slice()))
}

pub fn moments_to_cumulants(m: &MomentSequence) -> CumulantSequence {
    CumulantSequence::from_vec_unchecked(moments_to_cumulants_coeffs(m.as_slice()))
}

// ---------------------------------------------------------------------------
// Boxed convolution.

/// Boxed convolution by summing over noncrossing partitions:
/// `coef_n(f ⊠ g) = sum_{p in NC(n)} prod_{B in p} f_|B| prod_{B in K(p)} g_|B|`.
///
/// Exponential in `order`; limited to [`MAX_BRUTEFORCE_ORDER`].
pub fn boxed_convolve_bruteforce(
    f: &FormalSeries,
    g: &FormalSeries,
    order: usize,
) -> Result<FormalSeries> {
    if f.order() < order || g.order() < order {
        return Err(Error::OrderMismatch {
            left: f.order().min(g.order()),
            right: order,
        });
    }
    Ok(FormalSeries {
        coef: boxed_convolve_bruteforce_coeffs(&f.coef[..order], &g.coef[..order])?,
    })
}

/// Multiset of (block sizes of p, block sizes of K(p)) over `NC(n)`, with
/// multiplicities. Shared by all brute-force sums of the same order.
pub fn kreweras_block_profile(n: usize) -> Result<Vec<(Vec<usize>, Vec<usize>, u64)>> {
    let mut counts: HashMap<(Vec<usize>, Vec<usize>), u64> = HashMap::new();
    for_each_nc(n, |p| {
        let mut a = p.block_sizes();
        let mut b = kreweras(p).block_sizes();
        a.sort_unstable();
        b.sort_unstable();
        *counts.entry((a, b)).or_insert(0) += 1;
    })?;
    let mut out: Vec<_> = counts.into_iter().map(|((a, b), c)| (a, b, c)).collect();
    out.sort();
    Ok(out)
}

pub fn boxed_convolve_bruteforce_coeffs<T: Scalar>(f: &[T], g: &[T]) -> Result<Vec<T>> {
    let order = f.len().min(g.len());
    if order > MAX_BRUTEFORCE_ORDER {
        return Err(Error::Resource(format!(
            "brute-force boxed convolution limited to order {MAX_BRUTEFORCE_ORDER}, got {order}"
        )));
    }
    let mut out = Vec::with_capacity(order);
    for n in 1..=order {
        let mut total = T::zero();
        for (pa, pb, count) in kreweras_block_profile(n)? {
            let mut term = T::one();
            for s in pa {
                term = term * f[s - 1].clone();
            }
            for s in pb {
                term = term * g[s - 1].clone();
            }
            let mut mult = T::zero();
            for _ in 0..count {
                mult = mult + T::one();
            }
            total = total + term * mult;
        }
        out.push(total);
    }
    Ok(out)
}

/// Boxed convolution in polynomial time.
///
/// Decomposing a noncrossing partition by the block containing 1 gives the
/// functional equations
///
/// ```text
/// W(z) = sum_t f_t z^t G(z)^(t-1),   G(z) = sum_k g_k W(z)^(k-1),
/// (f ⊠ g)(z) = f(z G(z)) = g(W(z)),
/// ```
///
/// where `W` generates partitions of a gap weighted by the blocks that face
/// it. `W` is found by fixed-point iteration, which gains one correct
/// coefficient per sweep.
pub fn boxed_convolve_coeffs<T: Scalar>(f: &[T], g: &[T]) -> Vec<T> {
    let order = f.len().min(g.len());
    if order == 0 {
        return Vec::new();
    }
    let (f, g) = (&f[..order], &g[..order]);
    // w[d] is the coefficient of z^d, d = 0..=order, with w[0] = 0.
    let mut w = vec![T::zero(); order + 1];
    for _ in 0..order {
        let gser = g_of_w(g, &w[..order]);
        let gpow = poly_powers(&gser, order - 1, order);
        let mut next = vec![T::zero(); order + 1];
        for t in 1..=order {
            for d in 0..=(order - t) {
                next[t + d] = next[t + d].clone() + f[t - 1].clone() * gpow[t - 1][d].clone();
            }
        }
        w = next;
    }
    // Coefficients G_0..G_{order-1} of G are those of z G at z^1..z^order.
    let zg = g_of_w(g, &w[..order]);
    compose_coeffs(f, &zg)
}

/// `G = sum_k g_k W^(k-1)` for `W` given with its constant term, truncated
/// to `w.len()` coefficients.
fn g_of_w<T: Scalar>(g: &[T], w: &[T]) -> Vec<T> {
    let len = w.len();
    let wpow = poly_powers(w, len - 1, len);
    let mut out = vec![T::zero(); len];
    for (k, gk) in g.iter().enumerate().take(len) {
        for (d, v) in wpow[k].iter().enumerate() {
            out[d] = out[d].clone() + gk.clone() * v.clone();
        }
    }
    out
}

/// Solves `f ⊠ g = h` for `f`; requires `g_1 != 0`.
///
/// With `h = g(W)` and `h = f(z G)` from [`boxed_convolve_coeffs`], `W` is
/// `g^{-1}(h)`, `G` follows from `W`, and `f` is a triangular solve against
/// the invertible inner series `z G`.
pub fn boxed_deconvolve_coeffs<T: Scalar>(h: &[T], g: &[T]) -> Result<Vec<T>> {
    let order = h.len().min(g.len());
    if order == 0 {
        return Ok(Vec::new());
    }
    if g[0].is_zero() {
        return Err(Error::SingularDeconvolution(
            "divisor has vanishing first coefficient".into(),
        ));
    }
    let g = &g[..order];
    let h = &h[..order];
    let g_inverse = solve_outer_coeffs(&id_coeffs::<T>(order), g)?;
    let w = compose_coeffs(&g_inverse, h);
    let zg = g_of_w(g, &lift(&w)[..order]);
    solve_outer_coeffs(h, &zg)
}

pub fn boxed_convolve(f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
    check_orders(f.order(), g.order())?;
    Ok(FormalSeries {
        coef: boxed_convolve_coeffs(&f.coef, &g.coef),
    })
}

pub fn boxed_deconvolve(h: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
    check_orders(h.order(), g.order())?;
    Ok(FormalSeries {
        coef: boxed_deconvolve_coeffs(&h.coef, &g.coef)?,
    })
}

pub(crate) fn check_orders(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::OrderMismatch { left: a, right: b });
    }
    Ok(())
}
