//! Value types shared by every module: truncated moment and cumulant
//! sequences and finitely supported measures.
//!
//! All sequences are indexed from order 1; the zeroth moment is implicitly 1
//! and never stored.

use crate::error::{Error, Result};

/// Raw moments `m_1..m_K` of a (possibly formal) distribution under the
/// normalized trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    m: Vec<f64>,
}

impl MomentSequence {
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::domain("moment sequence must have order >= 1"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("moment sequence contains a non-finite value"));
        }
        Ok(MomentSequence { m })
    }

    pub(crate) fn from_vec_unchecked(m: Vec<f64>) -> Self {
        debug_assert!(!m.is_empty());
        MomentSequence { m }
    }

    pub fn order(&self) -> usize {
        self.m.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.m
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.m
    }

    /// Moment of order `k` (1-based). Order 0 returns 1.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.m[k - 1]
        }
    }

    /// First `order` moments. Fails if the sequence is shorter.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order() {
            return Err(Error::domain(format!(
                "cannot truncate a sequence of order {} to order {order}",
                self.order()
            )));
        }
        Ok(MomentSequence {
            m: self.m[..order].to_vec(),
        })
    }

    /// Moments of the pushforward under `x -> s x`: `m_k -> s^k m_k`.
    pub fn dilate(&self, s: f64) -> Self {
        let mut p = 1.0;
        let m = self
            .m
            .iter()
            .map(|v| {
                p *= s;
                v * p
            })
            .collect();
        MomentSequence { m }
    }

    /// Hankel positivity test: every Hankel matrix `[m_{i+j}]` that fits in
    /// the truncation is positive semidefinite (up to a relative tolerance).
    ///
    /// Deconvolution results are formal and need not pass; this is an
    /// advisory check only.
    pub fn is_plausible(&self) -> bool {
        let size = self.order() / 2 + 1;
        let mut h = vec![vec![0.0; size]; size];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i + j);
            }
        }
        hankel_psd(&h)
    }
}

// Cholesky with a relative pivot tolerance; a vanishing pivot is accepted
// (singular PSD, e.g. finitely many atoms) and its column is skipped.
fn hankel_psd(h: &[Vec<f64>]) -> bool {
    let n = h.len();
    let scale = h
        .iter()
        .enumerate()
        .map(|(i, r)| r[i].abs())
        .fold(1.0_f64, f64::max);
    let tol = 1e-10 * scale;
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = h[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if d < -tol {
            return false;
        }
        if d <= tol {
            for i in (j + 1)..n {
                let mut s = h[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if s.abs() > tol.sqrt() * scale.sqrt() {
                    return false;
                }
            }
            continue;
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in (j + 1)..n {
            let mut s = h[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    true
}

/// Coefficients `alpha_1..alpha_K` of the combinatorial R-series
/// `R(z) = sum alpha_n z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSequence {
    alpha: Vec<f64>,
}

impl CumulantSequence {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::domain("cumulant sequence must have order >= 1"));
        }
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(
                "cumulant sequence contains a non-finite value",
            ));
        }
        Ok(CumulantSequence { alpha })
    }

    pub(crate) fn from_vec_unchecked(alpha: Vec<f64>) -> Self {
        debug_assert!(!alpha.is_empty());
        CumulantSequence { alpha }
    }

    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.alpha
    }
}

/// A probability measure with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    /// Builds a measure from `(position, weight)` pairs. Weights must be
    /// nonnegative and sum to one within `1e-12`.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("atomic measure needs at least one atom"));
        }
        let mut total = 0.0;
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::domain(format!("atom position {x} is not finite")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::domain(format!("atom weight {w} is negative")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "atom weights sum to {total}, expected 1"
            )));
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(vec![(x, 1.0)])
    }

    /// Uniform weights on the given positions, e.g. an empirical spectrum.
    pub fn uniform(positions: &[f64]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::domain("empirical measure needs at least one point"));
        }
        if let Some(x) = positions.iter().find(|x| !x.is_finite()) {
            return Err(Error::domain(format!("atom position {x} is not finite")));
        }
        // Weights are exactly 1/n by construction; summing them for the
        // tolerance check would only measure rounding.
        let w = 1.0 / positions.len() as f64;
        Ok(AtomicMeasure {
            atoms: positions.iter().map(|&x| (x, w)).collect(),
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn min_position(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_position(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)
    }

    /// `m_k = sum_i w_i x_i^k` for `k = 1..=order`.
    pub fn moments(&self, order: usize) -> Result<MomentSequence> {
        if order == 0 {
            return Err(Error::domain("order must be >= 1"));
        }
        let mut m = vec![0.0; order];
        for &(x, w) in &self.atoms {
            let mut p = w;
            for v in m.iter_mut() {
                p *= x;
                *v += p;
            }
        }
        MomentSequence::new(m)
    }

    /// Image under `x -> s x`.
    pub fn dilate(&self, s: f64) -> Self {
        AtomicMeasure {
            atoms: self.atoms.iter().map(|&(x, w)| (s * x, w)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights() {
        assert!(AtomicMeasure::new(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(AtomicMeasure::new(vec![(1.0, -0.5), (2.0, 1.5)]).is_err());
        assert!(AtomicMeasure::new(vec![(f64::NAN, 1.0)]).is_err());
        assert!(AtomicMeasure::new(vec![]).is_err());
    }

    #[test]
    fn atomic_moments() {
        let mu = AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        assert_eq!(mu.moments(3).unwrap().as_slice(), &[2.0, 5.0, 14.0]);
    }

    #[test]
    fn empty_sequences_rejected() {
        assert!(MomentSequence::new(vec![]).is_err());
        assert!(CumulantSequence::new(vec![]).is_err());
    }

    #[test]
    fn plausibility() {
        let mu = AtomicMeasure::new(vec![(1.0, 0.25), (2.0, 0.75)]).unwrap();
        assert!(mu.moments(8).unwrap().is_plausible());
        assert!(MomentSequence::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap().is_plausible());
        // m_2 < m_1^2
        assert!(!MomentSequence::new(vec![1.0, 0.0, 0.0]).unwrap().is_plausible());
    }

    #[test]
    fn dilation() {
        let m = MomentSequence::new(vec![1.0, 2.0, 5.0]).unwrap();
        assert_eq!(m.dilate(2.0).as_slice(), &[2.0, 8.0, 40.0]);
    }
}
