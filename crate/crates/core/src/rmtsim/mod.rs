//! Seeded Monte Carlo for information-plus-noise and sample-covariance
//! ensembles, plus asymptotic-freeness diagnostics.
//!
//! Every repetition draws from its own streams (see [`rng::derive_seed`]),
//! so results do not depend on the execution mode or thread count.

pub mod matrix;
pub mod rng;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::freeconv::aspect_flip;
use crate::types::{AtomicMeasure, MomentSequence};

pub use matrix::CMatrix;
use rng::{derive_seed, streams, GaussianStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    Gaussian,
    /// Entries `(±1 ± i)/√2`. Experimental: the limit theory only needs
    /// finite fourth moments, but fixtures are pinned for Gaussian noise.
    Rademacher,
}

/// `rows x cols` matrix of i.i.d. unit-variance complex entries.
pub fn sample_noise(rows: usize, cols: usize, seed: u64, kind: NoiseKind) -> CMatrix {
    let mut g = GaussianStream::new(seed);
    let data = (0..rows * cols)
        .map(|_| match kind {
            NoiseKind::Gaussian => g.complex_normal(),
            NoiseKind::Rademacher => g.complex_rademacher(),
        })
        .collect();
    CMatrix::from_vec(rows, cols, data).expect("shape is consistent")
}

/// `n` eigenvalues distributed as `law`, using largest-remainder rounding of
/// `n * w_i` and keeping atom order.
pub fn signal_eigenvalues(law: &AtomicMeasure, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let atoms = law.atoms();
    let exact: Vec<f64> = atoms.iter().map(|&(_, w)| w * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    // stable sort keeps ties in atom order
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for (&(x, _), &k) in atoms.iter().zip(&counts) {
        out.extend(std::iter::repeat_n(x, k));
    }
    debug_assert_eq!(out.len(), n);
    Ok(out)
}

/// Deterministic `n x N` signal `R` with `(1/N) R R*` having spectrum
/// `gamma` (after rounding). Nonzero singular values occupy the leading
/// diagonal, so `gamma` may have at most `min(n, N)` nonzero eigenvalues.
pub fn realize_signal(gamma: &AtomicMeasure, n: usize, big_n: usize) -> Result<CMatrix> {
    if big_n == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    if gamma.min_position() < 0.0 {
        return Err(Error::domain("signal spectrum must be nonnegative"));
    }
    let mut eig = signal_eigenvalues(gamma, n)?;
    eig.sort_by_key(|x| *x == 0.0);
    let nonzero = eig.iter().filter(|&&x| x != 0.0).count();
    if nonzero > n.min(big_n) {
        return Err(Error::domain(format!(
            "{nonzero} nonzero signal eigenvalues do not fit in rank {}",
            n.min(big_n)
        )));
    }
    let diag: Vec<f64> = eig.iter().map(|&l| (big_n as f64 * l).sqrt()).collect();
    Ok(CMatrix::from_diag(n, big_n, &diag))
}

/// Unitary `n x n` matrix from modified Gram–Schmidt on a complex Gaussian
/// matrix; rows are orthonormal.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let g = sample_noise(n, n, seed, NoiseKind::Gaussian);
    let mut rows: Vec<Vec<Complex64>> = (0..n).map(|i| g.row(i).to_vec()).collect();
    for i in 0..n {
        for j in 0..i {
            let (done, rest) = rows.split_at_mut(i);
            let q = &done[j];
            let v = &mut rest[0];
            let proj: Complex64 = v.iter().zip(q).map(|(a, b)| a * b.conj()).sum();
            for (a, b) in v.iter_mut().zip(q) {
                *a -= proj * b;
            }
        }
        let norm = rows[i].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        rows[i].iter_mut().for_each(|a| *a /= norm);
    }
    CMatrix::from_vec(n, n, rows.concat()).expect("shape is consistent")
}

/// Normalized trace moments `tr(M^k) = Tr(M^k)/size`, `k = 1..=order`,
/// of a square matrix (real parts).
pub fn empirical_moments(m: &CMatrix, order: usize, mode: ExecMode) -> Result<MomentSequence> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::domain("moments need a nonempty square matrix"));
    }
    if order == 0 {
        return Err(Error::domain("order must be >= 1"));
    }
    let half = order.div_ceil(2);
    let mut powers = vec![m.clone()];
    for _ in 1..half {
        let next = powers.last().unwrap().mul(m, mode)?;
        powers.push(next);
    }
    let size = m.rows() as f64;
    let mut out = Vec::with_capacity(order);
    for k in 1..=order {
        let a = k.div_ceil(2);
        let b = k - a;
        let t = if b == 0 {
            powers[a - 1].trace()
        } else {
            powers[a - 1].trace_of_product(&powers[b - 1])?
        };
        out.push(t.re / size);
    }
    MomentSequence::new(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub big_n: usize,
    pub sigma2: f64,
    /// Spectrum of `(1/N) R R*`.
    pub gamma: AtomicMeasure,
    pub seed: u64,
    pub reps: usize,
    pub order: usize,
    pub noise: NoiseKind,
    /// Rotate the signal by a seeded unitary each repetition.
    pub rotate: bool,
}

impl EnsembleSpec {
    pub fn new(n: usize, big_n: usize, sigma2: f64, gamma: AtomicMeasure, seed: u64) -> Self {
        EnsembleSpec {
            n,
            big_n,
            sigma2,
            gamma,
            seed,
            reps: 1,
            order: 6,
            noise: NoiseKind::Gaussian,
            rotate: false,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.n as f64 / self.big_n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.big_n == 0 {
            return Err(Error::domain("dimensions must be positive"));
        }
        if self.reps == 0 || self.order == 0 {
            return Err(Error::domain("reps and order must be positive"));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::domain(format!(
                "noise variance must be nonnegative, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }
}

/// The observation `Y = R + σX` of repetition `rep`.
pub fn observation(spec: &EnsembleSpec, rep: usize, mode: ExecMode) -> Result<CMatrix> {
    spec.validate()?;
    let mut r = realize_signal(&spec.gamma, spec.n, spec.big_n)?;
    if spec.rotate {
        let u = random_unitary(spec.n, derive_seed(spec.seed, rep as u64, streams::ROTATION));
        r = u.mul(&r, mode)?;
    }
    let x = sample_noise(
        spec.n,
        spec.big_n,
        derive_seed(spec.seed, rep as u64, streams::NOISE),
        spec.noise,
    );
    r.add_scaled(&x, spec.sigma2.sqrt())
}

/// `tr_n` moments of `W = (1/N) Y Y*` for one repetition. When `n > N` the
/// smaller `N x N` Gram is used and converted.
pub fn rep_moments(spec: &EnsembleSpec, rep: usize, mode: ExecMode) -> Result<MomentSequence> {
    let y = observation(spec, rep, mode)?;
    let s = 1.0 / spec.big_n as f64;
    if spec.n <= spec.big_n {
        empirical_moments(&y.gram_rows(s, mode), spec.order, mode)
    } else {
        let small = empirical_moments(&y.gram_cols(s, mode), spec.order, mode)?;
        aspect_flip(&small, spec.ratio())
    }
}

/// Sample mean and standard error across repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub mean: MomentSequence,
    pub stderr: Vec<f64>,
    pub samples: Vec<MomentSequence>,
}

impl MomentEstimate {
    pub fn from_samples(samples: Vec<MomentSequence>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::domain("no samples"))?;
        let order = first.order();
        if samples.iter().any(|s| s.order() != order) {
            return Err(Error::domain("samples have different orders"));
        }
        let r = samples.len() as f64;
        let mut mean = vec![0.0; order];
        for s in &samples {
            for (m, x) in mean.iter_mut().zip(s.as_slice()) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= r);
        let stderr = (0..order)
            .map(|k| {
                if samples.len() < 2 {
                    return 0.0;
                }
                let ss: f64 = samples
                    .iter()
                    .map(|s| (s.as_slice()[k] - mean[k]).powi(2))
                    .sum();
                (ss / (r - 1.0)).sqrt() / r.sqrt()
            })
            .collect();
        Ok(MomentEstimate {
            mean: MomentSequence::new(mean)?,
            stderr,
            samples,
        })
    }

    pub fn reps(&self) -> usize {
        self.samples.len()
    }
}

pub fn simulate_info_noise(spec: &EnsembleSpec, mode: ExecMode) -> Result<MomentEstimate> {
    spec.validate()?;
    let samples = map_indexed(mode, spec.reps, |rep| rep_moments(spec, rep, mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(samples)
}

/// Sample covariance `Θ^{1/2} X X* Θ^{1/2} / N` with population spectrum
/// `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCovarianceSpec {
    pub n: usize,
    pub big_n: usize,
    pub theta: AtomicMeasure,
    pub seed: u64,
}

pub fn sample_covariance(spec: &SampleCovarianceSpec, rep: usize, mode: ExecMode) -> Result<CMatrix> {
    if spec.n == 0 || spec.big_n == 0 {
        return Err(Error::domain("dimensions must be positive"));
    }
    if spec.theta.min_position() < 0.0 {
        return Err(Error::domain("population spectrum must be nonnegative"));
    }
    let scale: Vec<f64> = signal_eigenvalues(&spec.theta, spec.n)?
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let mut x = sample_noise(
        spec.n,
        spec.big_n,
        derive_seed(spec.seed, rep as u64, streams::NOISE),
        NoiseKind::Gaussian,
    );
    for (i, s) in scale.iter().enumerate() {
        for j in 0..spec.big_n {
            let v = x.get(i, j) * *s;
            x.set(i, j, v);
        }
    }
    Ok(x.gram_rows(1.0 / spec.big_n as f64, mode))
}

/// Which matrix a factor of a mixed moment is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `A = X X*/N`.
    Noise,
    /// The same construction with an independent copy of `X`.
    NoiseCopy,
    /// `B = R R*/N`, with spectrum `gamma`.
    Signal,
}

/// One factor `P(M) - tr(P(M)) I` with `P(M) = sum_j poly[j] M^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTerm {
    pub factor: Factor,
    pub poly: Vec<f64>,
}

impl MixedTerm {
    /// The centered matrix itself, `M - tr(M) I`.
    pub fn linear(factor: Factor) -> Self {
        MixedTerm {
            factor,
            poly: vec![0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySpec {
    /// `n / N`.
    pub c: f64,
    pub gamma: AtomicMeasure,
    pub seed: u64,
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
}

fn centered_poly(m: &CMatrix, poly: &[f64], mode: ExecMode) -> Result<CMatrix> {
    let n = m.rows();
    let mut acc = CMatrix::zeros(n, n);
    for &p in poly.iter().rev() {
        acc = acc.mul(m, mode)?.add_scaled(&CMatrix::identity(n), p)?;
    }
    let t = acc.trace().re / n as f64;
    Ok(acc.shift_diag(t))
}

/// `|tr_n(prod_i (P_i(M_i) - tr_n(P_i(M_i)) I))|` averaged over repetitions,
/// for each dimension in `dims`. For asymptotically free factors this tends
/// to zero; repeating the same noise matrix gives a nonvanishing control.
pub fn mixed_moment_decay(
    dims: &[usize],
    spec: &DecaySpec,
    pattern: &[MixedTerm],
    mode: ExecMode,
) -> Result<Vec<DecayPoint>> {
    if !(spec.c > 0.0 && spec.c.is_finite()) {
        return Err(Error::domain(format!("ratio must be positive, got {}", spec.c)));
    }
    if pattern.is_empty() || spec.reps == 0 {
        return Err(Error::domain("pattern and reps must be nonempty"));
    }
    dims.iter()
        .map(|&n| {
            let big_n = ((n as f64) / spec.c).round().max(1.0) as usize;
            let dim_seed = derive_seed(spec.seed, n as u64, u64::MAX);
            let signal = CMatrix::from_diag(n, n, &signal_eigenvalues(&spec.gamma, n)?);
            let samples = map_indexed(mode, spec.reps, |rep| -> Result<MomentSequence> {
                let wishart = |stream| {
                    sample_noise(n, big_n, derive_seed(dim_seed, rep as u64, stream), NoiseKind::Gaussian)
                        .gram_rows(1.0 / big_n as f64, mode)
                };
                let uses = |f| pattern.iter().any(|t| t.factor == f);
                let a = uses(Factor::Noise).then(|| wishart(streams::NOISE));
                let a2 = uses(Factor::NoiseCopy).then(|| wishart(streams::NOISE_COPY));
                let mut prod = CMatrix::identity(n);
                for term in pattern {
                    let m = match term.factor {
                        Factor::Noise => a.as_ref().unwrap(),
                        Factor::NoiseCopy => a2.as_ref().unwrap(),
                        Factor::Signal => &signal,
                    };
                    prod = prod.mul(&centered_poly(m, &term.poly, mode)?, mode)?;
                }
                MomentSequence::new(vec![(prod.trace() / n as f64).norm()])
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let est = MomentEstimate::from_samples(samples)?;
            Ok(DecayPoint {
                n,
                mean: est.mean.get(1),
                stderr: est.stderr[0],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeconv::aspect_flip_back;

    fn two_point() -> AtomicMeasure {
        AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap()
    }

    #[test]
    fn largest_remainder_rounding() {
        let law = AtomicMeasure::new(vec![(1.0, 1.0 / 3.0), (2.0, 1.0 / 3.0), (5.0, 1.0 / 3.0)])
            .unwrap();
        let e = signal_eigenvalues(&law, 4).unwrap();
        assert_eq!(e, vec![1.0, 1.0, 2.0, 5.0]);
        let e = signal_eigenvalues(&two_point(), 7).unwrap();
        assert_eq!(e.len(), 7);
    }

    #[test]
    fn realized_signal_has_requested_spectrum() {
        let r = realize_signal(&two_point(), 4, 6).unwrap();
        let g = r.gram_rows(1.0 / 6.0, ExecMode::Sequential);
        let m = empirical_moments(&g, 3, ExecMode::Sequential).unwrap();
        let expect = two_point().moments(3).unwrap();
        for k in 1..=3 {
            assert!((m.get(k) - expect.get(k)).abs() < 1e-12);
        }
        // too many nonzero eigenvalues for the rank
        assert!(realize_signal(&two_point(), 4, 2).is_err());
        let with_zero =
            AtomicMeasure::new(vec![(0.0, 0.5), (1.0, 0.25), (3.0, 0.25)]).unwrap();
        assert!(realize_signal(&with_zero, 4, 2).is_ok());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(5, 11);
        let p = u.gram_rows(1.0, ExecMode::Sequential);
        for i in 0..5 {
            for j in 0..5 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - Complex64::new(e, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn empirical_moments_of_diagonal() {
        let d = CMatrix::from_diag(3, 3, &[1.0, 2.0, -1.0]);
        let m = empirical_moments(&d, 5, ExecMode::Sequential).unwrap();
        for k in 1..=5 {
            let expect = (1.0 + 2f64.powi(k as i32) + (-1f64).powi(k as i32)) / 3.0;
            assert!((m.get(k) - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn simulation_is_deterministic_across_modes() {
        let mut spec = EnsembleSpec::new(12, 20, 0.25, two_point(), 5);
        spec.reps = 4;
        spec.order = 4;
        spec.rotate = true;
        let a = simulate_info_noise(&spec, ExecMode::Sequential).unwrap();
        let b = simulate_info_noise(&spec, ExecMode::Parallel).unwrap();
        assert_eq!(a, b);
        spec.seed = 6;
        let c = simulate_info_noise(&spec, ExecMode::Parallel).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn wide_and_tall_grams_agree() {
        let gamma = AtomicMeasure::new(vec![(0.0, 0.5), (1.0, 0.25), (3.0, 0.25)]).unwrap();
        let mut spec = EnsembleSpec::new(16, 8, 0.5, gamma, 9);
        spec.order = 5;
        let y = observation(&spec, 0, ExecMode::Sequential).unwrap();
        let s = 1.0 / 8.0;
        let big = empirical_moments(&y.gram_rows(s, ExecMode::Sequential), 5, ExecMode::Sequential)
            .unwrap();
        let small = empirical_moments(&y.gram_cols(s, ExecMode::Sequential), 5, ExecMode::Sequential)
            .unwrap();
        let back = aspect_flip_back(&big, spec.ratio()).unwrap();
        for k in 1..=5 {
            assert!((back.get(k) - small.get(k)).abs() <= 1e-12 * small.get(k).abs().max(1.0));
        }
        let via = rep_moments(&spec, 0, ExecMode::Sequential).unwrap();
        for k in 1..=5 {
            assert!((via.get(k) - big.get(k)).abs() <= 1e-12 * big.get(k).abs().max(1.0));
        }
    }

    #[test]
    fn standard_error_of_constant_samples_is_zero() {
        let s = MomentSequence::new(vec![1.0, 2.0]).unwrap();
        let e = MomentEstimate::from_samples(vec![s.clone(), s.clone(), s]).unwrap();
        assert_eq!(e.stderr, vec![0.0, 0.0]);
        assert_eq!(e.reps(), 3);
        assert!(MomentEstimate::from_samples(vec![]).is_err());
    }

    #[test]
    fn same_matrix_control_does_not_vanish() {
        let spec = DecaySpec {
            c: 0.5,
            gamma: two_point(),
            seed: 1,
            reps: 3,
        };
        let pattern = [MixedTerm::linear(Factor::Noise), MixedTerm::linear(Factor::Noise)];
        let out = mixed_moment_decay(&[32], &spec, &pattern, ExecMode::Sequential).unwrap();
        // tr((A - 1)^2) tends to the variance c of the law
        assert!((out[0].mean - 0.5).abs() < 0.15);
    }
}
