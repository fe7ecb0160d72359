//! Convergence diagnostics for the band estimators.
//!
//! A finite band cannot certify the `K → ∞` limit. For a resampleable
//! process the RMS deviation of the estimator from its known mean is
//! measured per band; for recorded data only the spread across bands is
//! reported.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::recovery::correlation::{band_correlation, band_sum, recovery_constant, MIN_TERMS};
use crate::scatter::FarFieldSet;

/// A process that yields the pair `(u(k_j), u(k_j + τ))` on a mesh.
pub trait BandProcess: Sync {
    /// Returns `(a_j, b_j)` for every mesh point.
    fn draw(&self, ks: &[f64], rng: &mut ChaCha8Rng) -> (Vec<Complex64>, Vec<Complex64>);
    /// Exact mean of the weighted band estimator, if known.
    fn estimator_mean(&self) -> Option<Complex64>;
}

/// Complex Gaussian pairs, independent across mesh points, with
/// `E|a|² = E|b|² = c0 k^{-m}` and `E[conj a · b] = ρ c0 k^{-m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticProcess {
    pub c0: f64,
    pub m: f64,
    /// Correlation coefficient in `[-1, 1]`.
    pub rho: f64,
}

impl SyntheticProcess {
    pub fn new(c0: f64, m: f64, rho: f64) -> Result<Self> {
        if !(c0 >= 0.0) || !m.is_finite() || !(-1.0..=1.0).contains(&rho) {
            return Err(Error::config(format!("invalid synthetic process c0 = {c0}, m = {m}, rho = {rho}")));
        }
        Ok(Self { c0, m, rho })
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

impl BandProcess for SyntheticProcess {
    fn draw(&self, ks: &[f64], rng: &mut ChaCha8Rng) -> (Vec<Complex64>, Vec<Complex64>) {
        let orth = (1.0 - self.rho * self.rho).sqrt();
        ks.iter()
            .map(|&k| {
                let s = (self.c0 * k.powf(-self.m)).sqrt();
                let z1 = complex_normal(rng);
                let z2 = complex_normal(rng);
                (z1 * s, (z1 * self.rho + z2 * orth) * s)
            })
            .unzip()
    }

    fn estimator_mean(&self) -> Option<Complex64> {
        Some(Complex64::new(recovery_constant() * self.c0 * self.rho, 0.0))
    }
}

/// A fixed pair of functions; every repetition returns the same data.
pub struct DeterministicProcess<F: Fn(f64) -> Complex64 + Sync, G: Fn(f64) -> Complex64 + Sync> {
    pub a: F,
    pub b: G,
}

impl<F: Fn(f64) -> Complex64 + Sync, G: Fn(f64) -> Complex64 + Sync> BandProcess for DeterministicProcess<F, G> {
    fn draw(&self, ks: &[f64], _: &mut ChaCha8Rng) -> (Vec<Complex64>, Vec<Complex64>) {
        (ks.iter().map(|&k| (self.a)(k)).collect(), ks.iter().map(|&k| (self.b)(k)).collect())
    }

    fn estimator_mean(&self) -> Option<Complex64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandDiagnostic {
    pub k_lo: f64,
    pub n_terms: usize,
    /// Mean of the estimator over repetitions.
    pub mean: Complex64,
    /// RMS distance from the known mean (or from the sample mean when unknown).
    pub rms_deviation: f64,
    /// Sample standard deviation across repetitions.
    pub rep_std: f64,
}

fn check_bands(bands: &[f64], delta: f64) -> Result<Vec<usize>> {
    if bands.len() < 3 {
        return Err(Error::config(format!("ergodic diagnostic needs at least 3 bands, got {}", bands.len())));
    }
    if !(delta > 0.0) {
        return Err(Error::config(format!("mesh spacing delta = {delta} must be positive")));
    }
    bands
        .iter()
        .map(|&k| {
            let n = (k / delta).round();
            if !(k > 0.0) || (k / delta - n).abs() > 1e-6 {
                return Err(Error::config(format!("band start K = {k} is not a positive multiple of delta = {delta}")));
            }
            if (n as usize) < MIN_TERMS {
                return Err(Error::config(format!("band [{k}, {}) holds {n} mesh points, need at least {MIN_TERMS}", 2.0 * k)));
            }
            Ok(n as usize)
        })
        .collect()
}

/// Monte-Carlo profile of the weighted band estimator over `n_rep` draws per band.
pub fn ergodic_diagnostic_synthetic(
    process: &impl BandProcess,
    m: f64,
    bands: &[f64],
    delta: f64,
    n_rep: usize,
    seed: u64,
) -> Result<Vec<BandDiagnostic>> {
    let counts = check_bands(bands, delta)?;
    if n_rep < 2 {
        return Err(Error::config("ergodic diagnostic needs at least 2 repetitions"));
    }
    bands
        .iter()
        .zip(counts)
        .enumerate()
        .map(|(b, (&k_lo, n_terms))| {
            let ks: Vec<f64> = (0..n_terms).map(|j| k_lo + j as f64 * delta).collect();
            let values: Vec<Complex64> = (0..n_rep)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((b * n_rep + r) as u64);
                    let (a, bb) = process.draw(&ks, &mut rng);
                    band_sum(&ks, &a, &bb, |k| k.powf(m), delta, k_lo)
                })
                .collect();
            let n = n_rep as f64;
            let mean: Complex64 = values.iter().sum::<Complex64>() / n;
            let target = process.estimator_mean().unwrap_or(mean);
            let rms = (values.iter().map(|v| (v - target).norm_sqr()).sum::<f64>() / n).sqrt();
            let std = (values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0)).sqrt();
            Ok(BandDiagnostic { k_lo, n_terms, mean, rms_deviation: rms, rep_std: std })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadDiagnostic {
    /// `(K, n_terms, estimate)` per band.
    pub bands: Vec<(f64, usize, Complex64)>,
    pub mean: Complex64,
    /// Sample standard deviation of the estimates across bands.
    pub spread: f64,
}

/// Spread of `band_correlation` across the listed bands of one realization.
pub fn ergodic_diagnostic_data(ff: &FarFieldSet, m: f64, tau: f64, dir: [f64; 3], bands: &[f64]) -> Result<SpreadDiagnostic> {
    check_bands(bands, ff.delta())?;
    let est = bands
        .iter()
        .map(|&k| band_correlation(ff, m, tau, dir, k).map(|e| (k, e.n_terms, e.value)))
        .collect::<Result<Vec<_>>>()?;
    let n = est.len() as f64;
    let mean: Complex64 = est.iter().map(|e| e.2).sum::<Complex64>() / n;
    let spread = (est.iter().map(|e| (e.2 - mean).norm_sqr()).sum::<f64>() / (n - 1.0)).sqrt();
    Ok(SpreadDiagnostic { bands: est, mean, spread })
}

pub fn synthetic_csv(rows: &[BandDiagnostic]) -> String {
    let mut s = String::from("k_lo,k_hi,n_terms,mean_re,mean_im,rms_deviation,rep_std\n");
    for r in rows {
        writeln!(
            s,
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.k_lo,
            2.0 * r.k_lo,
            r.n_terms,
            r.mean.re,
            r.mean.im,
            r.rms_deviation,
            r.rep_std
        )
        .unwrap();
    }
    s
}

pub fn spread_csv(d: &SpreadDiagnostic) -> String {
    let mut s = String::from("k_lo,k_hi,n_terms,re,im,spread\n");
    for &(k, n, v) in &d.bands {
        writeln!(s, "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}", k, 2.0 * k, n, v.re, v.im, d.spread).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_process_has_zero_deviation() {
        let p = SyntheticProcess::new(0.0, 2.5, 0.5).unwrap();
        for row in ergodic_diagnostic_synthetic(&p, 2.5, &[4.0, 8.0, 16.0], 0.25, 10, 3).unwrap() {
            assert_eq!(row.rms_deviation, 0.0);
            assert_eq!(row.rep_std, 0.0);
        }
    }

    #[test]
    fn deterministic_process_has_no_spread() {
        let p = DeterministicProcess { a: |k: f64| Complex64::new(k.sin(), 1.0), b: |k: f64| Complex64::new(1.0, k) };
        for row in ergodic_diagnostic_synthetic(&p, 1.0, &[4.0, 8.0, 16.0], 0.25, 5, 3).unwrap() {
            assert!(row.rep_std <= 1e-12 * row.mean.norm());
        }
    }

    #[test]
    fn rejects_short_or_few_bands() {
        let p = SyntheticProcess::new(1.0, 2.5, 1.0).unwrap();
        assert!(ergodic_diagnostic_synthetic(&p, 2.5, &[4.0, 8.0], 0.25, 10, 0).is_err());
        assert!(ergodic_diagnostic_synthetic(&p, 2.5, &[1.0, 8.0, 16.0], 0.25, 10, 0).is_err());
    }

    #[test]
    fn monte_carlo_mean_matches_the_constant() {
        let p = SyntheticProcess::new(0.7, 2.5, 1.0).unwrap();
        let rows = ergodic_diagnostic_synthetic(&p, 2.5, &[16.0, 32.0, 64.0], 0.125, 200, 11).unwrap();
        for r in rows {
            let se = r.rep_std / (200f64).sqrt();
            assert!((r.mean - p.estimator_mean().unwrap()).norm() < 3.0 * se + 1e-12, "{r:?}");
        }
    }

    #[test]
    fn halving_the_mesh_keeps_the_mean() {
        let p = SyntheticProcess::new(0.7, 2.5, 0.8).unwrap();
        let coarse = ergodic_diagnostic_synthetic(&p, 2.5, &[8.0, 16.0, 32.0], 0.25, 300, 5).unwrap();
        let fine = ergodic_diagnostic_synthetic(&p, 2.5, &[8.0, 16.0, 32.0], 0.125, 300, 6).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            let se = (c.rep_std.powi(2) / 300.0 + f.rep_std.powi(2) / 300.0).sqrt();
            assert!((c.mean - f.mean).norm() < 3.0 * se, "{c:?} {f:?}");
        }
    }
}
