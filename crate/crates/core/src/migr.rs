//! Microlocally isotropic Gaussian random (migr) fields.
//!
//! A sample is `f = mean + √μ · g` where `g = ℱ⁻¹[|ξ|^{-m/2} ℱW]` and `W` is
//! discrete white noise scaled by `h^{-3/2}`, so that `g` has covariance
//! symbol `|ξ|^{-m}` and `f` has principal symbol `μ(x)|ξ|^{-m}`.
//!
//! The noise and the multiplier live on a grid `padding`× larger per axis and
//! the result is cropped back, which keeps the periodic images of the
//! long-range kernel away from the box.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{fft_forward, Fft3};
use crate::field::{frequency_lattice, ComplexField, GridSpec, ScalarField};
use crate::quad::box_average_inverse_power;

/// Default width, in cells, of the zero collar required around `supp μ`.
pub const DEFAULT_COLLAR: usize = 4;
/// Default per-axis padding factor of the synthesis grid.
pub const DEFAULT_PADDING: usize = 2;

#[derive(Debug, Clone)]
pub struct MigrSpec {
    order: f64,
    strength: ScalarField,
    mean: ScalarField,
    collar: usize,
    padding: usize,
    multiplier: OnceLock<Arc<Vec<f64>>>,
}

impl PartialEq for MigrSpec {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.strength == other.strength
            && self.mean == other.mean
            && self.collar == other.collar
            && self.padding == other.padding
    }
}

impl MigrSpec {
    pub fn new(order: f64, strength: ScalarField, mean: ScalarField) -> Result<Self> {
        Self::with_options(order, strength, mean, DEFAULT_COLLAR, DEFAULT_PADDING)
    }

    pub fn with_options(
        order: f64,
        strength: ScalarField,
        mean: ScalarField,
        collar: usize,
        padding: usize,
    ) -> Result<Self> {
        if !(order == 0.0 || (2.0..4.0).contains(&order)) {
            return Err(Error::config(format!("rough order m = {order} must be 0 or lie in [2, 4)")));
        }
        if strength.grid() != mean.grid() {
            return Err(Error::config("strength and mean live on different grids"));
        }
        if !padding.is_power_of_two() {
            return Err(Error::config(format!("padding = {padding} must be a power of two")));
        }
        if let Some(i) = strength.data().iter().position(|&v| v < 0.0) {
            let p = strength.grid().point_of(i);
            return Err(Error::config(format!(
                "strength is negative at ({:.4}, {:.4}, {:.4})",
                p[0], p[1], p[2]
            )));
        }
        let grid = *strength.grid();
        let sbox = strength.support_box();
        if !grid.respects_collar(sbox, collar) {
            return Err(Error::config(format!(
                "strength support must leave a collar of {collar} cells inside the grid"
            )));
        }
        if let Some((mlo, mhi)) = mean.support_box() {
            let inside = sbox.is_some_and(|(lo, hi)| (0..3).all(|a| mlo[a] >= lo[a] && mhi[a] <= hi[a]));
            if !inside {
                return Err(Error::config("mean support must lie inside the bounding box of the strength support"));
            }
        }
        if order > 0.0 {
            let h = grid.spacing();
            let decay = grid.nyquist().powf(-order);
            if decay > 1e-3 {
                return Err(Error::config(format!(
                    "grid too coarse for m = {order}: h = {h} puts |ξ|^-m = {decay:.3e} at Nyquist (need <= 1e-3)"
                )));
            }
        }
        Ok(Self { order, strength, mean, collar, padding, multiplier: OnceLock::new() })
    }

    /// Spec with zero mean.
    pub fn centered(order: f64, strength: ScalarField) -> Result<Self> {
        let mean = ScalarField::zeros(*strength.grid());
        Self::new(order, strength, mean)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn strength(&self) -> &ScalarField {
        &self.strength
    }

    pub fn mean(&self) -> &ScalarField {
        &self.mean
    }

    pub fn grid(&self) -> &GridSpec {
        self.strength.grid()
    }

    pub fn collar(&self) -> usize {
        self.collar
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    /// Same order and geometry with `μ` multiplied by `c ≥ 0`.
    pub fn with_scaled_strength(&self, c: f64) -> Result<Self> {
        Self::with_options(self.order, self.strength.scaled(c), self.mean.clone(), self.collar, self.padding)
    }

    pub fn synthesis_grid(&self) -> GridSpec {
        self.grid().padded(self.padding).expect("padding a valid grid stays valid")
    }

    /// `√s(ξ)` on the synthesis grid, in DFT order.
    fn multiplier(&self) -> Arc<Vec<f64>> {
        self.multiplier
            .get_or_init(|| {
                let pg = self.synthesis_grid();
                let m = self.order;
                let dc = if m == 0.0 {
                    1.0
                } else if m < 3.0 {
                    let half = [0, 1, 2].map(|a| pg.frequency_step(a) / 2.0);
                    box_average_inverse_power(half, m).sqrt()
                } else {
                    0.0
                };
                let table = frequency_lattice(&pg)
                    .into_iter()
                    .map(|xi| {
                        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                        if m == 0.0 {
                            1.0
                        } else if r2 == 0.0 {
                            dc
                        } else {
                            r2.powf(-m / 4.0)
                        }
                    })
                    .collect();
                Arc::new(table)
            })
            .clone()
    }
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub field: ScalarField,
    pub seed: u64,
    pub spec: Arc<MigrSpec>,
}

/// Zero-mean stationary part `g` on the original grid and the ratio
/// `max |Im| / max |Re|` of the inverse transform before the imaginary part is dropped.
fn rough_part_with_residue(spec: &MigrSpec, seed: u64) -> (Vec<f64>, f64) {
    let pg = spec.synthesis_grid();
    let mult = spec.multiplier();
    let scale = pg.cell_volume().powf(-0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf: Vec<Complex64> = (0..pg.len())
        .map(|_| {
            let w: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(w * scale, 0.0)
        })
        .collect();
    let plan = Fft3::for_dims(pg.dims());
    plan.forward_raw(&mut buf);
    let norm = 1.0 / pg.len() as f64;
    buf.par_iter_mut().zip(mult.par_iter()).for_each(|(v, &s)| *v *= s * norm);
    plan.inverse_raw(&mut buf);

    let grid = spec.grid();
    let [nx, ny, nz] = grid.dims();
    let mut out = Vec::with_capacity(grid.len());
    let mut max_re = 0.0f64;
    let mut max_im = 0.0f64;
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let v = buf[pg.index(i, j, k)];
                max_re = max_re.max(v.re.abs());
                max_im = max_im.max(v.im.abs());
                out.push(v.re);
            }
        }
    }
    (out, max_im / max_re.max(f64::MIN_POSITIVE))
}

fn rough_part(spec: &MigrSpec, seed: u64) -> Vec<f64> {
    let (out, residue) = rough_part_with_residue(spec, seed);
    assert!(residue <= 1e-10, "synthesized field has relative imaginary residue {residue:e}");
    out
}

/// Relative imaginary residue of the synthesis for `seed`, zero for a vanishing strength.
pub fn synthesis_residue(spec: &MigrSpec, seed: u64) -> f64 {
    if spec.strength.is_zero() {
        return 0.0;
    }
    rough_part_with_residue(spec, seed).1
}

/// One realization `f(·, ω)` for `ω = seed`; a pure function of `(spec, seed)`.
pub fn synthesize_migr(spec: &Arc<MigrSpec>, seed: u64) -> Result<Realization> {
    let g = if spec.strength.is_zero() { vec![0.0; spec.grid().len()] } else { rough_part(spec, seed) };
    let data: Vec<f64> = spec
        .strength
        .data()
        .iter()
        .zip(spec.mean.data())
        .zip(&g)
        .map(|((&mu, &mean), &gv)| mean + mu.sqrt() * gv)
        .collect();
    debug_assert!(data
        .iter()
        .zip(spec.strength.data())
        .zip(spec.mean.data())
        .all(|((&v, &mu), &mean)| mu != 0.0 || mean != 0.0 || v == 0.0));
    let field = ScalarField::new(*spec.grid(), data)?;
    Ok(Realization { field, seed, spec: spec.clone() })
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceEstimate {
    pub value: f64,
    pub std_err: f64,
}

fn mean_and_se(xs: &[f64]) -> CovarianceEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    CovarianceEstimate { value: mean, std_err: (var / n).sqrt() }
}

/// Per-sample products `(f(x)-E f(x))(f(y)-E f(y))`, one row per sample.
fn covariance_products(
    spec: &Arc<MigrSpec>,
    pairs: &[([f64; 3], [f64; 3])],
    n_samples: usize,
    seed0: u64,
) -> Result<Vec<Vec<f64>>> {
    if n_samples < 2 {
        return Err(Error::config(format!("n_samples = {n_samples} must be at least 2")));
    }
    let grid = *spec.grid();
    let mut nodes = Vec::with_capacity(pairs.len());
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let mut idx = [0usize; 2];
        for (slot, p) in [x, y].into_iter().enumerate() {
            if !grid.contains(p) {
                return Err(Error::Domain(format!(
                    "pair {i}: point ({}, {}, {}) lies outside the grid box",
                    p[0], p[1], p[2]
                )));
            }
            let n = grid.nearest(p).expect("contained point has a nearest node");
            idx[slot] = grid.index(n[0], n[1], n[2]);
        }
        nodes.push(idx);
    }
    let mu_sqrt: Vec<[f64; 2]> = nodes
        .iter()
        .map(|&[a, b]| [spec.strength.data()[a].sqrt(), spec.strength.data()[b].sqrt()])
        .collect();
    // f - mean = √μ g, so only g needs to be synthesized
    let rows = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let seed = seed0.wrapping_add(s as u64);
            if spec.strength.is_zero() {
                return vec![0.0; nodes.len()];
            }
            let g = rough_part(spec, seed);
            nodes
                .iter()
                .zip(&mu_sqrt)
                .map(|(&[a, b], &[sa, sb])| sa * g[a] * sb * g[b])
                .collect()
        })
        .collect();
    Ok(rows)
}

/// Covariance `E[(f(x)-E f(x))(f(y)-E f(y))]` at each pair over seeds
/// `seed0 .. seed0 + n_samples - 1`. Points are snapped to the nearest node.
pub fn empirical_covariance(
    spec: &Arc<MigrSpec>,
    pairs: &[([f64; 3], [f64; 3])],
    n_samples: usize,
    seed0: u64,
) -> Result<Vec<CovarianceEstimate>> {
    let rows = covariance_products(spec, pairs, n_samples, seed0)?;
    Ok((0..pairs.len())
        .map(|p| mean_and_se(&rows.iter().map(|r| r[p]).collect::<Vec<_>>()))
        .collect())
}

/// Average of the covariance over several pairs that share the same expected
/// value. The standard error accounts for correlation between the pairs.
pub fn pooled_covariance(
    spec: &Arc<MigrSpec>,
    pairs: &[([f64; 3], [f64; 3])],
    n_samples: usize,
    seed0: u64,
) -> Result<CovarianceEstimate> {
    Ok(pooled_covariance_groups(spec, &[pairs.to_vec()], n_samples, seed0)?.remove(0))
}

/// [`pooled_covariance`] for several groups at once; every group sees the same realizations.
pub fn pooled_covariance_groups(
    spec: &Arc<MigrSpec>,
    groups: &[Vec<([f64; 3], [f64; 3])>],
    n_samples: usize,
    seed0: u64,
) -> Result<Vec<CovarianceEstimate>> {
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::config("pooled covariance needs at least one pair per group"));
    }
    let flat: Vec<_> = groups.iter().flatten().copied().collect();
    let rows = covariance_products(spec, &flat, n_samples, seed0)?;
    let mut out = Vec::with_capacity(groups.len());
    let mut start = 0;
    for g in groups {
        let per_sample: Vec<f64> =
            rows.iter().map(|r| r[start..start + g.len()].iter().sum::<f64>() / g.len() as f64).collect();
        out.push(mean_and_se(&per_sample));
        start += g.len();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
    /// `(log |ξ|, log power)` per radial bin used in the fit.
    pub bins: Vec<(f64, f64)>,
}

/// Two-sided 97.5% Student-t quantiles for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
    2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
];

fn t975(dof: usize) -> f64 {
    if dof == 0 {
        f64::INFINITY
    } else if dof <= 30 {
        T975[dof - 1]
    } else {
        1.96
    }
}

/// Least-squares slope of the log radially binned ensemble power spectrum of
/// `f - mean` against `log |ξ|` over `[Nyquist/40, Nyquist/4]`.
pub fn spectral_slope(spec: &Arc<MigrSpec>, n_samples: usize, seed0: u64) -> Result<SlopeFit> {
    if n_samples < 1 {
        return Err(Error::config("spectral slope needs at least one sample"));
    }
    if spec.strength.is_zero() {
        return Err(Error::Domain("spectral slope of a zero-strength field is undefined".into()));
    }
    let grid = *spec.grid();
    let lo = grid.nyquist() / 40.0;
    let hi = grid.nyquist() / 4.0;
    let bins_per_decade = 12.0;
    let n_bins = ((hi / lo).log10() * bins_per_decade).ceil() as usize;
    let edge = |b: usize| lo * 10f64.powf(b as f64 / bins_per_decade);
    let lattice = frequency_lattice(&grid);
    let bin_of: Vec<Option<usize>> = lattice
        .iter()
        .map(|xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if r < lo || r > hi {
                None
            } else {
                Some((((r / lo).log10() * bins_per_decade).floor() as usize).min(n_bins - 1))
            }
        })
        .collect();

    let power = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let g = rough_part(spec, seed0.wrapping_add(s as u64));
            let dev: Vec<Complex64> = g
                .iter()
                .zip(spec.strength.data())
                .map(|(&gv, &mu)| Complex64::new(mu.sqrt() * gv, 0.0))
                .collect();
            let spec_f = fft_forward(&ComplexField::from_parts(grid, dev));
            spec_f.data().iter().map(|v| v.norm_sqr()).collect::<Vec<f64>>()
        })
        .reduce(
            || vec![0.0; grid.len()],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let mut sum_p = vec![0.0; n_bins];
    let mut sum_logr = vec![0.0; n_bins];
    let mut count = vec![0usize; n_bins];
    for ((b, xi), p) in bin_of.iter().zip(&lattice).zip(&power) {
        if let Some(b) = *b {
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            sum_p[b] += p;
            sum_logr[b] += r.ln();
            count[b] += 1;
        }
    }
    let bins: Vec<(f64, f64)> = (0..n_bins)
        .filter(|&b| count[b] > 0 && sum_p[b] > 0.0)
        .map(|b| (sum_logr[b] / count[b] as f64, (sum_p[b] / count[b] as f64).ln()))
        .collect();
    if bins.len() < 5 {
        return Err(Error::Domain(format!(
            "only {} populated radial bins in [{:.3}, {:.3}]; need 5 (grid too small)",
            bins.len(),
            edge(0),
            edge(n_bins)
        )));
    }
    let n = bins.len() as f64;
    let mx = bins.iter().map(|b| b.0).sum::<f64>() / n;
    let my = bins.iter().map(|b| b.1).sum::<f64>() / n;
    let sxx: f64 = bins.iter().map(|b| (b.0 - mx).powi(2)).sum();
    let sxy: f64 = bins.iter().map(|b| (b.0 - mx) * (b.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = bins.iter().map(|b| (b.1 - icpt - slope * b.0).powi(2)).sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, half_width: t975(bins.len() - 2) * se, bins })
}
