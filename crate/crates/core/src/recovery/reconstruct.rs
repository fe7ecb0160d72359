//! Assembly of `μ̂` on a polar lattice `{τ_l x̂_j}` and inversion to `μ(x)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::{frequency_lattice, GridSpec, ScalarField};
use crate::geometry::{dot, is_unit, norm};
use crate::recovery::correlation::{backscatter_correlation, band_correlation, hermitian_complete, CorrelationEstimate};
use crate::rsgf::{write_field, AnyField};
use crate::scatter::{AcquisitionKind, FarFieldSet};

/// What to estimate and where to put the reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRequest {
    /// Rough order of the ingredient being recovered.
    pub m: f64,
    pub tau_list: Vec<f64>,
    pub dirs: Vec<[f64; 3]>,
    /// Band start `K`; the band is `[K, 2K)`.
    pub k_lo: f64,
    /// Separating normal; when present only `x̂·n ≥ 0` is estimated.
    pub normal: Option<[f64; 3]>,
    /// Grid of the reconstructed field.
    pub grid: GridSpec,
}

#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub kind: AcquisitionKind,
    pub m: f64,
    pub k_lo: f64,
    pub normal: Option<[f64; 3]>,
    /// Samples on the full polar lattice after any completion.
    pub mu_hat_samples: Vec<CorrelationEstimate>,
    /// Reconstruction with negative values clipped to zero.
    pub mu_rec: ScalarField,
    pub mu_rec_unclipped: ScalarField,
    pub ground_truth: Option<ScalarField>,
    /// `‖μ_rec - μ‖ / ‖μ‖` over `supp μ`, unclipped reconstruction.
    pub rel_l2_error: Option<f64>,
    pub rel_l2_error_clipped: Option<f64>,
    /// `‖Im‖ / ‖Re‖` of the inverse transform before it was discarded.
    pub imag_residue: f64,
}

/// `max{2/3, 1/(2(3-m))}` for `m < 3`; recorded only, no finite band can check it.
pub fn sequence_exponent(m: f64) -> Option<f64> {
    (m < 3.0).then(|| (2.0f64 / 3.0).max(0.5 / (3.0 - m)))
}

/// `‖a - b‖ / ‖b‖` over the cells where `b > 0`.
pub fn rel_l2_on_support(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::config("reconstruction and ground truth live on different grids"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &y) in a.data().iter().zip(b.data()) {
        if y > 0.0 {
            num += (x - y) * (x - y);
            den += y * y;
        }
    }
    if den == 0.0 {
        return Err(Error::Domain("ground truth vanishes identically".into()));
    }
    Ok((num / den).sqrt())
}

/// Relative ℓ² distance of the polar samples from `truth(ξ)`.
pub fn spectral_rel_error(samples: &[CorrelationEstimate], truth: impl Fn([f64; 3]) -> Complex64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for s in samples {
        let t = truth([s.tau * s.dir[0], s.tau * s.dir[1], s.tau * s.dir[2]]);
        num += (s.value - t).norm_sqr();
        den += t.norm_sqr();
    }
    (num / den).sqrt()
}

struct PolarTable {
    dirs: Vec<[f64; 3]>,
    taus: Vec<f64>,
    /// `values[d * taus.len() + t]`
    values: Vec<Complex64>,
}

impl PolarTable {
    fn new(samples: &[CorrelationEstimate]) -> Result<Self> {
        let mut taus: Vec<f64> = Vec::new();
        let mut dirs: Vec<[f64; 3]> = Vec::new();
        for s in samples {
            if !taus.contains(&s.tau) {
                taus.push(s.tau);
            }
            if !dirs.contains(&s.dir) {
                dirs.push(s.dir);
            }
        }
        taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut values = vec![None; dirs.len() * taus.len()];
        for s in samples {
            let d = dirs.iter().position(|&x| x == s.dir).unwrap();
            let t = taus.iter().position(|&x| x == s.tau).unwrap();
            values[d * taus.len() + t] = Some(s.value);
        }
        let values = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Coverage("polar lattice is incomplete".into()))?;
        Ok(Self { dirs, taus, values })
    }

    fn radial(&self, d: usize, r: f64) -> Complex64 {
        let nt = self.taus.len();
        let row = &self.values[d * nt..(d + 1) * nt];
        if r <= self.taus[0] {
            return row[0];
        }
        let l = self.taus.partition_point(|&t| t <= r).min(nt - 1);
        let (t0, t1) = (self.taus[l - 1], self.taus[l]);
        let w = (r - t0) / (t1 - t0);
        row[l - 1] * (1.0 - w) + row[l] * w
    }

    /// Linear in `|ξ|`, inverse-angle weighted over the three nearest directions.
    fn at(&self, xi: [f64; 3]) -> Complex64 {
        let r = norm(xi);
        let tau_max = *self.taus.last().unwrap();
        if r > tau_max {
            return Complex64::default();
        }
        if r == 0.0 {
            let sum: Complex64 = (0..self.dirs.len()).map(|d| self.radial(d, 0.0)).sum();
            return sum / self.dirs.len() as f64;
        }
        let w = [xi[0] / r, xi[1] / r, xi[2] / r];
        let mut near: Vec<(f64, usize)> =
            self.dirs.iter().enumerate().map(|(i, &d)| (dot(d, w).clamp(-1.0, 1.0).acos(), i)).collect();
        near.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if near[0].0 < 1e-12 {
            return self.radial(near[0].1, r);
        }
        let (mut acc, mut wsum) = (Complex64::default(), 0.0);
        for &(angle, i) in near.iter().take(3) {
            acc += self.radial(i, r) / angle;
            wsum += 1.0 / angle;
        }
        acc / wsum
    }
}

/// Inverse transform `μ(x) = (2π)^{-3/2} Σ_ξ μ̂(ξ) e^{iξ·x} Δξ³` of the
/// interpolated polar samples. Returns the real part and `‖Im‖/‖Re‖`.
pub fn invert_polar(samples: &[CorrelationEstimate], grid: &GridSpec, symmetrize: bool) -> Result<(Vec<f64>, f64)> {
    if samples.is_empty() {
        return Err(Error::Coverage("no spectral samples to invert".into()));
    }
    let table = PolarTable::new(samples)?;
    let lattice = frequency_lattice(grid);
    let origin = grid.origin();
    let mut spec: Vec<Complex64> = lattice.par_iter().map(|&xi| table.at(xi)).collect();
    if symmetrize {
        let dims = grid.dims();
        let flip = |i: usize, n: usize| (n - i) % n;
        let sym: Vec<Complex64> = (0..grid.len())
            .map(|idx| {
                let [i, j, l] = grid.unravel(idx);
                let mirror = grid.index(flip(i, dims[0]), flip(j, dims[1]), flip(l, dims[2]));
                (spec[idx] + spec[mirror].conj()) * 0.5
            })
            .collect();
        spec = sym;
    }
    for (v, xi) in spec.iter_mut().zip(&lattice) {
        *v *= Complex64::from_polar(1.0, dot(*xi, origin));
    }
    Fft3::for_dims(grid.dims()).inverse_raw(&mut spec);
    let cell: f64 = (0..3).map(|a| grid.frequency_step(a)).product();
    let scale = (2.0 * PI).powf(-1.5) * cell;
    let re: Vec<f64> = spec.iter().map(|v| v.re * scale).collect();
    let re_norm = re.iter().map(|v| v * v).sum::<f64>().sqrt();
    let im_norm = spec.iter().map(|v| (v.im * scale).powi(2)).sum::<f64>().sqrt();
    let residue = if re_norm > 0.0 { im_norm / re_norm } else if im_norm > 0.0 { f64::INFINITY } else { 0.0 };
    Ok((re, residue))
}

fn validate_request(req: &RecoveryRequest) -> Result<()> {
    if req.tau_list.is_empty() || req.tau_list.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::config("tau_list must be a non-empty list of non-negative shifts"));
    }
    if req.dirs.is_empty() || req.dirs.iter().any(|&d| !is_unit(d)) {
        return Err(Error::config("recovery needs a non-empty list of unit directions"));
    }
    if let Some(n) = req.normal {
        if !is_unit(n) {
            return Err(Error::config(format!("separating normal {n:?} is not a unit vector")));
        }
    }
    Ok(())
}

fn recover(
    ff: &FarFieldSet,
    req: &RecoveryRequest,
    truth: Option<&ScalarField>,
    estimator: impl Fn(f64, [f64; 3]) -> Result<CorrelationEstimate> + Sync,
) -> Result<RecoveryReport> {
    validate_request(req)?;
    let dirs: Vec<[f64; 3]> = match req.normal {
        Some(n) => req.dirs.iter().copied().filter(|&d| dot(d, n) >= -1e-12).collect(),
        None => req.dirs.clone(),
    };
    if dirs.is_empty() {
        return Err(Error::Coverage("no direction lies in the hemisphere x·n >= 0".into()));
    }
    let jobs: Vec<(f64, [f64; 3])> = dirs.iter().flat_map(|&d| req.tau_list.iter().map(move |&t| (t, d))).collect();
    let estimates: Vec<CorrelationEstimate> =
        jobs.par_iter().map(|&(t, d)| estimator(t, d)).collect::<Result<_>>()?;
    let samples = match req.normal {
        Some(n) => hermitian_complete(&estimates, n)?,
        None => estimates,
    };
    let (re, imag_residue) = invert_polar(&samples, &req.grid, req.normal.is_none())?;
    if imag_residue > 0.05 {
        return Err(Error::Domain(format!(
            "reconstruction carries an imaginary part of {:.1}% of its real part",
            100.0 * imag_residue
        )));
    }
    let mu_rec_unclipped = ScalarField::new(req.grid, re)?;
    let mu_rec = ScalarField::new(req.grid, mu_rec_unclipped.data().iter().map(|v| v.max(0.0)).collect())?;
    let (rel, rel_clipped) = match truth {
        Some(t) => (Some(rel_l2_on_support(&mu_rec_unclipped, t)?), Some(rel_l2_on_support(&mu_rec, t)?)),
        None => (None, None),
    };
    Ok(RecoveryReport {
        kind: ff.meta.kind,
        m: req.m,
        k_lo: req.k_lo,
        normal: req.normal,
        mu_hat_samples: samples,
        mu_rec,
        mu_rec_unclipped,
        ground_truth: truth.cloned(),
        rel_l2_error: rel,
        rel_l2_error_clipped: rel_clipped,
        imag_residue,
    })
}

/// Source strength `μ_f` from passive data.
pub fn recover_source_strength(
    ff: &FarFieldSet,
    req: &RecoveryRequest,
    truth: Option<&ScalarField>,
) -> Result<RecoveryReport> {
    if ff.meta.kind != AcquisitionKind::Passive {
        return Err(Error::config("source recovery needs passive data, found active-backscatter"));
    }
    recover(ff, req, truth, |t, d| band_correlation(ff, req.m, t, d, req.k_lo))
}

/// Potential strength `μ_q` from backscatter data.
pub fn recover_potential_strength(
    ff: &FarFieldSet,
    req: &RecoveryRequest,
    truth: Option<&ScalarField>,
) -> Result<RecoveryReport> {
    if ff.meta.kind != AcquisitionKind::ActiveBackscatter {
        return Err(Error::config("potential recovery needs active-backscatter data, found passive"));
    }
    recover(ff, req, truth, |t, d| backscatter_correlation(ff, req.m, t, d, req.k_lo))
}

pub const MU_REC_FILE: &str = "mu_rec.rsgf";
pub const MU_REC_UNCLIPPED_FILE: &str = "mu_rec_unclipped.rsgf";
pub const MU_HAT_FILE: &str = "mu_hat.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

impl RecoveryReport {
    pub fn mu_hat_csv(&self) -> String {
        let mut s = String::from("tau,dir_x,dir_y,dir_z,re,im\n");
        for e in &self.mu_hat_samples {
            writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                e.tau, e.dir[0], e.dir[1], e.dir[2], e.value.re, e.value.im
            )
            .unwrap();
        }
        s
    }

    /// `key=value` lines; `extra` entries are appended verbatim.
    pub fn summary(&self, extra: &[(String, String)]) -> String {
        let mut s = String::new();
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.16e}"));
        writeln!(s, "kind={}", self.kind.as_str()).unwrap();
        writeln!(s, "m={:?}", self.m).unwrap();
        writeln!(s, "band={:?},{:?}", self.k_lo, 2.0 * self.k_lo).unwrap();
        match self.normal {
            Some(n) => writeln!(s, "mode=hemisphere\nnormal={:?},{:?},{:?}", n[0], n[1], n[2]).unwrap(),
            None => writeln!(s, "mode=full-sphere").unwrap(),
        }
        writeln!(s, "n_samples={}", self.mu_hat_samples.len()).unwrap();
        writeln!(s, "imag_residue={:.16e}", self.imag_residue).unwrap();
        writeln!(s, "rel_l2_error={}", opt(self.rel_l2_error)).unwrap();
        writeln!(s, "rel_l2_error_clipped={}", opt(self.rel_l2_error_clipped)).unwrap();
        writeln!(s, "sequence_exponent={}", opt(sequence_exponent(self.m))).unwrap();
        for (k, v) in extra {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    /// Writes the clipped and unclipped reconstructions, the samples and the summary into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, extra: &[(String, String)]) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_field(dir.join(MU_REC_FILE), &AnyField::Real(self.mu_rec.clone()))?;
        write_field(dir.join(MU_REC_UNCLIPPED_FILE), &AnyField::Real(self.mu_rec_unclipped.clone()))?;
        fs::write(dir.join(MU_HAT_FILE), self.mu_hat_csv())?;
        fs::write(dir.join(SUMMARY_FILE), self.summary(extra))?;
        Ok(())
    }
}
