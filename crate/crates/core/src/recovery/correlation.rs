//! Band-averaged two-frequency correlations of far-field data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{dot, is_unit};
use crate::scatter::{AcquisitionKind, FarFieldSet};

/// The prefactor `4√(2π)` linking band correlations to `μ̂`.
pub fn recovery_constant() -> f64 {
    4.0 * (2.0 * PI).sqrt()
}

/// Minimum number of mesh points in a band.
pub const MIN_TERMS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub tau: f64,
    pub dir: [f64; 3],
    pub band: [f64; 2],
    /// Estimate of `μ̂(τ x̂)`.
    pub value: Complex64,
    pub n_terms: usize,
}

/// `4√(2π) (1/K) Σ_j w(k_j) conj(a_j) b_j δ`.
pub fn band_sum(ks: &[f64], a: &[Complex64], b: &[Complex64], weight: impl Fn(f64) -> f64, delta: f64, k_lo: f64) -> Complex64 {
    let mut acc = Complex64::default();
    for ((&k, x), y) in ks.iter().zip(a).zip(b) {
        acc += x.conj() * y * weight(k);
    }
    acc * (recovery_constant() * delta / k_lo)
}

fn mesh_multiple(value: f64, delta: f64, what: &str) -> Result<usize> {
    let t = value / delta;
    let n = t.round();
    if n < 0.0 || (t - n).abs() > 1e-6 {
        return Err(Error::config(format!("{what} = {value} is not a multiple of the mesh spacing {delta}")));
    }
    Ok(n as usize)
}

/// Band frequencies, the two sample rows and the number of terms.
pub(crate) type BandSlices = (Vec<f64>, Vec<Complex64>, Vec<Complex64>, usize);

/// Mesh slices `(k_j, u(k_j), u(k_j + shift·δ))` for `k_j ∈ [K, 2K)`.
pub(crate) fn band_slices(
    ff: &FarFieldSet,
    shift: usize,
    dir: [f64; 3],
    k_lo: f64,
) -> Result<BandSlices> {
    let d = ff
        .dir_index(dir)
        .ok_or_else(|| Error::Coverage(format!("direction {dir:?} is not in the far-field set")))?;
    let j0 = ff
        .k_index(k_lo)
        .ok_or_else(|| Error::Coverage(format!("band start K = {k_lo} is not on the frequency mesh")))?;
    let n_terms = mesh_multiple(k_lo, ff.delta(), "band start K")?;
    if n_terms < MIN_TERMS {
        return Err(Error::config(format!("band [K, 2K) holds {n_terms} mesh points, need at least {MIN_TERMS}")));
    }
    let ks = ff.frequencies();
    let delta = ff.delta();
    let mut gaps = Vec::new();
    let mut kk = Vec::with_capacity(n_terms);
    let mut a = Vec::with_capacity(n_terms);
    let mut b = Vec::with_capacity(n_terms);
    for j in j0..j0 + n_terms {
        for idx in [j, j + shift] {
            if idx >= ks.len() || ff.get(d, idx).is_none() {
                let k = ks[0] + idx as f64 * delta;
                if !gaps.contains(&k) {
                    gaps.push(k);
                }
            }
        }
        if gaps.is_empty() {
            kk.push(ks[j]);
            a.push(ff.get(d, j).unwrap());
            b.push(ff.get(d, j + shift).unwrap());
        }
    }
    if !gaps.is_empty() {
        let shown: Vec<String> = gaps.iter().take(10).map(|k| format!("{k:.6}")).collect();
        return Err(Error::Coverage(format!(
            "{} missing frequencies for direction {dir:?}: {}{}",
            gaps.len(),
            shown.join(", "),
            if gaps.len() > 10 { ", ..." } else { "" }
        )));
    }
    Ok((kk, a, b, n_terms))
}

/// Passive estimator `4√(2π) (1/K) Σ k^m conj u∞(k) u∞(k+τ) δ` over `k ∈ [K, 2K)`.
pub fn band_correlation(ff: &FarFieldSet, m: f64, tau: f64, dir: [f64; 3], k_lo: f64) -> Result<CorrelationEstimate> {
    let shift = mesh_multiple(tau, ff.delta(), "tau")?;
    let (ks, a, b, n_terms) = band_slices(ff, shift, dir, k_lo)?;
    let value = band_sum(&ks, &a, &b, |k| k.powf(m), ff.delta(), k_lo);
    Ok(CorrelationEstimate { tau, dir, band: [k_lo, 2.0 * k_lo], value, n_terms })
}

/// Backscatter estimator `4√(2π) (1/K) Σ (2k)^{m_q} conj u∞(k) u∞(k+τ/2) δ`.
///
/// The backscattered Born field samples `q̂` at `2k x̂`, so the half shift in
/// `k` reaches the spatial shift `τ` and the weight is taken at `2k`.
pub fn backscatter_correlation(
    ff: &FarFieldSet,
    m_q: f64,
    tau: f64,
    dir: [f64; 3],
    k_lo: f64,
) -> Result<CorrelationEstimate> {
    if ff.meta.kind != AcquisitionKind::ActiveBackscatter {
        return Err(Error::config("backscatter correlation needs active-backscatter data, found passive"));
    }
    let shift = mesh_multiple(tau / 2.0, ff.delta(), "tau/2")?;
    let (ks, a, b, n_terms) = band_slices(ff, shift, dir, k_lo)?;
    let value = band_sum(&ks, &a, &b, |k| (2.0 * k).powf(m_q), ff.delta(), k_lo);
    Ok(CorrelationEstimate { tau, dir, band: [k_lo, 2.0 * k_lo], value, n_terms })
}

/// Unweighted products `conj u∞(k) u∞(k + shift)` for each `k ∈ [K, 2K)`.
pub fn raw_products(ff: &FarFieldSet, k_shift: f64, dir: [f64; 3], k_lo: f64) -> Result<Vec<(f64, Complex64)>> {
    let shift = mesh_multiple(k_shift, ff.delta(), "frequency shift")?;
    let (ks, a, b, _) = band_slices(ff, shift, dir, k_lo)?;
    Ok(ks.into_iter().zip(a.iter().zip(&b).map(|(x, y)| x.conj() * y)).collect())
}

fn same_dir(a: [f64; 3], b: [f64; 3]) -> bool {
    (0..3).all(|i| (a[i] - b[i]).abs() <= 1e-12)
}

/// Extends hemisphere samples (`x̂·n ≥ 0`) to the full sphere by
/// `μ̂(τ, -x̂) = conj μ̂(τ, x̂)`. Equatorial samples are averaged with the
/// conjugate of their mirror partner.
pub fn hermitian_complete(samples: &[CorrelationEstimate], n: [f64; 3]) -> Result<Vec<CorrelationEstimate>> {
    if !is_unit(n) {
        return Err(Error::config(format!("normal {n:?} is not a unit vector")));
    }
    let mirror = |s: &CorrelationEstimate| [-s.dir[0], -s.dir[1], -s.dir[2]];
    let mut out = Vec::with_capacity(2 * samples.len());
    for (i, s) in samples.iter().enumerate() {
        let c = dot(s.dir, n);
        if c < -1e-12 {
            return Err(Error::config(format!("sample direction {:?} lies in the excluded hemisphere", s.dir)));
        }
        if c > 1e-12 {
            out.push(*s);
            out.push(CorrelationEstimate { dir: mirror(s), value: s.value.conj(), ..*s });
            continue;
        }
        let partner = samples
            .iter()
            .position(|p| p.tau == s.tau && same_dir(p.dir, mirror(s)))
            .ok_or_else(|| Error::Coverage(format!("equatorial sample at {:?}, tau {} has no mirror partner", s.dir, s.tau)))?;
        if partner == i {
            return Err(Error::Coverage(format!("equatorial sample at {:?} is its own mirror", s.dir)));
        }
        out.push(CorrelationEstimate { value: (s.value + samples[partner].value.conj()) * 0.5, ..*s });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatter::FarFieldMeta;

    fn synthetic(values: impl Fn(f64) -> Complex64, m: Option<f64>) -> FarFieldSet {
        let delta = 0.125;
        let ks: Vec<f64> = (0..200).map(|j| 4.0 + j as f64 * delta).collect();
        let meta = FarFieldMeta { kind: AcquisitionKind::Passive, m, seed: 0, delta };
        let mut set = FarFieldSet::new(meta, vec![[0.0, 0.0, 1.0]], ks.clone()).unwrap();
        for (j, &k) in ks.iter().enumerate() {
            set.set(0, j, values(k));
        }
        set
    }

    #[test]
    fn constant_process_returns_the_prefactor() {
        let ff = synthetic(|_| Complex64::new(1.0, 0.0), None);
        for tau in [0.0, 0.5, 2.0] {
            let e = band_correlation(&ff, 0.0, tau, [0.0, 0.0, 1.0], 8.0).unwrap();
            assert!((e.value - recovery_constant()).norm() < 1e-10);
            assert_eq!(e.n_terms, 64);
        }
        assert!((recovery_constant() - 10.026_513_098_524_001).abs() < 1e-12);
    }

    #[test]
    fn missing_frequencies_are_listed() {
        let mut ff = synthetic(|_| Complex64::new(1.0, 0.0), None);
        ff.clear(0, 40);
        match band_correlation(&ff, 0.0, 0.0, [0.0, 0.0, 1.0], 8.0) {
            Err(Error::Coverage(msg)) => assert!(msg.contains("9.000000"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(band_correlation(&ff, 0.0, 0.0, [0.0, 0.0, 1.0], 20.0), Err(Error::Coverage(_))));
        assert!(band_correlation(&ff, 0.0, 0.3, [0.0, 0.0, 1.0], 8.0).is_err());
    }

    #[test]
    fn completion_mirrors_and_averages() {
        let s = |dir, v| CorrelationEstimate { tau: 1.0, dir, band: [1.0, 2.0], value: v, n_terms: 16 };
        let input = vec![
            s([0.0, 0.0, 1.0], Complex64::new(1.0, 2.0)),
            s([1.0, 0.0, 0.0], Complex64::new(3.0, 1.0)),
            s([-1.0, 0.0, 0.0], Complex64::new(3.0, -3.0)),
        ];
        let out = hermitian_complete(&input, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(out[1].dir, [-0.0, -0.0, -1.0]);
        assert_eq!(out[1].value, Complex64::new(1.0, -2.0));
        assert_eq!(out[2].value, Complex64::new(3.0, 2.0));
        assert_eq!(out[3].value, Complex64::new(3.0, -2.0));
        assert!(hermitian_complete(&input[..2], [0.0, 0.0, 1.0]).is_err());
        assert!(hermitian_complete(&[s([0.0, 0.0, -1.0], Complex64::new(1.0, 0.0))], [0.0, 0.0, 1.0]).is_err());
    }
}
