//! Brute-force ground truths, each computed by a different algorithm from the
//! code it checks: damped radial quadrature for Riesz kernels, direct
//! summation for Fourier and potential integrals, and trigonometric sums
//! evaluated at two points for migr covariances.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField};
use crate::geometry::{dot, is_unit, norm, sub};
use crate::migr::{CovarianceEstimate, MigrSpec};
use crate::quad::{box_average_inverse_power, gauss_legendre, integrate};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Damping parameters, strictly decreasing, last one ≤ 1e-6.
    pub schedule: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        // ε_j = 1e-2 · 2^{-j}, j = 0..=14 ends at 6.1e-7
        let schedule = (0..=14).map(|j| 1e-2 * 0.5f64.powi(j)).collect();
        Self { rel_tol: 1e-8, max_evals: 20_000_000, schedule }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-12) {
            return Err(Error::config(format!("rel_tol = {} must be at least 1e-12", self.rel_tol)));
        }
        if self.schedule.len() < 2 {
            return Err(Error::config("damping schedule needs at least two entries"));
        }
        if self.schedule.windows(2).any(|w| !(w[1] < w[0])) || self.schedule[0] <= 0.0 {
            return Err(Error::config("damping schedule must be positive and strictly decreasing"));
        }
        if *self.schedule.last().unwrap() > 1e-6 {
            return Err(Error::config("damping schedule must reach 1e-6 or below"));
        }
        Ok(())
    }
}

/// `∫_0^∞ sin(rρ) ρ^{1-m} e^{-ερ²} dρ`, integrated half-period by half-period.
fn damped_radial_integral(m: f64, r: f64, eps: f64, rule: &(Vec<f64>, Vec<f64>), evals: &mut usize) -> f64 {
    let period = PI / r;
    let f = |rho: f64| (r * rho).sin() * rho.powf(1.0 - m) * (-eps * rho * rho).exp();
    // first half-period: ρ = P u^{1/(3-m)} removes the ρ^{2-m} endpoint singularity
    let e = 1.0 / (3.0 - m);
    let mut total = integrate(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let rho = period * u.powf(e);
            f(rho) * period * e * u.powf(e - 1.0)
        },
        0.0,
        1.0,
        rule,
    );
    *evals += rule.0.len();
    let rho_max = (40.0 / eps).sqrt();
    let n = (rho_max / period).ceil() as usize;
    for i in 1..n {
        total += integrate(f, i as f64 * period, (i + 1) as f64 * period, rule);
    }
    *evals += (n.saturating_sub(1)) * rule.0.len();
    total
}

/// Kernel of `|ξ|^{-m}` in three dimensions, `(2π)^{-3} ∫ e^{ir·ξ} |ξ|^{-m} dξ`,
/// for `2 ≤ m < 3`, by Gaussian damping and Richardson extrapolation `ε → 0`.
pub fn riesz_kernel(m: f64, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(2.0..3.0).contains(&m) {
        return Err(Error::Domain(format!("riesz_kernel needs 2 <= m < 3, got {m}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("riesz_kernel needs r > 0, got {r}")));
    }
    let rule = gauss_legendre(24);
    let mut evals = 0usize;
    // Neville table in ε: the damped value is a power series in ε for fixed r > 0
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut best = (f64::NAN, f64::INFINITY);
    for (i, &eps) in spec.schedule.iter().enumerate() {
        let v = damped_radial_integral(m, r, eps, &rule, &mut evals);
        if evals > spec.max_evals {
            return Err(Error::Oracle(format!("riesz_kernel exceeded {} evaluations", spec.max_evals)));
        }
        let mut row = vec![v];
        for j in 1..=i {
            let ratio = spec.schedule[i - j] / eps;
            let prev = table[i - 1][j - 1];
            row.push(row[j - 1] + (row[j - 1] - prev) / (ratio - 1.0));
        }
        if i >= 1 {
            let err = (row[i] - table[i - 1][i - 1]).abs();
            if err < best.1 {
                best = (row[i], err);
            }
        }
        table.push(row);
    }
    let (value, err) = best;
    if !(err <= spec.rel_tol * value.abs()) {
        return Err(Error::Oracle(format!(
            "riesz_kernel(m = {m}, r = {r}) extrapolation did not settle: estimate {value:e}, error {err:e}"
        )));
    }
    Ok(value / (2.0 * PI * PI * r))
}

/// `(1/4π) Σ e^{-ik x̂·y} g(y) h³` by direct summation over every cell.
pub fn direct_farfield(g: &ScalarField, k: f64, dir: [f64; 3]) -> Complex64 {
    direct_farfield_complex(&g.to_complex(), k, dir)
}

pub fn direct_farfield_complex(g: &ComplexField, k: f64, dir: [f64; 3]) -> Complex64 {
    let grid = g.grid();
    let mut acc = Complex64::default();
    for (i, v) in g.data().iter().enumerate() {
        if *v != Complex64::default() {
            acc += v * Complex64::from_polar(1.0, -k * dot(dir, grid.point_of(i)));
        }
    }
    acc * grid.cell_volume() / (4.0 * PI)
}

/// `ĝ(ξ) = (2π)^{-3/2} Σ e^{-iξ·y} g(y) h³` by direct summation.
pub fn direct_fourier(g: &ScalarField, xi: [f64; 3]) -> Complex64 {
    let grid = g.grid();
    let mut acc = Complex64::default();
    for (i, &v) in g.data().iter().enumerate() {
        if v != 0.0 {
            acc += Complex64::from_polar(v, -dot(xi, grid.point_of(i)));
        }
    }
    acc * grid.cell_volume() * (2.0 * PI).powf(-1.5)
}

/// Born backscatter far field `(1/4π) Σ e^{-2ik x̂·y} q(y) h³` of a potential.
pub fn born_backscatter(q: &ScalarField, k: f64, dir: [f64; 3]) -> Result<Complex64> {
    if !is_unit(dir) {
        return Err(Error::config(format!("direction {dir:?} is not a unit vector")));
    }
    Ok(direct_farfield(q, 2.0 * k, dir))
}

/// `Σ μ(z) / |x - z| h³`, the Newtonian potential of `μ` at `x`.
pub fn potential_kernel_integral(mu: &ScalarField, x: [f64; 3]) -> Result<f64> {
    let grid = mu.grid();
    let h = grid.spacing();
    let mut acc = 0.0;
    for (i, &v) in mu.data().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let r = norm(sub(x, grid.point_of(i)));
        if r < 2.0 * h {
            return Err(Error::Domain(format!(
                "observation point ({}, {}, {}) is within 2h of the support",
                x[0], x[1], x[2]
            )));
        }
        acc += v / r;
    }
    Ok(acc * grid.cell_volume())
}

/// Covariance of a migr field at `(x, y)` from `n` realizations synthesized
/// directly at the two points as trigonometric sums over the synthesis lattice
/// (no FFT, no grid-wide field). Same law as `migr::empirical_covariance`.
pub fn brute_covariance(
    spec: &Arc<MigrSpec>,
    x: [f64; 3],
    y: [f64; 3],
    n: usize,
    seed0: u64,
) -> Result<CovarianceEstimate> {
    if n < 100 {
        return Err(Error::config(format!("brute_covariance needs n >= 100, got {n}")));
    }
    let grid = *spec.grid();
    let snap = |p: [f64; 3]| -> Result<(f64, [f64; 3])> {
        if !grid.contains(p) {
            return Err(Error::Domain(format!("point ({}, {}, {}) lies outside the grid box", p[0], p[1], p[2])));
        }
        let node = grid.nearest(p).unwrap();
        Ok((spec.strength().at(node).sqrt(), grid.point(node)))
    };
    let (sx, px) = snap(x)?;
    let (sy, py) = snap(y)?;
    if sx == 0.0 || sy == 0.0 {
        return Ok(CovarianceEstimate { value: 0.0, std_err: 0.0 });
    }
    let pg = spec.synthesis_grid();
    let m = spec.order();
    let steps = [0, 1, 2].map(|a| pg.frequency_step(a));
    let cell = steps[0] * steps[1] * steps[2] / (2.0 * PI).powi(3);
    let dims = pg.dims();
    let signed = |i: usize, n: usize| if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
    // per-mode amplitude and phases at the two points
    let mut modes = Vec::with_capacity(pg.len());
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for l in 0..dims[2] {
                let xi = [signed(i, dims[0]) * steps[0], signed(j, dims[1]) * steps[1], signed(l, dims[2]) * steps[2]];
                let r = norm(xi);
                let s = if m == 0.0 {
                    1.0
                } else if r == 0.0 {
                    if m < 3.0 {
                        box_average_inverse_power(steps.map(|d| d / 2.0), m)
                    } else {
                        0.0
                    }
                } else {
                    r.powf(-m)
                };
                if s > 0.0 {
                    let c = (s * cell).sqrt();
                    let (ax, ay) = (dot(xi, px), dot(xi, py));
                    modes.push((c, ax.cos(), ax.sin(), ay.cos(), ay.sin()));
                }
            }
        }
    }
    let mut products = Vec::with_capacity(n);
    for s in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed0.wrapping_add(s as u64));
        let (mut gx, mut gy) = (0.0, 0.0);
        for &(c, cx, sxn, cy, syn) in &modes {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            gx += c * (a * cx + b * sxn);
            gy += c * (a * cy + b * syn);
        }
        products.push(sx * gx * sy * gy);
    }
    let nf = n as f64;
    let mean = products.iter().sum::<f64>() / nf;
    let var = products.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    Ok(CovarianceEstimate { value: mean, std_err: (var / nf).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;
    use crate::geometry::gaussian_bump;

    #[test]
    fn riesz_m2_is_newton_kernel() {
        let spec = QuadratureSpec::default();
        for r in [0.15, 0.5, 1.0] {
            let v = riesz_kernel(2.0, r, &spec).unwrap();
            let want = 1.0 / (4.0 * PI * r);
            assert!((v - want).abs() < 1e-7 * want, "r = {r}: {v} vs {want}");
        }
    }

    #[test]
    fn riesz_homogeneity() {
        let spec = QuadratureSpec::default();
        let m = 2.5;
        let a = riesz_kernel(m, 0.3, &spec).unwrap();
        let b = riesz_kernel(m, 0.6, &spec).unwrap();
        assert!((b / a - 2f64.powf(m - 3.0)).abs() < 2.0 * spec.rel_tol * 10.0);
    }

    #[test]
    fn riesz_rejects_out_of_range() {
        let spec = QuadratureSpec::default();
        assert!(riesz_kernel(3.0, 1.0, &spec).is_err());
        assert!(riesz_kernel(1.5, 1.0, &spec).is_err());
        assert!(riesz_kernel(2.5, 0.0, &spec).is_err());
    }

    #[test]
    fn quadrature_spec_validation() {
        let base = QuadratureSpec::default;
        assert!(QuadratureSpec { rel_tol: 1e-13, ..base() }.validate().is_err());
        assert!(QuadratureSpec { schedule: vec![1e-2, 1e-3], ..base() }.validate().is_err());
        assert!(QuadratureSpec { schedule: vec![1e-2, 1e-2, 1e-7], ..base() }.validate().is_err());
    }

    #[test]
    fn starved_budget_is_an_oracle_failure() {
        let spec = QuadratureSpec { max_evals: 1000, ..QuadratureSpec::default() };
        assert!(matches!(riesz_kernel(2.5, 1.0, &spec), Err(Error::Oracle(_))));
    }

    #[test]
    fn potential_integral_cases() {
        let g = GridSpec::centered_cube(16, 2.0).unwrap();
        assert_eq!(potential_kernel_integral(&ScalarField::zeros(g), [0.5, 0.0, 0.0]).unwrap(), 0.0);
        let mut d = vec![0.0; g.len()];
        d[g.index(8, 8, 8)] = 1.0 / g.cell_volume();
        let delta = ScalarField::new(g, d).unwrap();
        assert!((potential_kernel_integral(&delta, [0.0, 0.0, 0.75]).unwrap() - 1.0 / 0.75).abs() < 1e-14);
        assert!(potential_kernel_integral(&delta, [0.0, 0.0, 0.125]).is_err());
    }

    #[test]
    fn direct_farfield_delta_and_linearity() {
        let g = GridSpec::centered_cube(16, 2.0).unwrap();
        let mut d = vec![0.0; g.len()];
        d[g.index(8, 8, 8)] = 1.0 / g.cell_volume();
        let delta = ScalarField::new(g, d).unwrap();
        let v = direct_farfield(&delta, 7.0, [0.0, 0.6, 0.8]);
        assert!((v - 1.0 / (4.0 * PI)).norm() < 1e-15);
        let bump = gaussian_bump(g, [0.1, 0.0, -0.1], 1.0, 0.2, 0.4).unwrap();
        let sum = ScalarField::new(g, bump.data().iter().zip(delta.data()).map(|(a, b)| 2.0 * a - 3.0 * b).collect())
            .unwrap();
        let x = [0.0, 0.6, 0.8];
        let lhs = direct_farfield(&sum, 3.0, x);
        let rhs = direct_farfield(&bump, 3.0, x) * 2.0 - direct_farfield(&delta, 3.0, x) * 3.0;
        assert!((lhs - rhs).norm() < 1e-13);
    }
}
