//! Averages the passive band estimator over many realizations and compares the
//! mean with the analytic transform of the strength. A single realization is
//! noisy; the average shows whether the estimator is centred.

use std::sync::Arc;

use migr_scatter::geometry::{fibonacci_sphere, gaussian_bump};
use migr_scatter::migr::MigrSpec;
use migr_scatter::recovery::band_correlation;
use migr_scatter::scatter::{band_sweep, AcquisitionKind, Ingredient, SweepSetup};
use migr_scatter::GridSpec;

fn main() -> migr_scatter::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let grid = GridSpec::centered_cube(64, 2.0)?;
    let s = 0.15;
    let mu = gaussian_bump(grid, [0.0; 3], 1.0, s, 4.0 * s)?;
    let spec = Arc::new(MigrSpec::centered(2.5, mu)?);
    let setup = SweepSetup::new(grid, Ingredient::Random(spec), Ingredient::Absent);
    let (k_lo, delta) = (20.0, 0.078125);
    let taus = [0.0, 2.5, 5.0, 10.0];
    let ks: Vec<f64> = (0..256 + 128 + 1).map(|j| k_lo + j as f64 * delta).collect();
    let dirs = fibonacci_sphere(4);
    let mut values = vec![Vec::new(); taus.len()];
    for seed in 0..n_seeds {
        let ff = band_sweep(&setup, &ks, &dirs, AcquisitionKind::Passive, 1000 + seed)?;
        for (i, &tau) in taus.iter().enumerate() {
            for &d in &dirs {
                values[i].push(band_correlation(&ff, 2.5, tau, d, k_lo)?.value);
            }
        }
    }
    for (i, &tau) in taus.iter().enumerate() {
        let exact = s.powi(3) * (-s * s * tau * tau / 2.0).exp();
        let n = values[i].len() as f64;
        let mean = values[i].iter().map(|v| v.re).sum::<f64>() / n;
        // spread of single estimates around the analytic value
        let rms = (values[i].iter().map(|v| (v - exact).norm_sqr()).sum::<f64>() / n).sqrt();
        println!(
            "tau = {tau:5.2}  mean = {mean:.5e}  analytic = {exact:.5e}  ratio = {:.3}  single-estimate rms error = {:.3}",
            mean / exact,
            rms / exact
        );
    }
    Ok(())
}
