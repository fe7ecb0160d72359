//! Draws a microlocally isotropic Gaussian field and compares its pooled
//! covariance at a few separations with the Riesz kernel of the same order.

use std::sync::Arc;

use migr_scatter::geometry::ball_indicator;
use migr_scatter::migr::{pooled_covariance, synthesize_migr, MigrSpec};
use migr_scatter::oracles::{riesz_kernel, QuadratureSpec};
use migr_scatter::GridSpec;

fn main() -> migr_scatter::Result<()> {
    let n_samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let grid = GridSpec::centered_cube(32, 2.0)?;
    let h = grid.spacing();
    let mu = ball_indicator(grid, [0.0; 3], 0.55, 1.0)?;
    let spec = Arc::new(MigrSpec::centered(2.5, mu)?);

    let draw = synthesize_migr(&spec, 1)?;
    let data = draw.field.data();
    let nonzero = data.iter().filter(|v| **v != 0.0).count();
    let rms = (data.iter().map(|v| v * v).sum::<f64>() / nonzero as f64).sqrt();
    println!("one draw: {nonzero} nonzero nodes of {}, rms {rms:.3}", data.len());

    for steps in [2usize, 3, 4, 6] {
        let r = steps as f64 * h;
        let mut pairs = Vec::new();
        for flat in 0..grid.len() {
            let a = grid.unravel(flat);
            if a[0] + steps >= grid.dims()[0] {
                continue;
            }
            let (x, y) = (grid.point(a), grid.point([a[0] + steps, a[1], a[2]]));
            if x.iter().chain(&y).all(|c| c.abs() <= 0.35) {
                pairs.push((x, y));
            }
        }
        let est = pooled_covariance(&spec, &pairs, n_samples, 500)?;
        let kernel = riesz_kernel(2.5, r, &QuadratureSpec::default())?;
        println!(
            "r = {r:.4}  covariance {:.4} ± {:.4}  kernel {kernel:.4}  ratio {:.3}",
            est.value,
            est.std_err,
            est.value / kernel
        );
    }
    Ok(())
}
