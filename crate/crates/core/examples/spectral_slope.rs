//! Draws an ensemble of migr fields and fits the slope of their radially
//! averaged power spectrum, which should sit near `-m`.
//!
//! Usage: `spectral_slope [n_samples]`

use std::sync::Arc;

use migr_scatter::geometry::{ball_indicator, gaussian_bump};
use migr_scatter::migr::{spectral_slope, MigrSpec};
use migr_scatter::GridSpec;

fn main() -> migr_scatter::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let grid = GridSpec::centered_cube(64, 2.0)?;
    let strengths = [
        ("ball r=0.7", ball_indicator(grid, [0.0; 3], 0.7, 1.0)?),
        ("gaussian s=0.2", gaussian_bump(grid, [0.0; 3], 1.0, 0.2, 0.8)?),
    ];
    for (name, mu) in strengths {
        for m in [2.5, 3.5] {
            let spec = Arc::new(MigrSpec::centered(m, mu.clone())?);
            let fit = spectral_slope(&spec, n, 1)?;
            println!("{name:16} m = {m}: slope {:.3} ± {:.3} over {} bins", fit.slope, fit.half_width, fit.bins.len());
        }
    }
    Ok(())
}
