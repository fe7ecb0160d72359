//! Far-field patterns of a Gaussian source and of a plane wave scattered by a
//! weak Gaussian potential, full Lippmann–Schwinger solve against first-order Born.

use std::f64::consts::PI;
use std::sync::Arc;

use migr_scatter::geometry::{fibonacci_sphere, gaussian_bump};
use migr_scatter::scatter::{far_field, lippmann_schwinger_solve, ScatteringConfig};
use migr_scatter::GridSpec;
use num_complex::Complex64;

fn main() -> migr_scatter::Result<()> {
    let grid = GridSpec::centered_cube(64, 2.0)?;
    let dirs = fibonacci_sphere(6);

    let s = 0.1;
    let f = Arc::new(gaussian_bump(grid, [0.0; 3], 1.0, s, 0.7)?);
    println!("source far field against its analytic transform");
    for k in [2.0, 10.0, 30.0] {
        let ff = far_field(&ScatteringConfig::new(grid, k).with_source(f.clone()), None, &dirs)?;
        let exact = s.powi(3) * (-s * s * k * k / 2.0).exp() * (2.0 * PI).powf(1.5) / (4.0 * PI);
        let worst = ff.iter().map(|u| (u - Complex64::new(exact, 0.0)).norm() / exact).fold(0.0, f64::max);
        println!("  k = {k:5.1}  |u| = {:.4e}  analytic {exact:.4e}  worst relative error {worst:.2e}", ff[0].norm());
    }

    let q = Arc::new(gaussian_bump(grid, [0.1, 0.0, 0.0], 2.0, 0.12, 0.6)?);
    println!("plane wave along +z on a weak potential");
    for k in [2.0, 6.0] {
        let cfg = ScatteringConfig::new(grid, k).with_potential(q.clone()).with_incidence([0.0, 0.0, 1.0]);
        let (u_sc, report) = lippmann_schwinger_solve(&cfg)?;
        let full = far_field(&cfg, Some(&u_sc), &dirs)?;
        let born = far_field(&cfg, None, &dirs)?;
        let gap = full.iter().zip(&born).map(|(a, b)| (a - b).norm() / a.norm()).fold(0.0, f64::max);
        println!(
            "  k = {k:3.1}  {} iterations, contraction {:.3}, full vs Born relative gap {gap:.3}",
            report.iterations, report.contraction
        );
    }
    Ok(())
}
