//! Near-field second moment of a random source at points outside its support,
//! divided by the Newtonian potential of the strength at the same points.

use std::sync::Arc;

use migr_scatter::geometry::{fibonacci_sphere, gaussian_bump};
use migr_scatter::migr::{synthesize_migr, MigrSpec};
use migr_scatter::oracles::potential_kernel_integral;
use migr_scatter::recovery::{nearfield_samples, nearfield_second_moment};
use migr_scatter::GridSpec;

fn main() -> migr_scatter::Result<()> {
    let grid = GridSpec::centered_cube(64, 2.0)?;
    let m = 2.5;
    let mu = gaussian_bump(grid, [0.0; 3], 1.0, 0.1, 0.4)?;
    let spec = Arc::new(MigrSpec::centered(m, mu.clone())?);
    let f = synthesize_migr(&spec, 11)?.field;
    let ks: Vec<f64> = (0..=1180).map(|j| 1.0 + j as f64 * 0.05).collect();
    for x in fibonacci_sphere(6).into_iter().map(|d| d.map(|c| 0.85 * c)) {
        let est = nearfield_second_moment(&nearfield_samples(&f, x, &ks)?, m)?;
        let kernel = potential_kernel_integral(&mu, x)?;
        println!("x = [{:6.3}, {:6.3}, {:6.3}]  estimate {est:.4e}  kernel {kernel:.4e}  ratio {:.4}", x[0], x[1], x[2], est / kernel);
    }
    Ok(())
}
