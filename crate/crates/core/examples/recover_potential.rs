//! Active backscatter: a random potential probed by plane waves from each
//! direction, recorded at the opposite direction, then inverted for its strength.

use std::sync::Arc;

use migr_scatter::geometry::{fibonacci_sphere, gaussian_bump};
use migr_scatter::migr::MigrSpec;
use migr_scatter::recovery::{recover_potential_strength, RecoveryRequest};
use migr_scatter::scatter::{band_sweep, AcquisitionKind, FarFieldModel, Ingredient, SweepSetup};
use migr_scatter::GridSpec;

fn main() -> migr_scatter::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20240612);
    let grid = GridSpec::centered_cube(32, 2.0)?;
    let mu = gaussian_bump(grid, [0.0; 3], 1.0, 0.15, 0.6)?;
    let spec = Arc::new(MigrSpec::centered(3.5, mu.clone())?);
    let mut setup = SweepSetup::new(grid, Ingredient::Absent, Ingredient::Random(spec));
    setup.model = FarFieldModel::Born;

    let (k_lo, delta) = (6.0f64, 0.125);
    // shifts must be even multiples of the mesh
    let tau_list: Vec<f64> = (0..12).map(|i| i as f64 * 0.75).collect();
    let n = ((k_lo + 4.5) / delta).ceil() as usize;
    let ks: Vec<f64> = (0..=n).map(|j| k_lo + j as f64 * delta).collect();
    let dirs = fibonacci_sphere(48);
    let ff = band_sweep(&setup, &ks, &dirs, AcquisitionKind::ActiveBackscatter, seed)?;

    let req = RecoveryRequest { m: 3.5, tau_list, dirs, k_lo, normal: None, grid };
    let report = recover_potential_strength(&ff, &req, Some(&mu))?;
    println!("imaginary residue {:.3}", report.imag_residue);
    if let (Some(a), Some(b)) = (report.rel_l2_error, report.rel_l2_error_clipped) {
        println!("relative L2 error on the support: unclipped {a:.3}, clipped {b:.3}");
    }
    Ok(())
}
