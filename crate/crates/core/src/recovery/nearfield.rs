//! Near-field second moment `(1/(K-1)) ∫_1^K k^{1+m} |u^{sc}(x,k)|² dk`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{norm, sub};
use crate::scatter::farfield::mesh_spacing;
use crate::scatter::near_field_at;

/// Riemann sum over the mesh `1 = k_0 < … < k_n = K`, left points.
/// The result is proportional to `∫ μ(z)/|x - z| dz` with an unstated
/// universal constant.
pub fn nearfield_second_moment(samples: &[(f64, Complex64)], m: f64) -> Result<f64> {
    let ks: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let delta = mesh_spacing(&ks).map_err(|e| Error::Coverage(e.to_string()))?;
    if (ks[0] - 1.0).abs() > 1e-9 {
        return Err(Error::Coverage(format!("near-field mesh must start at k = 1, starts at {}", ks[0])));
    }
    let k_hi = ks[ks.len() - 1];
    let sum: f64 = samples[..samples.len() - 1].iter().map(|&(k, u)| k.powf(1.0 + m) * u.norm_sqr()).sum();
    Ok(sum * delta / (k_hi - 1.0))
}

/// `u^{sc}(x, k) = (R_k f)(x)` on the mesh for a source without potential.
pub fn nearfield_samples(source: &ScalarField, x: [f64; 3], ks: &[f64]) -> Result<Vec<(f64, Complex64)>> {
    let Some(&k0) = ks.first() else {
        return Ok(Vec::new());
    };
    // validates the point once; the loop below repeats the same sum with cached distances
    near_field_at(source, k0, x)?;
    let grid = source.grid();
    let cell = grid.cell_volume();
    let terms: Vec<(f64, f64)> = source
        .data()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| {
            let r = norm(sub(x, grid.point_of(i)));
            (r, v * cell / (4.0 * PI * r))
        })
        .collect();
    Ok(ks
        .par_iter()
        .map(|&k| (k, terms.iter().map(|&(r, w)| Complex64::from_polar(w, k * r)).sum()))
        .collect())
}
