//! Three-dimensional FFTs on row-major grids.
//!
//! `fft_forward`/`fft_inverse` are the unitary pair (`1/√N` on both sides);
//! physical constants such as `(2π)^{-3/2}` are applied by callers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::field::{frequency_lattice, ComplexField};

pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

fn plans() -> &'static Mutex<HashMap<[usize; 3], Arc<Fft3>>> {
    static CACHE: OnceLock<Mutex<HashMap<[usize; 3], Arc<Fft3>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft3 {
    /// Shared plan for `dims`; plans are cached for the lifetime of the process.
    pub fn for_dims(dims: [usize; 3]) -> Arc<Fft3> {
        let mut cache = plans().lock().expect("fft plan cache poisoned");
        cache
            .entry(dims)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let forward = dims.map(|n| planner.plan_fft(n, FftDirection::Forward));
                let inverse = dims.map(|n| planner.plan_fft(n, FftDirection::Inverse));
                Arc::new(Fft3 { dims, forward, inverse })
            })
            .clone()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized forward transform, `Σ v e^{-2πi n·j/N}`.
    pub fn forward_raw(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse transform, `Σ v e^{+2πi n·j/N}`.
    pub fn inverse_raw(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.len(), "buffer does not match FFT dims");
        let [nx, ny, nz] = self.dims;

        // z: contiguous lines
        data.par_chunks_mut(ny * nz).for_each(|slab| {
            let mut scratch = vec![Complex64::default(); plans[2].get_inplace_scratch_len()];
            plans[2].process_with_scratch(slab, &mut scratch);
        });

        // y: transpose each x-slab to [k][j]
        data.par_chunks_mut(ny * nz).for_each(|slab| {
            let mut t = vec![Complex64::default(); ny * nz];
            for j in 0..ny {
                for k in 0..nz {
                    t[k * ny + j] = slab[j * nz + k];
                }
            }
            let mut scratch = vec![Complex64::default(); plans[1].get_inplace_scratch_len()];
            plans[1].process_with_scratch(&mut t, &mut scratch);
            for j in 0..ny {
                for k in 0..nz {
                    slab[j * nz + k] = t[k * ny + j];
                }
            }
        });

        // x: full transpose to [(j,k)][i]
        let plane = ny * nz;
        let mut t = vec![Complex64::default(); data.len()];
        {
            let src = &*data;
            t.par_chunks_mut(nx).enumerate().for_each(|(jk, line)| {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = src[i * plane + jk];
                }
            });
        }
        t.par_chunks_mut(nx * 64.min(plane)).for_each(|lines| {
            let mut scratch = vec![Complex64::default(); plans[0].get_inplace_scratch_len()];
            plans[0].process_with_scratch(lines, &mut scratch);
        });
        data.par_chunks_mut(plane).enumerate().for_each(|(i, slab)| {
            for (jk, v) in slab.iter_mut().enumerate() {
                *v = t[jk * nx + i];
            }
        });
    }
}

/// Unitary forward DFT of a field; bins are ordered as `frequency_lattice`.
pub fn fft_forward(field: &ComplexField) -> ComplexField {
    let plan = Fft3::for_dims(field.grid().dims());
    let mut data = field.data().to_vec();
    plan.forward_raw(&mut data);
    let s = 1.0 / (plan.len() as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= s);
    ComplexField::from_parts(*field.grid(), data)
}

/// Unitary inverse of `fft_forward`.
pub fn fft_inverse(spectrum: &ComplexField) -> ComplexField {
    let plan = Fft3::for_dims(spectrum.grid().dims());
    let mut data = spectrum.data().to_vec();
    plan.inverse_raw(&mut data);
    let s = 1.0 / (plan.len() as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= s);
    ComplexField::from_parts(*spectrum.grid(), data)
}

/// Applies the Fourier multiplier `symbol(ξ)` to a field.
pub fn apply_multiplier(field: &ComplexField, symbol: impl Fn([f64; 3]) -> f64) -> ComplexField {
    let grid = *field.grid();
    let mut spec = fft_forward(field).into_data();
    for (v, xi) in spec.iter_mut().zip(frequency_lattice(&grid)) {
        *v *= symbol(xi);
    }
    fft_inverse(&ComplexField::from_parts(grid, spec))
}

/// Fractional Laplacian `(-Δ)^{s/2}` as the spectral multiplier `|ξ|^s` on the periodic box.
/// For `s < 0` the singular `ξ = 0` bin is set to zero.
pub fn fractional_laplacian(field: &ComplexField, s: f64) -> ComplexField {
    apply_multiplier(field, |xi| {
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        if r == 0.0 {
            if s == 0.0 { 1.0 } else { 0.0 }
        } else {
            r.powf(s)
        }
    })
}
