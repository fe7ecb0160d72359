//! Outgoing fundamental solution of `-Δ - k²` and the resolvent `R_k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::{ComplexField, GridSpec, ScalarField};
use crate::geometry::{is_unit, norm, sub};
use crate::migr::DEFAULT_COLLAR;

/// `Φ_k(r) = e^{ikr} / (4πr)`.
pub fn fundamental_solution(k: f64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("fundamental solution needs r > 0, got {r}")));
    }
    Ok(Complex64::from_polar(1.0 / (4.0 * PI * r), k * r))
}

/// Integral of `Φ_k` over the ball whose volume equals one cell of side `h`.
pub fn self_cell_integral(k: f64, h: f64) -> Complex64 {
    let rho = h * (3.0 / (4.0 * PI)).cbrt();
    if k == 0.0 {
        return Complex64::new(rho * rho / 2.0, 0.0);
    }
    let ikr = Complex64::new(0.0, k * rho);
    // for tiny kρ the closed form cancels badly, use the series ρ²/2 + ikρ³/3 - k²ρ⁴/8
    if k * rho < 1e-3 {
        let r2 = rho * rho;
        return Complex64::new(r2 / 2.0 - k * k * r2 * r2 / 8.0, k * r2 * rho / 3.0);
    }
    (ikr.exp() * (1.0 - ikr) - 1.0) / (k * k)
}

/// Plane wave `e^{ik d·x}` sampled on the grid.
pub fn incident_plane_wave(k: f64, d: [f64; 3], grid: &GridSpec) -> Result<ComplexField> {
    if !is_unit(d) {
        return Err(Error::config(format!("incident direction {d:?} is not a unit vector")));
    }
    Ok(ComplexField::from_parts(
        *grid,
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let p = grid.point_of(i);
                Complex64::from_polar(1.0, k * (d[0] * p[0] + d[1] * p[1] + d[2] * p[2]))
            })
            .collect(),
    ))
}

/// `R_k` on one grid: convolution with the cell-integrated kernel through a
/// zero-padded FFT of twice the size per axis.
pub struct Resolvent {
    k: f64,
    grid: GridSpec,
    padded: GridSpec,
    kernel_hat: Vec<Complex64>,
}

impl Resolvent {
    pub fn new(k: f64, grid: &GridSpec) -> Self {
        let padded = grid.padded(2).expect("doubling a valid grid stays valid");
        let h = grid.spacing();
        let [px, py, pz] = padded.dims();
        let signed = |i: usize, n: usize| if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
        let self_cell = self_cell_integral(k, h);
        let cell = grid.cell_volume();
        let mut kernel: Vec<Complex64> = (0..padded.len())
            .into_par_iter()
            .map(|idx| {
                let [i, j, l] = padded.unravel(idx);
                if idx == 0 {
                    return self_cell;
                }
                let d = [signed(i, px), signed(j, py), signed(l, pz)];
                let r = h * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                Complex64::from_polar(cell / (4.0 * PI * r), k * r)
            })
            .collect();
        Fft3::for_dims(padded.dims()).forward_raw(&mut kernel);
        Self { k, grid: *grid, padded, kernel_hat: kernel }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `(R_k φ)(x) = Σ_y K(x - y) φ(y)`; `φ` must keep the wrap-around collar.
    pub fn apply(&self, phi: &ComplexField) -> Result<ComplexField> {
        if phi.grid() != &self.grid {
            return Err(Error::config("resolvent applied to a field on a different grid"));
        }
        let bbox = phi.support_box();
        if !self.grid.respects_collar(bbox, DEFAULT_COLLAR) {
            return Err(Error::config(format!(
                "resolvent input must vanish on a {DEFAULT_COLLAR}-cell boundary collar"
            )));
        }
        if bbox.is_none() {
            return Ok(ComplexField::zeros(self.grid));
        }
        let [nx, ny, nz] = self.grid.dims();
        let p = &self.padded;
        let mut buf = vec![Complex64::default(); p.len()];
        for i in 0..nx {
            for j in 0..ny {
                let dst = p.index(i, j, 0);
                let src = self.grid.index(i, j, 0);
                buf[dst..dst + nz].copy_from_slice(&phi.data()[src..src + nz]);
            }
        }
        let plan = Fft3::for_dims(p.dims());
        plan.forward_raw(&mut buf);
        let scale = 1.0 / p.len() as f64;
        buf.par_iter_mut().zip(self.kernel_hat.par_iter()).for_each(|(v, kh)| *v *= kh * scale);
        plan.inverse_raw(&mut buf);
        let mut out = Vec::with_capacity(self.grid.len());
        for i in 0..nx {
            for j in 0..ny {
                let src = p.index(i, j, 0);
                out.extend_from_slice(&buf[src..src + nz]);
            }
        }
        Ok(ComplexField::from_parts(self.grid, out))
    }
}

/// One-shot `R_k φ`.
pub fn resolvent_apply(k: f64, phi: &ComplexField) -> Result<ComplexField> {
    Resolvent::new(k, phi.grid()).apply(phi)
}

/// `(R_k g)(x)` at an arbitrary point by direct summation; `x` must not sit on a
/// nonzero cell of `g`.
pub fn near_field_at(g: &ScalarField, k: f64, x: [f64; 3]) -> Result<Complex64> {
    let grid = g.grid();
    let cell = grid.cell_volume();
    let mut acc = Complex64::default();
    for (i, &v) in g.data().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let r = norm(sub(x, grid.point_of(i)));
        acc += fundamental_solution(k, r)? * (v * cell);
    }
    Ok(acc)
}
