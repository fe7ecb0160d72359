//! Uniform 3D grids and the real/complex fields sampled on them.
//!
//! Data are stored row-major with the x index slowest:
//! `index = (i * ny + j) * nz + k`, and grid point `(i, j, k)` sits at
//! `origin + h * (i, j, k)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Index bounding box `[lo, hi]` (inclusive) of the nonzero cells of a field.
pub type IndexBox = ([usize; 3], [usize; 3]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dims: [usize; 3],
    origin: [f64; 3],
    spacing: f64,
}

impl GridSpec {
    pub fn new(dims: [usize; 3], origin: [f64; 3], spacing: f64) -> Result<Self> {
        for (axis, &n) in dims.iter().enumerate() {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::config(format!(
                    "grid.dims[{axis}] = {n} must be a power of two >= 8"
                )));
            }
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::config(format!("grid.spacing = {spacing} must be positive")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::config("grid.origin must be finite"));
        }
        Ok(Self { dims, origin, spacing })
    }

    /// Cube of `n` cells per axis centred on the origin of coordinates.
    pub fn centered_cube(n: usize, side: f64) -> Result<Self> {
        let h = side / n as f64;
        Self::new([n; 3], [-side / 2.0; 3], h)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.dims[axis] as f64 * self.spacing
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let rest = idx / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], k]
    }

    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + self.spacing * i as f64
    }

    #[inline]
    pub fn point(&self, idx: [usize; 3]) -> [f64; 3] {
        [self.coord(0, idx[0]), self.coord(1, idx[1]), self.coord(2, idx[2])]
    }

    pub fn point_of(&self, flat: usize) -> [f64; 3] {
        self.point(self.unravel(flat))
    }

    /// Nearest grid node to `p`, or `None` when `p` lies outside the sampled box.
    pub fn nearest(&self, p: [f64; 3]) -> Option<[usize; 3]> {
        let mut out = [0usize; 3];
        for a in 0..3 {
            let t = (p[a] - self.origin[a]) / self.spacing;
            let r = t.round();
            if !(r >= 0.0 && r < self.dims[a] as f64) {
                return None;
            }
            out[a] = r as usize;
        }
        Some(out)
    }

    /// Strictly inside the box spanned by the grid nodes.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| {
            let lo = self.origin[a];
            let hi = self.coord(a, self.dims[a] - 1);
            p[a] > lo && p[a] < hi
        })
    }

    /// Angular frequencies of one axis in DFT order: `2π n / (N h)` for
    /// `n = 0..N/2-1, -N/2..-1`.
    pub fn axis_frequencies(&self, axis: usize) -> Vec<f64> {
        let n = self.dims[axis];
        let step = 2.0 * PI / (n as f64 * self.spacing);
        (0..n)
            .map(|i| {
                let s = if i < n / 2 { i as isize } else { i as isize - n as isize };
                s as f64 * step
            })
            .collect()
    }

    /// Spacing of the dual lattice along `axis`.
    pub fn frequency_step(&self, axis: usize) -> f64 {
        2.0 * PI / self.side(axis)
    }

    /// Same spacing and origin, `factor`× more cells per axis.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        Self::new(
            [self.dims[0] * factor, self.dims[1] * factor, self.dims[2] * factor],
            self.origin,
            self.spacing,
        )
    }

    /// True when every nonzero cell of `data` lies at least `collar` cells from every face.
    pub fn respects_collar(&self, bbox: Option<IndexBox>, collar: usize) -> bool {
        match bbox {
            None => true,
            Some((lo, hi)) => (0..3).all(|a| lo[a] >= collar && hi[a] + collar < self.dims[a]),
        }
    }
}

/// Every vector of the dual lattice, in the same row-major order as field data.
pub fn frequency_lattice(grid: &GridSpec) -> Vec<[f64; 3]> {
    let fx = grid.axis_frequencies(0);
    let fy = grid.axis_frequencies(1);
    let fz = grid.axis_frequencies(2);
    let mut out = Vec::with_capacity(grid.len());
    for &x in &fx {
        for &y in &fy {
            for &z in &fz {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn bbox_of(grid: &GridSpec, nonzero: impl Fn(usize) -> bool) -> Option<IndexBox> {
    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    let mut any = false;
    for idx in 0..grid.len() {
        if nonzero(idx) {
            any = true;
            let p = grid.unravel(idx);
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
    }
    any.then_some((lo, hi))
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: GridSpec,
    data: Vec<f64>,
    /// Support box, computed on first use; fields never change after construction.
    support: OnceLock<Option<IndexBox>>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.data == other.data
    }
}

impl ScalarField {
    pub fn new(grid: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::config(format!(
                "field data length {} does not match grid size {}",
                data.len(),
                grid.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at index {i}")));
        }
        Ok(Self { grid, data, support: OnceLock::new() })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, data: vec![0.0; grid.len()], support: OnceLock::new() }
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let data = (0..grid.len()).map(|i| f(grid.point_of(i))).collect();
        Self::new(grid, data)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn at(&self, idx: [usize; 3]) -> f64 {
        self.data[self.grid.index(idx[0], idx[1], idx[2])]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn support_box(&self) -> Option<IndexBox> {
        *self.support.get_or_init(|| bbox_of(&self.grid, |i| self.data[i] != 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|v| v * c).collect(), support: OnceLock::new() }
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Total mass `Σ v h³`.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::config(format!(
                "field data length {} does not match grid size {}",
                data.len(),
                grid.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite field value at index {i}")));
        }
        Ok(Self { grid, data })
    }

    /// Unchecked constructor for buffers produced by trusted arithmetic.
    pub(crate) fn from_parts(grid: GridSpec, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> Complex64) -> Result<Self> {
        let data = (0..grid.len()).map(|i| f(grid.point_of(i))).collect();
        Self::new(grid, data)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn at(&self, idx: [usize; 3]) -> Complex64 {
        self.data[self.grid.index(idx[0], idx[1], idx[2])]
    }

    pub fn support_box(&self) -> Option<IndexBox> {
        bbox_of(&self.grid, |i| self.data[i] != Complex64::new(0.0, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.re).collect()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: Complex64, other: &ComplexField, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::config("fields live on different grids"));
        }
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { grid: self.grid, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims_and_spacing() {
        assert!(GridSpec::new([8, 8, 12], [0.0; 3], 1.0).is_err());
        assert!(GridSpec::new([4, 8, 8], [0.0; 3], 1.0).is_err());
        assert!(GridSpec::new([8, 8, 8], [0.0; 3], 0.0).is_err());
        assert!(GridSpec::new([8, 16, 32], [0.0; 3], 0.5).is_ok());
    }

    #[test]
    fn axis_frequencies_follow_dft_order() {
        let g = GridSpec::new([8, 8, 8], [0.0; 3], 1.0).unwrap();
        let f = g.axis_frequencies(0);
        let expect: Vec<f64> =
            [0, 1, 2, 3, -4, -3, -2, -1].iter().map(|&n| 2.0 * PI * n as f64 / 8.0).collect();
        assert_eq!(f, expect);

        let half = GridSpec::new([8, 8, 8], [0.0; 3], 0.5).unwrap();
        for (a, b) in half.axis_frequencies(2).iter().zip(&expect) {
            assert!((a - 2.0 * b).abs() < 1e-15);
        }
        let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((max - g.nyquist()).abs() < 1e-15);
    }

    #[test]
    fn lattice_is_row_major() {
        let g = GridSpec::new([8, 16, 8], [0.0; 3], 0.25).unwrap();
        let lat = frequency_lattice(&g);
        assert_eq!(lat.len(), g.len());
        let idx = g.index(3, 9, 5);
        assert_eq!(lat[idx], [g.axis_frequencies(0)[3], g.axis_frequencies(1)[9], g.axis_frequencies(2)[5]]);
    }

    #[test]
    fn unravel_inverts_index() {
        let g = GridSpec::new([8, 16, 32], [0.0; 3], 1.0).unwrap();
        for idx in [0, 1, 31, 32, 513, g.len() - 1] {
            let [i, j, k] = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }

    #[test]
    fn non_finite_data_rejected() {
        let g = GridSpec::new([8; 3], [0.0; 3], 1.0).unwrap();
        let mut d = vec![0.0; g.len()];
        d[7] = f64::NAN;
        assert!(ScalarField::new(g, d).is_err());
        assert!(ScalarField::new(g, vec![0.0; 3]).is_err());
    }

    #[test]
    fn support_box_and_collar() {
        let g = GridSpec::new([16; 3], [0.0; 3], 1.0).unwrap();
        let mut d = vec![0.0; g.len()];
        d[g.index(4, 5, 6)] = 1.0;
        d[g.index(8, 11, 7)] = -2.0;
        let f = ScalarField::new(g, d).unwrap();
        let bb = f.support_box().unwrap();
        assert_eq!(bb, ([4, 5, 6], [8, 11, 7]));
        assert!(g.respects_collar(Some(bb), 4));
        assert!(!g.respects_collar(Some(bb), 5));
    }
}
