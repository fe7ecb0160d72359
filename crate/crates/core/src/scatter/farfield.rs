//! Far-field patterns, the `FarFieldSet` container and band sweeps.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec, IndexBox, ScalarField};
use crate::geometry::{is_unit, neg, sub};
use crate::migr::{synthesize_migr, MigrSpec};
use crate::scatter::green::Resolvent;
use crate::scatter::lippmann::{solve_with, ScatteringConfig};

fn axis_phases(grid: &GridSpec, bbox: IndexBox, k: f64, v: [f64; 3]) -> [Vec<Complex64>; 3] {
    [0, 1, 2].map(|a| {
        (bbox.0[a]..=bbox.1[a]).map(|i| Complex64::from_polar(1.0, -k * v[a] * grid.coord(a, i))).collect()
    })
}

/// `Σ_y e^{-ik v·y} g(y)` over the box `bbox`, contracted one axis at a time.
fn contract<T: Copy>(
    grid: &GridSpec,
    data: &[T],
    bbox: IndexBox,
    k: f64,
    v: [f64; 3],
    mul: impl Fn(Complex64, T) -> Complex64,
) -> Complex64 {
    let [px, py, pz] = axis_phases(grid, bbox, k, v);
    let (lo, hi) = bbox;
    let mut total = Complex64::default();
    for (ii, i) in (lo[0]..=hi[0]).enumerate() {
        let mut plane = Complex64::default();
        for (jj, j) in (lo[1]..=hi[1]).enumerate() {
            let base = grid.index(i, j, 0);
            let mut line = Complex64::default();
            for (ll, l) in (lo[2]..=hi[2]).enumerate() {
                line += mul(pz[ll], data[base + l]);
            }
            plane += line * py[jj];
        }
        total += plane * px[ii];
    }
    total
}

fn contract_real(g: &ScalarField, k: f64, v: [f64; 3]) -> Complex64 {
    match g.support_box() {
        None => Complex64::default(),
        Some(b) => contract(g.grid(), g.data(), b, k, v, |p, x| p * x),
    }
}

fn contract_complex(g: &ComplexField, bbox: Option<IndexBox>, k: f64, v: [f64; 3]) -> Complex64 {
    match bbox {
        None => Complex64::default(),
        Some(b) => contract(g.grid(), g.data(), b, k, v, |p, x| p * x),
    }
}

/// `u∞(x̂) = (1/4π) Σ e^{-ik x̂·y} [f + q(α u^{in} + u^{sc})](y) h³` for each direction.
///
/// `u_sc = None` drops the scattered-field term, which gives the first-order
/// Born pattern when `f = 0`.
pub fn far_field(cfg: &ScatteringConfig, u_sc: Option<&ComplexField>, dirs: &[[f64; 3]]) -> Result<Vec<Complex64>> {
    if let Some(d) = dirs.iter().find(|d| !is_unit(**d)) {
        return Err(Error::config(format!("far-field direction {d:?} is not a unit vector")));
    }
    let k = cfg.k;
    let scale = cfg.grid.cell_volume() / (4.0 * PI);
    let q_box = cfg.potential.as_ref().and_then(|q| q.support_box());
    let q_usc = match (&cfg.potential, u_sc) {
        (Some(q), Some(u)) if q_box.is_some() => {
            Some(ComplexField::from_parts(cfg.grid, q.data().iter().zip(u.data()).map(|(&a, b)| b * a).collect()))
        }
        _ => None,
    };
    Ok(dirs
        .iter()
        .map(|&x| {
            let mut acc = Complex64::default();
            if let Some(f) = &cfg.source {
                acc += contract_real(f, k, x);
            }
            if let Some(q) = &cfg.potential {
                if cfg.alpha == 1 {
                    acc += contract_real(q, k, sub(x, cfg.incident_dir));
                }
                if let Some(qu) = &q_usc {
                    acc += contract_complex(qu, q_box, k, x);
                }
            }
            acc * scale
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcquisitionKind {
    /// `α = 0`: only the random source radiates.
    Passive,
    /// `α = 1` with incidence `d = -x̂` for each observation direction `x̂`.
    ActiveBackscatter,
}

impl AcquisitionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AcquisitionKind::Passive => "passive",
            AcquisitionKind::ActiveBackscatter => "active-backscatter",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "passive" => Ok(AcquisitionKind::Passive),
            "active-backscatter" => Ok(AcquisitionKind::ActiveBackscatter),
            other => Err(Error::config(format!("unknown acquisition mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldMeta {
    pub kind: AcquisitionKind,
    /// Rough order of the random ingredient, if any.
    pub m: Option<f64>,
    pub seed: u64,
    pub delta: f64,
}

/// Far-field samples on a direction set × uniform frequency mesh, all from one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldSet {
    pub meta: FarFieldMeta,
    dirs: Vec<[f64; 3]>,
    ks: Vec<f64>,
    values: Vec<Option<Complex64>>,
}

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const DATA_FILE: &str = "farfield.csv";

/// Checks that `ks` is strictly increasing with uniform spacing and returns the spacing.
pub fn mesh_spacing(ks: &[f64]) -> Result<f64> {
    if ks.len() < 2 {
        return Err(Error::config("a frequency mesh needs at least two frequencies"));
    }
    if !(ks[0] > 0.0) {
        return Err(Error::config(format!("frequencies must be positive, got {}", ks[0])));
    }
    let delta = (ks[ks.len() - 1] - ks[0]) / (ks.len() - 1) as f64;
    for (j, w) in ks.windows(2).enumerate() {
        let step = w[1] - w[0];
        if !(step > 0.0) || (step - delta).abs() > 1e-9 * delta.max(1.0) {
            return Err(Error::config(format!(
                "frequencies must be strictly increasing with uniform spacing (step {j} is {step}, expected {delta})"
            )));
        }
    }
    Ok(delta)
}

impl FarFieldSet {
    pub fn new(meta: FarFieldMeta, dirs: Vec<[f64; 3]>, ks: Vec<f64>) -> Result<Self> {
        if let Some(d) = dirs.iter().find(|d| !is_unit(**d)) {
            return Err(Error::config(format!("direction {d:?} is not a unit vector")));
        }
        for i in 0..dirs.len() {
            if dirs[..i].contains(&dirs[i]) {
                return Err(Error::config(format!("direction {:?} listed twice", dirs[i])));
            }
        }
        mesh_spacing(&ks)?;
        let values = vec![None; dirs.len() * ks.len()];
        Ok(Self { meta, dirs, ks, values })
    }

    pub fn dirs(&self) -> &[[f64; 3]] {
        &self.dirs
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.ks
    }

    pub fn band(&self) -> [f64; 2] {
        [self.ks[0], self.ks[self.ks.len() - 1]]
    }

    pub fn delta(&self) -> f64 {
        self.meta.delta
    }

    pub fn dir_index(&self, dir: [f64; 3]) -> Option<usize> {
        self.dirs.iter().position(|&d| d == dir)
    }

    /// Mesh index of `k`, when `k` sits on the mesh to within `1e-9` relative.
    pub fn k_index(&self, k: f64) -> Option<usize> {
        let t = (k - self.ks[0]) / self.meta.delta;
        let j = t.round();
        if j < 0.0 || j as usize >= self.ks.len() {
            return None;
        }
        let j = j as usize;
        ((self.ks[j] - k).abs() <= 1e-9 * k.abs().max(1.0)).then_some(j)
    }

    pub fn get(&self, dir_idx: usize, k_idx: usize) -> Option<Complex64> {
        self.values[dir_idx * self.ks.len() + k_idx]
    }

    pub fn set(&mut self, dir_idx: usize, k_idx: usize, v: Complex64) {
        self.values[dir_idx * self.ks.len() + k_idx] = Some(v);
    }

    /// Removes one sample (used to emulate incomplete acquisitions).
    pub fn clear(&mut self, dir_idx: usize, k_idx: usize) {
        self.values[dir_idx * self.ks.len() + k_idx] = None;
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(dir, k, value)` for every present sample, direction-major.
    pub fn entries(&self) -> impl Iterator<Item = ([f64; 3], f64, Complex64)> + '_ {
        self.values.iter().enumerate().filter_map(move |(i, v)| {
            v.map(|v| (self.dirs[i / self.ks.len()], self.ks[i % self.ks.len()], v))
        })
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().flatten().for_each(|v| *v *= c);
        out
    }

    pub fn manifest(&self) -> String {
        let mut s = String::new();
        writeln!(s, "kind={}", self.meta.kind.as_str()).unwrap();
        match self.meta.m {
            Some(m) => writeln!(s, "m={m:?}").unwrap(),
            None => writeln!(s, "m=none").unwrap(),
        }
        let [lo, hi] = self.band();
        writeln!(s, "seed={}", self.meta.seed).unwrap();
        writeln!(s, "band={lo:?},{hi:?}").unwrap();
        writeln!(s, "delta={:?}", self.meta.delta).unwrap();
        writeln!(s, "dirs={}", self.dirs.len()).unwrap();
        writeln!(s, "freqs={}", self.ks.len()).unwrap();
        writeln!(s, "data={DATA_FILE}").unwrap();
        s
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("dir_x,dir_y,dir_z,k,re,im\n");
        for (d, k, v) in self.entries() {
            writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", d[0], d[1], d[2], k, v.re, v.im).unwrap();
        }
        s
    }

    /// Writes `manifest.txt` and `farfield.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join(MANIFEST_FILE), self.manifest())?;
        fs::write(dir.join(DATA_FILE), self.csv())?;
        Ok(())
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let mut kv = HashMap::new();
        for (n, line) in manifest.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("manifest line {}: expected key=value", n + 1)))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |key: &str| kv.get(key).ok_or_else(|| Error::Format(format!("manifest lacks '{key}'")));
        let num = |key: &str| -> Result<f64> {
            get(key)?.parse::<f64>().map_err(|_| Error::Format(format!("manifest '{key}' is not a number")))
        };
        let count = |key: &str| -> Result<usize> {
            get(key)?.parse::<usize>().map_err(|_| Error::Format(format!("manifest '{key}' is not a count")))
        };
        let kind = AcquisitionKind::parse(get("kind")?).map_err(|e| Error::Format(e.to_string()))?;
        let m = match get("m")?.as_str() {
            "none" => None,
            _ => Some(num("m")?),
        };
        let seed = get("seed")?.parse::<u64>().map_err(|_| Error::Format("manifest 'seed' is not a u64".into()))?;
        let delta = num("delta")?;
        let band: Vec<f64> = get("band")?
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format("manifest 'band' must be two numbers".into()))?;
        if band.len() != 2 {
            return Err(Error::Format("manifest 'band' must be two numbers".into()));
        }
        let n_dirs = count("dirs")?;
        let n_freq = count("freqs")?;
        let data_name = kv.get("data").map(String::as_str).unwrap_or(DATA_FILE);
        let text = fs::read_to_string(dir.join(data_name))?;

        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("dir_x,dir_y,dir_z,k,re,im") {
            return Err(Error::Format("far-field CSV header must be dir_x,dir_y,dir_z,k,re,im".into()));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Format(format!("far-field CSV row {}: unparsable number", n + 2)))?;
            if vals.len() != 6 {
                return Err(Error::Format(format!("far-field CSV row {}: expected 6 columns", n + 2)));
            }
            rows.push(vals);
        }
        let mut dirs: Vec<[f64; 3]> = Vec::new();
        for r in &rows {
            let d = [r[0], r[1], r[2]];
            if !dirs.contains(&d) {
                dirs.push(d);
            }
        }
        if dirs.len() != n_dirs {
            return Err(Error::Format(format!("manifest lists {n_dirs} directions, CSV has {}", dirs.len())));
        }
        let k0 = band[0];
        let mut ks: Vec<f64> = (0..n_freq).map(|j| k0 + j as f64 * delta).collect();
        let mut placed = Vec::with_capacity(rows.len());
        for (n, r) in rows.iter().enumerate() {
            let j = ((r[3] - k0) / delta).round();
            if j < 0.0 || j as usize >= n_freq || (k0 + j * delta - r[3]).abs() > 1e-9 * r[3].abs().max(1.0) {
                return Err(Error::Format(format!("far-field CSV row {}: k = {} is off the mesh", n + 2, r[3])));
            }
            ks[j as usize] = r[3];
            placed.push(j as usize);
        }
        let meta = FarFieldMeta { kind, m, seed, delta };
        let mut set = FarFieldSet::new(meta, dirs, ks).map_err(|e| Error::Format(e.to_string()))?;
        for (r, j) in rows.iter().zip(placed) {
            let d = set.dir_index([r[0], r[1], r[2]]).expect("direction collected above");
            if set.get(d, j).is_some() {
                return Err(Error::Format(format!("duplicate sample at k = {}", r[3])));
            }
            set.set(d, j, Complex64::new(r[4], r[5]));
        }
        Ok(set)
    }
}

/// One random or fixed ingredient of the scattering problem.
#[derive(Debug, Clone)]
pub enum Ingredient {
    Absent,
    Fixed(Arc<ScalarField>),
    Random(Arc<MigrSpec>),
}

impl Ingredient {
    fn order(&self) -> Option<f64> {
        match self {
            Ingredient::Random(s) => Some(s.order()),
            _ => None,
        }
    }
}

/// How the scattered field enters the far-field density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarFieldModel {
    /// Full Lippmann–Schwinger solve at every sample.
    Full,
    /// First order in `q`: `u^{sc}` is replaced by `R_k f` inside `q u`.
    Born,
}

#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub grid: GridSpec,
    pub source: Ingredient,
    pub potential: Ingredient,
    pub max_born_order: usize,
    pub tol: f64,
    pub model: FarFieldModel,
}

/// The sampled ingredients of one realization.
#[derive(Debug, Clone)]
pub struct RealizedSetup {
    pub grid: GridSpec,
    pub source: Option<Arc<ScalarField>>,
    pub potential: Option<Arc<ScalarField>>,
    pub max_born_order: usize,
    pub tol: f64,
    pub model: FarFieldModel,
}

/// Seed of the ingredient in `slot` (0 = source, 1 = potential) for run seed `seed`.
pub fn ingredient_seed(seed: u64, slot: u64) -> u64 {
    if slot == 0 {
        return seed;
    }
    // splitmix64 finalizer, decorrelates the potential stream from the source stream
    let mut z = seed.wrapping_add(slot.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SweepSetup {
    pub fn new(grid: GridSpec, source: Ingredient, potential: Ingredient) -> Self {
        Self { grid, source, potential, max_born_order: 20, tol: 1e-10, model: FarFieldModel::Full }
    }

    /// Draws every random ingredient once for `seed`.
    pub fn realize(&self, seed: u64) -> Result<RealizedSetup> {
        let draw = |ing: &Ingredient, slot: u64| -> Result<Option<Arc<ScalarField>>> {
            Ok(match ing {
                Ingredient::Absent => None,
                Ingredient::Fixed(f) => Some(f.clone()),
                Ingredient::Random(spec) => {
                    if spec.grid() != &self.grid {
                        return Err(Error::config("random ingredient lives on a different grid"));
                    }
                    Some(Arc::new(synthesize_migr(spec, ingredient_seed(seed, slot))?.field))
                }
            })
        };
        Ok(RealizedSetup {
            grid: self.grid,
            source: draw(&self.source, 0)?,
            potential: draw(&self.potential, 1)?,
            max_born_order: self.max_born_order,
            tol: self.tol,
            model: self.model,
        })
    }

    fn meta_order(&self, kind: AcquisitionKind) -> Option<f64> {
        match kind {
            AcquisitionKind::Passive => self.source.order().or(self.potential.order()),
            AcquisitionKind::ActiveBackscatter => self.potential.order().or(self.source.order()),
        }
    }
}

impl RealizedSetup {
    pub fn config(&self, k: f64) -> ScatteringConfig {
        ScatteringConfig {
            grid: self.grid,
            k,
            alpha: 0,
            incident_dir: [0.0, 0.0, 1.0],
            potential: self.potential.clone(),
            source: self.source.clone(),
            max_born_order: self.max_born_order,
            tol: self.tol,
        }
    }

    fn has_potential(&self) -> bool {
        self.potential.as_ref().is_some_and(|q| !q.is_zero())
    }

    fn has_source(&self) -> bool {
        self.source.as_ref().is_some_and(|f| !f.is_zero())
    }

    /// Scattered field for `cfg` under the chosen model, or `None` when no
    /// scattered term enters the far-field density.
    fn scattered(&self, cfg: &ScatteringConfig, resolvent: Option<&Resolvent>) -> Result<Option<ComplexField>> {
        if !self.has_potential() || (self.model == FarFieldModel::Born && !self.has_source()) {
            return Ok(None);
        }
        let owned;
        let r = match resolvent {
            Some(r) => r,
            None => {
                owned = Resolvent::new(cfg.k, &self.grid);
                &owned
            }
        };
        match self.model {
            FarFieldModel::Full => Ok(Some(solve_with(cfg, r)?.0)),
            FarFieldModel::Born => Ok(Some(r.apply(&cfg.source.as_ref().unwrap().to_complex())?)),
        }
    }

    fn needs_resolvent(&self) -> bool {
        self.has_potential() && (self.model == FarFieldModel::Full || self.has_source())
    }

    /// One far-field sample, computed from scratch.
    pub fn sample(&self, k: f64, dir: [f64; 3], kind: AcquisitionKind) -> Result<Complex64> {
        let at = |e: Error| Error::AtSample { k, dir, source: Box::new(e) };
        let mut cfg = self.config(k);
        if kind == AcquisitionKind::ActiveBackscatter {
            cfg = cfg.with_incidence(neg(dir));
        }
        cfg.validate().map_err(at)?;
        let usc = self.scattered(&cfg, None).map_err(at)?;
        Ok(far_field(&cfg, usc.as_ref(), &[dir]).map_err(at)?[0])
    }

    /// All directions at one frequency.
    fn frequency_row(&self, k: f64, dirs: &[[f64; 3]], kind: AcquisitionKind) -> Result<Vec<Complex64>> {
        let base = self.config(k);
        let resolvent = self.needs_resolvent().then(|| Resolvent::new(k, &self.grid));
        match kind {
            AcquisitionKind::Passive => {
                let at = |e: Error| Error::AtSample { k, dir: dirs[0], source: Box::new(e) };
                base.validate().map_err(at)?;
                let usc = self.scattered(&base, resolvent.as_ref()).map_err(at)?;
                far_field(&base, usc.as_ref(), dirs).map_err(at)
            }
            AcquisitionKind::ActiveBackscatter => dirs
                .iter()
                .map(|&x| {
                    let at = |e: Error| Error::AtSample { k, dir: x, source: Box::new(e) };
                    let cfg = base.clone().with_incidence(neg(x));
                    cfg.validate().map_err(at)?;
                    let usc = self.scattered(&cfg, resolvent.as_ref()).map_err(at)?;
                    Ok(far_field(&cfg, usc.as_ref(), &[x]).map_err(at)?[0])
                })
                .collect(),
        }
    }
}

/// Far fields over `frequencies × dirs` for one realization drawn from `seed`.
pub fn band_sweep(
    setup: &SweepSetup,
    frequencies: &[f64],
    dirs: &[[f64; 3]],
    kind: AcquisitionKind,
    seed: u64,
) -> Result<FarFieldSet> {
    let delta = mesh_spacing(frequencies)?;
    let meta = FarFieldMeta { kind, m: setup.meta_order(kind), seed, delta };
    let mut set = FarFieldSet::new(meta, dirs.to_vec(), frequencies.to_vec())?;
    let realized = setup.realize(seed)?;
    let rows: Vec<Vec<Complex64>> = frequencies
        .par_iter()
        .map(|&k| realized.frequency_row(k, dirs, kind))
        .collect::<Result<_>>()?;
    for (j, row) in rows.into_iter().enumerate() {
        for (d, v) in row.into_iter().enumerate() {
            set.set(d, j, v);
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fibonacci_sphere, gaussian_bump};

    fn grid() -> GridSpec {
        GridSpec::centered_cube(16, 2.0).unwrap()
    }

    fn delta_source(at: [usize; 3]) -> Arc<ScalarField> {
        let g = grid();
        let mut d = vec![0.0; g.len()];
        d[g.index(at[0], at[1], at[2])] = 1.0 / g.cell_volume();
        Arc::new(ScalarField::new(g, d).unwrap())
    }

    #[test]
    fn point_source_far_field_is_constant() {
        let cfg = ScatteringConfig::new(grid(), 4.0).with_source(delta_source([8, 8, 8]));
        let ff = far_field(&cfg, None, &fibonacci_sphere(10)).unwrap();
        for v in ff {
            assert!((v - Complex64::new(1.0 / (4.0 * PI), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn translation_multiplies_by_phase() {
        let k = 3.3;
        let dirs = fibonacci_sphere(7);
        let a = far_field(&ScatteringConfig::new(grid(), k).with_source(delta_source([7, 8, 9])), None, &dirs).unwrap();
        let b = far_field(&ScatteringConfig::new(grid(), k).with_source(delta_source([9, 7, 9])), None, &dirs).unwrap();
        let shift = [2.0 * 0.125, -0.125, 0.0];
        for ((x, va), vb) in dirs.iter().zip(&a).zip(&b) {
            let phase = Complex64::from_polar(1.0, -k * (x[0] * shift[0] + x[1] * shift[1] + x[2] * shift[2]));
            assert!((vb - va * phase).norm() < 1e-14);
        }
    }

    #[test]
    fn manifest_and_csv_roundtrip() {
        let f = Arc::new(gaussian_bump(grid(), [0.0; 3], 1.0, 0.2, 0.45).unwrap());
        let setup = SweepSetup::new(grid(), Ingredient::Fixed(f), Ingredient::Absent);
        let ks: Vec<f64> = (0..5).map(|j| 1.0 + 0.1 * j as f64).collect();
        let mut set = band_sweep(&setup, &ks, &fibonacci_sphere(3), AcquisitionKind::Passive, 5).unwrap();
        set.clear(1, 2);
        let dir = tempfile::tempdir().unwrap();
        set.write(dir.path()).unwrap();
        let back = FarFieldSet::read(dir.path()).unwrap();
        assert_eq!(back, set);
        assert!(back.get(1, 2).is_none());
    }

    #[test]
    fn rejects_uneven_mesh() {
        assert!(mesh_spacing(&[1.0, 1.1, 1.3]).is_err());
        assert!(mesh_spacing(&[1.0, 0.9]).is_err());
        assert!((mesh_spacing(&[1.0, 1.25, 1.5]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_sweep_is_zero() {
        let setup = SweepSetup::new(grid(), Ingredient::Absent, Ingredient::Absent);
        let set = band_sweep(&setup, &[1.0, 2.0, 3.0], &fibonacci_sphere(4), AcquisitionKind::Passive, 1).unwrap();
        assert_eq!(set.len(), 12);
        assert!(set.entries().all(|(_, _, v)| v == Complex64::default()));
    }
}
