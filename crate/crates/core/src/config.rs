//! Experiment configuration in a strict INI dialect.
//!
//! Section headers in brackets, one `key = value` per line, `#` comments.
//! Unknown sections and keys are errors, and every error names the key.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ini::Ini;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField};
use crate::geometry::{antipodal_fibonacci, ball_indicator, fibonacci_sphere, gaussian_bump, is_unit, physical_box, separating_normal};
use crate::migr::{MigrSpec, DEFAULT_COLLAR};
use crate::recovery::RecoveryRequest;
use crate::scatter::{AcquisitionKind, FarFieldModel, Ingredient, SweepSetup};

const SECTIONS: &[(&str, &[&str])] = &[
    ("experiment", &["mode", "seed", "output"]),
    ("grid", &["dims", "spacing", "origin"]),
    ("source", INGREDIENT_KEYS),
    ("potential", INGREDIENT_KEYS),
    ("band", &["K", "delta", "n_freq", "k_start", "tau_list"]),
    ("directions", &["count", "distribution", "list"]),
    ("solver", &["tol", "max_born_order", "model"]),
    ("recovery", &["m", "hemisphere"]),
    ("nearfield", &["points", "k_max", "n_freq"]),
];

const INGREDIENT_KEYS: &[&str] =
    &["kind", "m", "shape", "center", "amplitude", "width", "cutoff", "radius", "mean_amplitude"];

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    GaussianBump { center: [f64; 3], amplitude: f64, width: f64, cutoff: f64 },
    BallIndicator { center: [f64; 3], radius: f64, amplitude: f64 },
}

impl Shape {
    pub fn field(&self, grid: GridSpec) -> Result<ScalarField> {
        match *self {
            Shape::GaussianBump { center, amplitude, width, cutoff } => gaussian_bump(grid, center, amplitude, width, cutoff),
            Shape::BallIndicator { center, radius, amplitude } => ball_indicator(grid, center, radius, amplitude),
        }
    }

    /// `(2π)^{-3/2} ∫ e^{-iξ·x} shape(x) dx` of the untruncated shape.
    pub fn fourier(&self, xi: [f64; 3]) -> Complex64 {
        let (center, value) = match *self {
            Shape::GaussianBump { center, amplitude, width, .. } => {
                let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                (center, amplitude * width.powi(3) * (-width * width * r2 / 2.0).exp())
            }
            Shape::BallIndicator { center, radius, amplitude } => {
                let rho = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                let t = rho * radius;
                let integral = if t < 1e-4 {
                    4.0 * PI * radius.powi(3) / 3.0 * (1.0 - t * t / 10.0)
                } else {
                    4.0 * PI * (t.sin() - t * t.cos()) / rho.powi(3)
                };
                (center, amplitude * integral * (2.0 * PI).powf(-1.5))
            }
        };
        Complex64::from_polar(value, -(xi[0] * center[0] + xi[1] * center[1] + xi[2] * center[2]))
    }

    fn amplitude(&self) -> f64 {
        match *self {
            Shape::GaussianBump { amplitude, .. } | Shape::BallIndicator { amplitude, .. } => amplitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IngredientKind {
    /// Migr field with rough order `m`, strength given by the shape.
    Random { m: f64, mean_amplitude: f64 },
    /// The shape itself, deterministic.
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngredientConfig {
    pub kind: IngredientKind,
    pub shape: Shape,
}

impl IngredientConfig {
    pub fn order(&self) -> Option<f64> {
        match self.kind {
            IngredientKind::Random { m, .. } => Some(m),
            IngredientKind::Fixed => None,
        }
    }

    /// The strength `μ` of a random ingredient, or the field itself when fixed.
    pub fn profile(&self, grid: GridSpec) -> Result<ScalarField> {
        self.shape.field(grid)
    }

    pub fn ingredient(&self, grid: GridSpec) -> Result<Ingredient> {
        let profile = self.profile(grid)?;
        Ok(match self.kind {
            IngredientKind::Fixed => Ingredient::Fixed(Arc::new(profile)),
            IngredientKind::Random { m, mean_amplitude } => {
                let amp = self.shape.amplitude();
                let mean = if mean_amplitude == 0.0 || amp == 0.0 {
                    ScalarField::zeros(grid)
                } else {
                    profile.scaled(mean_amplitude / amp)
                };
                Ingredient::Random(Arc::new(MigrSpec::new(m, profile, mean)?))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandConfig {
    /// Band start `K`; the band is `[K, 2K)`.
    pub k_lo: f64,
    pub delta: f64,
    pub k_start: f64,
    pub n_freq: usize,
    pub tau_list: Vec<f64>,
}

impl BandConfig {
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_freq).map(|j| self.k_start + j as f64 * self.delta).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hemisphere {
    /// Use the separating normal when both ingredients are present.
    Auto,
    Off,
    Normal([f64; 3]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearfieldConfig {
    pub points: Vec<[f64; 3]>,
    pub k_max: f64,
    pub n_freq: usize,
}

impl NearfieldConfig {
    /// Uniform mesh on `[1, k_max]`.
    pub fn frequencies(&self) -> Vec<f64> {
        let d = (self.k_max - 1.0) / (self.n_freq - 1) as f64;
        (0..self.n_freq).map(|j| 1.0 + j as f64 * d).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: AcquisitionKind,
    pub seed: u64,
    pub output: PathBuf,
    pub grid: GridSpec,
    pub source: Option<IngredientConfig>,
    pub potential: Option<IngredientConfig>,
    pub band: BandConfig,
    pub directions: Vec<[f64; 3]>,
    pub tol: f64,
    pub max_born_order: usize,
    pub model: FarFieldModel,
    pub recovery_m: Option<f64>,
    pub hemisphere: Hemisphere,
    /// Normal of a plane separating the source and potential supports.
    pub separation_normal: Option<[f64; 3]>,
    pub nearfield: Option<NearfieldConfig>,
}

struct Table {
    values: BTreeMap<(String, String), String>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::config(format!("malformed config at {e}")))?;
        let mut values = BTreeMap::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::config(format!("key {k} appears before any section header")));
                }
                continue;
            };
            let Some((_, known)) = SECTIONS.iter().find(|(s, _)| *s == section) else {
                return Err(Error::config(format!("unknown section [{section}]")));
            };
            for (key, value) in props.iter() {
                if !known.contains(&key) {
                    return Err(Error::config(format!("unknown key {section}.{key}")));
                }
                let value = value.split('#').next().unwrap_or("").trim().to_string();
                if values.insert((section.to_string(), key.to_string()), value).is_some() {
                    return Err(Error::config(format!("duplicate key {section}.{key}")));
                }
            }
        }
        Ok(Self { values })
    }

    fn has_section(&self, s: &str) -> bool {
        self.values.keys().any(|(sec, _)| sec == s)
    }

    fn raw(&self, s: &str, k: &str) -> Option<&str> {
        self.values.get(&(s.to_string(), k.to_string())).map(String::as_str)
    }

    fn req(&self, s: &str, k: &str) -> Result<&str> {
        self.raw(s, k).ok_or_else(|| Error::config(format!("missing key {s}.{k}")))
    }

    fn f64_at(&self, s: &str, k: &str) -> Result<Option<f64>> {
        self.raw(s, k).map(|v| number(v, &format!("{s}.{k}"))).transpose()
    }

    fn f64_req(&self, s: &str, k: &str) -> Result<f64> {
        number(self.req(s, k)?, &format!("{s}.{k}"))
    }

    fn usize_at(&self, s: &str, k: &str) -> Result<Option<usize>> {
        self.raw(s, k)
            .map(|v| v.parse::<usize>().map_err(|_| Error::config(format!("{s}.{k} = {v:?} is not a non-negative integer"))))
            .transpose()
    }

    fn vec3(&self, s: &str, k: &str) -> Result<Option<[f64; 3]>> {
        self.raw(s, k).map(|v| vec3(v, &format!("{s}.{k}"))).transpose()
    }
}

fn number(v: &str, key: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::config(format!("{key} = {v:?} is not a finite number"))),
    }
}

fn vec3(v: &str, key: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("{key} = {v:?} needs three comma-separated numbers")));
    }
    Ok([number(parts[0], key)?, number(parts[1], key)?, number(parts[2], key)?])
}

fn positive(x: f64, key: &str) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::config(format!("{key} = {x} must be positive")))
    }
}

fn on_mesh(x: f64, step: f64) -> bool {
    let t = x / step;
    (t - t.round()).abs() <= 1e-6 && t.round() >= 0.0
}

fn parse_grid(t: &Table) -> Result<GridSpec> {
    let dims_raw = t.req("grid", "dims")?;
    let dims: Vec<usize> = dims_raw
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::config(format!("grid.dims = {dims_raw:?} is not a list of integers"))))
        .collect::<Result<_>>()?;
    let dims = match dims.as_slice() {
        [n] => [*n; 3],
        [a, b, c] => [*a, *b, *c],
        _ => return Err(Error::config("grid.dims takes one value or three")),
    };
    let h = positive(t.f64_req("grid", "spacing")?, "grid.spacing")?;
    let origin = t
        .vec3("grid", "origin")?
        .unwrap_or([-(dims[0] as f64) * h / 2.0, -(dims[1] as f64) * h / 2.0, -(dims[2] as f64) * h / 2.0]);
    GridSpec::new(dims, origin, h).map_err(|e| Error::config(format!("grid: {e}")))
}

fn parse_ingredient(t: &Table, s: &str) -> Result<Option<IngredientConfig>> {
    if !t.has_section(s) {
        return Ok(None);
    }
    let center = t.vec3(s, "center")?.unwrap_or([0.0; 3]);
    let amplitude = t.f64_at(s, "amplitude")?.unwrap_or(1.0);
    if amplitude < 0.0 {
        return Err(Error::config(format!("{s}.amplitude = {amplitude} must be non-negative")));
    }
    let shape_name = t.req(s, "shape")?;
    let shape = match shape_name {
        "gaussian-bump" => {
            let width = positive(t.f64_req(s, "width")?, &format!("{s}.width"))?;
            let cutoff = positive(t.f64_at(s, "cutoff")?.unwrap_or(4.0 * width), &format!("{s}.cutoff"))?;
            if t.raw(s, "radius").is_some() {
                return Err(Error::config(format!("{s}.radius does not apply to a gaussian-bump")));
            }
            Shape::GaussianBump { center, amplitude, width, cutoff }
        }
        "ball-indicator" => {
            let radius = positive(t.f64_req(s, "radius")?, &format!("{s}.radius"))?;
            for k in ["width", "cutoff"] {
                if t.raw(s, k).is_some() {
                    return Err(Error::config(format!("{s}.{k} does not apply to a ball-indicator")));
                }
            }
            Shape::BallIndicator { center, radius, amplitude }
        }
        other => {
            return Err(Error::config(format!(
                "{s}.shape = {other:?} must be gaussian-bump or ball-indicator"
            )))
        }
    };
    let kind = match t.raw(s, "kind").unwrap_or("random") {
        "random" => IngredientKind::Random {
            m: t.f64_req(s, "m")?,
            mean_amplitude: t.f64_at(s, "mean_amplitude")?.unwrap_or(0.0),
        },
        "fixed" => {
            for k in ["m", "mean_amplitude"] {
                if t.raw(s, k).is_some() {
                    return Err(Error::config(format!("{s}.{k} does not apply to a fixed ingredient")));
                }
            }
            IngredientKind::Fixed
        }
        other => return Err(Error::config(format!("{s}.kind = {other:?} must be random or fixed"))),
    };
    Ok(Some(IngredientConfig { kind, shape }))
}

fn parse_directions(t: &Table) -> Result<Vec<[f64; 3]>> {
    let dist = t.raw("directions", "distribution").unwrap_or("fibonacci-sphere");
    let dirs = match dist {
        "fibonacci-sphere" | "antipodal-fibonacci" => {
            let n = t
                .usize_at("directions", "count")?
                .ok_or_else(|| Error::config("missing key directions.count"))?;
            if n == 0 {
                return Err(Error::config("directions.count must be positive"));
            }
            if dist == "fibonacci-sphere" {
                fibonacci_sphere(n)
            } else {
                if n % 2 != 0 {
                    return Err(Error::config(format!("directions.count = {n} must be even for antipodal-fibonacci")));
                }
                antipodal_fibonacci(n / 2)
            }
        }
        "explicit" => {
            let list = t.req("directions", "list")?;
            let dirs = list
                .split(';')
                .enumerate()
                .map(|(i, p)| {
                    let key = format!("directions.list[{i}]");
                    let d = vec3(p.trim(), &key)?;
                    if !is_unit(d) {
                        return Err(Error::config(format!("{key} = {d:?} is not a unit vector")));
                    }
                    Ok(d)
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(n) = t.usize_at("directions", "count")? {
                if n != dirs.len() {
                    return Err(Error::config(format!("directions.count = {n} but directions.list holds {}", dirs.len())));
                }
            }
            dirs
        }
        other => {
            return Err(Error::config(format!(
                "directions.distribution = {other:?} must be fibonacci-sphere, antipodal-fibonacci or explicit"
            )))
        }
    };
    Ok(dirs)
}

fn parse_band(t: &Table, mode: AcquisitionKind) -> Result<BandConfig> {
    let k_lo = positive(t.f64_req("band", "K")?, "band.K")?;
    let delta = positive(t.f64_req("band", "delta")?, "band.delta")?;
    if !on_mesh(k_lo, delta) {
        return Err(Error::config(format!("band.K = {k_lo} is not a multiple of band.delta = {delta}")));
    }
    let n_terms = (k_lo / delta).round() as usize;
    if n_terms < crate::recovery::MIN_TERMS {
        return Err(Error::config(format!(
            "band.K / band.delta = {n_terms} mesh points, need at least {}",
            crate::recovery::MIN_TERMS
        )));
    }
    let tau_raw = t.req("band", "tau_list")?;
    let step = match mode {
        AcquisitionKind::Passive => delta,
        AcquisitionKind::ActiveBackscatter => 2.0 * delta,
    };
    let tau_list = tau_raw
        .split(',')
        .enumerate()
        .map(|(i, v)| {
            let key = format!("band.tau_list[{i}]");
            let tau = number(v.trim(), &key)?;
            if !on_mesh(tau, step) {
                let rule = match mode {
                    AcquisitionKind::Passive => "a multiple of band.delta",
                    AcquisitionKind::ActiveBackscatter => "a multiple of 2 band.delta (tau/2 must be on the mesh)",
                };
                return Err(Error::config(format!("{key} = {tau} is not {rule}")));
            }
            Ok(tau)
        })
        .collect::<Result<Vec<_>>>()?;
    let k_start = t.f64_at("band", "k_start")?.unwrap_or(k_lo);
    if !(k_start > 0.0) || k_start > k_lo || !on_mesh(k_lo - k_start, delta) {
        return Err(Error::config(format!(
            "band.k_start = {k_start} must be positive, at most band.K and on the band.delta mesh through band.K"
        )));
    }
    let max_shift = tau_list.iter().map(|&t| (t / step).round() as usize * (step / delta).round() as usize).max().unwrap_or(0);
    let max_shift = match mode {
        AcquisitionKind::Passive => max_shift,
        AcquisitionKind::ActiveBackscatter => max_shift / 2,
    };
    let offset = ((k_lo - k_start) / delta).round() as usize;
    let needed = offset + n_terms + max_shift;
    let n_freq = t.usize_at("band", "n_freq")?.unwrap_or(needed);
    if n_freq < needed {
        return Err(Error::config(format!(
            "band.n_freq = {n_freq} does not cover [K, 2K + max shift); need at least {needed}"
        )));
    }
    Ok(BandConfig { k_lo, delta, k_start, n_freq, tau_list })
}

fn check_collar(grid: &GridSpec, field: &ScalarField, s: &str) -> Result<()> {
    if field.is_zero() {
        return Err(Error::config(format!("{s}.shape does not touch any grid node")));
    }
    if !grid.respects_collar(field.support_box(), DEFAULT_COLLAR) {
        return Err(Error::config(format!(
            "{s}.shape support must stay {DEFAULT_COLLAR} cells away from the grid boundary"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let t = Table::parse(text)?;
        for s in ["experiment", "grid", "band", "directions"] {
            if !t.has_section(s) {
                return Err(Error::config(format!("missing section [{s}]")));
            }
        }
        let mode = AcquisitionKind::parse(t.req("experiment", "mode")?)
            .map_err(|_| Error::config("experiment.mode must be passive or active-backscatter"))?;
        let seed_raw = t.req("experiment", "seed")?;
        let seed = seed_raw
            .parse::<u64>()
            .map_err(|_| Error::config(format!("experiment.seed = {seed_raw:?} is not an unsigned 64-bit integer")))?;
        let output = PathBuf::from(t.raw("experiment", "output").unwrap_or("out"));
        let grid = parse_grid(&t)?;
        let source = parse_ingredient(&t, "source")?;
        let potential = parse_ingredient(&t, "potential")?;
        if source.is_none() && potential.is_none() {
            return Err(Error::config("config needs a [source] or a [potential] section"));
        }
        if mode == AcquisitionKind::ActiveBackscatter && potential.is_none() {
            return Err(Error::config("experiment.mode = active-backscatter needs a [potential] section"));
        }
        let mut boxes = Vec::new();
        for (name, ing) in [("source", &source), ("potential", &potential)] {
            if let Some(ing) = ing {
                let field = ing.profile(grid)?;
                check_collar(&grid, &field, name)?;
                boxes.push(physical_box(&grid, field.support_box().unwrap()));
                // validates the rough order and the Nyquist decay
                ing.ingredient(grid).map_err(|e| Error::config(format!("{name}: {e}")))?;
            }
        }
        let separation_normal = if boxes.len() == 2 {
            match separating_normal(boxes[0], boxes[1]) {
                Some((n, _)) => Some(n),
                None => {
                    return Err(Error::config(
                        "source and potential supports overlap: they must be separated by a positive gap \
                         (convex hulls at positive distance) so that a separating normal exists",
                    ))
                }
            }
        } else {
            None
        };
        let band = parse_band(&t, mode)?;
        let directions = parse_directions(&t)?;
        let tol = positive(t.f64_at("solver", "tol")?.unwrap_or(1e-10), "solver.tol")?;
        let max_born_order = t.usize_at("solver", "max_born_order")?.unwrap_or(20);
        if max_born_order == 0 {
            return Err(Error::config("solver.max_born_order must be positive"));
        }
        let model = match t.raw("solver", "model").unwrap_or("full") {
            "full" => FarFieldModel::Full,
            "born" => FarFieldModel::Born,
            other => return Err(Error::config(format!("solver.model = {other:?} must be full or born"))),
        };
        let recovery_m = t.f64_at("recovery", "m")?;
        let hemisphere = match t.raw("recovery", "hemisphere").unwrap_or("auto") {
            "auto" => Hemisphere::Auto,
            "off" => Hemisphere::Off,
            v => {
                let n = vec3(v, "recovery.hemisphere")?;
                if !is_unit(n) {
                    return Err(Error::config(format!("recovery.hemisphere = {n:?} is not a unit vector")));
                }
                Hemisphere::Normal(n)
            }
        };
        let nearfield = if t.has_section("nearfield") {
            let raw = t.req("nearfield", "points")?;
            let points = raw
                .split(';')
                .enumerate()
                .map(|(i, p)| vec3(p.trim(), &format!("nearfield.points[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let k_max = t.f64_req("nearfield", "k_max")?;
            if !(k_max > 1.0) {
                return Err(Error::config(format!("nearfield.k_max = {k_max} must exceed 1")));
            }
            let n_freq = t.usize_at("nearfield", "n_freq")?.unwrap_or(256);
            if n_freq < 2 {
                return Err(Error::config("nearfield.n_freq must be at least 2"));
            }
            Some(NearfieldConfig { points, k_max, n_freq })
        } else {
            None
        };
        Ok(Self {
            mode,
            seed,
            output,
            grid,
            source,
            potential,
            band,
            directions,
            tol,
            max_born_order,
            model,
            recovery_m,
            hemisphere,
            separation_normal,
            nearfield,
        })
    }

    pub fn sweep_setup(&self) -> Result<SweepSetup> {
        let ing = |c: &Option<IngredientConfig>| -> Result<Ingredient> {
            c.as_ref().map_or(Ok(Ingredient::Absent), |c| c.ingredient(self.grid))
        };
        let mut setup = SweepSetup::new(self.grid, ing(&self.source)?, ing(&self.potential)?);
        setup.tol = self.tol;
        setup.max_born_order = self.max_born_order;
        setup.model = self.model;
        Ok(setup)
    }

    fn target(&self, kind: AcquisitionKind) -> Option<&IngredientConfig> {
        match kind {
            AcquisitionKind::Passive => self.source.as_ref(),
            AcquisitionKind::ActiveBackscatter => self.potential.as_ref(),
        }
    }

    /// Recovery parameters for data of `kind`; `m` comes from `recovery.m`
    /// or from the rough order of the recovered ingredient.
    pub fn recovery_request(&self, kind: AcquisitionKind) -> Result<RecoveryRequest> {
        let m = self
            .recovery_m
            .or_else(|| self.target(kind).and_then(IngredientConfig::order))
            .ok_or_else(|| Error::config("missing key recovery.m (the recovered ingredient is not random)"))?;
        let normal = match self.hemisphere {
            Hemisphere::Off => None,
            Hemisphere::Normal(n) => Some(n),
            Hemisphere::Auto => match kind {
                AcquisitionKind::Passive => self.separation_normal,
                // the backscatter estimator sees q alone; no hemisphere restriction is needed
                AcquisitionKind::ActiveBackscatter => None,
            },
        };
        Ok(RecoveryRequest {
            m,
            tau_list: self.band.tau_list.clone(),
            dirs: self.directions.clone(),
            k_lo: self.band.k_lo,
            normal,
            grid: self.grid,
        })
    }

    /// The strength `μ` of the ingredient recovered from data of `kind`, when random.
    pub fn ground_truth(&self, kind: AcquisitionKind) -> Result<Option<ScalarField>> {
        match self.target(kind) {
            Some(c) if c.order().is_some() => Ok(Some(c.profile(self.grid)?)),
            _ => Ok(None),
        }
    }

    pub fn source_profile(&self) -> Result<Option<ScalarField>> {
        self.source.as_ref().map(|c| c.profile(self.grid)).transpose()
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[experiment]
mode = passive
seed = 7

[grid]
dims = 32
spacing = 0.0625

[source]
m = 2.5
shape = gaussian-bump
width = 0.15

[band]
K = 4
delta = 0.25
tau_list = 0, 0.5, 1.0   # shifts

[directions]
count = 8
";

    #[test]
    fn minimal_config_gets_solver_defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.tol, 1e-10);
        assert_eq!(c.max_born_order, 20);
        assert_eq!(c.model, FarFieldModel::Full);
        assert_eq!(c.band.n_freq, 16 + 4);
        assert_eq!(c.directions.len(), 8);
        assert_eq!(c.grid.origin(), [-1.0; 3]);
        match c.source.unwrap().shape {
            Shape::GaussianBump { cutoff, .. } => assert!((cutoff - 0.6).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn shape_transforms_match_direct_quadrature() {
        let grid = GridSpec::centered_cube(32, 2.0).unwrap();
        let shapes = [
            Shape::GaussianBump { center: [0.1, 0.0, -0.1], amplitude: 2.0, width: 0.12, cutoff: 0.7 },
            Shape::BallIndicator { center: [0.0, 0.2, 0.0], radius: 0.4, amplitude: 1.5 },
        ];
        for (shape, tol) in shapes.iter().zip([1e-6, 0.05]) {
            let f = shape.field(grid).unwrap();
            for xi in [[0.0; 3], [3.0, -1.0, 2.0], [0.0, 7.0, 0.0]] {
                let a = shape.fourier(xi);
                let b = crate::oracles::direct_fourier(&f, xi);
                assert!((a - b).norm() <= tol * shape.fourier([0.0; 3]).norm(), "{shape:?} {xi:?} {a} {b}");
            }
        }
    }

    #[test]
    fn off_mesh_tau_names_the_entry() {
        let bad = MINIMAL.replace("0, 0.5, 1.0", "0, 0.5, 0.3");
        let msg = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("band.tau_list[2]"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("width = 0.15", "width = 0.15\nwidht = 0.2");
        let msg = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("source.widht"), "{msg}");
    }

    #[test]
    fn overlapping_supports_cite_the_separation_requirement() {
        let two = format!("{MINIMAL}\n[potential]\nm = 3.5\nshape = ball-indicator\nradius = 0.2\ncenter = 0.1, 0, 0\n");
        let msg = ExperimentConfig::parse(&two).unwrap_err().to_string();
        assert!(msg.contains("separated by a positive gap"), "{msg}");
        let apart = two
            .replace("width = 0.15", "width = 0.07\ncenter = -0.45, 0, 0")
            .replace("center = 0.1, 0, 0", "center = 0.45, 0, 0");
        let c = ExperimentConfig::parse(&apart).unwrap();
        assert_eq!(c.separation_normal, Some([1.0, 0.0, 0.0]));
    }

    #[test]
    fn active_mode_needs_even_shifts() {
        let active = format!("{MINIMAL}\n[potential]\nkind = fixed\nshape = ball-indicator\nradius = 0.1\ncenter = 0.5, 0, 0\n")
            .replace("mode = passive", "mode = active-backscatter")
            .replace("width = 0.15", "width = 0.07\ncenter = -0.45, 0, 0");
        let bad = active.replace("0, 0.5, 1.0", "0, 0.25, 1.0");
        let msg = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("band.tau_list[1]"), "{msg}");
        let ok = ExperimentConfig::parse(&active).unwrap();
        // tau = 1 reaches two mesh steps beyond 2K
        assert_eq!(ok.band.n_freq, 16 + 2);
    }
}
