//! Lippmann–Schwinger equation `(I - R_k M_q) u^{sc} = R_k f + α R_k M_q u^{in}`
//! for `(-Δ - k² - q) u = f`, solved by Born (Neumann) iteration.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec, ScalarField};
use crate::geometry::{is_unit, physical_box, separating_normal};
use crate::migr::DEFAULT_COLLAR;
use crate::scatter::green::{incident_plane_wave, Resolvent};

#[derive(Debug, Clone)]
pub struct ScatteringConfig {
    pub grid: GridSpec,
    pub k: f64,
    /// 0 for passive data, 1 when the plane wave `e^{ik d·x}` is imposed.
    pub alpha: u8,
    pub incident_dir: [f64; 3],
    pub potential: Option<Arc<ScalarField>>,
    pub source: Option<Arc<ScalarField>>,
    pub max_born_order: usize,
    pub tol: f64,
}

impl ScatteringConfig {
    pub fn new(grid: GridSpec, k: f64) -> Self {
        Self {
            grid,
            k,
            alpha: 0,
            incident_dir: [0.0, 0.0, 1.0],
            potential: None,
            source: None,
            max_born_order: 20,
            tol: 1e-10,
        }
    }

    pub fn with_source(mut self, f: Arc<ScalarField>) -> Self {
        self.source = Some(f);
        self
    }

    pub fn with_potential(mut self, q: Arc<ScalarField>) -> Self {
        self.potential = Some(q);
        self
    }

    pub fn with_incidence(mut self, d: [f64; 3]) -> Self {
        self.alpha = 1;
        self.incident_dir = d;
        self
    }

    pub fn with_k(&self, k: f64) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::config(format!("k = {} must be positive", self.k)));
        }
        if self.alpha > 1 {
            return Err(Error::config(format!("alpha = {} must be 0 or 1", self.alpha)));
        }
        if self.alpha == 1 && !is_unit(self.incident_dir) {
            return Err(Error::config(format!("incident direction {:?} is not a unit vector", self.incident_dir)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config(format!("solver.tol = {} must be positive", self.tol)));
        }
        if self.max_born_order < 1 {
            return Err(Error::config("solver.max_born_order must be at least 1"));
        }
        for (name, field) in [("potential", &self.potential), ("source", &self.source)] {
            if let Some(g) = field {
                if g.grid() != &self.grid {
                    return Err(Error::config(format!("{name} lives on a different grid")));
                }
                if !self.grid.respects_collar(g.support_box(), DEFAULT_COLLAR) {
                    return Err(Error::config(format!(
                        "{name} support must leave a {DEFAULT_COLLAR}-cell collar inside the grid"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Normal of a plane separating the bounding boxes of `supp f` and `supp q`,
    /// pointing from the source towards the potential.
    pub fn separation_normal(&self) -> Result<[f64; 3]> {
        let (f, q) = match (&self.source, &self.potential) {
            (Some(f), Some(q)) => (f, q),
            _ => return Err(Error::config("separation needs both a source and a potential")),
        };
        let (fb, qb) = match (f.support_box(), q.support_box()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::config("separation needs nonzero source and potential")),
        };
        separating_normal(physical_box(&self.grid, fb), physical_box(&self.grid, qb))
            .map(|(n, _)| n)
            .ok_or_else(|| {
                Error::config("source and potential supports must have positive distance between their bounding boxes")
            })
    }

    fn potential_is_zero(&self) -> bool {
        self.potential.as_ref().is_none_or(|q| q.is_zero())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    /// Relative update `‖u_{j+1} - u_j‖ / ‖u_{j+1}‖` per iteration.
    pub update_norms: Vec<f64>,
    /// Ratio of the last two update norms (0 when fewer than two).
    pub contraction: f64,
    pub iterations: usize,
}

fn multiply(q: &ScalarField, u: &ComplexField) -> ComplexField {
    let data = q.data().iter().zip(u.data()).map(|(&a, b)| b * a).collect();
    ComplexField::from_parts(*u.grid(), data)
}

fn rel_update(new: &ComplexField, old: &ComplexField) -> f64 {
    let diff: f64 = new.data().iter().zip(old.data()).map(|(a, b)| (a - b).norm_sqr()).sum();
    let n = new.norm();
    if n == 0.0 {
        0.0
    } else {
        diff.sqrt() / n
    }
}

/// The right-hand side `R_k (f + α q u^{in})`.
pub fn born_rhs(cfg: &ScatteringConfig, resolvent: &Resolvent) -> Result<ComplexField> {
    let mut density = ComplexField::zeros(cfg.grid).into_data();
    if let Some(f) = &cfg.source {
        density.iter_mut().zip(f.data()).for_each(|(d, &v)| d.re += v);
    }
    if cfg.alpha == 1 {
        if let Some(q) = &cfg.potential {
            let uin = incident_plane_wave(cfg.k, cfg.incident_dir, &cfg.grid)?;
            density.iter_mut().zip(q.data()).zip(uin.data()).for_each(|((d, &qv), w)| *d += w * qv);
        }
    }
    resolvent.apply(&ComplexField::from_parts(cfg.grid, density))
}

/// Scattered field `u^{sc}` and the iteration report.
pub fn lippmann_schwinger_solve(cfg: &ScatteringConfig) -> Result<(ComplexField, SolveReport)> {
    cfg.validate()?;
    let resolvent = Resolvent::new(cfg.k, &cfg.grid);
    solve_with(cfg, &resolvent)
}

pub(crate) fn solve_with(cfg: &ScatteringConfig, resolvent: &Resolvent) -> Result<(ComplexField, SolveReport)> {
    let rhs = born_rhs(cfg, resolvent)?;
    let mut report = SolveReport::default();
    if rhs.norm() == 0.0 {
        return Ok((rhs, report));
    }
    if cfg.potential_is_zero() {
        report.update_norms.push(0.0);
        report.iterations = 1;
        return Ok((rhs, report));
    }
    let q = cfg.potential.as_ref().expect("nonzero potential present");
    let mut u = rhs.clone();
    for j in 1..=cfg.max_born_order {
        let next = resolvent.apply(&multiply(q, &u))?.axpby(Complex64::new(1.0, 0.0), &rhs, Complex64::new(1.0, 0.0))?;
        let upd = rel_update(&next, &u);
        report.update_norms.push(upd);
        report.iterations = j;
        let n = report.update_norms.len();
        if n >= 2 && report.update_norms[n - 2] > 0.0 {
            report.contraction = upd / report.update_norms[n - 2];
        }
        u = next;
        if upd < cfg.tol {
            return Ok((u, report));
        }
        if j >= 3 && report.contraction >= 1.0 {
            return Err(Error::Divergence { contraction: report.contraction, iterations: j });
        }
    }
    Err(Error::NonConvergence { iterations: report.iterations, residual: *report.update_norms.last().unwrap() })
}

/// Relative fixed-point residual `‖u - RHS - R_k M_q u‖ / ‖u‖`.
pub fn fixed_point_residual(cfg: &ScatteringConfig, u: &ComplexField) -> Result<f64> {
    let resolvent = Resolvent::new(cfg.k, &cfg.grid);
    let rhs = born_rhs(cfg, &resolvent)?;
    let scattered = match &cfg.potential {
        Some(q) => resolvent.apply(&multiply(q, u))?,
        None => ComplexField::zeros(cfg.grid),
    };
    let num: f64 = u
        .data()
        .iter()
        .zip(rhs.data())
        .zip(scattered.data())
        .map(|((a, b), c)| (a - b - c).norm_sqr())
        .sum();
    Ok(num.sqrt() / u.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gaussian_bump;

    fn grid() -> GridSpec {
        GridSpec::centered_cube(16, 2.0).unwrap()
    }

    #[test]
    fn zero_potential_truncates_after_one_application() {
        let f = Arc::new(gaussian_bump(grid(), [0.0; 3], 1.0, 0.2, 0.45).unwrap());
        let cfg = ScatteringConfig::new(grid(), 3.0).with_source(f.clone());
        let (u, rep) = lippmann_schwinger_solve(&cfg).unwrap();
        let direct = Resolvent::new(3.0, &grid()).apply(&f.to_complex()).unwrap();
        assert_eq!(u, direct);
        assert_eq!(rep.update_norms, vec![0.0]);
    }

    #[test]
    fn zero_rhs_gives_zero_field() {
        let q = Arc::new(gaussian_bump(grid(), [0.0; 3], 1.0, 0.2, 0.45).unwrap());
        let cfg = ScatteringConfig::new(grid(), 3.0).with_potential(q);
        let (u, rep) = lippmann_schwinger_solve(&cfg).unwrap();
        assert!(u.data().iter().all(|v| v.norm() == 0.0));
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn strong_potential_diverges() {
        let q = Arc::new(gaussian_bump(grid(), [0.0; 3], 400.0, 0.25, 0.45).unwrap());
        let cfg = ScatteringConfig::new(grid(), 3.0).with_potential(q).with_incidence([1.0, 0.0, 0.0]);
        match lippmann_schwinger_solve(&cfg) {
            Err(Error::Divergence { contraction, .. }) => assert!(contraction >= 1.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_reports_residual() {
        let q = Arc::new(gaussian_bump(grid(), [0.0; 3], 20.0, 0.25, 0.45).unwrap());
        let mut cfg = ScatteringConfig::new(grid(), 3.0).with_potential(q).with_incidence([1.0, 0.0, 0.0]);
        cfg.max_born_order = 2;
        assert!(matches!(lippmann_schwinger_solve(&cfg), Err(Error::NonConvergence { iterations: 2, .. })));
    }

    #[test]
    fn separation_normal_from_supports() {
        let g = grid();
        let f = Arc::new(gaussian_bump(g, [-0.4, 0.0, 0.0], 1.0, 0.05, 0.2).unwrap());
        let q = Arc::new(gaussian_bump(g, [0.4, 0.0, 0.0], 1.0, 0.05, 0.2).unwrap());
        let cfg = ScatteringConfig::new(g, 1.0).with_source(f.clone()).with_potential(q);
        assert_eq!(cfg.separation_normal().unwrap(), [1.0, 0.0, 0.0]);
        let overlap = ScatteringConfig::new(g, 1.0).with_source(f.clone()).with_potential(f);
        assert!(overlap.separation_normal().is_err());
    }
}
