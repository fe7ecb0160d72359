//! Forward scattering for `(-Δ - k² - q) u = f` with outgoing radiation.

pub mod farfield;
pub mod green;
pub mod lippmann;

pub use farfield::{
    band_sweep, far_field, ingredient_seed, AcquisitionKind, FarFieldMeta, FarFieldModel, FarFieldSet, Ingredient,
    RealizedSetup, SweepSetup,
};
pub use green::{fundamental_solution, incident_plane_wave, near_field_at, resolvent_apply, Resolvent};
pub use lippmann::{fixed_point_residual, lippmann_schwinger_solve, ScatteringConfig, SolveReport};
