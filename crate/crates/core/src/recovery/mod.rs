//! Frequency-band estimators and reconstruction of the rough strength.

pub mod correlation;
pub mod ergodic;
pub mod nearfield;
pub mod reconstruct;

pub use correlation::{
    backscatter_correlation, band_correlation, hermitian_complete, raw_products, recovery_constant,
    CorrelationEstimate, MIN_TERMS,
};
pub use ergodic::{
    ergodic_diagnostic_data, ergodic_diagnostic_synthetic, BandDiagnostic, BandProcess, DeterministicProcess,
    SpreadDiagnostic, SyntheticProcess,
};
pub use nearfield::{nearfield_samples, nearfield_second_moment};
pub use reconstruct::{
    invert_polar, recover_potential_strength, recover_source_strength, rel_l2_on_support, sequence_exponent,
    spectral_rel_error, RecoveryReport, RecoveryRequest,
};
