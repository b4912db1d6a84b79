//! Exact finite-`N` thermodynamics at inverse temperature one.

mod bounds;
mod identities;
mod spectral;
mod system;

pub use bounds::{
    fluctuation_estimate, gibbs_trial_bound, mean_and_stderr, tilt_sandwich, FluctuationEstimate,
    FluctuationSample, TiltSampling, TiltSandwich, TrialBound, MIN_TILT_SAMPLES,
};
pub use identities::{
    bogoliubov_gap, cosh_lemma_holds, duhamel_curvature, CurvatureCheck, IdentityCheck, PairSums,
    CURVATURE_STEP, DEGENERACY_TOLERANCE,
};
pub use spectral::{diagonalize, diagonalize_matrix, Eigenbasis, SpectralData};
pub use system::{
    gibbs_average, model_blocks, model_log_partition, model_pressure, pressure, thermal_variance,
    Observable, Route, ThermalBlock, ThermalSystem, Weights,
};
