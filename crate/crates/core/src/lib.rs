//! Numerical model of cascaded down-conversion and up-conversion of light.
//!
//! * [`fock`]: truncated Fock-space operators, partial trace, purity, fidelity.
//! * [`states`]: coherent, thermal and squeezed-vacuum states and `g⁽ᵏ⁾`.
//! * [`cascade`]: squeezed vacuum through sum-frequency generation.
//! * [`interference`]: biphoton interferometer with doubled phase sensitivity.
//! * [`photostream`]: Monte Carlo detector time tags.
//! * [`hbt`]: coincidence histograms and `g⁽²⁾(τ)`.

pub mod cascade;
pub mod error;
pub mod fock;
pub mod hbt;
pub mod interference;
pub mod photostream;
pub mod quadrature;
pub mod states;

pub use cascade::{apply_sfg, calibrate_kappa, run_cascade, CascadeConfig, CascadeReport, SfgUnitary};
pub use error::{Error, Result};
pub use fock::{
    annihilation_matrix, fidelity_to_coherent, matrix_exponential, partial_trace_over_a, purity, tensor_product,
    ComplexMatrix, DensityMatrix, FockDim, TwoModeState,
};
pub use states::{
    coherence_order, coherent_state, photon_number_distribution, squeezed_vacuum, thermal_density,
    CoherentAmplitude, PhotonNumberDistribution, SqueezeParam,
};
pub use hbt::{
    cross_correlate, expected_background, normalize_g2, peak_statistics, CorrelationHistogram, PeakStatistics,
};
pub use interference::{
    fit_fringe_frequency, g_amplitude, indistinguishability, simulate_fringe_scan, visibility_from_rates, ArmRates,
    EffectiveJsa, FringeScan, SpectralPhase,
};
pub use photostream::{generate_stream, split_stream, DetectorModel, SourceModel, StreamPair, TimeTagStream};
