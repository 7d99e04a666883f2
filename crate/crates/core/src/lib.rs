//! Spectral-amplitude toolkit for shaping single-photon pulses.
//!
//! Everything lives on a shared frequency/time [`SampledGrid`]. A pulse is a
//! complex [`SpectralAmplitude`] on that grid; because all channels here act
//! linearly on the mode operators, the amplitude carries the full state of a
//! one-photon wavepacket. On top of the grid layer sit an all-pass cavity
//! filter, a frequency-modulated cavity with both closed-form sideband
//! spectra and an exact time-domain integrator, and an orthonormal pulse-code
//! layer with matched-filter decoding.

pub mod cavity;
pub mod codes;
mod error;
mod fft;
pub mod grid;
pub mod io;
pub mod modulation;
pub mod pulses;
pub mod states;

pub use cavity::{pulse_stats, CavityParams, PulseStats};
pub use codes::{CodeBook, CrosstalkMatrix, Decoded, SymbolVector};
pub use error::{Error, Result};
pub use grid::{Moments, Resolution, SampledGrid, SpectralAmplitude, Spectrum, TimeAmplitude, TimeSeries};
pub use modulation::{
    oracle_simulate, oracle_simulate_gaussian, sideband_report, single_sideband_spectrum,
    two_sideband_spectrum, IntegratorMethod, ModulationParams, OracleConfig, OracleRun,
    SidebandReport,
};
pub use pulses::GaussianPulse;
pub use states::{CoherentState, SinglePhotonState};
