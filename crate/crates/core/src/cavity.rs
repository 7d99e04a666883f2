//! Reflection off an empty one-sided cavity: the all-pass transfer function,
//! its action on spectral amplitudes, and delay/broadening diagnostics.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{SpectralAmplitude, TimeSeries};

/// Decay rate and detuning of the filtering cavity. The detuning is the
/// cavity resonance measured from the pulse carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    gamma: f64,
    detuning: f64,
}

impl CavityParams {
    pub fn new(gamma: f64, detuning: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cavity gamma = {gamma} must be finite and positive"
            )));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cavity detuning = {detuning} must be finite"
            )));
        }
        Ok(Self { gamma, detuning })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// H(omega) = (gamma/2 + i(omega - detuning)) / (gamma/2 - i(omega - detuning)).
    ///
    /// Numerator and denominator are conjugates, so |H| = 1 everywhere: the
    /// cavity reflects every photon and only rewrites phases.
    pub fn transfer_function(&self, omega: f64) -> C64 {
        let x = omega - self.detuning;
        let half = 0.5 * self.gamma;
        C64::new(half, x) / C64::new(half, -x)
    }

    /// Filter a pulse bin by bin; the norm is preserved to round-off.
    pub fn apply(&self, nu: &SpectralAmplitude) -> SpectralAmplitude {
        let grid = nu.grid().clone();
        let values = grid
            .omegas()
            .zip(nu.values())
            .map(|(w, v)| self.transfer_function(w) * v)
            .collect();
        SpectralAmplitude::new(grid, values).expect("filtered values match the input grid")
    }

    /// d arg H / d omega = (4/gamma) / (1 + 4 (omega - detuning)^2 / gamma^2).
    ///
    /// A Lorentzian peaking at 4/gamma on resonance; narrowband resonant
    /// pulses come back delayed by about that much.
    pub fn group_delay(&self, omega: f64) -> f64 {
        let x = 2.0 * (omega - self.detuning) / self.gamma;
        (4.0 / self.gamma) / (1.0 + x * x)
    }
}

/// Mean arrival time and rms duration of a count-rate sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseStats {
    pub mean_time: f64,
    pub rms_width: f64,
}

/// Moments of n(t); errors when the sequence carries no mass.
pub fn pulse_stats(n: &TimeSeries) -> Result<PulseStats> {
    let m = n.moments().ok_or(Error::ZeroMass)?;
    Ok(PulseStats {
        mean_time: m.mean,
        rms_width: m.rms,
    })
}
