//! Closed-form pulse shapes.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{SampledGrid, SpectralAmplitude};

/// Gaussian wavepacket with spectral amplitude width `sigma` and arrival
/// time `center`:
///
/// nu(omega) = (pi sigma^2)^{-1/4} exp(-omega^2 / (2 sigma^2)) e^{+i omega center},
/// nu(t)     = (sigma^2 / pi)^{1/4} exp(-sigma^2 (t - center)^2 / 2).
///
/// Unit norm in the continuum; on any grid that resolves it the sampled norm
/// matches to round-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    sigma: f64,
    center: f64,
}

impl GaussianPulse {
    pub fn new(sigma: f64, center: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gaussian sigma = {sigma} must be finite and positive"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gaussian center = {center} must be finite"
            )));
        }
        Ok(Self { sigma, center })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spectral_at(&self, omega: f64) -> C64 {
        let mag = (std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25)
            * (-omega * omega / (2.0 * self.sigma * self.sigma)).exp();
        mag * C64::from_polar(1.0, omega * self.center)
    }

    pub fn time_at(&self, t: f64) -> C64 {
        let x = t - self.center;
        let mag = (self.sigma * self.sigma / std::f64::consts::PI).powf(0.25)
            * (-self.sigma * self.sigma * x * x / 2.0).exp();
        C64::new(mag, 0.0)
    }

    pub fn sampled(&self, grid: &Arc<SampledGrid>) -> SpectralAmplitude {
        SpectralAmplitude::from_fn(grid.clone(), |w| self.spectral_at(w))
    }
}
