//! Single-photon and coherent pulsed states with their first-order
//! observables. The detector sits at the origin, so every signal is a
//! function of retarded time alone and the spatial coordinate is dropped.

use crate::error::{Error, Result};
use crate::grid::{SpectralAmplitude, Spectrum, TimeAmplitude, TimeSeries};

const NORM_TOLERANCE: f64 = 1e-9;

/// One photon coherently spread over the sampled modes.
///
/// The amplitude is held normalized. The state carries no mean field at all,
/// yet its count rate integrates to one photon; that contrast with a
/// coherent pulse of the same shape is the point of keeping both types.
#[derive(Debug, Clone)]
pub struct SinglePhotonState {
    nu: SpectralAmplitude,
}

impl SinglePhotonState {
    /// Wraps an amplitude that is already normalized to within 1e-9.
    pub fn new(nu: SpectralAmplitude) -> Result<Self> {
        let norm_sqr = nu.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm_sqr,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self { nu })
    }

    /// Normalizes first; fails on a zero amplitude.
    pub fn from_unnormalized(nu: &SpectralAmplitude) -> Result<Self> {
        Ok(Self {
            nu: nu.normalized()?,
        })
    }

    pub fn amplitude(&self) -> &SpectralAmplitude {
        &self.nu
    }

    /// Identically zero, independent of the amplitude.
    pub fn mean_field(&self) -> TimeAmplitude {
        TimeAmplitude::zeros(self.nu.grid().clone())
    }

    /// n(t) = |nu(t)|^2.
    pub fn count_rate(&self) -> TimeSeries {
        self.nu.to_time().intensity()
    }

    /// I(omega) = |nu(omega)|^2.
    pub fn intensity_spectrum(&self) -> Spectrum {
        self.nu.intensity()
    }
}

/// Displaced vacuum with spectral displacement alpha(omega).
///
/// alpha is not normalized; its squared norm is the mean photon number, so
/// alpha = 0 is the vacuum.
#[derive(Debug, Clone)]
pub struct CoherentState {
    alpha: SpectralAmplitude,
}

impl CoherentState {
    pub fn new(alpha: SpectralAmplitude) -> Self {
        Self { alpha }
    }

    pub fn displacement(&self) -> &SpectralAmplitude {
        &self.alpha
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// The transform of alpha; nonzero whenever the pulse is.
    pub fn mean_field(&self) -> TimeAmplitude {
        self.alpha.to_time()
    }

    /// n(t) = |alpha(t)|^2, the squared mean field.
    pub fn count_rate(&self) -> TimeSeries {
        self.mean_field().intensity()
    }

    pub fn intensity_spectrum(&self) -> Spectrum {
        self.alpha.intensity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SampledGrid;
    use crate::pulses::GaussianPulse;
    use num_complex::Complex64 as C64;

    fn gaussian_amp() -> SpectralAmplitude {
        let grid = SampledGrid::new(2048, 0.02).unwrap();
        GaussianPulse::new(1.0, 0.0).unwrap().sampled(&grid)
    }

    #[test]
    fn single_photon_requires_normalization() {
        let nu = gaussian_amp();
        assert!(SinglePhotonState::new(nu.scaled(C64::new(2.0, 0.0))).is_err());
        assert!(SinglePhotonState::new(nu).is_ok());
    }

    #[test]
    fn single_photon_mean_field_is_zero() {
        let s = SinglePhotonState::from_unnormalized(&gaussian_amp()).unwrap();
        assert!(s.mean_field().values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn count_rate_matches_closed_form_and_integrates_to_one() {
        // sigma = 1: n(t) = (1/pi)^{1/2} e^{-t^2}.
        let s = SinglePhotonState::from_unnormalized(&gaussian_amp()).unwrap();
        let n = s.count_rate();
        let g = n.grid().clone();
        for (j, t) in g.times().enumerate() {
            let expect = (1.0 / std::f64::consts::PI).sqrt() * (-t * t).exp();
            assert!((n.values()[j] - expect).abs() < 1e-12);
        }
        assert!((n.integral() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_matches_single_photon_shape_but_not_field() {
        let nu = gaussian_amp().normalized().unwrap();
        let photon = SinglePhotonState::new(nu.clone()).unwrap();
        let coherent = CoherentState::new(nu);
        assert!((coherent.mean_photon_number() - 1.0).abs() < 1e-12);
        for (a, b) in photon
            .count_rate()
            .values()
            .iter()
            .zip(coherent.count_rate().values())
        {
            assert!((a - b).abs() < 1e-12);
        }
        // Same pulse, opposite story for the field.
        assert!(coherent.mean_field().norm() > 0.9);
        assert_eq!(photon.mean_field().norm(), 0.0);
    }

    #[test]
    fn vacuum_has_no_field_and_no_photons() {
        let grid = SampledGrid::new(64, 0.1).unwrap();
        let vac = CoherentState::new(SpectralAmplitude::zeros(grid));
        assert_eq!(vac.mean_photon_number(), 0.0);
        assert_eq!(vac.mean_field().norm(), 0.0);
        assert_eq!(vac.count_rate().integral(), 0.0);
    }

    #[test]
    fn intensity_spectrum_is_squared_amplitude() {
        let s = SinglePhotonState::from_unnormalized(&gaussian_amp()).unwrap();
        let spec = s.intensity_spectrum();
        assert!((spec.integral() - 1.0).abs() < 1e-9);
        for (v, a) in spec.values().iter().zip(s.amplitude().values()) {
            assert_eq!(*v, a.norm_sqr());
        }
    }
}
