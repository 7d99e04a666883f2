//! Sampled frequency/time grids and the complex amplitudes that live on them.
//!
//! Conventions, fixed here and used everywhere else:
//!
//! * frequency to time uses the e^{-i omega t} kernel,
//!   nu(t) = (2 pi)^{-1/2} Integral d omega nu(omega) e^{-i omega t},
//!   and time to frequency is its inverse;
//! * the discrete pair is scaled so that the quadrature norm is preserved
//!   exactly, sum |nu(t_k)|^2 dt = sum |nu(omega_j)|^2 d omega;
//! * inner products are Riemann sums weighted by the grid spacing;
//! * amplitudes sampled on different grids never interoperate silently, a
//!   mismatch is an error.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fft;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Uniform frequency grid centered on zero (the rotating frame of the
/// optical carrier) together with its dual time grid.
///
/// `delta_omega * delta_t * n_points = 2 pi` holds by construction.
/// Frequency samples run from -n/2 * delta_omega to (n/2 - 1) * delta_omega
/// and time samples likewise, so index n/2 sits at the origin of both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    n_points: usize,
    delta_omega: f64,
    delta_t: f64,
    carrier: Option<f64>,
}

impl SampledGrid {
    /// A grid with `n_points` samples spaced `delta_omega` apart.
    ///
    /// `n_points` must be even and at least 8; powers of two transform
    /// fastest.
    pub fn new(n_points: usize, delta_omega: f64) -> Result<Arc<Self>> {
        if n_points < 8 {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points}, need at least 8"
            )));
        }
        if !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be even so the sample axes center on zero"
            )));
        }
        if !delta_omega.is_finite() || delta_omega <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "delta_omega = {delta_omega} must be finite and positive"
            )));
        }
        let delta_t = TWO_PI / (n_points as f64 * delta_omega);
        Ok(Arc::new(Self {
            n_points,
            delta_omega,
            delta_t,
            carrier: None,
        }))
    }

    /// Same as [`SampledGrid::new`] with a carrier annotation attached.
    ///
    /// The carrier records which absolute frequency the rotating frame sits
    /// at. It is bookkeeping only and never enters any computation.
    pub fn with_carrier(n_points: usize, delta_omega: f64, carrier: f64) -> Result<Arc<Self>> {
        if !carrier.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "carrier = {carrier} must be finite"
            )));
        }
        let grid = Self::new(n_points, delta_omega)?;
        Ok(Arc::new(Self {
            carrier: Some(carrier),
            ..(*grid).clone()
        }))
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn carrier(&self) -> Option<f64> {
        self.carrier
    }

    pub fn omega_at(&self, index: usize) -> f64 {
        (index as f64 - (self.n_points / 2) as f64) * self.delta_omega
    }

    pub fn time_at(&self, index: usize) -> f64 {
        (index as f64 - (self.n_points / 2) as f64) * self.delta_t
    }

    pub fn omegas(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.omega_at(j))
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.time_at(j))
    }

    /// Total frequency extent, n_points * delta_omega.
    pub fn omega_span(&self) -> f64 {
        self.n_points as f64 * self.delta_omega
    }

    /// Total time extent, n_points * delta_t.
    pub fn time_span(&self) -> f64 {
        self.n_points as f64 * self.delta_t
    }

    /// True when both grids sample identically. Carrier annotations are
    /// ignored; they do not change any numerics.
    pub fn compatible(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.delta_omega.to_bits() == other.delta_omega.to_bits()
    }
}

fn check_values(grid: &SampledGrid, values: &[C64]) -> Result<()> {
    if values.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            got: values.len(),
            expected: grid.n_points(),
        });
    }
    Ok(())
}

/// First and second moments of a nonnegative sampled distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub rms: f64,
}

fn moments(xs: impl Iterator<Item = f64>, weights: &[f64]) -> Option<Moments> {
    let xs: Vec<f64> = xs.collect();
    let mass: f64 = weights.iter().sum();
    if !mass.is_finite() || mass <= 0.0 {
        return None;
    }
    let mean = xs
        .iter()
        .zip(weights)
        .map(|(x, w)| x * w)
        .sum::<f64>()
        / mass;
    let var = xs
        .iter()
        .zip(weights)
        .map(|(x, w)| (x - mean).powi(2) * w)
        .sum::<f64>()
        / mass;
    Some(Moments {
        mean,
        rms: var.max(0.0).sqrt(),
    })
}

/// Sampling diagnostics for a pulse. The pulse is comfortably resolved when
/// each rms width stays below an eighth of the corresponding span.
#[derive(Debug, Clone, Copy)]
pub struct Resolution {
    pub spectral_rms: f64,
    pub temporal_rms: f64,
    pub spectral_span: f64,
    pub temporal_span: f64,
}

impl Resolution {
    pub fn well_resolved(&self) -> bool {
        self.spectral_rms < self.spectral_span / 8.0 && self.temporal_rms < self.temporal_span / 8.0
    }
}

/// Complex spectral amplitude nu(omega) on a grid, units (rad/s)^{-1/2}.
#[derive(Debug, Clone)]
pub struct SpectralAmplitude {
    grid: Arc<SampledGrid>,
    values: Vec<C64>,
}

impl SpectralAmplitude {
    pub fn new(grid: Arc<SampledGrid>, values: Vec<C64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SampledGrid>) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.n_points()];
        Self { grid, values }
    }

    /// Sample `f(omega_j)` over the grid.
    pub fn from_fn(grid: Arc<SampledGrid>, mut f: impl FnMut(f64) -> C64) -> Self {
        let values = grid.omegas().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SampledGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// nu(t) on the dual grid, e^{-i omega t} kernel. Preserves the
    /// quadrature norm to round-off.
    pub fn to_time(&self) -> TimeAmplitude {
        let scale = self.grid.delta_omega() / TWO_PI.sqrt();
        TimeAmplitude {
            grid: self.grid.clone(),
            values: fft::centered_forward(&self.values, scale),
        }
    }

    /// Riemann-sum inner product, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let sum: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.delta_omega())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.delta_omega()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy; a zero amplitude has none.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroAmplitude);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// |nu(omega)|^2 per bin.
    pub fn intensity(&self) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    /// Width diagnostics in both domains (one transform).
    pub fn resolution(&self) -> Resolution {
        let spectral = self.intensity().moments();
        let temporal = self.to_time().intensity().moments();
        Resolution {
            spectral_rms: spectral.map_or(0.0, |m| m.rms),
            temporal_rms: temporal.map_or(0.0, |m| m.rms),
            spectral_span: self.grid.omega_span(),
            temporal_span: self.grid.time_span(),
        }
    }
}

/// Complex time-domain amplitude nu(t) on the dual grid, units s^{-1/2}.
#[derive(Debug, Clone)]
pub struct TimeAmplitude {
    grid: Arc<SampledGrid>,
    values: Vec<C64>,
}

impl TimeAmplitude {
    pub fn new(grid: Arc<SampledGrid>, values: Vec<C64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SampledGrid>) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.n_points()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SampledGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// nu(omega), inverse of [`SpectralAmplitude::to_time`].
    pub fn to_freq(&self) -> SpectralAmplitude {
        let scale = self.grid.delta_t() / TWO_PI.sqrt();
        SpectralAmplitude {
            grid: self.grid.clone(),
            values: fft::centered_inverse(&self.values, scale),
        }
    }

    /// Riemann-sum inner product, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let sum: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.delta_t())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.delta_t()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// |nu(t)|^2 per sample.
    pub fn intensity(&self) -> TimeSeries {
        TimeSeries {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }
}

/// Real-valued samples over the time grid, e.g. a count rate n(t).
#[derive(Debug, Clone)]
pub struct TimeSeries {
    grid: Arc<SampledGrid>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: Arc<SampledGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.n_points(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<SampledGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Riemann sum with the delta_t weight.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.delta_t()
    }

    /// Mass-weighted mean and rms width; `None` when the mass vanishes.
    pub fn moments(&self) -> Option<Moments> {
        moments(self.grid.times(), &self.values)
    }
}

/// Real-valued samples over the frequency grid, e.g. an intensity spectrum.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Arc<SampledGrid>,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: Arc<SampledGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.n_points(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<SampledGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Riemann sum with the delta_omega weight.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.delta_omega()
    }

    /// Mass-weighted mean and rms width; `None` when the mass vanishes.
    pub fn moments(&self) -> Option<Moments> {
        moments(self.grid.omegas(), &self.values)
    }
}
