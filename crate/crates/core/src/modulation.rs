//! Frequency modulation of the cavity resonance while a pulse reflects.
//!
//! Two closed-form first-order spectra are provided: a single-sideband form
//! with the cavity response taken entirely at the output frequency, and a
//! two-sideband form from splitting the cosine drive into e^{-+ i Omega t}
//! halves with one response factor at the source frequency. The arbiter
//! between them is [`oracle_simulate`], a fixed-step time-domain integration
//! of the driven cavity that makes no small-signal assumption.

use num_complex::Complex64 as C64;

use crate::cavity::CavityParams;
use crate::error::{Error, Result};
use crate::grid::{SampledGrid, SpectralAmplitude, Spectrum, TimeAmplitude};
use crate::pulses::GaussianPulse;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Relative intensity below which a time sample counts as outside the pulse.
const SUPPORT_CUTOFF: f64 = 1e-12;

/// Relative photon-number drift at which an integration is rejected.
const DRIFT_LIMIT: f64 = 1e-4;

/// Cosine modulation of the cavity resonance, depth epsilon and angular
/// frequency Omega: f(t) = epsilon cos(Omega t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    depth: f64,
    frequency: f64,
}

impl ModulationParams {
    pub fn new(depth: f64, frequency: f64) -> Result<Self> {
        if !depth.is_finite() || depth < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "modulation depth = {depth} must be finite and nonnegative"
            )));
        }
        if !frequency.is_finite() || frequency <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "modulation frequency = {frequency} must be finite and positive"
            )));
        }
        Ok(Self { depth, frequency })
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Weak-drive flag: depth no more than a tenth of the cavity decay rate.
    pub fn is_perturbative(&self, cavity: &CavityParams) -> bool {
        self.depth <= cavity.gamma() / 10.0
    }
}

/// Number of grid bins spanned by the modulation frequency; errors unless
/// Omega is an integer multiple of the grid spacing.
fn sideband_bins(m: &ModulationParams, grid: &SampledGrid) -> Result<usize> {
    let ratio = m.frequency() / grid.delta_omega();
    let s = ratio.round();
    if (ratio - s).abs() > 1e-9 * ratio.max(1.0) || s < 1.0 {
        return Err(Error::OffGridFrequency {
            frequency: m.frequency(),
            delta_omega: grid.delta_omega(),
        });
    }
    Ok(s as usize)
}

fn require_resonant(p: &CavityParams) -> Result<()> {
    if p.detuning() != 0.0 {
        return Err(Error::NonzeroDetuning {
            detuning: p.detuning(),
        });
    }
    Ok(())
}

/// First-order output spectrum with a single sideband,
///
/// I(omega) = (eps gamma / (gamma^2/4 + omega^2))^2 |nu(omega - Omega)|^2 + |nu(omega)|^2,
///
/// the cavity response evaluated only at the output frequency and the full
/// cosine amplitude carried by one sideband. Kept as the simplest reference
/// form; see [`two_sideband_spectrum`] for the version that tracks the
/// integrator. Requires zero detuning and an on-grid Omega.
pub fn single_sideband_spectrum(
    p: &CavityParams,
    m: &ModulationParams,
    nu: &SpectralAmplitude,
) -> Result<Spectrum> {
    require_resonant(p)?;
    let grid = nu.grid().clone();
    let s = sideband_bins(m, &grid)?;
    let quarter = p.gamma() * p.gamma() / 4.0;
    let values = (0..grid.n_points())
        .map(|j| {
            let w = grid.omega_at(j);
            let lorentz = m.depth() * p.gamma() / (quarter + w * w);
            let shifted = if j >= s {
                nu.values()[j - s].norm_sqr()
            } else {
                0.0
            };
            lorentz * lorentz * shifted + nu.values()[j].norm_sqr()
        })
        .collect();
    Ok(Spectrum::new(grid, values).expect("spectrum matches the input grid"))
}

/// First-order output spectrum with both sidebands,
///
/// I(omega) = (eps gamma / 2)^2 [ |nu(omega - Omega)|^2 / ((gamma^2/4 + omega^2)(gamma^2/4 + (omega - Omega)^2))
///                              + |nu(omega + Omega)|^2 / ((gamma^2/4 + omega^2)(gamma^2/4 + (omega + Omega)^2)) ]
///          + |nu(omega)|^2.
///
/// Each cosine half e^{-+ i Omega t} carries weight eps/2 and scatters
/// nu(omega -+ Omega) into omega through one cavity response factor at the
/// source frequency and one at the output frequency. This is the
/// consistency-checked form: it agrees with [`oracle_simulate`] to
/// O(depth^2) for resolved pulses. Requires zero detuning and an on-grid
/// Omega.
pub fn two_sideband_spectrum(
    p: &CavityParams,
    m: &ModulationParams,
    nu: &SpectralAmplitude,
) -> Result<Spectrum> {
    require_resonant(p)?;
    let grid = nu.grid().clone();
    let s = sideband_bins(m, &grid)?;
    let quarter = p.gamma() * p.gamma() / 4.0;
    let half_drive = m.depth() * p.gamma() / 2.0;
    let n = grid.n_points();
    let values = (0..n)
        .map(|j| {
            let w = grid.omega_at(j);
            let denom_out = quarter + w * w;
            let mut acc = nu.values()[j].norm_sqr();
            if j >= s {
                let w_src = grid.omega_at(j - s);
                let denom_src = quarter + w_src * w_src;
                acc += half_drive * half_drive / (denom_out * denom_src)
                    * nu.values()[j - s].norm_sqr();
            }
            if j + s < n {
                let w_src = grid.omega_at(j + s);
                let denom_src = quarter + w_src * w_src;
                acc += half_drive * half_drive / (denom_out * denom_src)
                    * nu.values()[j + s].norm_sqr();
            }
            acc
        })
        .collect();
    Ok(Spectrum::new(grid, values).expect("spectrum matches the input grid"))
}

/// Fixed-step integration scheme; only the classic 4th-order rule exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegratorMethod {
    #[default]
    ClassicRk4,
}

/// Step size and time window for [`oracle_simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    dt: f64,
    window: (f64, f64),
    method: IntegratorMethod,
}

impl OracleConfig {
    pub fn new(dt: f64, window: (f64, f64)) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidStep(format!(
                "dt = {dt} must be finite and positive"
            )));
        }
        if !window.0.is_finite() || !window.1.is_finite() || window.1 <= window.0 {
            return Err(Error::InvalidWindow(format!(
                "window ({}, {}) must be finite with end after start",
                window.0, window.1
            )));
        }
        Ok(Self {
            dt,
            window,
            method: IntegratorMethod::ClassicRk4,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn method(&self) -> IntegratorMethod {
        self.method
    }

    /// Largest config valid for this pulse: the step sits at the stability
    /// cap and the window runs from just before the pulse to a ring-down
    /// margin of 25/gamma after it.
    pub fn for_pulse(
        p: &CavityParams,
        m: &ModulationParams,
        nu: &SpectralAmplitude,
    ) -> Result<Self> {
        let grid = nu.grid();
        let (first, last) = support(&nu.to_time()).ok_or(Error::ZeroAmplitude)?;
        let t_start = grid.time_at(first) - 5.0 / p.gamma();
        let t_end = grid.time_at(last) + 25.0 / p.gamma();
        let t_min = grid.time_at(0);
        let t_max = grid.time_at(grid.n_points() - 1);
        if t_start < t_min || t_end > t_max {
            return Err(Error::InvalidWindow(format!(
                "pulse plus ring-down needs ({t_start:.3}, {t_end:.3}) but the grid covers ({t_min:.3}, {t_max:.3})"
            )));
        }
        Self::new(step_cap(p, m, grid), (t_start, t_end))
    }
}

/// Step cap: a hundredth of the modulation period and of the cavity
/// lifetime, and a tenth of the grid spacing.
fn step_cap(p: &CavityParams, m: &ModulationParams, grid: &SampledGrid) -> f64 {
    (0.01 * TWO_PI / m.frequency())
        .min(0.01 * 2.0 / p.gamma())
        .min(0.1 * grid.delta_t())
}

/// Index range where the pulse intensity stays above `SUPPORT_CUTOFF`
/// relative to its peak; `None` for an all-zero signal.
fn support(nu_t: &TimeAmplitude) -> Option<(usize, usize)> {
    let peak = nu_t
        .values()
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let cut = peak * SUPPORT_CUTOFF;
    let first = nu_t.values().iter().position(|v| v.norm_sqr() >= cut)?;
    let last = nu_t.values().iter().rposition(|v| v.norm_sqr() >= cut)?;
    Some((first, last))
}

/// Input drive evaluated at arbitrary node times.
enum Drive<'a> {
    /// Exact closed form.
    Gaussian(&'a GaussianPulse),
    /// Band-limited interpolation of grid samples.
    Sampled(SampledDrive),
}

impl Drive<'_> {
    fn sample_nodes(&self, t0: f64, h: f64, count: usize) -> Vec<C64> {
        match self {
            Drive::Gaussian(g) => (0..count).map(|i| g.time_at(t0 + i as f64 * h)).collect(),
            Drive::Sampled(s) => s.sample_nodes(t0, h, count),
        }
    }
}

/// Truncated Fourier sum nu(t) = (2 pi)^{-1/2} sum_j nu_j e^{-i omega_j t} d omega
/// over the bins that actually carry amplitude. Node evaluation walks a
/// phasor per bin and refreshes it periodically to stop round-off creep.
struct SampledDrive {
    omegas: Vec<f64>,
    coeffs: Vec<C64>,
}

impl SampledDrive {
    fn new(nu: &SpectralAmplitude) -> Self {
        let peak = nu.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let cut = peak * 1e-14;
        let scale = nu.grid().delta_omega() / TWO_PI.sqrt();
        let mut omegas = Vec::new();
        let mut coeffs = Vec::new();
        for (j, v) in nu.values().iter().enumerate() {
            if v.norm() > cut {
                omegas.push(nu.grid().omega_at(j));
                coeffs.push(v * scale);
            }
        }
        Self { omegas, coeffs }
    }

    fn sample_nodes(&self, t0: f64, h: f64, count: usize) -> Vec<C64> {
        const REFRESH: usize = 512;
        let steps: Vec<C64> = self
            .omegas
            .iter()
            .map(|w| C64::from_polar(1.0, -w * h))
            .collect();
        let mut phasors = vec![C64::new(0.0, 0.0); self.omegas.len()];
        let mut out = Vec::with_capacity(count);
        for node in 0..count {
            if node % REFRESH == 0 {
                let t = t0 + node as f64 * h;
                for (p, w) in phasors.iter_mut().zip(&self.omegas) {
                    *p = C64::from_polar(1.0, -w * t);
                }
            }
            let mut acc = C64::new(0.0, 0.0);
            for (c, p) in self.coeffs.iter().zip(&phasors) {
                acc += c * p;
            }
            out.push(acc);
            for (p, s) in phasors.iter_mut().zip(&steps) {
                *p *= s;
            }
        }
        out
    }
}

/// Result of a time-domain run.
#[derive(Debug, Clone)]
pub struct OracleRun {
    /// Output spectral amplitude on the input grid.
    pub output: SpectralAmplitude,
    /// Output time samples (zero outside the integration window).
    pub output_time: TimeAmplitude,
    /// Photon number still inside the cavity at the end of the window.
    pub residual_excitation: f64,
    /// |norm^2(out) - norm^2(in)| / norm^2(in).
    pub conservation_residual: f64,
    /// Step actually used after snapping to divide the grid spacing.
    pub dt_effective: f64,
    pub steps: usize,
}

/// Integrate the modulated cavity driven by the sampled pulse.
///
/// The equations of motion are
///
/// d alpha/dt = -(i f(t) + i delta + gamma/2) alpha + sqrt(gamma) nu_in(t),
/// nu_out(t)  = sqrt(gamma) alpha(t) - nu_in(t),
///
/// with f(t) = depth cos(Omega t) and the cavity empty at the window start.
/// The step must respect the caps (a hundredth of the modulation period and
/// cavity lifetime, a tenth of the grid spacing) and is then snapped down so
/// grid times are hit exactly. The window must contain the pulse support and
/// extend at least 20/gamma past it; whatever excitation is still inside the
/// cavity at the end is reported, not dropped.
pub fn oracle_simulate(
    p: &CavityParams,
    m: &ModulationParams,
    nu: &SpectralAmplitude,
    cfg: &OracleConfig,
) -> Result<OracleRun> {
    run_oracle(p, m, nu, &Drive::Sampled(SampledDrive::new(nu)), cfg)
}

/// Same integration with the drive evaluated from the Gaussian closed form
/// instead of interpolating grid samples.
pub fn oracle_simulate_gaussian(
    p: &CavityParams,
    m: &ModulationParams,
    pulse: &GaussianPulse,
    grid: &std::sync::Arc<SampledGrid>,
    cfg: &OracleConfig,
) -> Result<OracleRun> {
    let nu = pulse.sampled(grid);
    run_oracle(p, m, &nu, &Drive::Gaussian(pulse), cfg)
}

fn run_oracle(
    p: &CavityParams,
    m: &ModulationParams,
    nu: &SpectralAmplitude,
    drive: &Drive,
    cfg: &OracleConfig,
) -> Result<OracleRun> {
    let grid = nu.grid().clone();
    let n = grid.n_points();
    let cap = step_cap(p, m, &grid);
    if cfg.dt() > cap * (1.0 + 1e-9) {
        return Err(Error::InvalidStep(format!(
            "dt = {:.6e} exceeds the stability cap {:.6e}",
            cfg.dt(),
            cap
        )));
    }
    // Snap the step to divide the grid spacing and the window onto grid
    // times, so output samples land on the grid without interpolation.
    let q = (grid.delta_t() / cfg.dt()).ceil().max(1.0) as usize;
    let dt = grid.delta_t() / q as f64;
    let (t_start, t_end) = cfg.window();
    let half_n = (n / 2) as f64;
    let js = (t_start / grid.delta_t() + half_n).floor();
    let je = (t_end / grid.delta_t() + half_n).ceil();
    if js < 0.0 || je > (n - 1) as f64 {
        return Err(Error::InvalidWindow(format!(
            "window ({t_start:.3}, {t_end:.3}) extends past the grid time span"
        )));
    }
    let (js, je) = (js as usize, je as usize);
    if js >= je {
        return Err(Error::InvalidWindow(format!(
            "window ({t_start:.3}, {t_end:.3}) spans no grid interval"
        )));
    }
    let nu_t = nu.to_time();
    if let Some((first, last)) = support(&nu_t) {
        if first < js {
            return Err(Error::InvalidWindow(format!(
                "pulse support begins at t = {:.3}, before the window",
                grid.time_at(first)
            )));
        }
        let need = grid.time_at(last) + 20.0 / p.gamma();
        if grid.time_at(je) < need - 1e-9 * (1.0 + need.abs()) {
            return Err(Error::InvalidWindow(format!(
                "window must reach 20/gamma past the pulse, t = {need:.3}"
            )));
        }
    }

    let steps = (je - js) * q;
    let h = dt / 2.0;
    let t0 = grid.time_at(js);
    let drive_nodes = drive.sample_nodes(t0, h, 2 * steps + 1);
    let sqrt_gamma = p.gamma().sqrt();
    let gfun = |t: f64| {
        C64::new(
            -0.5 * p.gamma(),
            -(p.detuning() + m.depth() * (m.frequency() * t).cos()),
        )
    };
    let mut alpha = C64::new(0.0, 0.0);
    let mut out = vec![C64::new(0.0, 0.0); n];
    out[js] = sqrt_gamma * alpha - drive_nodes[0];
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        let s0 = drive_nodes[2 * i];
        let sh = drive_nodes[2 * i + 1];
        let s1 = drive_nodes[2 * i + 2];
        let g0 = gfun(t);
        let gh = gfun(t + 0.5 * dt);
        let g1 = gfun(t + dt);
        let k1 = g0 * alpha + sqrt_gamma * s0;
        let k2 = gh * (alpha + 0.5 * dt * k1) + sqrt_gamma * sh;
        let k3 = gh * (alpha + 0.5 * dt * k2) + sqrt_gamma * sh;
        let k4 = g1 * (alpha + dt * k3) + sqrt_gamma * s1;
        alpha += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        if (i + 1) % q == 0 {
            out[js + (i + 1) / q] = sqrt_gamma * alpha - s1;
        }
    }

    let output_time = TimeAmplitude::new(grid, out).expect("output has grid length");
    let output = output_time.to_freq();
    let in_norm = nu.norm_sqr();
    let conservation_residual = if in_norm > 0.0 {
        (output.norm_sqr() - in_norm).abs() / in_norm
    } else {
        0.0
    };
    if !conservation_residual.is_finite() || conservation_residual > DRIFT_LIMIT {
        return Err(Error::IntegrationFailure {
            drift: conservation_residual,
            limit: DRIFT_LIMIT,
        });
    }
    Ok(OracleRun {
        output,
        output_time,
        residual_excitation: alpha.norm_sqr(),
        conservation_residual,
        dt_effective: dt,
        steps,
    })
}

/// Spectral mass integrated over windows of half-width Omega/2 around the
/// carrier and the two first sidebands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandReport {
    pub carrier_mass: f64,
    pub upper_mass: f64,
    pub lower_mass: f64,
}

/// Integrate a spectrum over [-Omega/2, Omega/2) and the same window shifted
/// to +-Omega. The windows tile without overlap; they only make sense when
/// the spectrum is much narrower than Omega, so an rms width above Omega/4
/// or windows past the grid edge are errors.
pub fn sideband_report(spectrum: &Spectrum, m: &ModulationParams) -> Result<SidebandReport> {
    let grid = spectrum.grid();
    let edge = grid.omega_span() / 2.0;
    if 1.5 * m.frequency() > edge {
        return Err(Error::SidebandWindows(format!(
            "windows reach |omega| = {:.3} but the grid ends at {:.3}",
            1.5 * m.frequency(),
            edge
        )));
    }
    if let Some(mom) = spectrum.moments() {
        if m.frequency() < 4.0 * mom.rms {
            return Err(Error::SidebandWindows(format!(
                "spectral rms width {:.3e} exceeds a quarter of Omega = {:.3e}",
                mom.rms,
                m.frequency()
            )));
        }
    }
    let half = m.frequency() / 2.0;
    let (mut carrier, mut upper, mut lower) = (0.0, 0.0, 0.0);
    for (j, w) in grid.omegas().enumerate() {
        let mass = spectrum.values()[j] * grid.delta_omega();
        if (-half..half).contains(&w) {
            carrier += mass;
        } else if (m.frequency() - half..m.frequency() + half).contains(&w) {
            upper += mass;
        } else if (-m.frequency() - half..-m.frequency() + half).contains(&w) {
            lower += mass;
        }
    }
    Ok(SidebandReport {
        carrier_mass: carrier,
        upper_mass: upper,
        lower_mass: lower,
    })
}
