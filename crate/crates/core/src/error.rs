use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value count {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("operands are sampled on different grids")]
    GridMismatch,

    #[error("zero amplitude has no normalized form")]
    ZeroAmplitude,

    #[error("amplitude norm^2 = {norm_sqr} is not 1 within {tolerance}")]
    NotNormalized { norm_sqr: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modulation frequency {frequency} is not an integer multiple of the grid spacing {delta_omega}")]
    OffGridFrequency { frequency: f64, delta_omega: f64 },

    #[error("sideband spectra require zero cavity detuning, got {detuning}")]
    NonzeroDetuning { detuning: f64 },

    #[error("distribution has zero mass")]
    ZeroMass,

    #[error("sideband windows are not separable: {0}")]
    SidebandWindows(String),

    #[error("invalid integration window: {0}")]
    InvalidWindow(String),

    #[error("invalid integration step: {0}")]
    InvalidStep(String),

    #[error("integration failed: photon-number drift {drift:.3e} exceeds {limit:.3e}")]
    IntegrationFailure { drift: f64, limit: f64 },

    #[error("code signals are rank deficient: smallest Gram eigenvalue {smallest:.3e}")]
    RankDeficient { smallest: f64 },

    #[error("signals are not orthonormal: Gram entry ({row},{col}) is off by {deviation:.3e}")]
    NotOrthonormal { row: usize, col: usize, deviation: f64 },

    #[error("time bin {index} contains no grid samples")]
    EmptyTimeBin { index: usize },

    #[error("symbol vector has no bits set")]
    EmptySymbol,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Parse(String),
}
