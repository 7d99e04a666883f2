//! The four experiment families behind the subcommands.

use num_complex::Complex64 as C64;
use photon_shaper_core::{
    io, oracle_simulate, oracle_simulate_gaussian, pulse_stats, sideband_report,
    single_sideband_spectrum, two_sideband_spectrum, CavityParams, CodeBook, GaussianPulse,
    ModulationParams, OracleConfig, SampledGrid, SidebandReport, SpectralAmplitude, Spectrum,
    SymbolVector,
};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::config::{
    self, CodeAction, CodebookKind, FmMethod, OutputFormat, PulseShape, RawConfig,
};
use crate::output::{check_intensity, write_table, Column};
use crate::{CliError, CliResult, JobArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Pulse,
    Cavity,
    Fm,
    Code,
}

pub fn run_single(kind: Kind, args: &JobArgs) -> CliResult<String> {
    let mut cfg = config::load(&args.config)?;
    cfg.resolve(config_base(&args.config));
    let out_dir = resolve_out_dir(args.out.as_deref(), &cfg);
    run_job(kind, &cfg, args.method.as_deref(), &out_dir)
}

pub fn config_base(config_path: &Path) -> &Path {
    let parent = config_path.parent().unwrap_or(Path::new(""));
    if parent.as_os_str().is_empty() {
        Path::new(".")
    } else {
        parent
    }
}

pub fn resolve_out_dir(flag: Option<&Path>, cfg: &RawConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.as_ref().and_then(|o| o.path.clone()))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn run_job(
    kind: Kind,
    cfg: &RawConfig,
    method: Option<&str>,
    out_dir: &Path,
) -> CliResult<String> {
    std::fs::create_dir_all(out_dir)?;
    let format = cfg
        .output
        .as_ref()
        .and_then(|o| o.format)
        .unwrap_or_default();
    match kind {
        Kind::Pulse => {
            reject_method(method, "pulse")?;
            cmd_pulse(cfg, out_dir, format)
        }
        Kind::Cavity => {
            reject_method(method, "cavity")?;
            cmd_cavity(cfg, out_dir, format)
        }
        Kind::Fm => cmd_fm(cfg, method, out_dir, format),
        Kind::Code => cmd_code(cfg, method, out_dir, format),
    }
}

fn reject_method(method: Option<&str>, name: &str) -> CliResult<()> {
    if method.is_some() {
        return Err(CliError::Config(format!(
            "the {name} command does not take --method"
        )));
    }
    Ok(())
}

fn section<'a, T>(field: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    field.as_ref().ok_or_else(|| {
        CliError::Config(format!("the config needs a {name:?} section for this command"))
    })
}

fn build_grid(cfg: &RawConfig) -> CliResult<Arc<SampledGrid>> {
    Ok(SampledGrid::new(cfg.grid.n, cfg.grid.delta_omega)?)
}

struct PulseInput {
    nu: SpectralAmplitude,
    gaussian: Option<GaussianPulse>,
}

fn build_pulse(cfg: &RawConfig, grid: &Arc<SampledGrid>) -> CliResult<PulseInput> {
    let section = section(&cfg.pulse, "pulse")?;
    let input = match section.shape {
        PulseShape::Gaussian => {
            if section.file.is_some() {
                return Err(CliError::Config(
                    "pulse.file only applies to shape = custom-file".into(),
                ));
            }
            let sigma = section
                .sigma
                .ok_or_else(|| CliError::Config("pulse.sigma is required for gaussian".into()))?;
            let pulse = GaussianPulse::new(sigma, section.center.unwrap_or(0.0))?;
            PulseInput {
                nu: pulse.sampled(grid),
                gaussian: Some(pulse),
            }
        }
        PulseShape::CustomFile => {
            if section.sigma.is_some() || section.center.is_some() {
                return Err(CliError::Config(
                    "pulse.sigma and pulse.center only apply to shape = gaussian".into(),
                ));
            }
            let path = section.file.as_ref().ok_or_else(|| {
                CliError::Config("pulse.file is required for custom-file".into())
            })?;
            let raw = io::read_state_path(path)?;
            if !raw.grid().compatible(grid) {
                return Err(CliError::Config(format!(
                    "state file {} uses a different grid than the config",
                    path.display()
                )));
            }
            // Re-anchor on the config grid and normalize; an all-zero file
            // is a config error.
            let values = raw.values().to_vec();
            let nu = SpectralAmplitude::new(grid.clone(), values)?.normalized()?;
            PulseInput { nu, gaussian: None }
        }
    };
    let r = input.nu.resolution();
    if !r.well_resolved() {
        eprintln!(
            "warning: pulse is poorly resolved on this grid \
             (spectral rms {:.3e} of span {:.3e}, temporal rms {:.3e} of span {:.3e})",
            r.spectral_rms, r.spectral_span, r.temporal_rms, r.temporal_span
        );
    }
    Ok(input)
}

fn build_cavity(cfg: &RawConfig) -> CliResult<CavityParams> {
    let s = section(&cfg.cavity, "cavity")?;
    Ok(CavityParams::new(s.gamma, s.delta)?)
}

fn build_modulation(cfg: &RawConfig) -> CliResult<ModulationParams> {
    let s = section(&cfg.modulation, "modulation")?;
    Ok(ModulationParams::new(s.epsilon, s.big_omega)?)
}

fn cmd_pulse(cfg: &RawConfig, out: &Path, format: OutputFormat) -> CliResult<String> {
    let grid = build_grid(cfg)?;
    let input = build_pulse(cfg, &grid)?;
    let in_time = input.nu.to_time();
    let rate = in_time.intensity();
    check_intensity("n", rate.values(), grid.delta_t(), in_time.norm_sqr())?;
    write_table(
        out,
        "pulse_time",
        format,
        &["t", "re_nu", "im_nu", "n"],
        &[
            Column::Float(grid.times().collect()),
            Column::Float(in_time.values().iter().map(|v| v.re).collect()),
            Column::Float(in_time.values().iter().map(|v| v.im).collect()),
            Column::Float(rate.values().to_vec()),
        ],
    )?;
    let spectrum = input.nu.intensity();
    check_intensity(
        "intensity",
        spectrum.values(),
        grid.delta_omega(),
        input.nu.norm_sqr(),
    )?;
    write_table(
        out,
        "pulse_spectrum",
        format,
        &["omega", "intensity"],
        &[
            Column::Float(grid.omegas().collect()),
            Column::Float(spectrum.values().to_vec()),
        ],
    )?;
    Ok(String::new())
}

fn cmd_cavity(cfg: &RawConfig, out: &Path, format: OutputFormat) -> CliResult<String> {
    let grid = build_grid(cfg)?;
    let input = build_pulse(cfg, &grid)?;
    let cavity = build_cavity(cfg)?;
    let reflected = cavity.apply(&input.nu);

    let drift = (reflected.norm_sqr() - input.nu.norm_sqr()).abs()
        / input.nu.norm_sqr().max(f64::MIN_POSITIVE);
    if drift > 1e-6 {
        return Err(CliError::Numerical(format!(
            "reflection changed the photon number by {drift:e}"
        )));
    }

    let time_in = input.nu.to_time();
    let time_out = reflected.to_time();
    let (rate_in, rate_out) = (time_in.intensity(), time_out.intensity());
    check_intensity("n_in", rate_in.values(), grid.delta_t(), time_in.norm_sqr())?;
    check_intensity("n_out", rate_out.values(), grid.delta_t(), time_out.norm_sqr())?;
    write_table(
        out,
        "cavity_time",
        format,
        &["t", "n_in", "n_out"],
        &[
            Column::Float(grid.times().collect()),
            Column::Float(rate_in.values().to_vec()),
            Column::Float(rate_out.values().to_vec()),
        ],
    )?;

    let (spec_in, spec_out) = (input.nu.intensity(), reflected.intensity());
    check_intensity(
        "intensity_in",
        spec_in.values(),
        grid.delta_omega(),
        input.nu.norm_sqr(),
    )?;
    check_intensity(
        "intensity_out",
        spec_out.values(),
        grid.delta_omega(),
        reflected.norm_sqr(),
    )?;
    write_table(
        out,
        "cavity_spectrum",
        format,
        &["omega", "intensity_in", "intensity_out"],
        &[
            Column::Float(grid.omegas().collect()),
            Column::Float(spec_in.values().to_vec()),
            Column::Float(spec_out.values().to_vec()),
        ],
    )?;

    let before = pulse_stats(&rate_in)?;
    let after = pulse_stats(&rate_out)?;
    write_table(
        out,
        "cavity_stats",
        format,
        &[
            "mean_time_in",
            "rms_width_in",
            "mean_time_out",
            "rms_width_out",
            "delay",
            "broadening",
        ],
        &[
            Column::Float(vec![before.mean_time]),
            Column::Float(vec![before.rms_width]),
            Column::Float(vec![after.mean_time]),
            Column::Float(vec![after.rms_width]),
            Column::Float(vec![after.mean_time - before.mean_time]),
            Column::Float(vec![after.rms_width - before.rms_width]),
        ],
    )?;
    Ok(String::new())
}

fn cmd_fm(
    cfg: &RawConfig,
    method_flag: Option<&str>,
    out: &Path,
    format: OutputFormat,
) -> CliResult<String> {
    let grid = build_grid(cfg)?;
    let input = build_pulse(cfg, &grid)?;
    let cavity = build_cavity(cfg)?;
    let modulation = build_modulation(cfg)?;
    let mod_section = section(&cfg.modulation, "modulation")?;
    let method = match method_flag {
        Some(s) => FmMethod::parse(s)?,
        None => mod_section.method.unwrap_or(FmMethod::TwoSideband),
    };

    let (spectrum, oracle_extra): (Spectrum, Option<(f64, f64)>) = match method {
        FmMethod::SingleSideband => (
            single_sideband_spectrum(&cavity, &modulation, &input.nu)?,
            None,
        ),
        FmMethod::TwoSideband => (
            two_sideband_spectrum(&cavity, &modulation, &input.nu)?,
            None,
        ),
        FmMethod::Oracle => {
            let auto = OracleConfig::for_pulse(&cavity, &modulation, &input.nu)?;
            let run_cfg = match &mod_section.oracle {
                Some(o) => OracleConfig::new(
                    o.dt.unwrap_or_else(|| auto.dt()),
                    o.window
                        .map(|w| (w[0], w[1]))
                        .unwrap_or_else(|| auto.window()),
                )?,
                None => auto,
            };
            let run = match &input.gaussian {
                Some(pulse) => {
                    oracle_simulate_gaussian(&cavity, &modulation, pulse, &grid, &run_cfg)?
                }
                None => oracle_simulate(&cavity, &modulation, &input.nu, &run_cfg)?,
            };
            (
                run.output.intensity(),
                Some((run.conservation_residual, run.residual_excitation)),
            )
        }
    };

    check_intensity(
        "intensity",
        spectrum.values(),
        grid.delta_omega(),
        spectrum.integral(),
    )?;
    write_table(
        out,
        "fm_spectrum",
        format,
        &["omega", "intensity"],
        &[
            Column::Float(grid.omegas().collect()),
            Column::Float(spectrum.values().to_vec()),
        ],
    )?;

    let report: SidebandReport = sideband_report(&spectrum, &modulation)?;
    let mut headers = vec!["carrier_mass", "upper_mass", "lower_mass"];
    let mut columns = vec![
        Column::Float(vec![report.carrier_mass]),
        Column::Float(vec![report.upper_mass]),
        Column::Float(vec![report.lower_mass]),
    ];
    if let Some((residual, excitation)) = oracle_extra {
        headers.push("conservation_residual");
        headers.push("residual_excitation");
        columns.push(Column::Float(vec![residual]));
        columns.push(Column::Float(vec![excitation]));
    }
    write_table(out, "fm_report", format, &headers, &columns)?;
    Ok(String::new())
}

fn build_codebook(cfg: &RawConfig, grid: &Arc<SampledGrid>) -> CliResult<CodeBook> {
    let s = section(&cfg.codebook, "codebook")?;
    match s.kind {
        CodebookKind::Timebin => {
            if s.file.is_some() {
                return Err(CliError::Config(
                    "codebook.file only applies to kind = file".into(),
                ));
            }
            let k = s
                .k
                .ok_or_else(|| CliError::Config("codebook.K is required for timebin".into()))?;
            let width = s.bin_width.ok_or_else(|| {
                CliError::Config("codebook.bin_width is required for timebin".into())
            })?;
            Ok(CodeBook::timebin(grid, k, width)?)
        }
        CodebookKind::File => {
            if s.k.is_some() || s.bin_width.is_some() {
                return Err(CliError::Config(
                    "codebook.K and codebook.bin_width only apply to kind = timebin".into(),
                ));
            }
            let path = s.file.as_ref().ok_or_else(|| {
                CliError::Config("codebook.file is required for kind = file".into())
            })?;
            let book = io::read_codebook_path(path)?;
            if !book.grid().compatible(grid) {
                return Err(CliError::Config(format!(
                    "codebook file {} uses a different grid than the config",
                    path.display()
                )));
            }
            Ok(book)
        }
    }
}

fn parse_bits(text: &str, k: usize) -> CliResult<SymbolVector> {
    if text.len() != k {
        return Err(CliError::Config(format!(
            "code.bits {text:?} must hold exactly {k} characters"
        )));
    }
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CliError::Config(format!(
                "code.bits may only contain 0 and 1, found {other:?}"
            ))),
        })
        .collect::<CliResult<Vec<bool>>>()?;
    Ok(SymbolVector::new(bits)?)
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn cmd_code(
    cfg: &RawConfig,
    method_flag: Option<&str>,
    out: &Path,
    format: OutputFormat,
) -> CliResult<String> {
    let grid = build_grid(cfg)?;
    let book = build_codebook(cfg, &grid)?;
    let code_section = cfg.code.as_ref();
    let action = match method_flag {
        Some(s) => CodeAction::parse(s)?,
        None => code_section
            .and_then(|c| c.action)
            .unwrap_or(CodeAction::Roundtrip),
    };
    let threshold = code_section.and_then(|c| c.threshold).unwrap_or(0.5);
    io::write_codebook_path(out.join("codebook.txt"), &book)?;

    match action {
        CodeAction::Encode => {
            let bits = code_section.and_then(|c| c.bits.as_deref()).ok_or_else(|| {
                CliError::Config("code.bits is required for the encode action".into())
            })?;
            let symbol = parse_bits(bits, book.len())?;
            let state = book.encode(&symbol)?;
            io::write_state_path(out.join("code_encoded.txt"), state.amplitude())?;
            Ok(String::new())
        }
        CodeAction::Decode => {
            let path = code_section.and_then(|c| c.input.as_ref()).ok_or_else(|| {
                CliError::Config("code.input is required for the decode action".into())
            })?;
            let raw = io::read_state_path(path)?;
            if !raw.grid().compatible(&grid) {
                return Err(CliError::Config(format!(
                    "state file {} uses a different grid than the config",
                    path.display()
                )));
            }
            let nu = SpectralAmplitude::new(grid.clone(), raw.values().to_vec())?;
            let decoded = book.decode(&nu, threshold)?;
            write_table(
                out,
                "code_decode",
                format,
                &["k", "re_overlap", "im_overlap", "power", "bit"],
                &[
                    Column::Int((0..book.len() as i64).collect()),
                    Column::Float(decoded.overlaps.iter().map(|c| c.re).collect()),
                    Column::Float(decoded.overlaps.iter().map(|c| c.im).collect()),
                    Column::Float(decoded.overlaps.iter().map(C64::norm_sqr).collect()),
                    Column::Bool(decoded.bits.clone()),
                ],
            )?;
            Ok(format!("decoded bits: {}\n", bits_string(&decoded.bits)))
        }
        CodeAction::Roundtrip => {
            let k = book.len();
            if k > 12 {
                return Err(CliError::Config(format!(
                    "roundtrip sweeps all 2^K - 1 symbols; K = {k} is past the cap of 12"
                )));
            }
            let mut labels = Vec::new();
            let mut passes = Vec::new();
            let mut report = String::new();
            let mut good = 0usize;
            for mask in 1..(1u32 << k) {
                let symbol = SymbolVector::from_mask(mask, k)?;
                let state = book.encode(&symbol)?;
                let decoded = book.decode(state.amplitude(), threshold)?;
                let pass = decoded.bits == symbol.bits();
                good += pass as usize;
                let label = bits_string(symbol.bits());
                report.push_str(&format!(
                    "bits {label}: {}\n",
                    if pass { "pass" } else { "fail" }
                ));
                labels.push(label);
                passes.push(pass);
            }
            let total = labels.len();
            report.push_str(&format!("{good}/{total} pass\n"));
            write_table(
                out,
                "code_roundtrip",
                format,
                &["bits", "pass"],
                &[Column::Text(labels), Column::Bool(passes)],
            )?;
            Ok(report)
        }
        CodeAction::Crosstalk => {
            let cavity = build_cavity(cfg)?;
            let m = book.crosstalk(&cavity);
            let k = book.len();
            let mut rows = Vec::with_capacity(k * k);
            let mut cols = Vec::with_capacity(k * k);
            let mut re = Vec::with_capacity(k * k);
            let mut im = Vec::with_capacity(k * k);
            for r in 0..k {
                for c in 0..k {
                    rows.push(r as i64);
                    cols.push(c as i64);
                    re.push(m.get(r, c).re);
                    im.push(m.get(r, c).im);
                }
            }
            write_table(
                out,
                "code_crosstalk",
                format,
                &["row", "col", "re", "im"],
                &[
                    Column::Int(rows),
                    Column::Int(cols),
                    Column::Float(re),
                    Column::Float(im),
                ],
            )?;
            Ok(String::new())
        }
    }
}

// Sweep support: run one job with a value substituted into the raw JSON.
pub fn run_swept(
    kind: Kind,
    root: &serde_json::Value,
    path: &str,
    value: f64,
    method: Option<&str>,
    base: &Path,
    out_dir: &Path,
) -> CliResult<String> {
    let mut copy = root.clone();
    crate::sweep::set_path(&mut copy, path, value)?;
    let mut cfg = config::from_value(copy)?;
    cfg.resolve(base);
    run_job(kind, &cfg, method, out_dir)
}
