//! Parameter sweeps: one config, one dotted parameter path, many jobs.

use serde_json::Value;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::commands::{self, Kind};
use crate::config;
use crate::output::{write_table, Column};
use crate::{CliError, CliResult, JobArgs};

pub fn run(kind: Kind, args: &JobArgs, spec: &str) -> CliResult<String> {
    let (path, values) = parse_spec(spec)?;

    let text = std::fs::read_to_string(&args.config)?;
    let root: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad config: {e}")))?;

    // Fail fast on a config that no substitution can repair.
    let mut base_cfg = config::from_value(root.clone())?;
    let base = commands::config_base(&args.config);
    base_cfg.resolve(base);
    let out_base = commands::resolve_out_dir(args.out.as_deref(), &base_cfg);
    let format = base_cfg
        .output
        .as_ref()
        .and_then(|o| o.format)
        .unwrap_or_default();

    std::fs::create_dir_all(&out_base)?;
    write_table(
        &out_base,
        "sweep_manifest",
        format,
        &["index", "parameter", "value"],
        &[
            Column::Int((0..values.len() as i64).collect()),
            Column::Text(vec![path.clone(); values.len()]),
            Column::Float(values.clone()),
        ],
    )?;

    let jobs = values.len();
    let workers = thread_count()?.min(jobs);
    let cursor = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CliResult<String>>>> =
        Mutex::new((0..jobs).map(|_| None).collect());
    let method = args.method.as_deref();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= jobs {
                    break;
                }
                let out_dir = out_base.join(format!("sweep_{i:03}"));
                let outcome =
                    commands::run_swept(kind, &root, &path, values[i], method, base, &out_dir);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    let results = results.into_inner().unwrap();
    let mut combined = String::new();
    let mut first_err: Option<CliError> = None;
    for (i, slot) in results.into_iter().enumerate() {
        let label = format!("sweep_{i:03} ({path} = {})", values[i]);
        match slot.expect("every job index was claimed") {
            Ok(report) => {
                if !report.is_empty() {
                    combined.push_str(&format!("{label}:\n{report}"));
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(relabel(e, &label));
                } else {
                    eprintln!("error: {}", relabel(e, &label));
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(combined),
    }
}

fn relabel(e: CliError, label: &str) -> CliError {
    match e {
        CliError::Config(msg) => CliError::Config(format!("{label}: {msg}")),
        CliError::Numerical(msg) => CliError::Numerical(format!("{label}: {msg}")),
    }
}

fn thread_count() -> CliResult<usize> {
    match std::env::var("PHOTON_SHAPER_THREADS") {
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Config(format!(
                "PHOTON_SHAPER_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
        Err(e) => Err(CliError::Config(format!("PHOTON_SHAPER_THREADS: {e}"))),
    }
}

/// `cavity.gamma=0.5:2.0:4` -> ("cavity.gamma", [0.5, 1.0, 1.5, 2.0]).
fn parse_spec(spec: &str) -> CliResult<(String, Vec<f64>)> {
    let bad = || {
        CliError::Config(format!(
            "sweep spec {spec:?} must look like section.key=start:stop:count"
        ))
    };
    let (path, range) = spec.split_once('=').ok_or_else(bad)?;
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(bad());
    }
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() || count == 0 {
        return Err(bad());
    }
    let values = if count == 1 {
        vec![start]
    } else {
        (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect()
    };
    Ok((path.to_string(), values))
}

/// Substitute `value` at a dotted `path`, creating objects along the way.
/// Whole numbers are stored as JSON integers so integer-typed fields
/// (grid.n, codebook.K) stay sweepable.
pub fn set_path(root: &mut Value, path: &str, value: f64) -> CliResult<()> {
    let mut node = root;
    let segments: Vec<&str> = path.split('.').collect();
    let (last, walk) = segments.split_last().expect("path was checked nonempty");
    for seg in walk {
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("sweep path {path:?} crosses a non-object value"))
        })?;
        node = map
            .entry(seg.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let map = node.as_object_mut().ok_or_else(|| {
        CliError::Config(format!("sweep path {path:?} crosses a non-object value"))
    })?;
    let number = if value.fract() == 0.0 && value.abs() <= i64::MAX as f64 {
        serde_json::Number::from(value as i64)
    } else {
        serde_json::Number::from_f64(value).ok_or_else(|| {
            CliError::Config(format!("sweep produced a non-finite value {value}"))
        })?
    };
    map.insert(last.to_string(), Value::Number(number));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let (path, values) = parse_spec("cavity.gamma=0.5:2.0:4").unwrap();
        assert_eq!(path, "cavity.gamma");
        assert_eq!(values, vec![0.5, 1.0, 1.5, 2.0]);

        let (_, single) = parse_spec("modulation.epsilon=0.3:9.0:1").unwrap();
        assert_eq!(single, vec![0.3]);

        for bad in [
            "cavity.gamma",
            "=1:2:3",
            "a..b=1:2:3",
            "a=1:2",
            "a=1:2:3:4",
            "a=x:2:3",
            "a=1:2:0",
            "a=inf:2:3",
        ] {
            assert!(parse_spec(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn path_substitution() {
        let mut root = serde_json::json!({"grid": {"n": 64, "delta_omega": 0.1}});
        set_path(&mut root, "cavity.gamma", 1.5).unwrap();
        set_path(&mut root, "grid.n", 128.0).unwrap();
        assert_eq!(root["cavity"]["gamma"], serde_json::json!(1.5));
        assert_eq!(root["grid"]["n"], serde_json::json!(128));
        assert!(root["grid"]["n"].is_i64());

        let mut scalar = serde_json::json!({"grid": 3});
        assert!(set_path(&mut scalar, "grid.n", 1.0).is_err());
    }
}
