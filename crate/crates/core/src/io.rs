//! Plain-text serialization of spectral amplitudes and codebooks.
//!
//! The state format is four sections of comma-separated text:
//!
//! ```text
//! n,delta_omega
//! 512,0.0125
//! index,re,im
//! 0,0,0
//! ...
//! ```
//!
//! A codebook file starts with `k,n,delta_omega` and then holds one
//! `index,re,im` block per signal. Numbers are written with enough digits
//! to reproduce the exact binary value on parse.

use num_complex::Complex64 as C64;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::codes::CodeBook;
use crate::error::{Error, Result};
use crate::grid::{SampledGrid, SpectralAmplitude};

/// Shortest decimal string that parses back to exactly `x`.
///
/// Plain notation for moderate magnitudes, exponent notation outside
/// [1e-4, 1e16). Zero keeps its sign. The output is also a valid JSON
/// number except for the bare `-0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".to_string()
        } else {
            "0".to_string()
        };
    }
    let a = x.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_state<W: Write>(mut w: W, nu: &SpectralAmplitude) -> Result<()> {
    let grid = nu.grid();
    writeln!(w, "n,delta_omega")?;
    writeln!(
        w,
        "{},{}",
        grid.n_points(),
        format_float(grid.delta_omega())
    )?;
    write_signal_block(&mut w, nu)?;
    Ok(())
}

pub fn read_state<R: BufRead>(r: R) -> Result<SpectralAmplitude> {
    let mut lines = Lines::new(r);
    expect_literal(&mut lines, "n,delta_omega")?;
    let line = lines.next()?;
    let fields = split_fields(&line, 2, lines.num)?;
    let n = parse_usize(fields[0], lines.num)?;
    let delta_omega = parse_f64(fields[1], lines.num)?;
    let grid = SampledGrid::new(n, delta_omega)?;
    let values = read_signal_block(&mut lines, &grid)?;
    lines.finish()?;
    SpectralAmplitude::new(grid, values)
}

pub fn write_codebook<W: Write>(mut w: W, book: &CodeBook) -> Result<()> {
    let grid = book.grid();
    writeln!(w, "k,n,delta_omega")?;
    writeln!(
        w,
        "{},{},{}",
        book.len(),
        grid.n_points(),
        format_float(grid.delta_omega())
    )?;
    for signal in book.signals() {
        write_signal_block(&mut w, signal)?;
    }
    Ok(())
}

/// Reads the signals and rebuilds the codebook, re-checking orthonormality.
pub fn read_codebook<R: BufRead>(r: R) -> Result<CodeBook> {
    let mut lines = Lines::new(r);
    expect_literal(&mut lines, "k,n,delta_omega")?;
    let line = lines.next()?;
    let fields = split_fields(&line, 3, lines.num)?;
    let k = parse_usize(fields[0], lines.num)?;
    let n = parse_usize(fields[1], lines.num)?;
    let delta_omega = parse_f64(fields[2], lines.num)?;
    if k == 0 {
        return Err(Error::Parse(format!(
            "line {}: a codebook needs at least one signal",
            lines.num
        )));
    }
    let grid = SampledGrid::new(n, delta_omega)?;
    let mut signals = Vec::with_capacity(k);
    for _ in 0..k {
        let values = read_signal_block(&mut lines, &grid)?;
        signals.push(SpectralAmplitude::new(grid.clone(), values)?);
    }
    lines.finish()?;
    CodeBook::from_signals(signals)
}

pub fn write_state_path<P: AsRef<Path>>(path: P, nu: &SpectralAmplitude) -> Result<()> {
    write_state(BufWriter::new(File::create(path)?), nu)
}

pub fn read_state_path<P: AsRef<Path>>(path: P) -> Result<SpectralAmplitude> {
    read_state(BufReader::new(File::open(path)?))
}

pub fn write_codebook_path<P: AsRef<Path>>(path: P, book: &CodeBook) -> Result<()> {
    write_codebook(BufWriter::new(File::create(path)?), book)
}

pub fn read_codebook_path<P: AsRef<Path>>(path: P) -> Result<CodeBook> {
    read_codebook(BufReader::new(File::open(path)?))
}

fn write_signal_block<W: Write>(w: &mut W, nu: &SpectralAmplitude) -> Result<()> {
    writeln!(w, "index,re,im")?;
    for (j, v) in nu.values().iter().enumerate() {
        writeln!(w, "{},{},{}", j, format_float(v.re), format_float(v.im))?;
    }
    Ok(())
}

fn read_signal_block<R: BufRead>(lines: &mut Lines<R>, grid: &Arc<SampledGrid>) -> Result<Vec<C64>> {
    expect_literal(lines, "index,re,im")?;
    let mut values = Vec::with_capacity(grid.n_points());
    for j in 0..grid.n_points() {
        let line = lines.next()?;
        let fields = split_fields(&line, 3, lines.num)?;
        let index = parse_usize(fields[0], lines.num)?;
        if index != j {
            return Err(Error::Parse(format!(
                "line {}: expected index {j}, found {index}",
                lines.num
            )));
        }
        values.push(C64::new(
            parse_f64(fields[1], lines.num)?,
            parse_f64(fields[2], lines.num)?,
        ));
    }
    Ok(values)
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    num: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines(),
            num: 0,
        }
    }

    fn next(&mut self) -> Result<String> {
        self.num += 1;
        match self.inner.next() {
            Some(Ok(l)) => Ok(l.trim_end_matches('\r').to_string()),
            Some(Err(e)) => Err(Error::Io(e)),
            None => Err(Error::Parse(format!(
                "line {}: unexpected end of file",
                self.num
            ))),
        }
    }

    /// Only blank lines may remain.
    fn finish(&mut self) -> Result<()> {
        loop {
            self.num += 1;
            match self.inner.next() {
                Some(Ok(l)) if l.trim().is_empty() => continue,
                Some(Ok(_)) => {
                    return Err(Error::Parse(format!(
                        "line {}: trailing content after the data",
                        self.num
                    )))
                }
                Some(Err(e)) => return Err(Error::Io(e)),
                None => return Ok(()),
            }
        }
    }
}

fn expect_literal<R: BufRead>(lines: &mut Lines<R>, literal: &str) -> Result<()> {
    let line = lines.next()?;
    if line.trim() != literal {
        return Err(Error::Parse(format!(
            "line {}: expected {literal:?}, found {line:?}",
            lines.num
        )));
    }
    Ok(())
}

fn split_fields(line: &str, want: usize, num: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != want {
        return Err(Error::Parse(format!(
            "line {num}: expected {want} comma-separated fields, found {}",
            fields.len()
        )));
    }
    Ok(fields)
}

fn parse_usize(s: &str, num: usize) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {num}: bad integer {s:?}")))
}

fn parse_f64(s: &str, num: usize) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {num}: bad number {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("line {num}: non-finite number {s:?}")));
    }
    Ok(x)
}
