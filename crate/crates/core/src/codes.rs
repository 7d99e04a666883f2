//! Orthonormal signal sets and the bit patterns they carry.
//!
//! A codebook is K orthonormal spectral amplitudes on one grid. Encoding
//! superposes the signals selected by a bit pattern into a normalized
//! single-photon amplitude; decoding projects back onto the signals and
//! thresholds the powers. Crosstalk under a cavity reflection is the matrix
//! of projections of the filtered signals back onto the codebook.

use num_complex::Complex64 as C64;

use crate::cavity::CavityParams;
use crate::error::{Error, Result};
use crate::grid::{SampledGrid, SpectralAmplitude};
use crate::states::SinglePhotonState;
use std::sync::Arc;

/// Gram deviation from the identity accepted by [`CodeBook::from_signals`].
const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

/// Smallest normalized-Gram eigenvalue accepted by
/// [`CodeBook::orthonormalize`].
const RANK_TOLERANCE: f64 = 1e-8;

/// Bit pattern of length K with at least one bit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolVector {
    bits: Vec<bool>,
}

impl SymbolVector {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.iter().any(|&b| b) {
            return Err(Error::EmptySymbol);
        }
        Ok(Self { bits })
    }

    /// Low bit of `mask` becomes bit 0.
    pub fn from_mask(mask: u32, k: usize) -> Result<Self> {
        if k == 0 || k > 32 {
            return Err(Error::InvalidParameter(format!(
                "symbol length {k} must be between 1 and 32"
            )));
        }
        Self::new((0..k).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn set_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Projections of a state onto the codebook and the thresholded read-out.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub overlaps: Vec<C64>,
    pub bits: Vec<bool>,
}

/// K x K complex matrix of filtered-signal projections, row major.
#[derive(Debug, Clone)]
pub struct CrosstalkMatrix {
    order: usize,
    entries: Vec<C64>,
}

impl CrosstalkMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        assert!(row < self.order && col < self.order);
        self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Euclidean norm of one column. Columns are projections of unit
    /// vectors, so this never exceeds 1 beyond round-off; it reaches 1 only
    /// when the filtered signal stays inside the codebook span.
    pub fn column_norm(&self, col: usize) -> f64 {
        (0..self.order)
            .map(|r| self.get(r, col).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation from the identity.
    pub fn max_identity_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.order {
            for c in 0..self.order {
                let want = if r == c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((self.get(r, c) - want).norm());
            }
        }
        worst
    }
}

/// K orthonormal signals on a shared grid.
#[derive(Debug, Clone)]
pub struct CodeBook {
    signals: Vec<SpectralAmplitude>,
}

impl CodeBook {
    /// Accepts the signals as-is after checking pairwise orthonormality.
    pub fn from_signals(signals: Vec<SpectralAmplitude>) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::InvalidParameter(
                "a codebook needs at least one signal".into(),
            ));
        }
        let grid = signals[0].grid().clone();
        for s in &signals[1..] {
            if !grid.compatible(s.grid()) {
                return Err(Error::GridMismatch);
            }
        }
        for (r, a) in signals.iter().enumerate() {
            for (c, b) in signals.iter().enumerate().skip(r) {
                let want = if r == c { 1.0 } else { 0.0 };
                let dev = (a.inner_product(b)? - want).norm();
                if dev > ORTHONORMAL_TOLERANCE {
                    return Err(Error::NotOrthonormal {
                        row: r,
                        col: c,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self { signals })
    }

    /// K rectangular pulses of width `bin_width`, tiling
    /// [-K w/2, K w/2) in time. Disjoint supports make the Gram matrix the
    /// identity up to round-off. Fails if the tiling exceeds the grid span
    /// or a bin is too narrow to catch a sample.
    pub fn timebin(grid: &Arc<SampledGrid>, k: usize, bin_width: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "a codebook needs at least one time bin".into(),
            ));
        }
        if !bin_width.is_finite() || bin_width <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bin width {bin_width} must be finite and positive"
            )));
        }
        let total = k as f64 * bin_width;
        if total > grid.time_span() {
            return Err(Error::InvalidParameter(format!(
                "{k} bins of width {bin_width} span {total:.3}, more than the grid covers"
            )));
        }
        let start = -total / 2.0;
        let height = 1.0 / bin_width.sqrt();
        let mut time_signals = vec![vec![C64::new(0.0, 0.0); grid.n_points()]; k];
        for (j, t) in grid.times().enumerate() {
            let idx = ((t - start) / bin_width).floor();
            if idx >= 0.0 && idx < k as f64 {
                time_signals[idx as usize][j] = C64::new(height, 0.0);
            }
        }
        let mut signals = Vec::with_capacity(k);
        for (idx, values) in time_signals.into_iter().enumerate() {
            let raw = crate::grid::TimeAmplitude::new(grid.clone(), values)
                .expect("bin signal has grid length");
            let signal = raw
                .to_freq()
                .normalized()
                .map_err(|_| Error::EmptyTimeBin { index: idx })?;
            signals.push(signal);
        }
        Self::from_signals(signals)
    }

    /// Gram-Schmidt with a second orthogonalization pass. Inputs are
    /// normalized first, so only their directions matter; linear dependence
    /// is detected beforehand from the smallest eigenvalue of the
    /// normalized Gram matrix. The phase is fixed by making the first
    /// appreciable component of each output real and positive.
    pub fn orthonormalize(signals: &[SpectralAmplitude]) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::InvalidParameter(
                "a codebook needs at least one signal".into(),
            ));
        }
        let grid = signals[0].grid().clone();
        let mut unit = Vec::with_capacity(signals.len());
        for s in signals {
            if !grid.compatible(s.grid()) {
                return Err(Error::GridMismatch);
            }
            unit.push(s.normalized()?);
        }
        let k = unit.len();
        let mut gram = vec![vec![C64::new(0.0, 0.0); k]; k];
        for r in 0..k {
            for c in 0..k {
                gram[r][c] = unit[r].inner_product(&unit[c])?;
            }
        }
        let eigs = hermitian_eigenvalues(gram);
        let smallest = eigs[0];
        if smallest <= RANK_TOLERANCE {
            return Err(Error::RankDeficient { smallest });
        }
        let mut basis: Vec<SpectralAmplitude> = Vec::with_capacity(k);
        for v in &unit {
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.inner_product(&w)?;
                    w = axpy(&w, -c, b);
                }
            }
            basis.push(fix_phase(&w.normalized()?));
        }
        Self::from_signals(basis)
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn grid(&self) -> &Arc<SampledGrid> {
        self.signals[0].grid()
    }

    pub fn signal(&self, k: usize) -> &SpectralAmplitude {
        &self.signals[k]
    }

    pub fn signals(&self) -> &[SpectralAmplitude] {
        &self.signals
    }

    /// Pairwise inner products, row major.
    pub fn gram(&self) -> Vec<C64> {
        let k = self.len();
        let mut out = Vec::with_capacity(k * k);
        for r in 0..k {
            for c in 0..k {
                out.push(
                    self.signals[r]
                        .inner_product(&self.signals[c])
                        .expect("signals share a grid"),
                );
            }
        }
        out
    }

    /// Equal-weight superposition of the selected signals,
    /// sum_k b_k beta_k / sqrt(count).
    pub fn encode(&self, symbol: &SymbolVector) -> Result<SinglePhotonState> {
        if symbol.len() != self.len() {
            return Err(Error::LengthMismatch {
                got: symbol.len(),
                expected: self.len(),
            });
        }
        let weight = C64::new(1.0 / (symbol.set_count() as f64).sqrt(), 0.0);
        let mut values = vec![C64::new(0.0, 0.0); self.grid().n_points()];
        for (bit, signal) in symbol.bits().iter().zip(&self.signals) {
            if *bit {
                for (v, s) in values.iter_mut().zip(signal.values()) {
                    *v += weight * s;
                }
            }
        }
        let nu = SpectralAmplitude::new(self.grid().clone(), values)?;
        SinglePhotonState::new(nu)
    }

    /// Project onto every signal and set the bits whose power reaches
    /// `threshold` times the largest power. The threshold must lie strictly
    /// between 0 and 1. A state with no overlap at all decodes to all
    /// zeros.
    pub fn decode(&self, nu: &SpectralAmplitude, threshold: f64) -> Result<Decoded> {
        if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "decode threshold {threshold} must lie strictly between 0 and 1"
            )));
        }
        let overlaps = self
            .signals
            .iter()
            .map(|s| s.inner_product(nu))
            .collect::<Result<Vec<_>>>()?;
        let powers: Vec<f64> = overlaps.iter().map(|c| c.norm_sqr()).collect();
        let peak = powers.iter().cloned().fold(0.0, f64::max);
        let bits = if peak == 0.0 {
            vec![false; self.len()]
        } else {
            powers.iter().map(|&p| p >= threshold * peak).collect()
        };
        Ok(Decoded { overlaps, bits })
    }

    /// M[r][c] = <beta_r, H beta_c> for the cavity reflection H.
    pub fn crosstalk(&self, cavity: &CavityParams) -> CrosstalkMatrix {
        let k = self.len();
        let mut entries = vec![C64::new(0.0, 0.0); k * k];
        for c in 0..k {
            let filtered = cavity.apply(&self.signals[c]);
            for r in 0..k {
                entries[r * k + c] = self.signals[r]
                    .inner_product(&filtered)
                    .expect("filtered signal stays on the grid");
            }
        }
        CrosstalkMatrix { order: k, entries }
    }
}

fn axpy(w: &SpectralAmplitude, c: C64, b: &SpectralAmplitude) -> SpectralAmplitude {
    let values = w
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x + c * y)
        .collect();
    SpectralAmplitude::new(w.grid().clone(), values).expect("operands share a grid")
}

/// Rotate a global phase so the first component above 1e-12 of the peak
/// modulus is real and positive.
fn fix_phase(v: &SpectralAmplitude) -> SpectralAmplitude {
    let peak = v.values().iter().map(|x| x.norm()).fold(0.0, f64::max);
    let lead = v.values().iter().find(|x| x.norm() > 1e-12 * peak);
    match lead {
        Some(x) if x.norm() > 0.0 => v.scaled(x.conj() / x.norm()),
        _ => v.clone(),
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// ascending. Destroys the input.
fn hermitian_eigenvalues(mut a: Vec<Vec<C64>>) -> Vec<f64> {
    let n = a.len();
    if n <= 1 {
        return a.iter().map(|row| row[0].re).collect();
    }
    let frob: f64 = a
        .iter()
        .flatten()
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt();
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r][c].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-13 * frob.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phi = apq.arg();
                let theta = 0.5 * (2.0 * r).atan2(a[p][p].re - a[q][q].re);
                let (s, c) = theta.sin_cos();
                let e_pos = C64::from_polar(1.0, phi);
                let e_neg = e_pos.conj();
                // Columns: B = A V with V[p][p] = c, V[p][q] = -s e^{i phi},
                // V[q][p] = s e^{-i phi}, V[q][q] = c.
                for row in a.iter_mut() {
                    let (aip, aiq) = (row[p], row[q]);
                    row[p] = aip * c + aiq * s * e_neg;
                    row[q] = -aip * s * e_pos + aiq * c;
                }
                // Rows: V^H B.
                let (top, rest) = a.split_at_mut(q);
                for (x, y) in top[p].iter_mut().zip(rest[0].iter_mut()) {
                    let (apj, aqj) = (*x, *y);
                    *x = apj * c + aqj * s * e_pos;
                    *y = -apj * s * e_neg + aqj * c;
                }
                a[p][q] = C64::new(0.0, 0.0);
                a[q][p] = C64::new(0.0, 0.0);
                a[p][p] = C64::new(a[p][p].re, 0.0);
                a[q][q] = C64::new(a[q][q].re, 0.0);
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::GaussianPulse;

    fn grid() -> Arc<SampledGrid> {
        SampledGrid::new(512, 0.0125).unwrap()
    }

    #[test]
    fn symbol_vector_rules() {
        assert!(matches!(
            SymbolVector::new(vec![false, false]),
            Err(Error::EmptySymbol)
        ));
        let s = SymbolVector::from_mask(0b101, 4).unwrap();
        assert_eq!(s.bits(), &[true, false, true, false]);
        assert_eq!(s.set_count(), 2);
        assert!(SymbolVector::from_mask(1, 0).is_err());
        assert!(SymbolVector::from_mask(0, 4).is_err());
    }

    #[test]
    fn jacobi_known_eigenvalues() {
        let i = C64::new(0.0, 1.0);
        let a = vec![
            vec![C64::new(2.0, 0.0), i],
            vec![-i, C64::new(2.0, 0.0)],
        ];
        let eigs = hermitian_eigenvalues(a);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);

        let d = vec![
            vec![C64::new(5.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        ];
        let eigs = hermitian_eigenvalues(d);
        assert_eq!(eigs, vec![-1.0, 5.0]);

        assert_eq!(
            hermitian_eigenvalues(vec![vec![C64::new(7.0, 0.0)]]),
            vec![7.0]
        );
    }

    #[test]
    fn timebin_gram_is_identity() {
        let g = grid();
        let book = CodeBook::timebin(&g, 4, 16.0).unwrap();
        let gram = book.gram();
        for r in 0..4 {
            for c in 0..4 {
                let v = gram[r * 4 + c];
                if r == c {
                    assert!((v - 1.0).norm() < 1e-12);
                } else {
                    // Disjoint in time; only transform round-off remains.
                    assert!(v.norm() < 1e-13, "bins {r} and {c} overlap: {v}");
                }
            }
        }
    }

    #[test]
    fn timebin_signals_sit_in_their_bins() {
        let g = grid();
        let width = 16.0;
        let book = CodeBook::timebin(&g, 4, width).unwrap();
        let start = -2.0 * width;
        for (k, signal) in book.signals().iter().enumerate() {
            let in_time = signal.to_time();
            for (j, t) in g.times().enumerate() {
                let inside = t >= start + k as f64 * width && t < start + (k + 1) as f64 * width;
                let mag = in_time.values()[j].norm();
                if inside {
                    assert!(mag > 0.2, "bin {k} empty at t = {t}");
                } else {
                    // Band-limited ringing only.
                    assert!(mag < 0.2, "bin {k} leaks to t = {t}: {mag}");
                }
            }
        }
    }

    #[test]
    fn timebin_rejects_bad_layouts() {
        let g = grid();
        assert!(matches!(
            CodeBook::timebin(&g, 0, 16.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(CodeBook::timebin(&g, 4, 0.0).is_err());
        // 4 bins of 200 overrun the 502.65 span.
        assert!(matches!(
            CodeBook::timebin(&g, 4, 200.0),
            Err(Error::InvalidParameter(_))
        ));
        // Bins narrower than the sample spacing catch nothing.
        assert!(matches!(
            CodeBook::timebin(&g, 4, 0.3),
            Err(Error::EmptyTimeBin { .. })
        ));
    }

    #[test]
    fn orthonormalize_handles_overlapping_gaussians() {
        let g = grid();
        let a = GaussianPulse::new(0.05, -10.0).unwrap().sampled(&g);
        let b = GaussianPulse::new(0.05, 10.0).unwrap().sampled(&g);
        let overlap = a.inner_product(&b).unwrap().norm();
        assert!(overlap > 0.5, "test wants strongly overlapping inputs");
        let book = CodeBook::orthonormalize(&[a.clone(), b.clone()]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { 1.0 } else { 0.0 };
                let got = book.signal(r).inner_product(book.signal(c)).unwrap();
                assert!((got - want).norm() < 1e-12);
            }
        }
        // The span is preserved: the inputs decompose exactly.
        for v in [&a, &b] {
            let mut residual = v.clone();
            for s in book.signals() {
                let c = s.inner_product(&residual).unwrap();
                residual = axpy(&residual, -c, s);
            }
            assert!(residual.norm() < 1e-10);
        }
    }

    #[test]
    fn orthonormalize_rejects_dependent_inputs() {
        let g = grid();
        let a = GaussianPulse::new(0.05, 0.0).unwrap().sampled(&g);
        let b = a.scaled(C64::new(0.0, 2.5));
        assert!(matches!(
            CodeBook::orthonormalize(&[a, b]),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_inputs_up_to_phase() {
        let g = grid();
        let base = CodeBook::timebin(&g, 3, 16.0).unwrap();
        let rotated: Vec<_> = base
            .signals()
            .iter()
            .map(|s| s.scaled(C64::from_polar(1.0, 1.1)))
            .collect();
        let book = CodeBook::orthonormalize(&rotated).unwrap();
        for (old, new) in base.signals().iter().zip(book.signals()) {
            let overlap = old.inner_product(new).unwrap();
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
        }
        // Phase convention: leading component real positive.
        for s in book.signals() {
            let peak = s.values().iter().map(|x| x.norm()).fold(0.0, f64::max);
            let lead = s.values().iter().find(|x| x.norm() > 1e-12 * peak).unwrap();
            assert!(lead.im.abs() < 1e-12 * peak && lead.re > 0.0);
        }
    }

    #[test]
    fn encode_decode_recovers_every_mask() {
        let g = grid();
        let book = CodeBook::timebin(&g, 5, 16.0).unwrap();
        for mask in 1..32u32 {
            let sym = SymbolVector::from_mask(mask, 5).unwrap();
            let state = book.encode(&sym).unwrap();
            let decoded = book.decode(state.amplitude(), 0.5).unwrap();
            assert_eq!(decoded.bits, sym.bits(), "mask {mask:#07b}");
            let weight = 1.0 / (sym.set_count() as f64).sqrt();
            for (bit, c) in sym.bits().iter().zip(&decoded.overlaps) {
                let want = if *bit { weight } else { 0.0 };
                assert!((c.norm() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn encode_rejects_wrong_length_and_decode_bad_thresholds() {
        let g = grid();
        let book = CodeBook::timebin(&g, 3, 16.0).unwrap();
        let sym = SymbolVector::from_mask(1, 4).unwrap();
        assert!(matches!(
            book.encode(&sym),
            Err(Error::LengthMismatch { got: 4, expected: 3 })
        ));
        let nu = book.signal(0).clone();
        for t in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(book.decode(&nu, t).is_err());
        }
    }

    #[test]
    fn decode_of_dark_state_is_all_zeros() {
        let g = grid();
        let book = CodeBook::timebin(&g, 3, 16.0).unwrap();
        let dark = SpectralAmplitude::zeros(g);
        let decoded = book.decode(&dark, 0.5).unwrap();
        assert_eq!(decoded.bits, vec![false; 3]);
    }

    #[test]
    fn broadband_cavity_leaves_codes_alone() {
        let g = grid();
        let book = CodeBook::timebin(&g, 4, 16.0).unwrap();
        let cavity = CavityParams::new(1e9, 0.0).unwrap();
        let m = book.crosstalk(&cavity);
        assert!(m.max_identity_deviation() < 1e-6);
        for c in 0..4 {
            assert!((m.column_norm(c) - 1.0).abs() < 1e-9);
        }
        // Round trip through the filter still decodes.
        let sym = SymbolVector::from_mask(0b1010, 4).unwrap();
        let filtered = cavity.apply(book.encode(&sym).unwrap().amplitude());
        let decoded = book.decode(&filtered, 0.5).unwrap();
        assert_eq!(decoded.bits, sym.bits());
    }

    #[test]
    fn narrowband_cavity_scrambles_codes() {
        let g = grid();
        let book = CodeBook::timebin(&g, 4, 16.0).unwrap();
        // gamma * bin width = 0.2: the reflection is mostly a sign flip
        // plus a long-lived narrowband tail.
        let cavity = CavityParams::new(0.0125, 0.0).unwrap();
        let m = book.crosstalk(&cavity);
        assert!(m.max_identity_deviation() > 1.0);
        let mut best_off = 0.0_f64;
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    best_off = best_off.max(m.get(r, c).norm());
                }
            }
            assert!(m.column_norm(r) <= 1.0 + 1e-9);
        }
        assert!(best_off > 0.01, "no crosstalk appeared: {best_off}");
    }

    #[test]
    fn gram_matches_time_domain_overlaps() {
        let g = grid();
        let a = GaussianPulse::new(0.05, -10.0).unwrap().sampled(&g);
        let b = GaussianPulse::new(0.05, 10.0).unwrap().sampled(&g);
        let freq = a.inner_product(&b).unwrap();
        let time = a.to_time().inner_product(&b.to_time()).unwrap();
        assert!((freq - time).norm() < 1e-10);
    }
}
