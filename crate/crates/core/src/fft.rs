//! Centered discrete transforms on zero-centered grids.

use std::cell::RefCell;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// scale * fftshift(FFT(ifftshift(x))), kernel e^{-2 pi i j k / n}.
///
/// With both index axes centered on n/2 this evaluates
/// out_k = scale * sum_j x_j e^{-i omega_j t_k} for omega_j t_k built from
/// (j - n/2)(k - n/2) 2 pi / n. Requires even n.
pub(crate) fn centered_forward(values: &[C64], scale: f64) -> Vec<C64> {
    centered(values, scale, true)
}

/// Same with the conjugate kernel e^{+2 pi i j k / n}, no 1/n factor.
pub(crate) fn centered_inverse(values: &[C64], scale: f64) -> Vec<C64> {
    centered(values, scale, false)
}

fn centered(values: &[C64], scale: f64, forward: bool) -> Vec<C64> {
    let n = values.len();
    debug_assert!(n.is_multiple_of(2));
    let mut buf = values.to_vec();
    buf.rotate_left(n / 2);
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let fft = if forward {
            planner.plan_fft_forward(n)
        } else {
            planner.plan_fft_inverse(n)
        };
        fft.process(&mut buf);
    });
    buf.rotate_left(n / 2);
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_impulse_at_center_is_flat() {
        let n = 8;
        let mut x = vec![C64::new(0.0, 0.0); n];
        x[n / 2] = C64::new(1.0, 0.0);
        let y = centered_forward(&x, 1.0);
        for v in y {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn inverse_undoes_forward_up_to_n() {
        let n = 16;
        let x: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64).sin(), (j as f64 * 0.7).cos()))
            .collect();
        let y = centered_inverse(&centered_forward(&x, 1.0), 1.0 / n as f64);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
