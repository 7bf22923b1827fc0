//! Thin wrappers around rustfft with cached plans.
//!
//! Transforms are unnormalized (forward sums `x_j e^{-2 pi i jk/n}`, inverse
//! sums `X_k e^{+2 pi i jk/n}`); callers apply their own scaling so each
//! physical convention is spelled out at the use site.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

pub fn fft_inplace(data: &mut [Complex64]) {
    plan(data.len(), false).process(data);
}

pub fn ifft_inplace(data: &mut [Complex64]) {
    plan(data.len(), true).process(data);
}

/// FFT every row (contiguous axis 1) of a row-major `(rows, cols)` buffer.
pub fn fft_rows(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    debug_assert_eq!(data.len(), rows * cols);
    let p = plan(cols, inverse);
    for r in 0..rows {
        p.process(&mut data[r * cols..(r + 1) * cols]);
    }
}

/// FFT every column (strided axis 0) of a row-major `(rows, cols)` buffer.
pub fn fft_cols(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    debug_assert_eq!(data.len(), rows * cols);
    let p = plan(rows, inverse);
    let mut scratch = vec![Complex64::default(); rows];
    for c in 0..cols {
        for (r, slot) in scratch.iter_mut().enumerate() {
            *slot = data[r * cols + c];
        }
        p.process(&mut scratch);
        for (r, value) in scratch.iter().enumerate() {
            data[r * cols + c] = *value;
        }
    }
}

/// Integer mode numbers in FFT bin order: `0, 1, .., n/2-1, -n/2, .., -1`.
pub fn mode_numbers(n: usize) -> Vec<i64> {
    (0..n).map(|i| if i < n / 2 { i as i64 } else { i as i64 - n as i64 }).collect()
}

/// Band-limited (trigonometric) 2x upsampling of periodic samples.
///
/// Returns `2n` samples of the trigonometric interpolant at half-step points;
/// the Nyquist coefficient is split symmetrically so real inputs stay real.
pub fn upsample2(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    debug_assert!(n % 2 == 0);
    let mut spec = values.to_vec();
    fft_inplace(&mut spec);
    let mut big = vec![Complex64::default(); 2 * n];
    for k in 0..n / 2 {
        big[k] = spec[k];
    }
    for k in 1..n / 2 {
        big[2 * n - k] = spec[n - k];
    }
    big[n / 2] = 0.5 * spec[n / 2];
    big[2 * n - n / 2] = 0.5 * spec[n / 2];
    ifft_inplace(&mut big);
    let scale = 1.0 / n as f64; // ifft is unnormalized; upsample doubles length
    for v in &mut big {
        *v *= scale;
    }
    big
}
