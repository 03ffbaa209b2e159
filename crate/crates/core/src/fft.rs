//! Thin multi-axis wrapper around `rustfft`. Transforms are unnormalized;
//! callers apply whatever scaling their convention needs.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANS: std::cell::RefCell<PlanCache> = std::cell::RefCell::new(HashMap::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((len, inverse))
            .or_insert_with(|| {
                let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
                FftPlanner::new().plan_fft(len, dir)
            })
            .clone()
    })
}

/// Unnormalized DFT along every axis of a row-major array.
pub fn fft_nd(values: &mut [Complex64], shape: &[usize], inverse: bool) {
    for axis in 0..shape.len() {
        fft_axis(values, shape, axis, inverse);
    }
}

/// Unnormalized DFT along a single axis.
pub fn fft_single_axis(values: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) {
    fft_axis(values, shape, axis, inverse);
}

fn fft_axis(values: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) {
    let len = shape[axis];
    let fft = plan(len, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let stride: usize = shape[axis + 1..].iter().product();
    if stride == 1 {
        // contiguous lines
        for line in values.chunks_exact_mut(len) {
            fft.process_with_scratch(line, &mut scratch);
        }
        return;
    }
    let block = stride * len;
    let mut line = vec![Complex64::default(); len];
    for base in (0..values.len()).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = values[start + i * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (i, v) in line.iter().enumerate() {
                values[start + i * stride] = *v;
            }
        }
    }
}

/// Copies the strided lines along `axis` into a contiguous `lines x len`
/// matrix, so that per-line work can run in parallel.
pub fn gather_lines(values: &[Complex64], shape: &[usize], axis: usize) -> Vec<Complex64> {
    let len = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::default(); values.len()];
    let block = stride * len;
    let mut row = 0usize;
    for base in (0..values.len()).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for i in 0..len {
                out[row * len + i] = values[start + i * stride];
            }
            row += 1;
        }
    }
    out
}

/// Inverse of [`gather_lines`].
pub fn scatter_lines(lines: &[Complex64], shape: &[usize], axis: usize, values: &mut [Complex64]) {
    let len = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let block = stride * len;
    let mut row = 0usize;
    for base in (0..values.len()).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for i in 0..len {
                values[start + i * stride] = lines[row * len + i];
            }
            row += 1;
        }
    }
}
