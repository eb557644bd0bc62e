//! Thread-local FFT plan cache.
//!
//! Monte Carlo runs execute the same transform sizes millions of times, so
//! plans are cached per thread and reused. rustfft computes unnormalized
//! transforms in both directions; callers apply the 1/N factor on the
//! inverse where the convention requires it.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static FORWARD: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
    static INVERSE: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(forward: bool, len: usize) -> Arc<dyn Fft<f64>> {
    let cache = if forward { &FORWARD } else { &INVERSE };
    cache.with(|c| {
        c.borrow_mut()
            .entry(len)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Unnormalized forward FFT in place.
pub(crate) fn forward(buf: &mut [Complex64]) {
    plan(true, buf.len()).process(buf);
}

/// Unnormalized inverse FFT in place (no 1/N factor).
pub(crate) fn inverse(buf: &mut [Complex64]) {
    plan(false, buf.len()).process(buf);
}

/// Inverse FFT in place scaled by 1/N.
pub(crate) fn inverse_scaled(buf: &mut [Complex64]) {
    let n = buf.len() as f64;
    inverse(buf);
    for v in buf.iter_mut() {
        *v /= n;
    }
}

/// Smallest power of two that is >= n.
pub(crate) fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}
