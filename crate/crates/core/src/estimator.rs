//! Arrival-delay estimation by matched-filter peak detection.
//!
//! The estimate is the lag maximizing |cross-correlation| between the
//! received waveform and the CP-free reference template, ties broken
//! toward the smallest lag. The correlation is computed exactly via FFT;
//! a direct-form evaluation agrees to 1e-9 (checked in tests).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::nr::{Numerology, Waveform};
use crate::Error;

/// Result of one delay estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayEstimate {
    /// Lag of the correlation peak, in samples from the start of rx.
    pub lag_samples: usize,
    /// |correlation| at the peak.
    pub peak_magnitude: f64,
    /// Peak magnitude over the median magnitude across all searched lags.
    pub peak_to_median_ratio: f64,
}

/// Per-trial and per-experiment failure thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FailurePolicy {
    /// A trial fails when |error| exceeds this. `None` uses half the
    /// cyclic-prefix duration of the numerology under test.
    pub max_abs_error_ns: Option<f64>,
    /// An experiment reports synchronization failure when at least this
    /// fraction of trials failed.
    pub experiment_failure_fraction: f64,
}

impl Default for FailurePolicy {
    fn default() -> Self {
        Self {
            max_abs_error_ns: None,
            experiment_failure_fraction: 0.10,
        }
    }
}

impl FailurePolicy {
    pub fn validate(&self) -> Result<(), Error> {
        if let Some(v) = self.max_abs_error_ns {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(
                    "max_abs_error_ns must be strictly positive".into(),
                ));
            }
        }
        let f = self.experiment_failure_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidConfig(
                "experiment_failure_fraction must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Per-trial error threshold for the given numerology.
    pub fn error_threshold_ns(&self, num: Numerology) -> f64 {
        self.max_abs_error_ns
            .unwrap_or_else(|| num.cp_duration_ns() / 2.0)
    }
}

/// Cross-correlate rx against the template and return the peak lag.
pub fn estimate_delay(rx: &Waveform, template: &Waveform) -> Result<DelayEstimate, Error> {
    if rx.len() < template.len() {
        return Err(Error::RxShorterThanTemplate {
            rx: rx.len(),
            template: template.len(),
        });
    }
    if rx.sample_rate_hz != template.sample_rate_hz {
        return Err(Error::SampleRateMismatch {
            rx_hz: rx.sample_rate_hz,
            template_hz: template.sample_rate_hz,
        });
    }
    let spectrum = template_spectrum(
        &template.samples,
        fft::next_pow2(rx.len() + template.len()),
    );
    let mags = correlation_magnitudes_prepared(&rx.samples, &spectrum, template.len());
    Ok(peak_from_magnitudes(&mags))
}

/// Forward FFT of the zero-padded template at the correlation size.
pub(crate) fn template_spectrum(tpl: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut b = vec![Complex64::ZERO; n];
    b[..tpl.len()].copy_from_slice(tpl);
    fft::forward(&mut b);
    b
}

/// |c[lag]| for all admissible lags, c[lag] = sum_n rx[lag+n]·conj(tpl[n]),
/// against a precomputed template spectrum.
pub(crate) fn correlation_magnitudes_prepared(
    rx: &[Complex64],
    tpl_spectrum: &[Complex64],
    tpl_len: usize,
) -> Vec<f64> {
    let lags = rx.len() - tpl_len + 1;
    let n = tpl_spectrum.len();
    debug_assert!(n >= rx.len() + tpl_len);
    let mut a = vec![Complex64::ZERO; n];
    a[..rx.len()].copy_from_slice(rx);
    fft::forward(&mut a);
    for (x, y) in a.iter_mut().zip(tpl_spectrum) {
        *x *= y.conj();
    }
    fft::inverse_scaled(&mut a);
    a[..lags].iter().map(|c| c.norm()).collect()
}

/// Argmax with smallest-lag tie-breaking, plus the peak/median diagnostic.
pub(crate) fn peak_from_magnitudes(mags: &[f64]) -> DelayEstimate {
    let mut best = 0usize;
    let mut best_mag = mags[0];
    for (lag, &m) in mags.iter().enumerate().skip(1) {
        if m > best_mag {
            best_mag = m;
            best = lag;
        }
    }
    let mut sorted = mags.to_vec();
    let mid = sorted.len() / 2;
    let (_, median, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    let median = *median;
    let ratio = if median > 0.0 {
        best_mag / median
    } else {
        f64::INFINITY
    };
    DelayEstimate {
        lag_samples: best,
        peak_magnitude: best_mag,
        peak_to_median_ratio: ratio,
    }
}

/// |estimated arrival - true arrival| in nanoseconds.
pub fn timing_error_ns(est: &DelayEstimate, true_delay_s: f64, num: Numerology) -> f64 {
    (est.lag_samples as f64 * num.sample_period_ns() - true_delay_s * 1e9).abs()
}

/// A trial fails when the error strictly exceeds the policy threshold.
pub fn is_failure(error_ns: f64, num: Numerology, policy: &FailurePolicy) -> bool {
    error_ns > policy.error_threshold_ns(num)
}
