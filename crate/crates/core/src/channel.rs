//! Propagation delay, tapped-delay-line fading, noise and link budget.
//!
//! Multipath is a block-fading tapped delay line: per trial each tap gets
//! one circularly-symmetric complex Gaussian gain whose variance is the
//! tap's normalized linear power, so magnitudes are Rayleigh and the
//! expected total power is one. Tap delays scale with the configured delay
//! spread. Delays (tap and propagation) are applied in the frequency
//! domain as phase ramps, so true delays need not be sample-aligned.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::nr::Waveform;
use crate::rng::rng_from_seed;
use crate::Error;
use crate::SPEED_OF_LIGHT_M_PER_S;

/// Bundled tap-profile data files, keyed by profile name.
const BUNDLED_PROFILES: &[(&str, &str)] = &[
    ("TDL-C", include_str!("data/tdl_c.txt")),
    ("single-tap", include_str!("data/single_tap.txt")),
];

/// Line-of-sight propagation delay in seconds for a distance in meters.
pub fn propagation_delay_s(distance_m: f64) -> Result<f64, Error> {
    if distance_m < 0.0 || !distance_m.is_finite() {
        return Err(Error::NegativeDistance(distance_m));
    }
    Ok(distance_m / SPEED_OF_LIGHT_M_PER_S)
}

/// One tap of a power-delay profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    /// Delay in units of the RMS delay spread.
    pub normalized_delay: f64,
    /// Relative power in dB as transcribed from the source table.
    pub power_db: f64,
}

/// A named power-delay profile scaled by a delay spread.
///
/// Taps are held sorted by delay. Linear powers are normalized to sum to
/// one so realizations conserve energy in expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TapProfile {
    name: String,
    taps: Vec<Tap>,
    delay_spread_ns: f64,
    normalized_powers: Vec<f64>,
}

impl TapProfile {
    /// Load a bundled profile by name, scaling delays by `delay_spread_ns`.
    pub fn load(name: &str, delay_spread_ns: f64) -> Result<Self, Error> {
        let text = BUNDLED_PROFILES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::UnknownProfile(name.to_string()))?;
        Self::parse(name, text, delay_spread_ns)
    }

    fn parse(name: &str, text: &str, delay_spread_ns: f64) -> Result<Self, Error> {
        if !(delay_spread_ns >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delay spread must be nonnegative, got {delay_spread_ns} ns"
            )));
        }
        let malformed = |reason: String| Error::MalformedProfile {
            name: name.to_string(),
            reason,
        };
        let mut taps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let delay: f64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| malformed(format!("line {}: missing delay", lineno + 1)))?;
            let power_db: f64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| malformed(format!("line {}: missing power", lineno + 1)))?;
            if fields.next().is_some() {
                return Err(malformed(format!("line {}: extra fields", lineno + 1)));
            }
            if delay < 0.0 {
                return Err(malformed(format!("line {}: negative delay", lineno + 1)));
            }
            taps.push(Tap {
                normalized_delay: delay,
                power_db,
            });
        }
        if taps.is_empty() {
            return Err(malformed("no taps".to_string()));
        }
        // Source tables are not guaranteed to list taps in delay order;
        // sort so downstream code can rely on nondecreasing delays.
        taps.sort_by(|a, b| a.normalized_delay.total_cmp(&b.normalized_delay));
        if taps[0].normalized_delay != 0.0 {
            return Err(malformed("first tap delay must be 0".to_string()));
        }
        let linear: Vec<f64> = taps.iter().map(|t| 10f64.powf(t.power_db / 10.0)).collect();
        let total: f64 = linear.iter().sum();
        let normalized_powers = linear.iter().map(|p| p / total).collect();
        Ok(Self {
            name: name.to_string(),
            taps,
            delay_spread_ns,
            normalized_powers,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn delay_spread_ns(&self) -> f64 {
        self.delay_spread_ns
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn num_taps(&self) -> usize {
        self.taps.len()
    }

    /// Linear tap powers after normalization; sums to 1.
    pub fn normalized_powers(&self) -> &[f64] {
        &self.normalized_powers
    }

    /// Absolute delay of tap `k` in seconds.
    pub fn tap_delay_s(&self, k: usize) -> f64 {
        self.taps[k].normalized_delay * self.delay_spread_ns * 1e-9
    }

    /// Largest tap delay in seconds.
    pub fn max_delay_s(&self) -> f64 {
        self.tap_delay_s(self.taps.len() - 1)
    }
}

/// One resolved multipath tap: absolute delay and complex gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedTap {
    pub delay_s: f64,
    pub gain: Complex64,
}

/// The resolved multipath taps for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub taps: Vec<RealizedTap>,
}

impl ChannelRealization {
    /// Distortion-free channel: a single unit tap at zero delay.
    pub fn identity() -> Self {
        Self {
            taps: vec![RealizedTap {
                delay_s: 0.0,
                gain: Complex64::new(1.0, 0.0),
            }],
        }
    }

    /// Sum of |gain|² over taps.
    pub fn total_power(&self) -> f64 {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }

    pub fn max_delay_s(&self) -> f64 {
        self.taps
            .iter()
            .map(|t| t.delay_s)
            .fold(0.0, f64::max)
    }
}

/// Draw one block-fading realization of the profile.
///
/// Tap k's gain is sqrt(p_k/2)·(z1 + j·z2) with z ~ N(0,1), so
/// E[|gain|²] = p_k. Deterministic for a given seed.
pub fn realize(profile: &TapProfile, seed: u64) -> ChannelRealization {
    let mut rng = rng_from_seed(seed);
    let taps = profile
        .normalized_powers()
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let scale = (p / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            RealizedTap {
                delay_s: profile.tap_delay_s(k),
                gain: Complex64::new(scale * re, scale * im),
            }
        })
        .collect();
    ChannelRealization { taps }
}

/// Output buffer length for [`apply`]: room for the input plus the largest
/// total shift, rounded up to a power of two for the FFT.
pub(crate) fn apply_output_len(input_len: usize, max_total_delay_s: f64, fs: f64) -> usize {
    let max_shift = (max_total_delay_s * fs).ceil() as usize;
    fft::next_pow2(input_len + max_shift + 8)
}

/// Accumulate gain·exp(-j2πf·delay) over the signed-frequency bins of an
/// n-point grid. Uses an incremental phasor with periodic exact resync so
/// the per-bin trig cost stays low without losing precision.
///
/// The Nyquist bin gets the real cosine factor of band-limited
/// interpolation (the two half-spectra average), which coincides with the
/// rotation for integer delays.
fn accumulate_phase_ramp(response: &mut [Complex64], gain: Complex64, delay_samples: f64) {
    let n = response.len();
    let step_phase = -2.0 * std::f64::consts::PI * delay_samples / n as f64;
    // bins above n/2 carry negative frequencies: exp(-j2π(i/n - 1)d) =
    // exp(-j2π i d / n) · exp(j2π d)
    let wrap = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * delay_samples);
    const RESYNC: usize = 256;
    let mut phasor = Complex64::new(1.0, 0.0);
    let step = Complex64::from_polar(1.0, step_phase);
    for (i, h) in response.iter_mut().enumerate() {
        if i % RESYNC == 0 {
            phasor = Complex64::from_polar(1.0, step_phase * i as f64);
        }
        let value = if 2 * i == n {
            Complex64::new((std::f64::consts::PI * delay_samples).cos(), 0.0)
        } else if i < n / 2 {
            phasor
        } else {
            phasor * wrap
        };
        *h += gain * value;
        phasor *= step;
    }
}

/// Frequency response of the realized taps shifted by `extra_delay_s`,
/// over an n-point grid at sample rate `fs`.
pub(crate) fn frequency_response(
    ch: &ChannelRealization,
    extra_delay_s: f64,
    fs: f64,
    n: usize,
) -> Vec<Complex64> {
    let mut response = vec![Complex64::ZERO; n];
    for tap in &ch.taps {
        accumulate_phase_ramp(&mut response, tap.gain, (extra_delay_s + tap.delay_s) * fs);
    }
    response
}

/// Filter a precomputed n-point input spectrum through the realization.
pub(crate) fn apply_prepared(
    input_spectrum: &[Complex64],
    ch: &ChannelRealization,
    extra_delay_s: f64,
    fs: f64,
) -> Waveform {
    let n = input_spectrum.len();
    let response = frequency_response(ch, extra_delay_s, fs, n);
    let mut spec: Vec<Complex64> = input_spectrum
        .iter()
        .zip(&response)
        .map(|(s, h)| s * h)
        .collect();
    fft::inverse_scaled(&mut spec);
    Waveform {
        samples: spec,
        sample_rate_hz: fs,
    }
}

/// Convolve the waveform with the realized taps, all shifted by
/// `extra_delay_s`.
///
/// The output buffer is extended past the largest total delay (and rounded
/// up to a power of two for the FFT), so no delayed energy is truncated.
/// Fractional-sample delays are exact phase ramps in the frequency domain.
pub fn apply(
    wf: &Waveform,
    ch: &ChannelRealization,
    extra_delay_s: f64,
) -> Result<Waveform, Error> {
    if extra_delay_s < 0.0 || !extra_delay_s.is_finite() {
        return Err(Error::NegativeDelay(extra_delay_s));
    }
    let fs = wf.sample_rate_hz;
    let n = apply_output_len(wf.len(), extra_delay_s + ch.max_delay_s(), fs);
    let mut spec = vec![Complex64::ZERO; n];
    spec[..wf.len()].copy_from_slice(&wf.samples);
    fft::forward(&mut spec);
    Ok(apply_prepared(&spec, ch, extra_delay_s, fs))
}

/// Add complex white Gaussian noise at the given SNR.
///
/// Signal power is measured over the waveform's nonzero support (first to
/// last sample above a relative floor), so leading/trailing padding does
/// not dilute the measurement. Noise covers the whole buffer and is
/// deterministic per seed.
pub fn add_awgn(wf: &Waveform, snr_db: f64, seed: u64) -> Waveform {
    let peak = wf
        .samples
        .iter()
        .map(|s| s.norm_sqr())
        .fold(0.0f64, f64::max);
    if peak == 0.0 {
        return wf.clone();
    }
    let floor = peak * 1e-18;
    let first = wf.samples.iter().position(|s| s.norm_sqr() > floor).unwrap();
    let last = wf.samples.iter().rposition(|s| s.norm_sqr() > floor).unwrap();
    let support = &wf.samples[first..=last];
    let signal_power: f64 =
        support.iter().map(|s| s.norm_sqr()).sum::<f64>() / support.len() as f64;
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let sigma = (noise_power / 2.0).sqrt();

    let mut rng = rng_from_seed(seed);
    let samples = wf
        .samples
        .iter()
        .map(|s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s + Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    Waveform {
        samples,
        sample_rate_hz: wf.sample_rate_hz,
    }
}

/// Scenario link-budget parameters mapping distance to SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudgetParams {
    pub carrier_hz: f64,
    pub gnb_height_m: f64,
    pub ue_height_m: f64,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub pathloss_exponent: f64,
    /// Calibration shortcut: SNR at the 1 km reference distance. When
    /// absent the anchor is computed from tx power, noise figure and
    /// bandwidth with free-space loss at 1 km.
    pub reference_snr_db_at_1km: Option<f64>,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        Self {
            carrier_hz: 6e9,
            gnb_height_m: 6.0,
            ue_height_m: 1.5,
            tx_power_dbm: 43.0,
            noise_figure_db: 7.0,
            bandwidth_hz: 61.44e6,
            pathloss_exponent: 3.0,
            reference_snr_db_at_1km: None,
        }
    }
}

const REFERENCE_DISTANCE_M: f64 = 1000.0;

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.carrier_hz > 0.0) {
            return Err(Error::InvalidConfig("carrier_hz must be positive".into()));
        }
        if !(self.gnb_height_m > 0.0) || !(self.ue_height_m > 0.0) {
            return Err(Error::InvalidConfig("antenna heights must be positive".into()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidConfig("bandwidth_hz must be positive".into()));
        }
        Ok(())
    }

    /// SNR at the 1 km anchor distance.
    pub fn anchor_snr_db(&self) -> f64 {
        if let Some(snr) = self.reference_snr_db_at_1km {
            return snr;
        }
        // Free-space loss at the reference distance.
        let fspl_db = 20.0
            * (4.0 * std::f64::consts::PI * REFERENCE_DISTANCE_M * self.carrier_hz
                / SPEED_OF_LIGHT_M_PER_S)
                .log10();
        let noise_dbm = -174.0 + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db;
        self.tx_power_dbm - fspl_db - noise_dbm
    }
}

/// Log-distance SNR: snr(d) = snr(1 km) - 10·n·log10(d / 1 km).
pub fn snr_at_distance(params: &LinkBudgetParams, distance_m: f64) -> Result<f64, Error> {
    if !(distance_m > 0.0) {
        return Err(Error::NonPositiveDistance(distance_m));
    }
    params.validate()?;
    Ok(params.anchor_snr_db()
        - 10.0 * params.pathloss_exponent * (distance_m / REFERENCE_DISTANCE_M).log10())
}
