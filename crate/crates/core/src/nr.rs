//! Synchronization-signal generation and OFDM modulation.
//!
//! The primary synchronization sequence is the length-127 BPSK m-sequence
//! of 3GPP TS 38.211 §7.4.2.2: d(n) = 1 - 2·x(m) with m = (n + 43·N_ID2)
//! mod 127, where x obeys x(i+7) = (x(i+4) + x(i)) mod 2 from the initial
//! state [x(6)..x(0)] = [1,1,1,0,1,1,0].
//!
//! Modulation maps the 127 values onto 127 contiguous subcarriers centered
//! on DC of a 4096-point grid (DC bin included), applies a 1/N-scaled
//! inverse FFT and prepends a 288-sample cyclic prefix. The matched-filter
//! reference template is the CP-free symbol.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft;
use crate::Error;

/// Length of the synchronization sequence.
pub const PSS_LEN: usize = 127;

/// FFT size used for all numerologies.
pub const NFFT: usize = 4096;

/// Cyclic-prefix length in samples (normal CP ratio at NFFT = 4096).
pub const CP_SAMPLES: usize = 288;

/// OFDM sampling parameters derived from the sub-carrier spacing.
///
/// With the FFT size fixed, the sample rate scales linearly with the
/// spacing (61.44 / 122.88 / 245.76 MHz for 15 / 30 / 60 kHz) and the
/// cyclic-prefix duration halves per doubling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NumerologyRepr", into = "NumerologyRepr")]
pub struct Numerology {
    scs_khz: u32,
}

#[derive(Serialize, Deserialize)]
struct NumerologyRepr {
    scs_khz: u32,
}

impl TryFrom<NumerologyRepr> for Numerology {
    type Error = Error;
    fn try_from(r: NumerologyRepr) -> Result<Self, Error> {
        Numerology::new(r.scs_khz)
    }
}

impl From<Numerology> for NumerologyRepr {
    fn from(n: Numerology) -> Self {
        NumerologyRepr { scs_khz: n.scs_khz }
    }
}

impl Numerology {
    pub fn new(scs_khz: u32) -> Result<Self, Error> {
        match scs_khz {
            15 | 30 | 60 => Ok(Self { scs_khz }),
            other => Err(Error::InvalidScs(other)),
        }
    }

    pub fn scs_khz(&self) -> u32 {
        self.scs_khz
    }

    pub fn nfft(&self) -> usize {
        NFFT
    }

    pub fn cp_samples(&self) -> usize {
        CP_SAMPLES
    }

    /// scs · 1000 · nfft; exact in f64 for all supported spacings.
    pub fn sample_rate_hz(&self) -> f64 {
        (self.scs_khz as u64 * 1000 * NFFT as u64) as f64
    }

    pub fn sample_period_ns(&self) -> f64 {
        1e9 / self.sample_rate_hz()
    }

    /// Computed as cp·1e9/fs in one division so the result is the exactly
    /// representable 4687.5 / 2343.75 / 1171.875 ns.
    pub fn cp_duration_ns(&self) -> f64 {
        (CP_SAMPLES as f64 * 1e9) / self.sample_rate_hz()
    }

    pub fn cp_duration_s(&self) -> f64 {
        CP_SAMPLES as f64 / self.sample_rate_hz()
    }

    /// All supported numerologies, lowest spacing first.
    pub fn all() -> [Numerology; 3] {
        [
            Numerology { scs_khz: 15 },
            Numerology { scs_khz: 30 },
            Numerology { scs_khz: 60 },
        ]
    }
}

/// Length-127 BPSK synchronization sequence for one N_ID2.
#[derive(Debug, Clone, PartialEq)]
pub struct PssSequence {
    n_id2: u8,
    symbols: Vec<f64>,
}

impl PssSequence {
    pub fn n_id2(&self) -> u8 {
        self.n_id2
    }

    /// The 127 BPSK values, each exactly +1 or -1.
    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }
}

/// Generate the synchronization sequence for `n_id2` in {0, 1, 2}.
pub fn generate_pss(n_id2: u8) -> Result<PssSequence, Error> {
    if n_id2 > 2 {
        return Err(Error::InvalidNId2(n_id2 as u32));
    }
    // m-sequence x(i+7) = (x(i+4) + x(i)) mod 2, initial state
    // [x(6)..x(0)] = [1,1,1,0,1,1,0].
    let mut x = [0u8; PSS_LEN + 7];
    x[0] = 0;
    x[1] = 1;
    x[2] = 1;
    x[3] = 0;
    x[4] = 1;
    x[5] = 1;
    x[6] = 1;
    for i in 0..PSS_LEN {
        x[i + 7] = (x[i + 4] + x[i]) % 2;
    }
    let shift = 43 * n_id2 as usize;
    let symbols = (0..PSS_LEN)
        .map(|n| {
            let m = (n + shift) % PSS_LEN;
            1.0 - 2.0 * x[m] as f64
        })
        .collect();
    Ok(PssSequence {
        n_id2,
        symbols,
    })
}

/// Complex baseband sample sequence together with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
}

impl Waveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of |x|² over all samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// Map 127 values onto the subcarriers centered on DC and return the
/// frequency-domain grid. Value n goes to subcarrier offset n - 63; bin
/// indices wrap negative offsets to the top of the grid.
fn map_to_grid(values: &[f64]) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), PSS_LEN);
    let mut grid = vec![Complex64::ZERO; NFFT];
    for (n, &v) in values.iter().enumerate() {
        let offset = n as i64 - 63;
        let bin = offset.rem_euclid(NFFT as i64) as usize;
        grid[bin] = Complex64::new(v, 0.0);
    }
    grid
}

fn modulate_values(values: &[f64], num: Numerology) -> Waveform {
    let mut symbol = map_to_grid(values);
    fft::inverse_scaled(&mut symbol);
    let mut samples = Vec::with_capacity(NFFT + CP_SAMPLES);
    samples.extend_from_slice(&symbol[NFFT - CP_SAMPLES..]);
    samples.extend_from_slice(&symbol);
    Waveform {
        samples,
        sample_rate_hz: num.sample_rate_hz(),
    }
}

/// Modulate the sequence onto one OFDM symbol with cyclic prefix.
///
/// Output length is nfft + cp_samples = 4384 at every spacing.
pub fn modulate(pss: &PssSequence, num: Numerology) -> Waveform {
    modulate_values(pss.symbols(), num)
}

/// Strip the cyclic prefix, apply the forward FFT and read back the 127
/// mapped subcarrier values. Inverse of [`modulate`] up to FFT roundoff.
pub fn demodulate(wf: &Waveform, _num: Numerology) -> Result<Vec<Complex64>, Error> {
    if wf.len() < NFFT + CP_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "waveform too short to demodulate: {} samples",
            wf.len()
        )));
    }
    let mut symbol = wf.samples[CP_SAMPLES..CP_SAMPLES + NFFT].to_vec();
    fft::forward(&mut symbol);
    Ok((0..PSS_LEN)
        .map(|n| {
            let offset = n as i64 - 63;
            symbol[offset.rem_euclid(NFFT as i64) as usize]
        })
        .collect())
}

/// CP-free time-domain symbol used as the matched filter.
pub fn reference_template(n_id2: u8, num: Numerology) -> Result<Waveform, Error> {
    let pss = generate_pss(n_id2)?;
    let full = modulate(&pss, num);
    Ok(Waveform {
        samples: full.samples[CP_SAMPLES..].to_vec(),
        sample_rate_hz: full.sample_rate_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent LFSR oracle: iterate the recurrence directly and BPSK-map.
    fn lfsr_oracle(n_id2: u8) -> Vec<f64> {
        let mut state = [0u8, 1, 1, 0, 1, 1, 1]; // x(0)..x(6)
        let mut x = Vec::with_capacity(PSS_LEN);
        for _ in 0..PSS_LEN {
            x.push(state[0]);
            let next = (state[4] + state[0]) % 2;
            state.rotate_left(1);
            state[6] = next;
        }
        (0..PSS_LEN)
            .map(|n| 1.0 - 2.0 * x[(n + 43 * n_id2 as usize) % PSS_LEN] as f64)
            .collect()
    }

    #[test]
    fn pss_is_bpsk_of_length_127() {
        for n_id2 in 0..=2 {
            let pss = generate_pss(n_id2).unwrap();
            assert_eq!(pss.symbols().len(), PSS_LEN);
            assert!(pss.symbols().iter().all(|&v| v == 1.0 || v == -1.0));
            let sum_sq: f64 = pss.symbols().iter().map(|v| v * v).sum();
            assert_eq!(sum_sq, 127.0);
        }
    }

    #[test]
    fn pss_matches_lfsr_oracle() {
        for n_id2 in 0..=2 {
            assert_eq!(generate_pss(n_id2).unwrap().symbols(), &lfsr_oracle(n_id2)[..]);
        }
        // frozen oracle output, first 20 values for n_id2 = 0
        let frozen: [f64; 20] = [
            1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0,
            1.0, -1.0, 1.0, -1.0, 1.0, -1.0,
        ];
        assert_eq!(&generate_pss(0).unwrap().symbols()[..20], &frozen);
    }

    #[test]
    fn pss_n_id2_is_cyclic_shift_by_43() {
        let d0 = generate_pss(0).unwrap();
        let d1 = generate_pss(1).unwrap();
        let d2 = generate_pss(2).unwrap();
        for n in 0..PSS_LEN {
            assert_eq!(d1.symbols()[n], d0.symbols()[(n + 43) % PSS_LEN]);
            assert_eq!(d2.symbols()[n], d0.symbols()[(n + 86) % PSS_LEN]);
        }
    }

    #[test]
    fn pss_rejects_invalid_n_id2() {
        assert!(matches!(generate_pss(3), Err(Error::InvalidNId2(3))));
    }

    #[test]
    fn raw_sequence_circular_autocorrelation() {
        // m-sequence property: off-peak circular autocorrelation is -1/127.
        let d = generate_pss(0).unwrap();
        let s = d.symbols();
        for lag in 0..PSS_LEN {
            let c: f64 = (0..PSS_LEN).map(|n| s[n] * s[(n + lag) % PSS_LEN]).sum();
            if lag == 0 {
                assert_eq!(c / 127.0, 1.0);
            } else {
                assert_relative_eq!((c / 127.0).abs(), 1.0 / 127.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn numerology_sample_rates() {
        let rates = [61_440_000.0, 122_880_000.0, 245_760_000.0];
        for (num, rate) in Numerology::all().iter().zip(rates) {
            assert_eq!(num.sample_rate_hz(), rate);
        }
        assert!(matches!(Numerology::new(120), Err(Error::InvalidScs(120))));
    }

    #[test]
    fn numerology_cp_durations_halve() {
        let expect = [4687.5, 2343.75, 1171.875];
        for (num, cp) in Numerology::all().iter().zip(expect) {
            assert_eq!(num.cp_duration_ns(), cp);
        }
    }

    #[test]
    fn modulate_output_shape() {
        let pss = generate_pss(0).unwrap();
        for num in Numerology::all() {
            let wf = modulate(&pss, num);
            assert_eq!(wf.len(), 4384);
            assert_eq!(wf.sample_rate_hz, num.sample_rate_hz());
            assert!(wf.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite()));
        }
    }

    #[test]
    fn modulate_parseval_all_ones() {
        // With the inverse scaled by 1/N, time energy = freq energy / N.
        let ones = vec![1.0; PSS_LEN];
        let num = Numerology::new(15).unwrap();
        let wf = modulate_values(&ones, num);
        let symbol_energy: f64 = wf.samples[CP_SAMPLES..].iter().map(|s| s.norm_sqr()).sum();
        assert_relative_eq!(symbol_energy, 127.0 / NFFT as f64, max_relative = 1e-12);
    }

    #[test]
    fn modulate_demodulate_round_trip() {
        for n_id2 in 0..=2 {
            let pss = generate_pss(n_id2).unwrap();
            let num = Numerology::new(30).unwrap();
            let wf = modulate(&pss, num);
            let back = demodulate(&wf, num).unwrap();
            for (got, want) in back.iter().zip(pss.symbols()) {
                assert!((got - Complex64::new(*want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn template_is_cp_stripped_modulation() {
        let num = Numerology::new(60).unwrap();
        let pss = generate_pss(1).unwrap();
        let full = modulate(&pss, num);
        let tpl = reference_template(1, num).unwrap();
        assert_eq!(tpl.len(), NFFT);
        assert_eq!(&tpl.samples[..], &full.samples[CP_SAMPLES..]);
    }

    #[test]
    fn template_circular_autocorrelation_peaks_at_zero() {
        let num = Numerology::new(15).unwrap();
        let tpl = reference_template(0, num).unwrap();
        let mut spec = tpl.samples.clone();
        fft::forward(&mut spec);
        let mut prod: Vec<Complex64> = spec.iter().map(|s| s * s.conj()).collect();
        fft::inverse_scaled(&mut prod);
        let peak = prod[0].norm();
        let max_off = prod[1..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        assert_relative_eq!(peak, tpl.energy(), max_relative = 1e-12);
        assert!(max_off < peak);
    }
}
