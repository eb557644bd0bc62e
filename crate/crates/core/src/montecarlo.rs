//! Seeded trial ensembles and the SCS × range result grid.
//!
//! One trial runs the full acquisition chain: sequence generation, OFDM
//! modulation, propagation delay + multipath + noise, matched-filter peak
//! detection, timing error and failure classification. Trial seeds are a
//! pure function of (master seed, trial index), so an ensemble's result is
//! bitwise identical no matter how trials are scheduled across workers.

use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    self, add_awgn, propagation_delay_s, realize, snr_at_distance, LinkBudgetParams, TapProfile,
};
use crate::estimator::{self, FailurePolicy};
use crate::nr::{generate_pss, modulate, reference_template, Numerology};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{fft, Error};

/// Everything one trial needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub numerology: Numerology,
    pub distance_m: f64,
    pub n_id2: u8,
    pub snr_db: f64,
    pub profile: TapProfile,
    pub policy: FailurePolicy,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.distance_m > 0.0) {
            return Err(Error::NonPositiveDistance(self.distance_m));
        }
        if self.n_id2 > 2 {
            return Err(Error::InvalidNId2(self.n_id2 as u32));
        }
        self.policy.validate()
    }
}

/// Result of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub error_ns: f64,
    pub failed: bool,
}

/// Precomputed per-configuration state shared by all trials.
struct TrialContext {
    num: Numerology,
    propagation_delay_s: f64,
    /// Forward FFT of the zero-padded transmit waveform.
    tx_spectrum: Vec<Complex64>,
    /// Forward FFT of the zero-padded reference template.
    template_spectrum: Vec<Complex64>,
    template_len: usize,
}

fn prepare(cfg: &TrialConfig) -> Result<TrialContext, Error> {
    cfg.validate()?;
    let num = cfg.numerology;
    let fs = num.sample_rate_hz();
    let pd = propagation_delay_s(cfg.distance_m)?;

    let pss = generate_pss(cfg.n_id2)?;
    let tx = modulate(&pss, num);
    let template = reference_template(cfg.n_id2, num)?;

    // tap delays are fixed per profile, so the padded lengths (and with
    // them every FFT size) are identical across trials
    let max_total_delay = pd + cfg.profile.max_delay_s();
    let apply_len = channel::apply_output_len(tx.len(), max_total_delay, fs);
    let mut tx_spectrum = vec![Complex64::ZERO; apply_len];
    tx_spectrum[..tx.len()].copy_from_slice(&tx.samples);
    fft::forward(&mut tx_spectrum);

    let corr_size = fft::next_pow2(apply_len + template.len());
    let template_spectrum = estimator::template_spectrum(&template.samples, corr_size);

    Ok(TrialContext {
        num,
        propagation_delay_s: pd,
        tx_spectrum,
        template_spectrum,
        template_len: template.len(),
    })
}

fn run_with_context(cfg: &TrialConfig, ctx: &TrialContext, seed: u64) -> TrialOutcome {
    let mut rng = rng_from_seed(seed);
    let channel_seed = rng.next_u64();
    let noise_seed = rng.next_u64();

    let ch = realize(&cfg.profile, channel_seed);
    let faded = channel::apply_prepared(
        &ctx.tx_spectrum,
        &ch,
        ctx.propagation_delay_s,
        ctx.num.sample_rate_hz(),
    );
    let rx = add_awgn(&faded, cfg.snr_db, noise_seed);

    let mags =
        estimator::correlation_magnitudes_prepared(&rx.samples, &ctx.template_spectrum, ctx.template_len);
    let est = estimator::peak_from_magnitudes(&mags);

    // The template aligns with the symbol body, which starts one cyclic
    // prefix after the frame edge; reference the body lag to the true
    // propagation delay.
    let body_lag = est.lag_samples as i64 - ctx.num.cp_samples() as i64;
    let error_ns =
        (body_lag as f64 * ctx.num.sample_period_ns() - ctx.propagation_delay_s * 1e9).abs();
    let failed = estimator::is_failure(error_ns, ctx.num, &cfg.policy);
    TrialOutcome { error_ns, failed }
}

/// Run the full chain once. Deterministic per (config, seed).
pub fn run_trial(cfg: &TrialConfig, seed: u64) -> Result<TrialOutcome, Error> {
    let ctx = prepare(cfg)?;
    Ok(run_with_context(cfg, &ctx, seed))
}

/// Experiment-level outcome label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentVerdict {
    /// The percentile statistics are meaningful.
    Value,
    /// Too many trials failed; the 90th percentile lies in the failed
    /// region.
    SynchronizationFailure,
}

/// Aggregated statistics of one trial ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub n_trials: usize,
    /// Per-trial absolute errors, sorted ascending.
    pub errors_ns: Vec<f64>,
    pub p50_ns: f64,
    pub p90_ns: f64,
    pub failure_rate: f64,
    pub verdict: ExperimentVerdict,
}

/// Nearest-rank percentile: the ceil(q·n)-th order statistic.
pub fn nearest_rank_percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    assert!(q > 0.0 && q <= 1.0, "quantile must lie in (0, 1]");
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.max(1) - 1]
}

/// Run `n_trials` seeded trials and aggregate. Trial seeds derive from
/// (master_seed, index); the result does not depend on worker count.
pub fn run_experiment(
    cfg: &TrialConfig,
    n_trials: usize,
    master_seed: u64,
) -> Result<ExperimentResult, Error> {
    if n_trials == 0 {
        return Err(Error::NoTrials);
    }
    let ctx = prepare(cfg)?;
    let outcomes: Vec<TrialOutcome> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| run_with_context(cfg, &ctx, derive_seed(master_seed, i)))
        .collect();

    let mut errors_ns: Vec<f64> = outcomes.iter().map(|o| o.error_ns).collect();
    errors_ns.sort_by(f64::total_cmp);
    let failed = outcomes.iter().filter(|o| o.failed).count();
    let failure_rate = failed as f64 / n_trials as f64;
    let verdict = if failure_rate >= cfg.policy.experiment_failure_fraction {
        ExperimentVerdict::SynchronizationFailure
    } else {
        ExperimentVerdict::Value
    };
    Ok(ExperimentResult {
        n_trials,
        p50_ns: nearest_rank_percentile(&errors_ns, 0.5),
        p90_ns: nearest_rank_percentile(&errors_ns, 0.9),
        failure_rate,
        verdict,
        errors_ns,
    })
}

/// Grid distances for the result table, meters.
pub const TABLE_DISTANCES_M: [f64; 2] = [1000.0, 3000.0];

/// Default trial count per grid cell.
pub const DEFAULT_TRIALS: usize = 5000;

/// One cell of the SCS × range grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Cell {
    pub scs_khz: u32,
    pub distance_m: f64,
    pub snr_db: f64,
    pub n_trials: usize,
    pub p50_ns: f64,
    pub p90_ns: f64,
    pub failure_rate: f64,
    pub verdict: ExperimentVerdict,
}

/// The 3 × 2 result grid over {15, 30, 60 kHz} × {1 km, 3 km}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Report {
    pub master_seed: u64,
    pub n_trials: usize,
    pub link_budget: LinkBudgetParams,
    pub delay_spread_ns: f64,
    /// Row-major: SCS rows (ascending), distance columns (ascending).
    pub cells: Vec<Table2Cell>,
}

impl Table2Report {
    pub fn cell(&self, scs_khz: u32, distance_m: f64) -> Option<&Table2Cell> {
        self.cells
            .iter()
            .find(|c| c.scs_khz == scs_khz && c.distance_m == distance_m)
    }
}

const TABLE_DELAY_SPREAD_NS: f64 = 300.0;

/// Run the 3 × 2 grid with `n_trials` ensembles per cell over the bundled
/// TDL-C profile at a 300 ns delay spread.
pub fn table2_suite(
    link_budget: &LinkBudgetParams,
    n_trials: usize,
    master_seed: u64,
) -> Result<Table2Report, Error> {
    let profile = TapProfile::load("TDL-C", TABLE_DELAY_SPREAD_NS)?;
    let mut cells = Vec::with_capacity(6);
    for (si, num) in Numerology::all().into_iter().enumerate() {
        for (di, &distance_m) in TABLE_DISTANCES_M.iter().enumerate() {
            let snr_db = snr_at_distance(link_budget, distance_m)?;
            let cfg = TrialConfig {
                numerology: num,
                distance_m,
                n_id2: 0,
                snr_db,
                profile: profile.clone(),
                policy: FailurePolicy::default(),
            };
            let cell_index = (si * TABLE_DISTANCES_M.len() + di) as u64;
            let result = run_experiment(&cfg, n_trials, derive_seed(master_seed, cell_index))?;
            cells.push(Table2Cell {
                scs_khz: num.scs_khz(),
                distance_m,
                snr_db,
                n_trials,
                p50_ns: result.p50_ns,
                p90_ns: result.p90_ns,
                failure_rate: result.failure_rate,
                verdict: result.verdict,
            });
        }
    }
    Ok(Table2Report {
        master_seed,
        n_trials,
        link_budget: link_budget.clone(),
        delay_spread_ns: TABLE_DELAY_SPREAD_NS,
        cells,
    })
}

/// Inputs for anchoring the SNR model to a target p90.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams {
    pub target_p90_ns: f64,
    pub scs_khz: u32,
    pub distance_m: f64,
    pub pathloss_exponent: f64,
    pub n_trials: usize,
    pub master_seed: u64,
    /// Convergence criterion: |achieved - target| <= rel_tolerance · target.
    pub rel_tolerance: f64,
    pub snr_lo_db: f64,
    pub snr_hi_db: f64,
    pub max_iterations: u32,
}

impl CalibrationParams {
    pub fn new(target_p90_ns: f64, scs_khz: u32, distance_m: f64, master_seed: u64) -> Self {
        Self {
            target_p90_ns,
            scs_khz,
            distance_m,
            pathloss_exponent: 3.0,
            n_trials: 2000,
            master_seed,
            rel_tolerance: 0.10,
            snr_lo_db: -40.0,
            snr_hi_db: 60.0,
            max_iterations: 24,
        }
    }
}

/// Result of a calibration search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub anchor_snr_db: f64,
    pub achieved_p90_ns: f64,
    pub target_p90_ns: f64,
    pub converged: bool,
    pub iterations: u32,
    pub scs_khz: u32,
    pub distance_m: f64,
    pub pathloss_exponent: f64,
    pub n_trials: usize,
    pub master_seed: u64,
}

/// Bisect the SNR anchor until the experiment p90 at the calibration
/// distance matches the target within tolerance.
///
/// p90 is nonincreasing in SNR; when the target lies below the reachable
/// floor (or above the low-SNR ceiling) the search cannot bracket it and
/// returns the closest achievable anchor with `converged = false`.
pub fn calibrate_anchor_snr(params: &CalibrationParams) -> Result<CalibrationOutcome, Error> {
    if !(params.target_p90_ns > 0.0) {
        return Err(Error::InvalidConfig("target_p90_ns must be positive".into()));
    }
    let profile = TapProfile::load("TDL-C", TABLE_DELAY_SPREAD_NS)?;
    let num = Numerology::new(params.scs_khz)?;
    let eval = |anchor_snr_db: f64| -> Result<f64, Error> {
        let link = LinkBudgetParams {
            reference_snr_db_at_1km: Some(anchor_snr_db),
            pathloss_exponent: params.pathloss_exponent,
            ..Default::default()
        };
        let cfg = TrialConfig {
            numerology: num,
            distance_m: params.distance_m,
            n_id2: 0,
            snr_db: snr_at_distance(&link, params.distance_m)?,
            profile: profile.clone(),
            policy: FailurePolicy::default(),
        };
        // common random numbers across evaluations smooth the search
        Ok(run_experiment(&cfg, params.n_trials, params.master_seed)?.p90_ns)
    };

    let target = params.target_p90_ns;
    let within = |p90: f64| (p90 - target).abs() <= params.rel_tolerance * target;

    let mut iterations = 0u32;
    let mut lo = params.snr_lo_db;
    let mut hi = params.snr_hi_db;
    let p90_lo = eval(lo)?;
    let p90_hi = eval(hi)?;
    let mut best = if (p90_lo - target).abs() <= (p90_hi - target).abs() {
        (lo, p90_lo)
    } else {
        (hi, p90_hi)
    };

    let bracketed = p90_hi <= target && target <= p90_lo;
    if bracketed {
        while iterations < params.max_iterations {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            let p90_mid = eval(mid)?;
            if (p90_mid - target).abs() < (best.1 - target).abs() {
                best = (mid, p90_mid);
            }
            if within(p90_mid) {
                break;
            }
            if p90_mid > target {
                lo = mid; // need more SNR
            } else {
                hi = mid;
            }
        }
    }

    Ok(CalibrationOutcome {
        anchor_snr_db: best.0,
        achieved_p90_ns: best.1,
        target_p90_ns: target,
        converged: within(best.1),
        iterations,
        scs_khz: params.scs_khz,
        distance_m: params.distance_m,
        pathloss_exponent: params.pathloss_exponent,
        n_trials: params.n_trials,
        master_seed: params.master_seed,
    })
}
