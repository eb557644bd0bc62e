//! Subcommand implementations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use airsync::budget::{self, CombinationPolicy, E2EError, Verdict};
use airsync::channel::LinkBudgetParams;
use airsync::derive_seed;
use airsync::montecarlo::{
    calibrate_anchor_snr, nearest_rank_percentile, run_experiment, table2_suite, CalibrationOutcome,
    CalibrationParams, ExperimentResult, ExperimentVerdict, Table2Report, TABLE_DISTANCES_M,
};
use airsync::ptp::{distribute_in_band, distribute_out_of_band, DistributionMode};

use crate::output::{hash_bytes, hash_value, write_csv, write_json};
use crate::scenario::Scenario;
use crate::CliError;

#[derive(Serialize)]
struct ExperimentPayload {
    scenario_hash: String,
    master_seed: u64,
    scs_khz: u32,
    distance_m: f64,
    snr_db: f64,
    profile: String,
    delay_spread_ns: f64,
    result: ExperimentResult,
}

pub fn experiment(scenario_path: &Path, out: &Path) -> Result<(), CliError> {
    let (scenario, raw) = Scenario::load(scenario_path)?;
    let wireless = scenario
        .wireless
        .as_ref()
        .ok_or_else(|| CliError::Scenario("experiment requires a wireless section".into()))?;
    let cfg = wireless.trial_config()?;
    let result = run_experiment(&cfg, scenario.trials, scenario.master_seed)?;
    println!(
        "experiment: {} kHz @ {} m, snr {:.2} dB, {} trials -> p50 {:.3} ns, p90 {:.3} ns, failure rate {:.4} ({})",
        wireless.scs_khz,
        wireless.distance_m,
        cfg.snr_db,
        result.n_trials,
        result.p50_ns,
        result.p90_ns,
        result.failure_rate,
        verdict_str(result.verdict),
    );
    let payload = ExperimentPayload {
        scenario_hash: hash_bytes(&raw),
        master_seed: scenario.master_seed,
        scs_khz: wireless.scs_khz,
        distance_m: wireless.distance_m,
        snr_db: cfg.snr_db,
        profile: wireless.profile.clone(),
        delay_spread_ns: wireless.delay_spread_ns,
        result,
    };
    write_json(out, &payload)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn verdict_str(v: ExperimentVerdict) -> &'static str {
    match v {
        ExperimentVerdict::Value => "value",
        ExperimentVerdict::SynchronizationFailure => "synchronization_failure",
    }
}

#[derive(Serialize, Deserialize)]
pub struct CalibrationPayload {
    pub scenario_hash: String,
    #[serde(flatten)]
    pub outcome: CalibrationOutcome,
}

#[derive(Deserialize)]
struct EnvelopeIn<T> {
    payload: T,
}

#[allow(clippy::too_many_arguments)]
pub fn calibrate(
    target_p90_ns: f64,
    distance_m: f64,
    scs: u32,
    seed: u64,
    trials: usize,
    pathloss_exponent: f64,
    tolerance: f64,
    out: &Path,
) -> Result<(), CliError> {
    let params = CalibrationParams {
        target_p90_ns,
        scs_khz: scs,
        distance_m,
        pathloss_exponent,
        n_trials: trials,
        master_seed: seed,
        rel_tolerance: tolerance,
        ..CalibrationParams::new(target_p90_ns, scs, distance_m, seed)
    };
    let outcome = calibrate_anchor_snr(&params)?;
    println!(
        "calibrate: anchor {:.3} dB achieves p90 {:.3} ns for target {:.3} ns ({} after {} iterations)",
        outcome.anchor_snr_db,
        outcome.achieved_p90_ns,
        outcome.target_p90_ns,
        if outcome.converged { "converged" } else { "NOT converged" },
        outcome.iterations,
    );
    if !outcome.converged {
        eprintln!(
            "warning: target p90 is outside the reachable range; closest achievable is {:.3} ns",
            outcome.achieved_p90_ns
        );
    }
    let payload = CalibrationPayload {
        scenario_hash: hash_value(&params)?,
        outcome,
    };
    write_json(out, &payload)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn load_calibration(path: &Path) -> Result<CalibrationOutcome, CliError> {
    let bytes = std::fs::read(path).map_err(|e| {
        CliError::Scenario(format!("cannot read calibration {}: {e}", path.display()))
    })?;
    let envelope: EnvelopeIn<CalibrationPayload> = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
    Ok(envelope.payload.outcome)
}

#[derive(Serialize)]
struct Table2Payload {
    scenario_hash: String,
    master_seed: u64,
    calibration_anchor_snr_db: Option<f64>,
    report: Table2Report,
}

#[derive(Serialize)]
struct Table2Inputs<'a> {
    master_seed: u64,
    n_trials: usize,
    link_budget: &'a LinkBudgetParams,
}

pub fn table2(
    seed: u64,
    trials: usize,
    calibration: Option<&Path>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let (link_budget, anchor) = match calibration {
        Some(path) => {
            let outcome = load_calibration(path)?;
            let link = LinkBudgetParams {
                reference_snr_db_at_1km: Some(outcome.anchor_snr_db),
                pathloss_exponent: outcome.pathloss_exponent,
                ..Default::default()
            };
            (link, Some(outcome.anchor_snr_db))
        }
        None => (LinkBudgetParams::default(), None),
    };
    let scenario_hash = hash_value(&Table2Inputs {
        master_seed: seed,
        n_trials: trials,
        link_budget: &link_budget,
    })?;
    let report = table2_suite(&link_budget, trials, seed)?;

    let mut rows = Vec::new();
    for scs in [15u32, 30, 60] {
        let mut cols = vec![scs.to_string()];
        for d in TABLE_DISTANCES_M {
            let cell = report.cell(scs, d).expect("grid cell");
            cols.push(match cell.verdict {
                ExperimentVerdict::Value => format!("{:.1}", cell.p90_ns),
                ExperimentVerdict::SynchronizationFailure => "synchronization_failure".into(),
            });
        }
        rows.push(cols.join(","));
    }
    println!("scs_khz  p90_1km            p90_3km");
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        println!("{:<8} {:<18} {}", cols[0], cols[1], cols[2]);
    }

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("table2.csv");
    let header = format!(
        "# scenario_hash={scenario_hash}\n# master_seed={seed}\nscs_khz,p90_ns_1km,p90_ns_3km"
    );
    write_csv(&csv_path, &header, &rows)?;

    let json_path = out_dir.join("table2.json");
    write_json(
        &json_path,
        &Table2Payload {
            scenario_hash,
            master_seed: seed,
            calibration_anchor_snr_db: anchor,
            report,
        },
    )?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

#[derive(Serialize)]
struct NodeReport {
    id: String,
    distribution_p90_ns: f64,
    total_ns: f64,
    margin_ns: f64,
}

#[derive(Serialize)]
struct DistributePayload {
    scenario_hash: String,
    master_seed: u64,
    mode: DistributionMode,
    combination_policy: CombinationPolicy,
    ota_ns: f64,
    ota_source: String,
    ota_verdict: Option<ExperimentVerdict>,
    gateway_internal_ns: f64,
    distribution_trials: usize,
    per_node: Vec<NodeReport>,
    verdict: Verdict,
}

pub fn distribute(scenario_path: &Path, out: &Path, strict: bool) -> Result<(), CliError> {
    let (scenario, raw) = Scenario::load(scenario_path)?;
    let dist = scenario
        .distribution
        .as_ref()
        .ok_or_else(|| CliError::Scenario("distribute requires a distribution section".into()))?;
    let level = scenario
        .budget_level
        .ok_or_else(|| CliError::Scenario("distribute requires budget_level".into()))?;
    let req = budget::requirement(level)?;

    // over-the-air contribution: explicit override or the wireless p90
    let (ota_ns, ota_source, ota_verdict) = match dist.ota_error_ns {
        Some(v) => (v, "explicit".to_string(), None),
        None => {
            let wireless = scenario.wireless.as_ref().expect("checked by validate");
            let cfg = wireless.trial_config()?;
            let result = run_experiment(&cfg, scenario.trials, scenario.master_seed)?;
            (result.p90_ns, "experiment_p90".to_string(), Some(result.verdict))
        }
    };

    // factory distribution ensemble: per-node p90 of |error|
    let topo = &dist.topology;
    let dist_master = derive_seed(scenario.master_seed, 0xD157);
    let mut per_node_errors: Vec<Vec<f64>> = vec![Vec::new(); topo.nodes.len()];
    for k in 0..dist.distribution_trials as u64 {
        let seed = derive_seed(dist_master, k);
        let errors = match topo.mode {
            DistributionMode::InBand => distribute_in_band(topo, &dist.in_band_params(), seed)?,
            DistributionMode::OutOfBand => {
                distribute_out_of_band(topo, &dist.out_of_band_params(), seed)?
            }
        };
        for (i, e) in errors.iter().enumerate() {
            per_node_errors[i].push(e.error_ns.abs());
        }
    }
    let distribution_p90: Vec<f64> = per_node_errors
        .into_iter()
        .map(|mut v| {
            v.sort_by(f64::total_cmp);
            nearest_rank_percentile(&v, 0.9)
        })
        .collect();

    let e2e = E2EError {
        ota_ns,
        gateway_internal_ns: dist.gateway_internal_error_ns,
        distribution_ns: distribution_p90.clone(),
        combination_policy: scenario.combination_policy,
    };
    e2e.validate()?;
    let totals = budget::end_to_end_error(&e2e);
    let verdict = budget::evaluate(&totals, &req, topo);

    println!(
        "distribute: {} nodes, mode {:?}, ota {:.3} ns ({}), gateway {:.3} ns",
        topo.nodes.len(),
        topo.mode,
        ota_ns,
        ota_source,
        dist.gateway_internal_error_ns,
    );
    println!(
        "budget level {}: {} (worst node {:.3} ns vs {:.0} ns budget, {} nodes vs {} allowed)",
        level,
        if verdict.pass { "PASS" } else { "FAIL" },
        verdict.worst_total_ns,
        verdict.budget_ns,
        verdict.node_count,
        verdict.max_devices,
    );

    let per_node = topo
        .nodes
        .iter()
        .zip(&distribution_p90)
        .zip(&totals)
        .map(|((node, &d), &t)| NodeReport {
            id: node.id.clone(),
            distribution_p90_ns: d,
            total_ns: t,
            margin_ns: req.budget_ns - t,
        })
        .collect();

    let payload = DistributePayload {
        scenario_hash: hash_bytes(&raw),
        master_seed: scenario.master_seed,
        mode: topo.mode,
        combination_policy: scenario.combination_policy,
        ota_ns,
        ota_source,
        ota_verdict,
        gateway_internal_ns: dist.gateway_internal_error_ns,
        distribution_trials: dist.distribution_trials,
        per_node,
        verdict: verdict.clone(),
    };
    write_json(out, &payload)?;
    println!("wrote {}", out.display());

    if strict && !verdict.pass {
        return Err(CliError::StrictBudgetFail);
    }
    Ok(())
}

pub fn plotdata(scenario_path: &Path, out: &Path) -> Result<(), CliError> {
    let (scenario, raw) = Scenario::load(scenario_path)?;
    let wireless = scenario
        .wireless
        .as_ref()
        .ok_or_else(|| CliError::Scenario("plotdata requires a wireless section".into()))?;
    let cfg = wireless.trial_config()?;
    let result = run_experiment(&cfg, scenario.trials, scenario.master_seed)?;
    let n = result.errors_ns.len() as f64;
    let rows: Vec<String> = result
        .errors_ns
        .iter()
        .enumerate()
        .map(|(i, e)| format!("{e},{}", (i + 1) as f64 / n))
        .collect();
    let header = format!(
        "# scenario_hash={}\n# master_seed={}\nerror_ns,cdf",
        hash_bytes(&raw),
        scenario.master_seed
    );
    write_csv(out, &header, &rows)?;
    println!("wrote {} ({} points)", out.display(), result.errors_ns.len());
    Ok(())
}
