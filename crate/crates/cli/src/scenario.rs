//! Scenario file schema and validation.
//!
//! A scenario is one JSON document holding everything a run needs. The
//! `wireless` section drives the over-the-air experiment, `distribution`
//! the factory-side PTP simulation; subcommands require the sections they
//! use. Validation errors name the offending field.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use airsync::budget::CombinationPolicy;
use airsync::channel::{LinkBudgetParams, TapProfile};
use airsync::estimator::FailurePolicy;
use airsync::montecarlo::TrialConfig;
use airsync::nr::Numerology;
use airsync::ptp::{
    DelayCompensation, DistributionMode, FactoryTopology, HopParams, InBandParams,
    OutOfBandParams, PtpLink, SimClock,
};

use crate::CliError;

/// How the wireless section obtains its SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrSpec {
    /// Fixed SNR in dB, independent of distance.
    ExplicitDb(f64),
    /// Distance-dependent SNR from the log-distance link budget.
    LinkBudget(LinkBudgetParams),
}

fn default_profile() -> String {
    "TDL-C".to_string()
}

fn default_delay_spread_ns() -> f64 {
    300.0
}

/// Over-the-air acquisition parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WirelessScenario {
    pub scs_khz: u32,
    pub distance_m: f64,
    pub snr: SnrSpec,
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_delay_spread_ns")]
    pub delay_spread_ns: f64,
    #[serde(default)]
    pub n_id2: u8,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
}

impl WirelessScenario {
    pub fn snr_db(&self) -> Result<f64, CliError> {
        match &self.snr {
            SnrSpec::ExplicitDb(db) => Ok(*db),
            SnrSpec::LinkBudget(params) => {
                airsync::channel::snr_at_distance(params, self.distance_m)
                    .map_err(|e| CliError::Scenario(format!("wireless.snr.link_budget: {e}")))
            }
        }
    }

    pub fn trial_config(&self) -> Result<TrialConfig, CliError> {
        let numerology = Numerology::new(self.scs_khz)
            .map_err(|e| CliError::Scenario(format!("wireless.scs_khz: {e}")))?;
        let profile = TapProfile::load(&self.profile, self.delay_spread_ns)
            .map_err(|e| CliError::Scenario(format!("wireless.profile: {e}")))?;
        let cfg = TrialConfig {
            numerology,
            distance_m: self.distance_m,
            n_id2: self.n_id2,
            snr_db: self.snr_db()?,
            profile,
            policy: self.failure_policy,
        };
        cfg.validate()
            .map_err(|e| CliError::Scenario(format!("wireless: {e}")))?;
        Ok(cfg)
    }
}

/// Optional per-node departures from the uniform distribution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct NodeOverride {
    pub link: Option<PtpLink>,
    pub clock: Option<SimClock>,
}

fn default_distribution_trials() -> usize {
    1000
}

/// Factory-side distribution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionScenario {
    pub topology: FactoryTopology,
    #[serde(default)]
    pub gateway_clock: SimClock,
    /// Deterministic error contributed by the gateway's own pipeline, ns.
    #[serde(default)]
    pub gateway_internal_error_ns: f64,
    /// Clock model applied to every node unless overridden.
    #[serde(default)]
    pub node_clock: SimClock,
    /// Link model applied to every hop unless overridden.
    #[serde(default)]
    pub link: PtpLink,
    #[serde(default)]
    pub node_overrides: BTreeMap<String, NodeOverride>,
    /// Compensation strategy for out-of-band mode.
    #[serde(default = "default_compensation")]
    pub compensation: DelayCompensation,
    #[serde(default = "default_distribution_trials")]
    pub distribution_trials: usize,
    /// Override for the over-the-air error; when absent the wireless
    /// section must be present and its experiment p90 is used.
    #[serde(default)]
    pub ota_error_ns: Option<f64>,
}

fn default_compensation() -> DelayCompensation {
    DelayCompensation::TrueDistance
}

impl DistributionScenario {
    fn hop_for(&self, id: &str) -> HopParams {
        let ov = self.node_overrides.get(id);
        HopParams {
            link: ov.and_then(|o| o.link).unwrap_or(self.link),
            clock: ov.and_then(|o| o.clock).unwrap_or(self.node_clock),
        }
    }

    pub fn in_band_params(&self) -> InBandParams {
        InBandParams {
            gateway: self.gateway_clock,
            hops: self
                .topology
                .chain_order
                .iter()
                .map(|id| self.hop_for(id))
                .collect(),
        }
    }

    pub fn out_of_band_params(&self) -> OutOfBandParams {
        OutOfBandParams {
            gateway: self.gateway_clock,
            node_clocks: self
                .topology
                .nodes
                .iter()
                .map(|n| self.hop_for(&n.id).clock)
                .collect(),
            compensation: self.compensation.clone(),
        }
    }
}

/// One run's complete configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Mandatory: no silent nondeterminism.
    pub master_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub wireless: Option<WirelessScenario>,
    #[serde(default)]
    pub distribution: Option<DistributionScenario>,
    #[serde(default)]
    pub budget_level: Option<u8>,
    #[serde(default)]
    pub combination_policy: CombinationPolicy,
}

fn default_trials() -> usize {
    airsync::montecarlo::DEFAULT_TRIALS
}

impl Scenario {
    /// Parse and validate a scenario file. Returns the scenario together
    /// with the raw bytes that were hashed for provenance.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| {
            CliError::Scenario(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        let scenario: Scenario = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
        scenario.validate()?;
        Ok((scenario, bytes))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Scenario("trials must be at least 1".into()));
        }
        if let Some(w) = &self.wireless {
            if !(w.distance_m > 0.0) {
                return Err(CliError::Scenario(
                    "wireless.distance_m must be positive".into(),
                ));
            }
            if !(w.delay_spread_ns >= 0.0) {
                return Err(CliError::Scenario(
                    "wireless.delay_spread_ns must be nonnegative".into(),
                ));
            }
            // resolves the profile and checks numerology, snr, policy
            w.trial_config()?;
        }
        if let Some(d) = &self.distribution {
            d.topology
                .validate()
                .map_err(|e| CliError::Scenario(format!("distribution.topology: {e}")))?;
            if d.distribution_trials == 0 {
                return Err(CliError::Scenario(
                    "distribution.distribution_trials must be at least 1".into(),
                ));
            }
            if let Some(ota) = d.ota_error_ns {
                if !(ota >= 0.0) {
                    return Err(CliError::Scenario(
                        "distribution.ota_error_ns must be nonnegative".into(),
                    ));
                }
            }
            if !(d.gateway_internal_error_ns >= 0.0) {
                return Err(CliError::Scenario(
                    "distribution.gateway_internal_error_ns must be nonnegative".into(),
                ));
            }
            d.gateway_clock
                .validate()
                .map_err(|e| CliError::Scenario(format!("distribution.gateway_clock: {e}")))?;
            d.node_clock
                .validate()
                .map_err(|e| CliError::Scenario(format!("distribution.node_clock: {e}")))?;
            d.link
                .validate()
                .map_err(|e| CliError::Scenario(format!("distribution.link: {e}")))?;
            for (id, ov) in &d.node_overrides {
                if d.topology.node_index(id).is_none() {
                    return Err(CliError::Scenario(format!(
                        "distribution.node_overrides: unknown node \"{id}\""
                    )));
                }
                if let Some(c) = &ov.clock {
                    c.validate().map_err(|e| {
                        CliError::Scenario(format!("distribution.node_overrides.{id}.clock: {e}"))
                    })?;
                }
                if let Some(l) = &ov.link {
                    l.validate().map_err(|e| {
                        CliError::Scenario(format!("distribution.node_overrides.{id}.link: {e}"))
                    })?;
                }
            }
            if let DelayCompensation::EstimatedDistance(est) = &d.compensation {
                if d.topology.mode == DistributionMode::OutOfBand {
                    for node in &d.topology.nodes {
                        if !est.contains_key(&node.id) {
                            return Err(CliError::Scenario(format!(
                                "distribution.compensation: no distance estimate for node \"{}\"",
                                node.id
                            )));
                        }
                    }
                }
            }
            if d.ota_error_ns.is_none() && self.wireless.is_none() {
                return Err(CliError::Scenario(
                    "distribution.ota_error_ns or a wireless section is required".into(),
                ));
            }
        }
        if let Some(level) = self.budget_level {
            airsync::budget::requirement(level)
                .map_err(|e| CliError::Scenario(format!("budget_level: {e}")))?;
        }
        Ok(())
    }
}
