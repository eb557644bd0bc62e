//! Standardized clock-synchronicity requirements and end-to-end verdicts.
//!
//! The four bundled accuracy levels follow the service performance
//! requirements of 3GPP TS 22.104 / TS 23.501 for clock synchronization
//! in industrial communication groups. A deployment passes a level when
//! every node's end-to-end error stays strictly below the budget and the
//! group size does not exceed the level's device count.

use serde::{Deserialize, Serialize};

use crate::ptp::FactoryTopology;
use crate::Error;

/// One synchronicity accuracy level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncRequirement {
    /// Accuracy level, 1 (tightest) to 4.
    pub level: u8,
    /// Maximum permissible time offset between the master clock and any
    /// device clock, ns.
    pub budget_ns: f64,
    /// Largest communication group the level covers.
    pub max_devices: u32,
    /// Service-area descriptor as standardized (advisory, not enforced).
    pub service_area: &'static str,
    pub scenario: &'static str,
}

const REQUIREMENTS: [SyncRequirement; 4] = [
    SyncRequirement {
        level: 1,
        budget_ns: 900.0,
        max_devices: 300,
        service_area: "<= 100 m x 100 m",
        scenario: "Motion control; control-to-control communication for industrial controller",
    },
    SyncRequirement {
        level: 2,
        budget_ns: 10_000.0,
        max_devices: 10,
        service_area: "<= 2500 m^2",
        scenario: "High data rate video streaming",
    },
    SyncRequirement {
        level: 3,
        budget_ns: 1_000.0,
        max_devices: 100,
        service_area: "<= 10 km^2",
        scenario: "AVProd synchronization and packet timing",
    },
    SyncRequirement {
        level: 4,
        budget_ns: 1_000.0,
        max_devices: 100,
        service_area: "< 20 km^2",
        scenario: "Smart Grid: synchronicity between PMUs",
    },
];

/// Look up one of the bundled accuracy levels.
pub fn requirement(level: u8) -> Result<SyncRequirement, Error> {
    REQUIREMENTS
        .iter()
        .find(|r| r.level == level)
        .copied()
        .ok_or(Error::UnknownBudgetLevel(level))
}

/// How per-segment error contributions combine into a node total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CombinationPolicy {
    /// Straight sum; every segment at its worst simultaneously.
    #[default]
    WorstCaseSum,
    /// Root-sum-square of the segments.
    RootSumSquare,
}

/// Per-segment end-to-end error contributions, all nonnegative ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2EError {
    /// Over-the-air acquisition error (for example an experiment's p90).
    pub ota_ns: f64,
    /// Error contributed inside the gateway itself.
    pub gateway_internal_ns: f64,
    /// Factory distribution error per node.
    pub distribution_ns: Vec<f64>,
    pub combination_policy: CombinationPolicy,
}

impl E2EError {
    pub fn validate(&self) -> Result<(), Error> {
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        if !nonneg(self.ota_ns) || !nonneg(self.gateway_internal_ns) {
            return Err(Error::InvalidConfig(
                "error components must be nonnegative".into(),
            ));
        }
        if !self.distribution_ns.iter().all(|&v| nonneg(v)) {
            return Err(Error::InvalidConfig(
                "per-node distribution errors must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Combine the segments into one total per node.
pub fn end_to_end_error(e: &E2EError) -> Vec<f64> {
    e.distribution_ns
        .iter()
        .map(|&dist| match e.combination_policy {
            CombinationPolicy::WorstCaseSum => e.ota_ns + e.gateway_internal_ns + dist,
            CombinationPolicy::RootSumSquare => {
                (e.ota_ns * e.ota_ns + e.gateway_internal_ns * e.gateway_internal_ns + dist * dist)
                    .sqrt()
            }
        })
        .collect()
}

/// Which requirement decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    ErrorBudget,
    DeviceCount,
}

/// A node's total error and its margin to the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMargin {
    pub id: String,
    pub total_ns: f64,
    /// budget - total; negative when the node exceeds the budget.
    pub margin_ns: f64,
}

/// Outcome of judging node totals against a requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub level: u8,
    pub budget_ns: f64,
    /// The constraint that decided (FAIL) or came closest to deciding
    /// (PASS) the verdict.
    pub binding_constraint: BindingConstraint,
    pub node_count: usize,
    pub max_devices: u32,
    pub worst_total_ns: f64,
    pub margins: Vec<NodeMargin>,
    /// Configured service area, reported alongside the level's descriptor.
    pub service_area_m: (f64, f64),
    pub service_area_requirement: String,
}

/// Judge per-node totals against a requirement. PASS needs every total
/// strictly below the budget and the node count within the level's group
/// size.
pub fn evaluate(totals: &[f64], req: &SyncRequirement, topo: &FactoryTopology) -> Verdict {
    assert_eq!(
        totals.len(),
        topo.nodes.len(),
        "one total per topology node"
    );
    let margins: Vec<NodeMargin> = topo
        .nodes
        .iter()
        .zip(totals)
        .map(|(node, &total)| NodeMargin {
            id: node.id.clone(),
            total_ns: total,
            margin_ns: req.budget_ns - total,
        })
        .collect();
    let worst_total_ns = totals.iter().copied().fold(0.0f64, f64::max);
    let budget_ok = worst_total_ns < req.budget_ns;
    let count_ok = topo.nodes.len() <= req.max_devices as usize;

    let binding_constraint = if !budget_ok {
        BindingConstraint::ErrorBudget
    } else if !count_ok {
        BindingConstraint::DeviceCount
    } else {
        // on PASS, report whichever constraint is tighter relative to its limit
        let budget_headroom = if req.budget_ns > 0.0 {
            worst_total_ns / req.budget_ns
        } else {
            1.0
        };
        let count_headroom = topo.nodes.len() as f64 / req.max_devices as f64;
        if budget_headroom >= count_headroom {
            BindingConstraint::ErrorBudget
        } else {
            BindingConstraint::DeviceCount
        }
    };

    Verdict {
        pass: budget_ok && count_ok,
        level: req.level,
        budget_ns: req.budget_ns,
        binding_constraint,
        node_count: topo.nodes.len(),
        max_devices: req.max_devices,
        worst_total_ns,
        margins,
        service_area_m: topo.service_area_m,
        service_area_requirement: req.service_area.to_string(),
    }
}
