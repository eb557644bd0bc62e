//! Boundary-clock timing distribution inside the factory.
//!
//! The gateway re-masters the time it acquired over the air toward factory
//! nodes, either link-by-link along a chain (in-band) or by direct
//! broadcast to every node (out-of-band). Clocks are modeled with a static
//! offset, a drift rate, timestamp quantization and per-stamp Gaussian
//! jitter. Each hop performs a single two-step offset exchange; servo
//! dynamics are out of scope.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::rng_from_seed;
use crate::Error;
use crate::SPEED_OF_LIGHT_M_PER_S;

/// A simulated clock, described by its error model against ideal time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimClock {
    /// Static offset from ideal time, ns.
    pub offset_ns: f64,
    /// Frequency error, parts per billion.
    pub drift_ppb: f64,
    /// Timestamp quantization step, ns; 0 disables quantization.
    pub timestamp_granularity_ns: f64,
    /// Standard deviation of per-stamp Gaussian jitter, ns.
    pub timestamp_jitter_sigma_ns: f64,
}

impl Default for SimClock {
    fn default() -> Self {
        Self::ideal()
    }
}

impl SimClock {
    /// A perfect clock: zero offset, drift, granularity and jitter.
    pub const fn ideal() -> Self {
        Self {
            offset_ns: 0.0,
            drift_ppb: 0.0,
            timestamp_granularity_ns: 0.0,
            timestamp_jitter_sigma_ns: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.timestamp_granularity_ns < 0.0 {
            return Err(Error::InvalidConfig(
                "timestamp_granularity_ns must be >= 0".into(),
            ));
        }
        if self.timestamp_jitter_sigma_ns < 0.0 {
            return Err(Error::InvalidConfig(
                "timestamp_jitter_sigma_ns must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Noise-free clock reading at an ideal instant (drift epoch at 0).
    pub fn reading_ns(&self, ideal_time_ns: f64) -> f64 {
        ideal_time_ns + self.offset_ns + self.drift_ppb * 1e-9 * ideal_time_ns
    }
}

fn stamp_with(clock: &SimClock, ideal_time_ns: f64, rng: &mut ChaCha8Rng) -> f64 {
    let raw = clock.reading_ns(ideal_time_ns);
    let quantized = if clock.timestamp_granularity_ns > 0.0 {
        let g = clock.timestamp_granularity_ns;
        (raw / g).round_ties_even() * g
    } else {
        raw
    };
    let z: f64 = rng.sample(StandardNormal);
    quantized + clock.timestamp_jitter_sigma_ns * z
}

/// Timestamp an event: clock reading, quantized to the granularity, plus
/// Gaussian jitter. Deterministic per seed.
pub fn timestamp(clock: &SimClock, ideal_time_ns: f64, seed: u64) -> f64 {
    stamp_with(clock, ideal_time_ns, &mut rng_from_seed(seed))
}

/// One-way message delays of a master-slave link, ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PtpLink {
    pub delay_ms_to_slave_ns: f64,
    pub delay_slave_to_ms_ns: f64,
}

impl Default for PtpLink {
    fn default() -> Self {
        Self::symmetric(0.0)
    }
}

impl PtpLink {
    pub fn symmetric(delay_ns: f64) -> Self {
        Self {
            delay_ms_to_slave_ns: delay_ns,
            delay_slave_to_ms_ns: delay_ns,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.delay_ms_to_slave_ns < 0.0 || self.delay_slave_to_ms_ns < 0.0 {
            return Err(Error::InvalidConfig("link delays must be >= 0".into()));
        }
        Ok(())
    }
}

/// Outcome of one two-step exchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetEstimate {
    /// Estimated slave-minus-master offset, ns.
    pub offset_ns: f64,
    /// Estimated mean path delay, ns.
    pub mean_path_delay_ns: f64,
}

fn two_step_with(
    master: &SimClock,
    slave: &SimClock,
    link: &PtpLink,
    ideal_time_ns: f64,
    rng: &mut ChaCha8Rng,
) -> OffsetEstimate {
    // Sync master->slave, then an immediate Delay_Req slave->master.
    let t1_ideal = ideal_time_ns;
    let t2_ideal = t1_ideal + link.delay_ms_to_slave_ns;
    let t3_ideal = t2_ideal;
    let t4_ideal = t3_ideal + link.delay_slave_to_ms_ns;

    let t1 = stamp_with(master, t1_ideal, rng);
    let t2 = stamp_with(slave, t2_ideal, rng);
    let t3 = stamp_with(slave, t3_ideal, rng);
    let t4 = stamp_with(master, t4_ideal, rng);

    OffsetEstimate {
        offset_ns: ((t2 - t1) - (t4 - t3)) / 2.0,
        mean_path_delay_ns: ((t2 - t1) + (t4 - t3)) / 2.0,
    }
}

/// Simulate one Sync / Delay_Req exchange and estimate the slave's offset
/// from the four timestamps. Deterministic per seed.
pub fn two_step_exchange(
    master: &SimClock,
    slave: &SimClock,
    link: &PtpLink,
    ideal_time_ns: f64,
    seed: u64,
) -> OffsetEstimate {
    two_step_with(master, slave, link, ideal_time_ns, &mut rng_from_seed(seed))
}

/// How the gateway handles per-node propagation delay in broadcast mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayCompensation {
    /// No compensation: the full propagation delay lands in the node error.
    None,
    /// Compensate with the true gateway-node distance.
    TrueDistance,
    /// Compensate with configured per-node distance estimates, in meters.
    EstimatedDistance(BTreeMap<String, f64>),
}

/// Timing distribution variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionMode {
    InBand,
    OutOfBand,
}

/// One synchronized device on the factory floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoryNode {
    pub id: String,
    pub position_m: (f64, f64),
}

/// Node layout and distribution mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoryTopology {
    pub gateway_position_m: (f64, f64),
    pub nodes: Vec<FactoryNode>,
    pub mode: DistributionMode,
    /// Relay order for in-band mode; must be a permutation of node ids.
    #[serde(default)]
    pub chain_order: Vec<String>,
    pub service_area_m: (f64, f64),
}

impl FactoryTopology {
    pub fn validate(&self) -> Result<(), Error> {
        let mut seen = std::collections::BTreeSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id.as_str()) {
                return Err(Error::InvalidTopology(format!(
                    "duplicate node id \"{}\"",
                    node.id
                )));
            }
        }
        if self.mode == DistributionMode::InBand {
            if self.chain_order.len() != self.nodes.len() {
                return Err(Error::InvalidTopology(format!(
                    "chain_order lists {} ids for {} nodes",
                    self.chain_order.len(),
                    self.nodes.len()
                )));
            }
            let chain: std::collections::BTreeSet<&str> =
                self.chain_order.iter().map(|s| s.as_str()).collect();
            if chain != seen {
                return Err(Error::InvalidTopology(
                    "chain_order is not a permutation of node ids".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Euclidean gateway-node distance in meters.
    pub fn gateway_distance_m(&self, node: &FactoryNode) -> f64 {
        let dx = node.position_m.0 - self.gateway_position_m.0;
        let dy = node.position_m.1 - self.gateway_position_m.1;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Per-hop link and clock parameters for in-band distribution, aligned
/// with `chain_order` positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopParams {
    pub link: PtpLink,
    pub clock: SimClock,
}

/// Parameters for in-band (link-by-link) distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InBandParams {
    /// The gateway's own clock error model; its offset is the error the
    /// gateway carries into the factory.
    pub gateway: SimClock,
    /// One entry per chain position.
    pub hops: Vec<HopParams>,
}

/// Parameters for out-of-band (broadcast) distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutOfBandParams {
    pub gateway: SimClock,
    /// One entry per node, aligned with the topology's node list.
    pub node_clocks: Vec<SimClock>,
    pub compensation: DelayCompensation,
}

/// A node's post-synchronization clock error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeError {
    pub id: String,
    pub error_ns: f64,
}

const HOP_INTERVAL_NS: f64 = 1e6;

/// Relay time along the chain; node k's error is the residual accumulated
/// over k exchanges. Returned in the topology's node order.
pub fn distribute_in_band(
    topo: &FactoryTopology,
    params: &InBandParams,
    seed: u64,
) -> Result<Vec<NodeError>, Error> {
    topo.validate()?;
    if topo.mode != DistributionMode::InBand {
        return Err(Error::InvalidTopology(
            "distribute_in_band requires mode = in_band".into(),
        ));
    }
    if topo.chain_order.is_empty() {
        return Err(Error::EmptyChain);
    }
    if params.hops.len() != topo.chain_order.len() {
        return Err(Error::InvalidConfig(format!(
            "{} hop parameter sets for a {}-node chain",
            params.hops.len(),
            topo.chain_order.len()
        )));
    }
    params.gateway.validate()?;
    for hop in &params.hops {
        hop.link.validate()?;
        hop.clock.validate()?;
    }

    let mut rng = rng_from_seed(seed);
    let mut master = params.gateway;
    let mut errors: Vec<NodeError> = Vec::with_capacity(topo.chain_order.len());
    for (hop_index, id) in topo.chain_order.iter().enumerate() {
        let hop = &params.hops[hop_index];
        let t = (hop_index as f64 + 1.0) * HOP_INTERVAL_NS;
        let est = two_step_with(&master, &hop.clock, &hop.link, t, &mut rng);
        let corrected_offset = hop.clock.offset_ns - est.offset_ns;
        let synced = SimClock {
            offset_ns: corrected_offset,
            ..hop.clock
        };
        errors.push(NodeError {
            id: id.clone(),
            error_ns: synced.reading_ns(t) - t,
        });
        master = synced;
    }

    // report in topology node order
    let mut by_node = Vec::with_capacity(topo.nodes.len());
    for node in &topo.nodes {
        let e = errors.iter().find(|e| e.id == node.id).unwrap().clone();
        by_node.push(e);
    }
    Ok(by_node)
}

/// Broadcast time to every node in one delivery. Each node's error is its
/// single-hop stamping error plus the propagation-compensation residual.
pub fn distribute_out_of_band(
    topo: &FactoryTopology,
    params: &OutOfBandParams,
    seed: u64,
) -> Result<Vec<NodeError>, Error> {
    topo.validate()?;
    if topo.mode != DistributionMode::OutOfBand {
        return Err(Error::InvalidTopology(
            "distribute_out_of_band requires mode = out_of_band".into(),
        ));
    }
    if params.node_clocks.len() != topo.nodes.len() {
        return Err(Error::InvalidConfig(format!(
            "{} node clocks for {} nodes",
            params.node_clocks.len(),
            topo.nodes.len()
        )));
    }
    params.gateway.validate()?;
    for clock in &params.node_clocks {
        clock.validate()?;
    }

    let mut rng = rng_from_seed(seed);
    let t0 = HOP_INTERVAL_NS;
    // one broadcast, one origin stamp shared by every receiver
    let master_stamp = stamp_with(&params.gateway, t0, &mut rng);

    let mut out = Vec::with_capacity(topo.nodes.len());
    for (node, clock) in topo.nodes.iter().zip(&params.node_clocks) {
        let true_pd_ns = topo.gateway_distance_m(node) / SPEED_OF_LIGHT_M_PER_S * 1e9;
        let compensated_ns = match &params.compensation {
            DelayCompensation::None => 0.0,
            DelayCompensation::TrueDistance => true_pd_ns,
            DelayCompensation::EstimatedDistance(estimates) => {
                let est_m = estimates.get(&node.id).ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "no distance estimate for node \"{}\"",
                        node.id
                    ))
                })?;
                est_m / SPEED_OF_LIGHT_M_PER_S * 1e9
            }
        };
        let arrival = t0 + true_pd_ns;
        let rx_stamp = stamp_with(clock, arrival, &mut rng);
        // node steps its clock to (origin stamp + compensated delay)
        let correction = rx_stamp - (master_stamp + compensated_ns);
        let synced = SimClock {
            offset_ns: clock.offset_ns - correction,
            ..*clock
        };
        out.push(NodeError {
            id: node.id.clone(),
            error_ns: synced.reading_ns(arrival) - arrival,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn chain_topology(n: usize) -> FactoryTopology {
        let nodes: Vec<FactoryNode> = (0..n)
            .map(|i| FactoryNode {
                id: format!("n{i}"),
                position_m: (10.0 * (i + 1) as f64, 0.0),
            })
            .collect();
        let chain_order = nodes.iter().map(|n| n.id.clone()).collect();
        FactoryTopology {
            gateway_position_m: (0.0, 0.0),
            nodes,
            mode: DistributionMode::InBand,
            chain_order,
            service_area_m: (100.0, 100.0),
        }
    }

    fn broadcast_topology(n: usize) -> FactoryTopology {
        let mut topo = chain_topology(n);
        topo.mode = DistributionMode::OutOfBand;
        topo.chain_order.clear();
        topo
    }

    #[test]
    fn ideal_clock_timestamps_identity() {
        let clock = SimClock::ideal();
        assert_eq!(timestamp(&clock, 1234.5, 1), 1234.5);
    }

    #[test]
    fn quantization_rounds_ties_to_even() {
        let clock = SimClock {
            timestamp_granularity_ns: 8.0,
            ..SimClock::ideal()
        };
        assert_eq!(timestamp(&clock, 20.0, 1), 16.0); // 2.5 steps -> 2
        assert_eq!(timestamp(&clock, 28.0, 1), 32.0); // 3.5 steps -> 4
        assert_eq!(timestamp(&clock, 24.0, 1), 24.0);
    }

    #[test]
    fn drift_contribution() {
        let clock = SimClock {
            drift_ppb: 100.0,
            ..SimClock::ideal()
        };
        assert_eq!(timestamp(&clock, 1e9, 1), 1e9 + 100.0);
    }

    #[test]
    fn jitter_is_seed_deterministic() {
        let clock = SimClock {
            timestamp_jitter_sigma_ns: 5.0,
            ..SimClock::ideal()
        };
        assert_eq!(timestamp(&clock, 0.0, 7), timestamp(&clock, 7.0, 7) - 7.0);
        assert_ne!(timestamp(&clock, 0.0, 7), timestamp(&clock, 0.0, 8));
    }

    #[test]
    fn symmetric_exchange_recovers_offset_exactly() {
        let mut rng = crate::rng::rng_from_seed(99);
        for _ in 0..100 {
            // integer-valued ns keep all f64 arithmetic exact
            let offset_m = rng.random_range(-(1i64 << 31)..(1i64 << 31)) as f64;
            let offset_s = rng.random_range(-(1i64 << 31)..(1i64 << 31)) as f64;
            let delay = rng.random_range(0..(1i64 << 31)) as f64;
            let master = SimClock {
                offset_ns: offset_m,
                ..SimClock::ideal()
            };
            let slave = SimClock {
                offset_ns: offset_s,
                ..SimClock::ideal()
            };
            let est = two_step_exchange(&master, &slave, &PtpLink::symmetric(delay), 0.0, 3);
            assert_eq!(est.offset_ns, offset_s - offset_m);
            assert_eq!(est.mean_path_delay_ns, delay);
        }
    }

    #[test]
    fn asymmetric_exchange_bias_is_half_delta() {
        let link = PtpLink {
            delay_ms_to_slave_ns: 1000.0 + 64.0,
            delay_slave_to_ms_ns: 1000.0,
        };
        let est = two_step_exchange(&SimClock::ideal(), &SimClock::ideal(), &link, 0.0, 3);
        assert_eq!(est.offset_ns, 32.0);
    }

    #[test]
    fn exchange_jitter_propagates_as_sigma() {
        let sigma = 10.0;
        let clock = SimClock {
            timestamp_jitter_sigma_ns: sigma,
            ..SimClock::ideal()
        };
        let n = 100_000;
        let mut sum_sq = 0.0;
        for seed in 0..n {
            let est =
                two_step_exchange(&clock, &clock, &PtpLink::symmetric(500.0), 0.0, seed as u64);
            sum_sq += est.offset_ns * est.offset_ns;
        }
        let std = (sum_sq / n as f64).sqrt();
        assert!(
            (std - sigma).abs() / sigma < 0.05,
            "offset error std = {std}, expected {sigma}"
        );
    }

    #[test]
    fn single_perfect_hop_has_zero_error() {
        let topo = chain_topology(1);
        let params = InBandParams {
            gateway: SimClock::ideal(),
            hops: vec![HopParams {
                link: PtpLink::symmetric(100.0),
                clock: SimClock {
                    offset_ns: 12345.0,
                    ..SimClock::ideal()
                },
            }],
        };
        let errors = distribute_in_band(&topo, &params, 1).unwrap();
        assert_eq!(errors[0].error_ns, 0.0);
    }

    #[test]
    fn chain_errors_random_walk() {
        let n_hops = 10;
        let sigma = 4.0;
        let topo = chain_topology(n_hops);
        let hop = HopParams {
            link: PtpLink::symmetric(500.0),
            clock: SimClock {
                timestamp_jitter_sigma_ns: sigma,
                ..SimClock::ideal()
            },
        };
        let params = InBandParams {
            gateway: SimClock::ideal(),
            hops: vec![hop; n_hops],
        };
        let trials = 2000;
        let mut sum_sq = 0.0;
        for seed in 0..trials {
            let errors = distribute_in_band(&topo, &params, seed).unwrap();
            let last = errors.last().unwrap().error_ns;
            sum_sq += last * last;
        }
        let std = (sum_sq / trials as f64).sqrt();
        let expected = sigma * (n_hops as f64).sqrt();
        assert!(
            (std - expected).abs() / expected < 0.10,
            "std at hop {n_hops} = {std}, expected {expected}"
        );
    }

    #[test]
    fn chain_asymmetry_bias_accumulates() {
        let n_hops = 7;
        let delta = 50.0;
        let topo = chain_topology(n_hops);
        let hop = HopParams {
            link: PtpLink {
                delay_ms_to_slave_ns: 1000.0 + delta,
                delay_slave_to_ms_ns: 1000.0,
            },
            clock: SimClock::ideal(),
        };
        let params = InBandParams {
            gateway: SimClock::ideal(),
            hops: vec![hop; n_hops],
        };
        let errors = distribute_in_band(&topo, &params, 5).unwrap();
        for (k, id) in topo.chain_order.iter().enumerate() {
            let err = errors.iter().find(|e| &e.id == id).unwrap().error_ns;
            // slave is corrected by -(true + delta/2) per hop
            assert_eq!(err, -((k + 1) as f64) * delta / 2.0);
        }
    }

    #[test]
    fn broadcast_colocated_perfect_node_is_exact() {
        let mut topo = broadcast_topology(1);
        topo.nodes[0].position_m = topo.gateway_position_m;
        let params = OutOfBandParams {
            gateway: SimClock::ideal(),
            node_clocks: vec![SimClock {
                offset_ns: -777.0,
                ..SimClock::ideal()
            }],
            compensation: DelayCompensation::None,
        };
        let errors = distribute_out_of_band(&topo, &params, 1).unwrap();
        assert_eq!(errors[0].error_ns, 0.0);
    }

    #[test]
    fn broadcast_uncompensated_charges_propagation_delay() {
        let mut topo = broadcast_topology(1);
        topo.nodes[0].position_m = (100.0, 0.0);
        let params = OutOfBandParams {
            gateway: SimClock::ideal(),
            node_clocks: vec![SimClock::ideal()],
            compensation: DelayCompensation::None,
        };
        let errors = distribute_out_of_band(&topo, &params, 1).unwrap();
        assert!(
            (errors[0].error_ns.abs() - 333.5640951981521).abs() < 1e-9,
            "error = {}",
            errors[0].error_ns
        );

        // with true-distance compensation the same node is exact
        let params = OutOfBandParams {
            compensation: DelayCompensation::TrueDistance,
            ..params
        };
        let errors = distribute_out_of_band(&topo, &params, 1).unwrap();
        assert_eq!(errors[0].error_ns, 0.0);
    }

    #[test]
    fn broadcast_error_spread_is_node_independent() {
        let n = 6;
        let topo = broadcast_topology(n);
        let clock = SimClock {
            timestamp_jitter_sigma_ns: 8.0,
            ..SimClock::ideal()
        };
        let params = OutOfBandParams {
            gateway: clock,
            node_clocks: vec![clock; n],
            compensation: DelayCompensation::TrueDistance,
        };
        let trials = 4000;
        let mut sum_sq = vec![0.0f64; n];
        for seed in 0..trials {
            let errors = distribute_out_of_band(&topo, &params, seed).unwrap();
            for (i, e) in errors.iter().enumerate() {
                sum_sq[i] += e.error_ns * e.error_ns;
            }
        }
        let stds: Vec<f64> = sum_sq
            .iter()
            .map(|s| (s / trials as f64).sqrt())
            .collect();
        let mean = stds.iter().sum::<f64>() / n as f64;
        for std in &stds {
            assert!((std - mean).abs() / mean < 0.10, "stds = {stds:?}");
        }
    }

    #[test]
    fn estimated_distance_compensation_residual() {
        let mut topo = broadcast_topology(1);
        topo.nodes[0].position_m = (90.0, 0.0);
        let mut estimates = BTreeMap::new();
        estimates.insert("n0".to_string(), 60.0); // 30 m short
        let params = OutOfBandParams {
            gateway: SimClock::ideal(),
            node_clocks: vec![SimClock::ideal()],
            compensation: DelayCompensation::EstimatedDistance(estimates),
        };
        let errors = distribute_out_of_band(&topo, &params, 1).unwrap();
        let expected = 30.0 / SPEED_OF_LIGHT_M_PER_S * 1e9;
        assert!((errors[0].error_ns.abs() - expected).abs() < 1e-9);
    }

    #[test]
    fn topology_validation_catches_mistakes() {
        let mut topo = chain_topology(2);
        topo.nodes[1].id = "n0".into();
        assert!(matches!(
            topo.validate(),
            Err(Error::InvalidTopology(_))
        ));

        let mut topo = chain_topology(2);
        topo.chain_order = vec!["n0".into(), "nX".into()];
        assert!(topo.validate().is_err());

        let mut topo = chain_topology(2);
        topo.chain_order.pop();
        assert!(topo.validate().is_err());

        let topo = chain_topology(0);
        let params = InBandParams {
            gateway: SimClock::ideal(),
            hops: vec![],
        };
        assert!(matches!(
            distribute_in_band(&topo, &params, 1),
            Err(Error::EmptyChain)
        ));
    }

    #[test]
    fn distribution_is_seed_deterministic() {
        let n = 5;
        let topo = chain_topology(n);
        let hop = HopParams {
            link: PtpLink::symmetric(200.0),
            clock: SimClock {
                timestamp_jitter_sigma_ns: 3.0,
                timestamp_granularity_ns: 8.0,
                ..SimClock::ideal()
            },
        };
        let params = InBandParams {
            gateway: SimClock::ideal(),
            hops: vec![hop; n],
        };
        let a = distribute_in_band(&topo, &params, 42).unwrap();
        let b = distribute_in_band(&topo, &params, 42).unwrap();
        assert_eq!(a, b);
    }
}
