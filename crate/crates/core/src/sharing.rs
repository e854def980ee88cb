//! Channel sharing among interfering bidders.
//!
//! A bidder `p` may use channel `k` alongside co-channel neighbours `S` when
//! either nobody in `S` is present, or both
//!
//! * the interference temperature seen by `p` from `S` is below `tau`, and
//! * the neighbours' bandwidth fractions satisfy `sum b_q < 1 - b_p`.
//!
//! The clinching rule is the exclusive one with `x_i` replaced by the
//! bidder's usable channel opportunities: for every channel available at
//! `i`, the number of bidders in `i`'s closed neighbourhood that could use it
//! together with `i`. Admission is sequential (`i` first, then neighbours by
//! ascending id) and each admitted group must satisfy the rule above for
//! every member. With `b = 1` or `tau = 0` nobody can be admitted next to
//! `i`, the opportunity count collapses to `x_i`, and the exclusive auction
//! is reproduced exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assign::{AssignMode, Assignment};
use crate::auction::{clinch, AuctionConfig, Outcome};
use crate::bidder::{BidderProfiles, Price};
use crate::error::{Error, Result};
use crate::scenario::{stream_rng, ConflictGraph, STREAM_SHARING};
use crate::units::{Amount, Share, SCALE};

pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Log-distance received power: `P0 * (max(d, d0) / d0)^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceModel {
    pub ref_power_w: f64,
    pub ref_distance_m: f64,
    pub path_loss_exponent: f64,
}

impl Default for InterferenceModel {
    fn default() -> Self {
        InterferenceModel { ref_power_w: 1e-12, ref_distance_m: 10.0, path_loss_exponent: 3.0 }
    }
}

impl InterferenceModel {
    pub fn received_power(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.ref_distance_m);
        self.ref_power_w * (d / self.ref_distance_m).powf(-self.path_loss_exponent)
    }
}

/// Per-bidder bandwidth fractions plus the global feasibility threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SharingParams {
    /// `b_i`, applied to every channel of bidder `i`.
    pub shares: Vec<Share>,
    /// Interference temperature threshold in kelvin.
    pub tau: f64,
    pub channel_bandwidth_hz: f64,
    pub model: InterferenceModel,
}

impl SharingParams {
    pub fn uniform(bidders: usize, share: Share, tau: f64) -> Self {
        SharingParams {
            shares: vec![share; bidders],
            tau,
            channel_bandwidth_hz: SharingConfig::default().channel_bandwidth_hz,
            model: InterferenceModel::default(),
        }
    }

    pub fn validate(&self, bidders: usize) -> Result<()> {
        if self.shares.len() != bidders {
            return Err(Error::Config(format!(
                "{} bandwidth fractions for {bidders} bidders",
                self.shares.len()
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::Config("tau must be non-negative".into()));
        }
        if !(self.channel_bandwidth_hz > 0.0) {
            return Err(Error::Config("channel bandwidth must be positive".into()));
        }
        Ok(())
    }

    pub fn share(&self, i: usize) -> Share {
        self.shares[i]
    }
}

/// Sharing block of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharingConfig {
    /// Bandwidth fractions are drawn uniformly from `[b_min, b_max]`.
    pub b_min: f64,
    pub b_max: f64,
    pub tau: f64,
    pub channel_bandwidth_hz: f64,
    pub ref_power_w: f64,
    pub ref_distance_m: f64,
    pub path_loss_exponent: f64,
}

impl Default for SharingConfig {
    fn default() -> Self {
        let model = InterferenceModel::default();
        SharingConfig {
            b_min: 0.2,
            b_max: 0.6,
            tau: 1000.0,
            channel_bandwidth_hz: 8e6,
            ref_power_w: model.ref_power_w,
            ref_distance_m: model.ref_distance_m,
            path_loss_exponent: model.path_loss_exponent,
        }
    }
}

impl SharingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.b_min) || !(0.0..=1.0).contains(&self.b_max) || self.b_min > self.b_max {
            return Err(Error::Config("need 0 <= b_min <= b_max <= 1".into()));
        }
        if !(self.tau >= 0.0) || !(self.channel_bandwidth_hz > 0.0) {
            return Err(Error::Config("tau must be >= 0 and bandwidth > 0".into()));
        }
        if !(self.ref_power_w >= 0.0 && self.ref_distance_m > 0.0 && self.path_loss_exponent >= 0.0) {
            return Err(Error::Config("invalid interference model".into()));
        }
        Ok(())
    }

    /// Draws per-bidder fractions from the instance seed's sharing stream.
    pub fn params_for(&self, bidders: usize, seed: u64) -> Result<SharingParams> {
        self.validate()?;
        let mut rng = stream_rng(seed, STREAM_SHARING);
        let shares = (0..bidders)
            .map(|_| {
                let b = if self.b_min == self.b_max { self.b_min } else { rng.gen_range(self.b_min..=self.b_max) };
                Share::from_f64(b).expect("validated range")
            })
            .collect();
        Ok(SharingParams {
            shares,
            tau: self.tau,
            channel_bandwidth_hz: self.channel_bandwidth_hz,
            model: InterferenceModel {
                ref_power_w: self.ref_power_w,
                ref_distance_m: self.ref_distance_m,
                path_loss_exponent: self.path_loss_exponent,
            },
        })
    }
}

/// Interference temperature at `i` from co-channel `sharers`, in kelvin.
///
/// Each sharer's received power is spread over the channel, so `i` collects
/// the `b_i` portion of it; the total is normalised by `k_B * B`.
pub fn interference_temperature(
    graph: &ConflictGraph,
    params: &SharingParams,
    i: usize,
    sharers: impl IntoIterator<Item = usize>,
) -> f64 {
    let at = graph.position(i);
    let power: f64 = sharers.into_iter().map(|q| params.model.received_power(at.distance(graph.position(q)))).sum();
    params.share(i).as_f64() * power / (BOLTZMANN * params.channel_bandwidth_hz)
}

/// Whether bidder `p` tolerates the co-channel `sharers` (all neighbours of `p`).
pub fn tolerates(graph: &ConflictGraph, params: &SharingParams, p: usize, sharers: &[usize]) -> bool {
    if sharers.is_empty() {
        return true;
    }
    let used: u64 = sharers.iter().map(|&q| params.share(q).basis_points() as u64).sum();
    let room = SCALE - params.share(p).basis_points() as u64;
    used < room && interference_temperature(graph, params, p, sharers.iter().copied()) < params.tau
}

/// Channel usability factor `F_i(k)` given the channels already assigned.
pub fn usability(graph: &ConflictGraph, params: &SharingParams, assignment: &Assignment, i: usize, k: usize) -> bool {
    if !graph.availability(i).contains(k) {
        return false;
    }
    let sharers: Vec<usize> =
        graph.neighbors(i).iter().copied().filter(|&j| assignment.get(j).contains(k)).collect();
    tolerates(graph, params, i, &sharers)
}

/// Whether every member of `group` tolerates its adjacent co-members.
pub fn group_fits(graph: &ConflictGraph, params: &SharingParams, group: &[usize]) -> bool {
    group.iter().all(|&m| {
        let sharers: Vec<usize> = group.iter().copied().filter(|&q| q != m && graph.are_adjacent(m, q)).collect();
        tolerates(graph, params, m, &sharers)
    })
}

/// Users admitted on channel `k` in `i`'s closed neighbourhood: `i` first,
/// then neighbours holding `k` by ascending id while the group still fits.
fn admitted_on(graph: &ConflictGraph, params: &SharingParams, i: usize, k: usize) -> u32 {
    let mut group = vec![i];
    for &j in graph.neighbors(i) {
        if graph.availability(j).contains(k) {
            group.push(j);
            if !group_fits(graph, params, &group) {
                group.pop();
            }
        }
    }
    group.len() as u32
}

/// `C_i^opp = sum_k X_i(k) * sum_{j in N_i + i} F_j(k)`.
pub fn usable_channel_opportunities(graph: &ConflictGraph, params: &SharingParams, i: usize) -> u32 {
    graph.availability(i).iter().map(|k| admitted_on(graph, params, i, k)).sum()
}

pub fn opportunity_counts(graph: &ConflictGraph, params: &SharingParams) -> Vec<u32> {
    (0..graph.len()).map(|i| usable_channel_opportunities(graph, params, i)).collect()
}

/// `Price_i(k) * b_i(k)` in whole units, half rounded up.
pub fn shared_price(exclusive_price: Price, share: Share) -> u64 {
    Amount::of(exclusive_price, 1, share).rounded()
}

/// Auction with channel sharing.
///
/// The exclusive-use allocation is computed and assigned first; the extra
/// channels won through shared opportunities are then placed on top of it
/// wherever [`usability`] allows. Payments are the clinch prices scaled by
/// each winner's bandwidth fraction.
pub fn run_sharing_auction(
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    config: &AuctionConfig,
    params: &SharingParams,
) -> Result<Outcome> {
    params.validate(graph.len())?;
    let exclusive_supply: Vec<u32> = (0..graph.len()).map(|i| graph.available_count(i)).collect();
    let exclusive = clinch(graph, profiles, &exclusive_supply, &config.without_log())?;
    let base = exclusive.realize(graph, Assignment::empty(graph.len()), AssignMode::Exclusive, None).assignment;

    let supply = opportunity_counts(graph, params);
    let shared = clinch(graph, profiles, &supply, config)?;
    Ok(shared.realize(graph, base, AssignMode::Sharing(params), Some(&params.shares)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::run_auction;
    use crate::bidder::ValuationVector;
    use crate::channels::ChannelSet;
    use crate::scenario::Point;

    fn share(x: f64) -> Share {
        Share::from_f64(x).unwrap()
    }

    fn pair(distance: f64) -> ConflictGraph {
        ConflictGraph::clique(2, 1)
            .unwrap()
            .with_positions(vec![Point::new(0.0, 0.0), Point::new(distance, 0.0)])
            .unwrap()
    }

    #[test]
    fn temperature_examples() {
        let g = pair(10.0);
        let params = SharingParams::uniform(2, Share::FULL, 1e9);
        assert_eq!(interference_temperature(&g, &params, 0, []), 0.0);

        let one = interference_temperature(&g, &params, 0, [1]);
        let expected = params.model.ref_power_w / (BOLTZMANN * params.channel_bandwidth_hz);
        assert!((one - expected).abs() <= 1e-9 * expected);

        let g3 = ConflictGraph::clique(3, 1)
            .unwrap()
            .with_positions(vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(-10.0, 0.0)])
            .unwrap();
        let params3 = SharingParams::uniform(3, Share::FULL, 1e9);
        let two = interference_temperature(&g3, &params3, 0, [1, 2]);
        let direct = interference_temperature(&g3, &params3, 0, [1]) + interference_temperature(&g3, &params3, 0, [2]);
        assert_eq!(two, direct);
        assert!((two - 2.0 * one).abs() <= 1e-9 * one);
    }

    #[test]
    fn usability_examples() {
        let g = pair(25.0);
        let mut held = Assignment::empty(2);
        held.insert(1, 0);

        let full = SharingParams::uniform(2, Share::FULL, 1e9);
        assert!(!usability(&g, &full, &held, 0, 0));

        let mut mixed = SharingParams::uniform(2, share(0.4), 1e9);
        mixed.shares[1] = share(0.5);
        assert!(usability(&g, &mixed, &held, 0, 0));

        let cold = SharingParams { tau: 0.0, ..mixed.clone() };
        assert!(!usability(&g, &cold, &held, 0, 0));
        // nobody else on the channel: usable even at tau = 0
        assert!(usability(&g, &cold, &Assignment::empty(2), 0, 0));
    }

    #[test]
    fn opportunities_count_every_admissible_neighbour() {
        // star: 0 in the middle, both leaves can share both channels with it
        let g = ConflictGraph::from_edges(3, 2, &[(0, 1), (0, 2)], vec![ChannelSet::full(2); 3]).unwrap();
        let params = SharingParams::uniform(3, share(0.3), 1e9);
        assert_eq!(usable_channel_opportunities(&g, &params, 0), 6);
        let exclusive = SharingParams::uniform(3, Share::FULL, 1e9);
        assert_eq!(usable_channel_opportunities(&g, &exclusive, 0), 2);
    }

    #[test]
    fn shared_price_examples() {
        assert_eq!(shared_price(10, share(0.5)), 5);
        assert_eq!(shared_price(13, Share::FULL), 13);
        assert_eq!(shared_price(7, share(0.3)), 2);
    }

    #[test]
    fn full_bandwidth_reduces_to_exclusive() {
        let g = ConflictGraph::from_edges(4, 2, &[(0, 1), (1, 2), (2, 3), (0, 2)], vec![ChannelSet::full(2); 4])
            .unwrap();
        let p = BidderProfiles::new(
            [&[40u32, 30][..], &[35], &[50, 12], &[22, 21]]
                .iter()
                .map(|v| ValuationVector::new(v.to_vec()).unwrap())
                .collect(),
        );
        let config = AuctionConfig::new(1, 1);
        let excl = run_auction(&g, &p, &config).unwrap();
        let shared = run_sharing_auction(&g, &p, &config, &SharingParams::uniform(4, Share::FULL, 1e9)).unwrap();
        assert_eq!(excl, shared);
    }

    #[test]
    fn low_fractions_let_a_pair_share() {
        let g = pair(25.0);
        let p = BidderProfiles::new(vec![
            ValuationVector::new(vec![20]).unwrap(),
            ValuationVector::new(vec![15]).unwrap(),
        ]);
        let config = AuctionConfig::new(1, 1);
        let excl = run_auction(&g, &p, &config).unwrap();
        assert_eq!(excl.winners(), 1);
        let out = run_sharing_auction(&g, &p, &config, &SharingParams::uniform(2, share(0.4), 1e9)).unwrap();
        assert_eq!(out.counts, vec![1, 1]);
        // both clinch at the reserve, paying 40% of it
        assert_eq!(out.payments, vec![Amount::from_raw(4000); 2]);
    }
}
