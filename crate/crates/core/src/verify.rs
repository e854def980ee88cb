//! Randomised property suites comparing the engine with the oracles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assign::AssignMode;
use crate::auction::{run_auction, AuctionConfig};
use crate::bidder::{BidderProfiles, Price, ValuationVector};
use crate::channels::ChannelSet;
use crate::error::Result;
use crate::oracle::{enumerate_deviations, optimal_welfare};
use crate::scenario::{ConflictGraph, Point};
use crate::units::Amount;

/// Shape of the random desk-scale instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallInstanceSpec {
    pub max_n: usize,
    pub max_channels: usize,
    pub max_demand: usize,
    pub v_max: Price,
    pub edge_probability: f64,
    /// Every bidder sees every channel.
    pub homogeneous: bool,
    /// Complete conflict graph.
    pub clique: bool,
    /// No unit value appears twice in an instance.
    pub distinct_values: bool,
    /// Lowest unit value drawn.
    pub v_min: Price,
}

impl Default for SmallInstanceSpec {
    fn default() -> Self {
        SmallInstanceSpec {
            max_n: 6,
            max_channels: 4,
            max_demand: 3,
            v_max: 12,
            edge_probability: 0.45,
            homogeneous: false,
            clique: false,
            distinct_values: false,
            v_min: 0,
        }
    }
}

impl SmallInstanceSpec {
    /// Instance number `index` of the family seeded by `seed`.
    pub fn instance(&self, seed: u64, index: u64) -> (ConflictGraph, BidderProfiles) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let n = rng.gen_range(2..=self.max_n.max(2));
        let c = rng.gen_range(1..=self.max_channels.max(1));
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.clique || rng.gen_bool(self.edge_probability) {
                    edges.push((a, b));
                }
            }
        }
        let availability = (0..n)
            .map(|_| if self.homogeneous { ChannelSet::full(c) } else { (0..c).filter(|_| rng.gen_bool(0.7)).collect() })
            .collect();
        let graph = ConflictGraph::from_edges(n, c, &edges, availability)
            .and_then(|g| {
                let positions = (0..n).map(|_| Point::new(rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0))).collect();
                g.with_positions(positions)
            })
            .expect("generated graph is valid");

        let lens: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=self.max_demand)).collect();
        let total: usize = lens.iter().sum();
        let mut pool: Vec<Price> = if self.distinct_values {
            let hi = self.v_max.max(self.v_min + total as Price);
            let mut all: Vec<Price> = (self.v_min..=hi).collect();
            all.shuffle(&mut rng);
            all.truncate(total);
            all
        } else {
            (0..total).map(|_| rng.gen_range(self.v_min..=self.v_max)).collect()
        };
        let profiles =
            BidderProfiles::new(lens.iter().map(|&l| ValuationVector::from_unsorted(pool.drain(..l).collect())).collect());
        (graph, profiles)
    }
}

/// Counts of a suite run. `violations` lists instance indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub instances: usize,
    pub checks: u64,
    pub violations: Vec<u64>,
    /// Largest observed excess (utility gain or welfare shortfall), in
    /// 1/10000 currency units.
    pub worst: i64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Probes every bidder of `count` instances with every weakly decreasing
/// report over `{0..=v_max}` of length at most its true demand.
pub fn truthfulness_suite(
    spec: &SmallInstanceSpec,
    config: &AuctionConfig,
    seed: u64,
    count: u64,
) -> Result<SuiteReport> {
    let config = config.without_log();
    let mut report = SuiteReport::default();
    for index in 0..count {
        let (graph, profiles) = spec.instance(seed, index);
        let mut violated = false;
        for i in 0..graph.len() {
            let probe = enumerate_deviations(&profiles, i, spec.v_max, |reported| {
                let o = run_auction(&graph, reported, &config)?;
                Ok((o.counts, o.payments))
            })?;
            report.checks += probe.enumerated;
            report.worst = report.worst.max(probe.gain());
            violated |= probe.gain() > 0;
        }
        if violated {
            report.violations.push(index);
        }
        report.instances += 1;
    }
    Ok(report)
}

/// Compares engine welfare with the exhaustive optimum on `count` instances.
pub fn efficiency_suite(
    spec: &SmallInstanceSpec,
    config: &AuctionConfig,
    seed: u64,
    count: u64,
) -> Result<SuiteReport> {
    let config = config.without_log();
    let mut report = SuiteReport::default();
    for index in 0..count {
        let (graph, profiles) = spec.instance(seed, index);
        let outcome = run_auction(&graph, &profiles, &config)?;
        let best = optimal_welfare(&graph, &profiles, AssignMode::Exclusive)?;
        let got = Amount::from_units(outcome.welfare(&profiles));
        report.checks += 1;
        let shortfall = best.best_value.raw() as i64 - got.raw() as i64;
        report.worst = report.worst.max(shortfall);
        if shortfall != 0 {
            report.violations.push(index);
        }
        report.instances += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible_and_shaped() {
        let spec = SmallInstanceSpec { distinct_values: true, v_min: 1, ..Default::default() };
        for index in 0..50 {
            let (g, p) = spec.instance(1, index);
            assert_eq!((g, p.clone()), spec.instance(1, index));
            let (g, _) = spec.instance(1, index);
            assert!(g.len() >= 2 && g.len() <= 6 && g.channels() <= 4);
            let mut all: Vec<Price> = p.iter().flat_map(|v| v.values().to_vec()).collect();
            let before = all.len();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), before);
            assert!(all.iter().all(|&v| v >= 1));
        }
        let clique = SmallInstanceSpec { clique: true, homogeneous: true, ..Default::default() };
        let (g, _) = clique.instance(2, 0);
        assert_eq!(g.edge_count(), g.len() * (g.len() - 1) / 2);
    }

    #[test]
    fn suites_run() {
        let spec = SmallInstanceSpec { max_n: 4, max_demand: 2, v_max: 6, ..Default::default() };
        let t = truthfulness_suite(&spec, &AuctionConfig::new(1, 1), 5, 10).unwrap();
        assert_eq!(t.instances, 10);
        assert!(t.passed(), "{t:?}");
        let e = efficiency_suite(&spec, &AuctionConfig::new(0, 1), 5, 10).unwrap();
        assert_eq!(e.instances, 10);
    }
}
