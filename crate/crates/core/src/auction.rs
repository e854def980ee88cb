//! Exclusive-use ascending clinching auction on a conflict graph.
//!
//! Each round the auctioneer announces a price, every bidder reports how many
//! channels it values strictly above that price, and bidder `i` clinches
//! whatever part of its supply its conflict neighbours can no longer claim:
//!
//! ```text
//! C_i(t) = min(D_i(p_t), x_i, max(0, supply_i - K_i(p_t)))
//! K_i(p_t) = sum over neighbours j of min(max(D_j(p_t), C_j), |X_i & X_j|)
//! ```
//!
//! A neighbour that cannot use any of `i`'s channels, or has dropped out
//! without winning anything, claims nothing, so channels exclusive to `i`
//! are clinched as soon as `i` demands them. A neighbour that already won
//! channels keeps claiming them after its demand falls. With identical
//! availability and no such holders this is `x_i - D_-i(p_t) + E_i(p_t)`.
//!
//! Every bidder's final count then fits next to its neighbours' counts, so
//! any greedy channel assignment succeeds. Cumulative clinches never
//! decrease; units clinched in a round are paid at that round's price. The
//! price rises by the step size until nobody demands anything.
//!
//! `supply_i` is `x_i` for exclusive use; the sharing engine substitutes its
//! usable-opportunity count and reuses everything else here.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::assign::{assign_best_effort, AssignMode, Assignment};
use crate::bidder::{BidderProfiles, Price};
use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::scenario::ConflictGraph;
use crate::units::{Amount, Share};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuctionConfig {
    pub reserve_price: Price,
    pub step_size: Price,
    /// Keep the per-round demand log in the outcome.
    pub record_log: bool,
}

impl Default for AuctionConfig {
    fn default() -> Self {
        AuctionConfig { reserve_price: 10, step_size: 1, record_log: true }
    }
}

impl AuctionConfig {
    pub fn new(reserve_price: Price, step_size: Price) -> Self {
        AuctionConfig { reserve_price, step_size, record_log: true }
    }

    pub fn without_log(self) -> Self {
        AuctionConfig { record_log: false, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_size == 0 {
            return Err(Error::Config("step_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// One clinch: `count` channels won by `bidder` at `price` in `round`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClinchEntry {
    pub round: u32,
    pub bidder: usize,
    pub count: u32,
    pub price: Price,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u32,
    pub price: Price,
    pub demands: Vec<u32>,
    /// `(bidder, channels clinched this round)`, ascending bidder id.
    pub clinches: Vec<(usize, u32)>,
}

impl RoundRecord {
    /// `round=<t> price=<p> demand=<d0,d1,..> clinch=<i:c,..>`
    pub fn to_line(&self) -> String {
        let mut line = format!("round={} price={} demand=", self.round, self.price);
        join_into(&mut line, self.demands.iter());
        line.push_str(" clinch=");
        for (n, (i, c)) in self.clinches.iter().enumerate() {
            if n > 0 {
                line.push(',');
            }
            let _ = write!(line, "{i}:{c}");
        }
        line
    }
}

fn join_into<T: std::fmt::Display>(out: &mut String, items: impl Iterator<Item = T>) {
    for (n, x) in items.enumerate() {
        if n > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x}");
    }
}

/// Mutable auction state between rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionState {
    /// Rounds completed so far.
    pub round: u32,
    /// Price of the next round.
    pub price: Price,
    pub demands: Vec<u32>,
    pub neighbor_demand: Vec<u32>,
    pub exclusive: Vec<u32>,
    /// Neighbour demand on each bidder's channels, every neighbour capped by
    /// how many of the bidder's channels it can use at all.
    pub contested: Vec<u32>,
    pub cumulative: Vec<u32>,
    pub ledger: Vec<ClinchEntry>,
}

impl AuctionState {
    pub fn new(bidders: usize, reserve_price: Price) -> Self {
        AuctionState {
            round: 0,
            price: reserve_price,
            demands: vec![0; bidders],
            neighbor_demand: vec![0; bidders],
            exclusive: vec![0; bidders],
            contested: vec![0; bidders],
            cumulative: vec![0; bidders],
            ledger: Vec::new(),
        }
    }
}

/// Channels available at `i` and at none of its neighbours with positive demand.
pub fn count_exclusive(graph: &ConflictGraph, demands: &[u32], i: usize) -> u32 {
    let contested = graph
        .neighbors(i)
        .iter()
        .filter(|&&j| demands[j] > 0)
        .fold(ChannelSet::EMPTY, |acc, &j| acc.union(graph.availability(j)));
    graph.availability(i).difference(contested).len()
}

/// Demands at `price`, each capped at the bidder's available channel count.
fn refresh_demands(state: &mut AuctionState, graph: &ConflictGraph, profiles: &BidderProfiles, price: Price) {
    for (i, d) in state.demands.iter_mut().enumerate() {
        *d = profiles.get(i).demand_at(price).min(graph.available_count(i));
    }
}

/// Plays one round at `state.price` and advances the price.
///
/// Returns `None` without touching the state when no bidder has positive
/// demand at the current price, i.e. the auction is over.
pub fn run_round(
    state: &mut AuctionState,
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    supply: &[u32],
    step_size: Price,
) -> Option<RoundRecord> {
    let price = state.price;
    refresh_demands(state, graph, profiles, price);
    if state.demands.iter().all(|&d| d == 0) {
        return None;
    }
    let round = state.round + 1;
    let mut clinches = Vec::new();
    for i in 0..graph.len() {
        let x = graph.availability(i);
        state.neighbor_demand[i] = graph.neighbors(i).iter().map(|&j| state.demands[j]).sum();
        state.exclusive[i] = count_exclusive(graph, &state.demands, i);
        let contested: u32 = graph
            .neighbors(i)
            .iter()
            .map(|&j| state.demands[j].min(x.intersection(graph.availability(j)).len()))
            .sum();
        state.contested[i] = contested;

        let guaranteed = supply[i].saturating_sub(contested);
        let target = guaranteed.min(state.demands[i]).min(x.len());
        if target > state.cumulative[i] {
            let count = target - state.cumulative[i];
            state.cumulative[i] = target;
            state.ledger.push(ClinchEntry { round, bidder: i, count, price });
            clinches.push((i, count));
        }
    }
    state.round = round;
    state.price = price.saturating_add(step_size);
    Some(RoundRecord { round, price, demands: state.demands.clone(), clinches })
}

/// Raw result of the clinching process, before channels are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClinchResult {
    pub counts: Vec<u32>,
    pub ledger: Vec<ClinchEntry>,
    pub rounds: u32,
    pub log: Vec<RoundRecord>,
}

impl ClinchResult {
    /// `S_i = sum_t p_t * c_i^t`, scaled by each bidder's bandwidth share.
    pub fn payments(&self, shares: Option<&[Share]>) -> Vec<Amount> {
        let mut out = vec![Amount::ZERO; self.counts.len()];
        for e in &self.ledger {
            let share = shares.map_or(Share::FULL, |s| s[e.bidder]);
            out[e.bidder] += Amount::of(e.price, e.count, share);
        }
        out
    }

    /// Places the clinched channels on top of `base` and settles payments.
    ///
    /// Channels that no assignment search could place are dropped; the
    /// bidder is refunded for its most expensive clinches first and the
    /// dropped count is reported in [`Outcome::unplaced`].
    pub fn realize(self, graph: &ConflictGraph, base: Assignment, mode: AssignMode<'_>, shares: Option<&[Share]>) -> Outcome {
        let mut payments = self.payments(shares);
        let (assignment, unplaced) = assign_best_effort(base, &self.counts, graph, mode, &payments);
        let mut counts = self.counts;
        for (i, &u) in unplaced.iter().enumerate().filter(|(_, &u)| u > 0) {
            counts[i] -= u;
            let share = shares.map_or(Share::FULL, |s| s[i]);
            let mut prices: Vec<Price> = self
                .ledger
                .iter()
                .filter(|e| e.bidder == i)
                .flat_map(|e| std::iter::repeat(e.price).take(e.count as usize))
                .collect();
            prices.sort_unstable_by(|a, b| b.cmp(a));
            let refund: Amount = prices[..u as usize].iter().map(|&p| Amount::of(p, 1, share)).sum();
            payments[i] = Amount::from_raw(payments[i].raw() - refund.raw());
        }
        Outcome {
            revenue: payments.iter().copied().sum(),
            counts,
            payments,
            assignment,
            unplaced,
            rounds: self.rounds,
            ledger: self.ledger,
            log: self.log,
        }
    }
}

/// Runs rounds from the reserve price until demand vanishes.
pub fn clinch(
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    supply: &[u32],
    config: &AuctionConfig,
) -> Result<ClinchResult> {
    config.validate()?;
    if graph.len() != profiles.len() || supply.len() != graph.len() {
        return Err(Error::Instance("graph, profiles and supply disagree on bidder count".into()));
    }
    let mut state = AuctionState::new(graph.len(), config.reserve_price);
    let mut log = Vec::new();
    // Safety bound: nobody demands anything above the highest valuation.
    let ceiling = profiles.max_value().saturating_add(config.step_size);
    while state.price <= ceiling {
        match run_round(&mut state, graph, profiles, supply, config.step_size) {
            Some(record) => {
                if config.record_log {
                    log.push(record);
                }
            }
            None => break,
        }
        if state.price == Price::MAX {
            break;
        }
    }
    Ok(ClinchResult { counts: state.cumulative, ledger: state.ledger, rounds: state.round, log })
}

/// Final auction result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Channels won per bidder, `y_i`.
    pub counts: Vec<u32>,
    /// Total payment per bidder, `S_i`.
    pub payments: Vec<Amount>,
    pub assignment: Assignment,
    pub revenue: Amount,
    /// Clinched channels the assignment could not place, per bidder.
    /// Ledger counts equal `counts + unplaced`.
    pub unplaced: Vec<u32>,
    pub rounds: u32,
    pub ledger: Vec<ClinchEntry>,
    pub log: Vec<RoundRecord>,
}

impl Outcome {
    pub fn empty(bidders: usize) -> Self {
        Outcome {
            counts: vec![0; bidders],
            payments: vec![Amount::ZERO; bidders],
            assignment: Assignment::empty(bidders),
            revenue: Amount::ZERO,
            unplaced: vec![0; bidders],
            rounds: 0,
            ledger: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn winners(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Sum of the winners' true values for the channels they received.
    pub fn welfare(&self, profiles: &BidderProfiles) -> u64 {
        self.counts.iter().enumerate().map(|(i, &c)| profiles.get(i).value_of(c as usize)).sum()
    }
}

/// Exclusive-use auction with greedy concrete channel assignment.
pub fn run_auction(graph: &ConflictGraph, profiles: &BidderProfiles, config: &AuctionConfig) -> Result<Outcome> {
    let supply: Vec<u32> = (0..graph.len()).map(|i| graph.available_count(i)).collect();
    let result = clinch(graph, profiles, &supply, config)?;
    Ok(result.realize(graph, Assignment::empty(graph.len()), AssignMode::Exclusive, None))
}
