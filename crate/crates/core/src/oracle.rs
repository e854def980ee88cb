//! Exhaustive reference solvers for small instances.
//!
//! Everything here is computed from the instance alone and never calls the
//! auction engine, so it can be used to check the engine.
//!
//! The allocation search walks the channels one at a time and gives each
//! channel to an inclusion-maximal feasible set of bidders (an independent
//! set for exclusive use, a mutually tolerating group for sharing). Both
//! objectives used here are non-decreasing in every bidder's channel count,
//! so some optimum is found among these choices once surplus channels are
//! trimmed. Branches are cut when the current value plus what the remaining
//! channels could add cannot beat the incumbent.
//!
//! Revenue of a candidate allocation uses local Vickrey pricing: the `l`-th
//! channel of bidder `i` costs the lowest price on the auction grid at which
//! `i`'s conflict neighbours demand no more than `supply_i - l` channels,
//! never more than the bidder's value for it. For sharing the price is also
//! scaled by the bidder's bandwidth fraction.

use crate::assign::{AssignMode, Assignment};
use crate::auction::AuctionConfig;
use crate::bidder::{BidderProfiles, Price, ValuationVector};
use crate::error::{Error, Result};
use crate::scenario::ConflictGraph;
use crate::sharing::{group_fits, opportunity_counts, SharingParams};
use crate::units::{Amount, Share, SCALE};

/// Largest number of joint per-channel choices the search accepts.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// Steps allowed when listing one channel's feasible holder sets.
const WALK_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub best_value: Amount,
    pub best_assignment: Assignment,
    /// Search nodes visited.
    pub enumerated_count: u64,
}

/// `Σ_i Σ_{j < y_i} v_i[j]` maximised over feasible allocations.
pub fn optimal_welfare(graph: &ConflictGraph, profiles: &BidderProfiles, mode: AssignMode<'_>) -> Result<OracleResult> {
    check_sizes(graph, profiles)?;
    let tables = (0..graph.len())
        .map(|i| {
            let cap = profiles.demand_cap(i).min(graph.available_count(i)) as usize;
            prefix(profiles.get(i).values()[..cap].iter().map(|&v| v as u64 * SCALE))
        })
        .collect();
    search(graph, mode, tables)
}

/// Revenue-maximising exclusive-use allocation under local Vickrey pricing.
pub fn optimal_revenue_exclusive(
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    config: &AuctionConfig,
) -> Result<OracleResult> {
    check_sizes(graph, profiles)?;
    config.validate()?;
    let supply: Vec<u32> = (0..graph.len()).map(|i| graph.available_count(i)).collect();
    let tables = revenue_tables(graph, profiles, config, &supply, None);
    search(graph, AssignMode::Exclusive, tables)
}

/// As [`optimal_revenue_exclusive`] under the sharing constraints, with
/// supply counted in usable channel opportunities.
pub fn optimal_revenue_sharing(
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    config: &AuctionConfig,
    params: &SharingParams,
) -> Result<OracleResult> {
    check_sizes(graph, profiles)?;
    config.validate()?;
    params.validate(graph.len())?;
    let supply = opportunity_counts(graph, params);
    let tables = revenue_tables(graph, profiles, config, &supply, Some(&params.shares));
    search(graph, AssignMode::Sharing(params), tables)
}

/// Local Vickrey price of each of bidder `i`'s units, `None` when the
/// neighbours never release it on the price grid.
pub fn local_vickrey_prices(
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    config: &AuctionConfig,
    supply: &[u32],
    i: usize,
) -> Vec<Option<Price>> {
    let x = graph.available_count(i);
    let cap = profiles.get(i).demand_at(config.reserve_price).min(x);
    let top = profiles.max_value() as u64 + config.step_size as u64;
    let mut prices = vec![None; cap as usize];
    let mut p = config.reserve_price as u64;
    while p <= top {
        let price = p as Price;
        let rival: i64 = graph
            .neighbors(i)
            .iter()
            .map(|&j| profiles.get(j).demand_at(price).min(graph.available_count(j)) as i64)
            .sum();
        let released = (supply[i] as i64 - rival).max(0) as usize;
        for slot in prices.iter_mut().take(released) {
            slot.get_or_insert(price);
        }
        if released >= prices.len() {
            break;
        }
        p += config.step_size as u64;
    }
    prices
}

fn revenue_tables(
    graph: &ConflictGraph,
    profiles: &BidderProfiles,
    config: &AuctionConfig,
    supply: &[u32],
    shares: Option<&[Share]>,
) -> Vec<Vec<u64>> {
    (0..graph.len())
        .map(|i| {
            let share = shares.map_or(Share::FULL, |s| s[i]).basis_points() as u64;
            let values = profiles.get(i).values();
            let prices = local_vickrey_prices(graph, profiles, config, supply, i);
            prefix(prices.iter().zip(values).map(|(p, &v)| p.map_or(v, |p| p.min(v)) as u64 * share))
        })
        .collect()
}

fn prefix(items: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut out = vec![0];
    for x in items {
        out.push(out.last().unwrap() + x);
    }
    out
}

fn check_sizes(graph: &ConflictGraph, profiles: &BidderProfiles) -> Result<()> {
    if graph.len() != profiles.len() {
        return Err(Error::Instance("graph and profiles disagree on bidder count".into()));
    }
    Ok(())
}

fn fits(graph: &ConflictGraph, mode: AssignMode<'_>, group: &[usize]) -> bool {
    match mode {
        AssignMode::Exclusive => {
            group.iter().enumerate().all(|(n, &a)| group[n + 1..].iter().all(|&b| !graph.are_adjacent(a, b)))
        }
        AssignMode::Sharing(params) => group_fits(graph, params, group),
    }
}

struct GroupWalk<'a, 'm> {
    graph: &'a ConflictGraph,
    mode: AssignMode<'m>,
    candidates: &'a [usize],
    out: Vec<Vec<usize>>,
    /// Walk steps left before giving up.
    budget: u128,
}

impl GroupWalk<'_, '_> {
    fn walk(&mut self, at: usize, group: &mut Vec<usize>) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        if at == self.candidates.len() {
            let maximal = self.candidates.iter().filter(|c| !group.contains(c)).all(|&c| {
                let mut grown = group.clone();
                grown.push(c);
                !fits(self.graph, self.mode, &grown)
            });
            if maximal {
                self.out.push(group.clone());
            }
            return true;
        }
        let next = self.candidates[at];
        let joins = match self.mode {
            AssignMode::Exclusive => group.iter().all(|&q| !self.graph.are_adjacent(q, next)),
            AssignMode::Sharing(_) => {
                group.push(next);
                let ok = fits(self.graph, self.mode, group);
                group.pop();
                ok
            }
        };
        group.push(next);
        if joins && !self.walk(at + 1, group) {
            return false;
        }
        group.pop();
        // a candidate adjacent to no other is in every maximal set
        let isolated = self.candidates.iter().all(|&c| !self.graph.are_adjacent(c, next));
        if joins && isolated {
            return true;
        }
        self.walk(at + 1, group)
    }
}

/// Inclusion-maximal feasible holder sets among `candidates`, or `None`
/// when enumerating them takes more than `budget` steps.
fn maximal_groups(
    graph: &ConflictGraph,
    mode: AssignMode<'_>,
    candidates: &[usize],
    budget: u128,
) -> Option<Vec<Vec<usize>>> {
    let mut w = GroupWalk { graph, mode, candidates, out: Vec::new(), budget };
    w.walk(0, &mut Vec::new()).then_some(w.out)
}

struct Search<'a> {
    options: Vec<Vec<Vec<usize>>>,
    tables: Vec<Vec<u64>>,
    /// `remaining[k][i]`: channels `k..` that could still go to `i`.
    remaining: Vec<Vec<u32>>,
    graph: &'a ConflictGraph,
    counts: Vec<u32>,
    chosen: Vec<usize>,
    best_value: u64,
    best_choice: Option<Vec<usize>>,
    visited: u64,
}

impl Search<'_> {
    fn value(&self, extra: Option<usize>) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let table = &self.tables[i];
                let reach = c as usize + extra.map_or(0, |k| self.remaining[k][i] as usize);
                table[reach.min(table.len() - 1)]
            })
            .sum()
    }

    fn go(&mut self, k: usize) {
        self.visited += 1;
        if k == self.options.len() {
            let value = self.value(None);
            if self.best_choice.is_none() || value > self.best_value {
                self.best_value = value;
                self.best_choice = Some(self.chosen.clone());
            }
            return;
        }
        if self.best_choice.is_some() && self.value(Some(k)) <= self.best_value {
            return;
        }
        for o in 0..self.options[k].len() {
            for &i in &self.options[k][o] {
                self.counts[i] += 1;
            }
            self.chosen.push(o);
            self.go(k + 1);
            self.chosen.pop();
            for &i in &self.options[k][o] {
                self.counts[i] -= 1;
            }
        }
    }
}

/// Maximises `Σ_i tables[i][y_i]` (capped at each table's end) over
/// feasible allocations. Values are in 1/10000 currency units.
fn search(graph: &ConflictGraph, mode: AssignMode<'_>, tables: Vec<Vec<u64>>) -> Result<OracleResult> {
    let n = graph.len();
    let channels = graph.channels();
    let mut options: Vec<Vec<Vec<usize>>> = Vec::with_capacity(channels);
    let mut size = 1u128;
    for k in 0..channels {
        let candidates: Vec<usize> =
            (0..n).filter(|&i| tables[i].len() > 1 && graph.availability(i).contains(k)).collect();
        let too_large = || Error::TooLarge { size: size.saturating_mul(2), limit: ENUMERATION_LIMIT };
        let groups = maximal_groups(graph, mode, &candidates, WALK_LIMIT.min(ENUMERATION_LIMIT / size)).ok_or_else(too_large)?;
        size = size.saturating_mul(groups.len().max(1) as u128);
        if size > ENUMERATION_LIMIT {
            return Err(Error::TooLarge { size, limit: ENUMERATION_LIMIT });
        }
        options.push(groups);
    }

    let mut remaining = vec![vec![0u32; n]; channels + 1];
    for k in (0..channels).rev() {
        remaining[k] = remaining[k + 1].clone();
        for group in &options[k] {
            for &i in group {
                remaining[k][i] = remaining[k + 1][i] + 1;
            }
        }
    }

    let mut s = Search {
        options,
        tables,
        remaining,
        graph,
        counts: vec![0; n],
        chosen: Vec::new(),
        best_value: 0,
        best_choice: None,
        visited: 0,
    };
    s.go(0);

    let mut assignment = Assignment::empty(n);
    for (k, &o) in s.best_choice.iter().flatten().enumerate() {
        for &i in &s.options[k][o] {
            if assignment.count(i) as usize + 1 < s.tables[i].len() {
                assignment.insert(i, k);
            }
        }
    }
    debug_assert!(assignment.validate(s.graph, mode).is_ok());
    Ok(OracleResult { best_value: Amount::from_raw(s.best_value), best_assignment: assignment, enumerated_count: s.visited })
}

/// Outcome of probing one bidder with every deviation on a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    pub bidder: usize,
    /// Utilities in 1/10000 currency units.
    pub truthful_utility: i64,
    pub best_deviation_utility: i64,
    pub best_report: ValuationVector,
    pub enumerated: u64,
}

impl DeviationReport {
    /// Best deviation utility minus truthful utility; truthful iff `<= 0`.
    pub fn gain(&self) -> i64 {
        self.best_deviation_utility - self.truthful_utility
    }
}

/// Number of weakly decreasing vectors over `{0..=v_max}` of length `<= len`.
pub fn deviation_grid_size(v_max: Price, len: usize) -> u128 {
    // C(v_max + l, l) summed over l.
    let mut total = 0u128;
    let mut term = 1u128;
    for l in 0..=len as u128 {
        if l > 0 {
            term = term * (v_max as u128 + l) / l;
        }
        total += term;
    }
    total
}

fn for_each_decreasing(v_max: Price, len: usize, mut f: impl FnMut(&[Price]) -> Result<()>) -> Result<()> {
    fn rec(cur: &mut Vec<Price>, hi: Price, len: usize, f: &mut dyn FnMut(&[Price]) -> Result<()>) -> Result<()> {
        f(cur)?;
        if cur.len() == len {
            return Ok(());
        }
        for v in (0..=hi).rev() {
            cur.push(v);
            rec(cur, v, len, f)?;
            cur.pop();
        }
        Ok(())
    }
    rec(&mut Vec::with_capacity(len), v_max, len, &mut f)
}

/// Tries every weakly decreasing report over `{0..=v_max}` no longer than
/// bidder `i`'s true vector. `mechanism` maps reported profiles to won
/// counts and payments; utilities are always measured with true values.
pub fn enumerate_deviations<M>(
    profiles: &BidderProfiles,
    i: usize,
    v_max: Price,
    mut mechanism: M,
) -> Result<DeviationReport>
where
    M: FnMut(&BidderProfiles) -> Result<(Vec<u32>, Vec<Amount>)>,
{
    let truth = profiles.get(i);
    let size = deviation_grid_size(v_max, truth.len());
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { size, limit: ENUMERATION_LIMIT });
    }
    let mut utility_of = |report: &BidderProfiles| -> Result<i64> {
        let (counts, payments) = mechanism(report)?;
        let value = truth.value_of(counts[i] as usize) * SCALE;
        Ok(value as i64 - payments[i].raw() as i64)
    };
    let truthful_utility = utility_of(profiles)?;
    let mut best = (i64::MIN, ValuationVector::default());
    let mut enumerated = 0;
    for_each_decreasing(v_max, truth.len(), |report| {
        enumerated += 1;
        let report = ValuationVector::new(report.to_vec())?;
        let u = utility_of(&profiles.with_report(i, report.clone()))?;
        if u > best.0 {
            best = (u, report);
        }
        Ok(())
    })?;
    Ok(DeviationReport {
        bidder: i,
        truthful_utility,
        best_deviation_utility: best.0,
        best_report: best.1,
        enumerated,
    })
}
