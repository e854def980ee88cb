//! Concrete channel assignment for won channel counts.
//!
//! Winners are served in descending payment order (ties by ascending id).
//! Each slot takes the feasible channel available at the fewest of the
//! winner's neighbours, lowest index on ties. If greedy placement leaves a
//! winner short, a bounded backtracking search over all winners is tried
//! before reporting infeasibility.

use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::scenario::ConflictGraph;
use crate::sharing::{tolerates, SharingParams};
use crate::units::{Amount, SCALE};

const BACKTRACK_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy)]
pub enum AssignMode<'a> {
    Exclusive,
    Sharing(&'a SharingParams),
}

/// `Y_i(k)` for every bidder.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    channels: Vec<ChannelSet>,
}

impl Assignment {
    pub fn empty(bidders: usize) -> Self {
        Assignment { channels: vec![ChannelSet::EMPTY; bidders] }
    }

    pub fn from_sets(channels: Vec<ChannelSet>) -> Self {
        Assignment { channels }
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn get(&self, i: usize) -> ChannelSet {
        self.channels[i]
    }

    pub fn insert(&mut self, i: usize, k: usize) {
        self.channels[i].insert(k);
    }

    pub fn remove(&mut self, i: usize, k: usize) {
        self.channels[i].remove(k);
    }

    /// `y_i`.
    pub fn count(&self, i: usize) -> u32 {
        self.channels[i].len()
    }

    pub fn counts(&self) -> Vec<u32> {
        self.channels.iter().map(|c| c.len()).collect()
    }

    pub fn sets(&self) -> &[ChannelSet] {
        &self.channels
    }

    /// Bidders holding channel `k`, ascending.
    pub fn holders(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.channels[i].contains(k)).collect()
    }

    /// Checks `Y_i <= X_i` and the mode's co-channel constraint.
    pub fn validate(&self, graph: &ConflictGraph, mode: AssignMode<'_>) -> Result<()> {
        if self.len() != graph.len() {
            return Err(Error::Instance("assignment size differs from graph".into()));
        }
        for i in 0..self.len() {
            if !self.channels[i].is_subset(graph.availability(i)) {
                return Err(Error::Instance(format!("bidder {i} assigned an unavailable channel")));
            }
            for k in self.channels[i].iter() {
                let sharers: Vec<usize> =
                    graph.neighbors(i).iter().copied().filter(|&j| self.channels[j].contains(k)).collect();
                let ok = match mode {
                    AssignMode::Exclusive => sharers.is_empty(),
                    AssignMode::Sharing(params) => tolerates(graph, params, i, &sharers),
                };
                if !ok {
                    return Err(Error::Instance(format!("channel {k} at bidder {i} violates the co-channel rule")));
                }
            }
        }
        Ok(())
    }

    /// Sum of co-channel bandwidth fractions within each closed
    /// neighbourhood never exceeds the whole channel.
    pub fn bandwidth_feasible(&self, graph: &ConflictGraph, params: &SharingParams) -> bool {
        (0..self.len()).all(|i| {
            self.channels[i].iter().all(|k| {
                let used: u64 = std::iter::once(i)
                    .chain(graph.neighbors(i).iter().copied().filter(|&j| self.channels[j].contains(k)))
                    .map(|j| params.share(j).basis_points() as u64)
                    .sum();
                used <= SCALE
            })
        })
    }
}

/// Whether `i` may additionally take `k` under `mode`.
fn can_take(assignment: &Assignment, graph: &ConflictGraph, mode: AssignMode<'_>, i: usize, k: usize) -> bool {
    if !graph.availability(i).contains(k) || assignment.get(i).contains(k) {
        return false;
    }
    let holders_near_i: Vec<usize> =
        graph.neighbors(i).iter().copied().filter(|&j| assignment.get(j).contains(k)).collect();
    match mode {
        AssignMode::Exclusive => holders_near_i.is_empty(),
        AssignMode::Sharing(params) => {
            if !tolerates(graph, params, i, &holders_near_i) {
                return false;
            }
            // every existing neighbour on k must still tolerate its sharers plus i
            holders_near_i.iter().all(|&m| {
                let mut sharers: Vec<usize> =
                    graph.neighbors(m).iter().copied().filter(|&q| assignment.get(q).contains(k)).collect();
                sharers.push(i);
                tolerates(graph, params, m, &sharers)
            })
        }
    }
}

/// Neighbours of `i` that also have `k` available.
fn scarcity(graph: &ConflictGraph, i: usize, k: usize) -> usize {
    graph.neighbors(i).iter().filter(|&&j| graph.availability(j).contains(k)).count()
}

/// Feasible channels for `i`, most preferred first.
fn ranked_candidates(assignment: &Assignment, graph: &ConflictGraph, mode: AssignMode<'_>, i: usize) -> Vec<usize> {
    let mut ks: Vec<(usize, usize)> = graph
        .availability(i)
        .iter()
        .filter(|&k| can_take(assignment, graph, mode, i, k))
        .map(|k| (scarcity(graph, i, k), k))
        .collect();
    ks.sort_unstable();
    ks.into_iter().map(|(_, k)| k).collect()
}

fn winner_order(counts: &[u32], payments: &[Amount]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0).collect();
    order.sort_by(|&a, &b| payments[b].cmp(&payments[a]).then(a.cmp(&b)));
    order
}

/// Greedy assignment of `counts` starting from nothing.
pub fn greedy_assign(
    counts: &[u32],
    graph: &ConflictGraph,
    mode: AssignMode<'_>,
    payments: &[Amount],
) -> Result<Assignment> {
    extend_assignment(Assignment::empty(graph.len()), counts, graph, mode, payments)
}

/// Tops `base` up so that bidder `i` holds `counts[i]` channels.
///
/// Channels already in `base` are kept; `base` must not exceed `counts`.
pub fn extend_assignment(
    base: Assignment,
    counts: &[u32],
    graph: &ConflictGraph,
    mode: AssignMode<'_>,
    payments: &[Amount],
) -> Result<Assignment> {
    if counts.len() != graph.len() || base.len() != graph.len() || payments.len() != graph.len() {
        return Err(Error::Instance("counts, payments and graph disagree on bidder count".into()));
    }
    if let Some(i) = (0..counts.len()).find(|&i| base.count(i) > counts[i]) {
        return Err(Error::Instance(format!("base assignment gives bidder {i} more than it won")));
    }
    let order = winner_order(counts, payments);
    let (assignment, shortfall) = place(base.clone(), counts, graph, mode, &order);
    let Some(stuck) = (0..counts.len()).find(|&i| shortfall[i] > 0) else {
        return Ok(assignment);
    };
    let missing = shortfall[stuck];

    let mut search = Backtrack { graph, mode, counts, order: &order, budget: BACKTRACK_BUDGET };
    let mut assignment = base;
    if search.solve(&mut assignment, 0, 0) {
        Ok(assignment)
    } else {
        Err(Error::Infeasible { bidder: stuck, missing })
    }
}

/// Like [`extend_assignment`] but never fails: channels that cannot be
/// placed are left out and reported per bidder.
pub fn assign_best_effort(
    base: Assignment,
    counts: &[u32],
    graph: &ConflictGraph,
    mode: AssignMode<'_>,
    payments: &[Amount],
) -> (Assignment, Vec<u32>) {
    match extend_assignment(base.clone(), counts, graph, mode, payments) {
        Ok(a) => {
            let n = a.len();
            (a, vec![0; n])
        }
        Err(_) => place(base, counts, graph, mode, &winner_order(counts, payments)),
    }
}

/// Greedy placement in `order`, moving one blocking neighbour to another
/// channel when a winner runs out of free ones.
fn place(
    mut assignment: Assignment,
    counts: &[u32],
    graph: &ConflictGraph,
    mode: AssignMode<'_>,
    order: &[usize],
) -> (Assignment, Vec<u32>) {
    let mut shortfall = vec![0; counts.len()];
    for &i in order {
        while assignment.count(i) < counts[i] {
            if let Some(&k) = ranked_candidates(&assignment, graph, mode, i).first() {
                assignment.insert(i, k);
            } else if !relocate_for(&mut assignment, graph, mode, i) {
                shortfall[i] = counts[i] - assignment.count(i);
                break;
            }
        }
    }
    (assignment, shortfall)
}

/// Frees a channel for `i` by moving the single neighbour blocking it.
fn relocate_for(assignment: &mut Assignment, graph: &ConflictGraph, mode: AssignMode<'_>, i: usize) -> bool {
    let free = graph.availability(i).difference(assignment.get(i));
    for k in free.iter() {
        let blockers: Vec<usize> =
            graph.neighbors(i).iter().copied().filter(|&j| assignment.get(j).contains(k)).collect();
        let [j] = blockers[..] else { continue };
        assignment.remove(j, k);
        let alternatives = ranked_candidates(assignment, graph, mode, j);
        if let Some(&k2) = alternatives.iter().find(|&&k2| k2 != k) {
            assignment.insert(j, k2);
            if can_take(assignment, graph, mode, i, k) {
                assignment.insert(i, k);
                return true;
            }
            assignment.remove(j, k2);
        }
        assignment.insert(j, k);
    }
    false
}

struct Backtrack<'a> {
    graph: &'a ConflictGraph,
    mode: AssignMode<'a>,
    counts: &'a [u32],
    order: &'a [usize],
    budget: usize,
}

impl Backtrack<'_> {
    /// Fills winners `order[w..]`; channels added to one winner are taken in
    /// ascending index (from `floor`) so each combination is visited once.
    fn solve(&mut self, assignment: &mut Assignment, w: usize, floor: usize) -> bool {
        if w == self.order.len() {
            return true;
        }
        let i = self.order[w];
        if assignment.count(i) == self.counts[i] {
            return self.solve(assignment, w + 1, 0);
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let mut candidates = ranked_candidates(assignment, self.graph, self.mode, i);
        candidates.retain(|&k| k >= floor);
        let needed = (self.counts[i] - assignment.count(i)) as usize;
        if candidates.len() < needed {
            return false;
        }
        for k in candidates {
            assignment.insert(i, k);
            if self.solve(assignment, w, k + 1) {
                return true;
            }
            assignment.remove(i, k);
            if self.budget == 0 {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Share;

    fn set(ks: &[usize]) -> ChannelSet {
        ks.iter().copied().collect()
    }

    fn zeros(n: usize) -> Vec<Amount> {
        vec![Amount::ZERO; n]
    }

    #[test]
    fn isolated_winner_gets_its_channels() {
        let g = ConflictGraph::from_edges(1, 3, &[], vec![set(&[0, 1])]).unwrap();
        let a = greedy_assign(&[2], &g, AssignMode::Exclusive, &zeros(1)).unwrap();
        assert_eq!(a.get(0), set(&[0, 1]));
    }

    #[test]
    fn prefers_channel_rarest_among_neighbours() {
        // neighbour 1 has both channels, neighbour 2 only channel 0
        let g = ConflictGraph::from_edges(3, 2, &[(0, 1), (0, 2)], vec![set(&[0, 1]), set(&[0, 1]), set(&[0])])
            .unwrap();
        let a = greedy_assign(&[1, 0, 0], &g, AssignMode::Exclusive, &zeros(3)).unwrap();
        assert_eq!(a.get(0), set(&[1]));
    }

    #[test]
    fn higher_payment_chooses_first() {
        let g = ConflictGraph::from_edges(2, 2, &[(0, 1)], vec![set(&[0, 1]), set(&[0, 1])]).unwrap();
        let pay = vec![Amount::from_units(1), Amount::from_units(9)];
        let a = greedy_assign(&[1, 1], &g, AssignMode::Exclusive, &pay).unwrap();
        assert_eq!(a.get(1), set(&[0]));
        assert_eq!(a.get(0), set(&[1]));
        a.validate(&g, AssignMode::Exclusive).unwrap();
    }

    #[test]
    fn backtracking_recovers_from_greedy_dead_end() {
        // 0 pays most and greedily takes channel 0 (rarer than 1 around it),
        // leaving 1, whose only channel is 0, stuck; 0 must take channel 1.
        let g = ConflictGraph::from_edges(
            3,
            2,
            &[(0, 1), (0, 2)],
            vec![set(&[0, 1]), set(&[0]), set(&[1])],
        )
        .unwrap();
        let pay = vec![Amount::from_units(5), Amount::from_units(1), Amount::ZERO];
        let a = greedy_assign(&[1, 1, 0], &g, AssignMode::Exclusive, &pay).unwrap();
        assert_eq!(a.get(1), set(&[0]));
        assert_eq!(a.get(0), set(&[1]));
    }

    #[test]
    fn impossible_counts_are_reported() {
        let g = ConflictGraph::clique(2, 1).unwrap();
        let err = greedy_assign(&[1, 1], &g, AssignMode::Exclusive, &zeros(2)).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn sharing_mode_packs_compatible_bidders() {
        let g = ConflictGraph::clique(2, 1).unwrap();
        let params = SharingParams::uniform(2, Share::from_f64(0.4).unwrap(), f64::INFINITY);
        let a = greedy_assign(&[1, 1], &g, AssignMode::Sharing(&params), &zeros(2)).unwrap();
        a.validate(&g, AssignMode::Sharing(&params)).unwrap();
        assert!(a.bandwidth_feasible(&g, &params));

        let half = SharingParams::uniform(2, Share::from_f64(0.5).unwrap(), f64::INFINITY);
        assert!(greedy_assign(&[1, 1], &g, AssignMode::Sharing(&half), &zeros(2)).is_err());
    }
}
