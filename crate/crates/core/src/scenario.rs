//! Reproducible auction instances.
//!
//! An instance is produced in four deterministic stages, each drawing from
//! its own ChaCha stream of the configured seed: home placement, the conflict
//! graph at the interference range, third-party channel blanking, and bidder
//! demands with marginal valuations.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bidder::{BidderProfiles, Price, ValuationVector};
use crate::channels::{ChannelSet, MAX_CHANNELS};
use crate::error::{Error, Result};

/// Homes per square kilometre in the urban layout.
pub const URBAN_DENSITY_PER_KM2: f64 = 2435.0;
/// Homes per square kilometre in the dense-urban layout.
pub const DENSE_URBAN_DENSITY_PER_KM2: f64 = 5456.0;

const STREAM_PLACEMENT: u64 = 1;
const STREAM_THIRD_PARTY: u64 = 2;
const STREAM_DEMAND: u64 = 3;
pub(crate) const STREAM_SHARING: u64 = 4;

/// Deterministic RNG for one named stage of a seeded run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub position: Point,
}

/// Undirected interference graph over bidders with per-node availability.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictGraph {
    channels: usize,
    adjacency: Vec<Vec<usize>>,
    availability: Vec<ChannelSet>,
    positions: Vec<Point>,
}

impl ConflictGraph {
    /// Validates symmetry, irreflexivity, and availability width.
    pub fn new(
        channels: usize,
        mut adjacency: Vec<Vec<usize>>,
        availability: Vec<ChannelSet>,
        positions: Vec<Point>,
    ) -> Result<Self> {
        let n = adjacency.len();
        if channels == 0 || channels > MAX_CHANNELS {
            return Err(Error::Instance(format!(
                "channel count must be in 1..={MAX_CHANNELS}, got {channels}"
            )));
        }
        if availability.len() != n || positions.len() != n {
            return Err(Error::Instance(
                "adjacency, availability and positions must have equal length".into(),
            ));
        }
        let full = ChannelSet::full(channels);
        for (i, avail) in availability.iter().enumerate() {
            if !avail.is_subset(full) {
                return Err(Error::Instance(format!("node {i} lists a channel >= {channels}")));
            }
        }
        for (i, p) in positions.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::Instance(format!("node {i} has a non-finite position")));
            }
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for (i, list) in adjacency.iter().enumerate() {
            for &j in list {
                if j >= n {
                    return Err(Error::Instance(format!("edge {i}-{j} out of range")));
                }
                if j == i {
                    return Err(Error::Instance(format!("self-loop at {i}")));
                }
                if adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::Instance(format!("edge {i}-{j} is not symmetric")));
                }
            }
        }
        Ok(ConflictGraph { channels, adjacency, availability, positions })
    }

    /// Graph from an edge list; positions default to the origin.
    pub fn from_edges(
        n: usize,
        channels: usize,
        edges: &[(usize, usize)],
        availability: Vec<ChannelSet>,
    ) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Instance(format!("edge {a}-{b} out of range")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        ConflictGraph::new(channels, adjacency, availability, vec![Point::default(); n])
    }

    /// Complete graph on `n` nodes, every channel available everywhere.
    pub fn clique(n: usize, channels: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        ConflictGraph::from_edges(n, channels, &edges, vec![ChannelSet::full(channels); n])
    }

    pub fn with_positions(mut self, positions: Vec<Point>) -> Result<Self> {
        if positions.len() != self.len() {
            return Err(Error::Instance("position count mismatch".into()));
        }
        self.positions = positions;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Total channel count `C`.
    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn availability(&self, i: usize) -> ChannelSet {
        self.availability[i]
    }

    pub fn available_count(&self, i: usize) -> u32 {
        self.availability[i].len()
    }

    pub fn position(&self, i: usize) -> Point {
        self.positions[i]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.len() as f64
    }

    /// Induced subgraph over `keep` (ascending), relabelled densely.
    pub fn induced(&self, keep: &[usize]) -> ConflictGraph {
        let mut relabel = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let adjacency = keep
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|&j| (relabel[j] != usize::MAX).then_some(relabel[j]))
                    .collect()
            })
            .collect();
        ConflictGraph {
            channels: self.channels,
            adjacency,
            availability: keep.iter().map(|&i| self.availability[i]).collect(),
            positions: keep.iter().map(|&i| self.positions[i]).collect(),
        }
    }
}

/// Edge `(i, j)` iff the two homes are within `interference_range` metres.
pub fn build_conflict_graph(nodes: &[Node], interference_range: f64, channels: usize) -> Result<ConflictGraph> {
    if !(interference_range > 0.0) {
        return Err(Error::Config("interference_range must be positive".into()));
    }
    let n = nodes.len();
    let positions: Vec<Point> = nodes.iter().map(|node| node.position).collect();
    let mut adjacency = vec![Vec::new(); n];

    // Uniform grid with cell side equal to the range; only the 3x3 block
    // around a node's cell can hold neighbours.
    let cell = interference_range;
    let key = |p: Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    for (i, &p) in positions.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    for (i, &p) in positions.iter().enumerate() {
        let (cx, cy) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = buckets.get(&(cx + dx, cy + dy)) {
                    for &j in bucket {
                        if j != i && p.distance(positions[j]) <= interference_range {
                            adjacency[i].push(j);
                        }
                    }
                }
            }
        }
    }
    ConflictGraph::new(channels, adjacency, vec![ChannelSet::full(channels); n], positions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityProfile {
    /// Uniform placement at the urban density.
    Urban,
    /// Clustered placement at the dense-urban density.
    DenseUrban,
    /// Uniform placement over an explicit `area_side`.
    Uniform,
}

impl DensityProfile {
    pub fn homes_per_km2(self) -> Option<f64> {
        match self {
            DensityProfile::Urban => Some(URBAN_DENSITY_PER_KM2),
            DensityProfile::DenseUrban => Some(DENSE_URBAN_DENSITY_PER_KM2),
            DensityProfile::Uniform => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Homes placed, third parties included.
    pub n: usize,
    /// Side of the square area in metres; derived from the density profile
    /// when absent.
    pub area_side: Option<f64>,
    pub density_profile: DensityProfile,
    pub interference_range: f64,
    #[serde(rename = "C")]
    pub channels: usize,
    pub third_party_fraction: f64,
    pub third_party_consumption: f64,
    pub avg_demand_pct: f64,
    pub valuation_range: [Price; 2],
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 500,
            area_side: None,
            density_profile: DensityProfile::Urban,
            interference_range: 30.0,
            channels: 21,
            third_party_fraction: 0.0,
            third_party_consumption: 0.7,
            avg_demand_pct: 60.0,
            valuation_range: [0, 100],
            rng_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0,1], got {x}")))
            }
        };
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(self.interference_range > 0.0) || !self.interference_range.is_finite() {
            return Err(Error::Config("interference_range must be positive".into()));
        }
        if self.channels == 0 || self.channels > MAX_CHANNELS {
            return Err(Error::Config(format!("C must be in 1..={MAX_CHANNELS}")));
        }
        unit("third_party_fraction", self.third_party_fraction)?;
        unit("third_party_consumption", self.third_party_consumption)?;
        if !(self.avg_demand_pct > 0.0 && self.avg_demand_pct <= 100.0) {
            return Err(Error::Config("avg_demand_pct must be in (0,100]".into()));
        }
        if self.valuation_range[0] > self.valuation_range[1] {
            return Err(Error::Config("valuation_range must be [min, max] with min <= max".into()));
        }
        if let Some(side) = self.area_side {
            if !(side > 0.0) || !side.is_finite() {
                return Err(Error::Config("area_side must be positive".into()));
            }
        } else if self.density_profile == DensityProfile::Uniform {
            return Err(Error::Config("uniform density profile needs an explicit area_side".into()));
        }
        Ok(())
    }

    /// Parses a TOML file whose keys are this struct's field names.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Side of the placement square in metres.
    pub fn side_m(&self) -> f64 {
        match (self.area_side, self.density_profile.homes_per_km2()) {
            (Some(side), _) => side,
            (None, Some(density)) => (self.n as f64 / density).sqrt() * 1000.0,
            (None, None) => 1000.0,
        }
    }
}

/// Places `n` homes in a square of side `side` metres.
pub fn place_nodes<R: Rng>(n: usize, side: f64, profile: DensityProfile, rng: &mut R) -> Vec<Node> {
    let uniform = |rng: &mut R| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side);
    let positions: Vec<Point> = match profile {
        DensityProfile::Urban | DensityProfile::Uniform => (0..n).map(|_| uniform(rng)).collect(),
        DensityProfile::DenseUrban => {
            // Matern-style clusters: uniform parents, children uniform in a
            // disc around a randomly chosen parent, kept inside the square.
            const MEAN_CLUSTER: usize = 12;
            const RADIUS_M: f64 = 40.0;
            let parents: Vec<Point> = (0..n.div_ceil(MEAN_CLUSTER).max(1)).map(|_| uniform(rng)).collect();
            (0..n)
                .map(|_| {
                    let c = parents[rng.gen_range(0..parents.len())];
                    loop {
                        let r = RADIUS_M * rng.gen::<f64>().sqrt();
                        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                        let p = Point::new(c.x + r * theta.cos(), c.y + r * theta.sin());
                        if (0.0..=side).contains(&p.x) && (0.0..=side).contains(&p.y) {
                            break p;
                        }
                    }
                })
                .collect()
        }
    };
    positions.into_iter().enumerate().map(|(id, position)| Node { id, position }).collect()
}

/// Number of channels a third party occupies out of `channels`.
pub fn third_party_channel_count(consumption: f64, channels: usize) -> usize {
    ((consumption * channels as f64) + 1e-9).floor() as usize
}

/// Turns a random `fraction` of the homes into third-party networks.
///
/// Each third party occupies `floor(consumption * C)` random channels, which
/// become unavailable at its conflict neighbours. Third parties leave the
/// bidder set; the returned graph is induced on the remaining homes.
pub fn apply_third_party<R: Rng>(
    graph: &ConflictGraph,
    fraction: f64,
    consumption: f64,
    rng: &mut R,
) -> Result<ConflictGraph> {
    if !(0.0..=1.0).contains(&fraction) || !(0.0..=1.0).contains(&consumption) {
        return Err(Error::Config("third-party fraction and consumption must be in [0,1]".into()));
    }
    let count = (fraction * graph.len() as f64).round() as usize;
    let mut chosen = sample(rng, graph.len(), count.min(graph.len())).into_vec();
    chosen.sort_unstable();
    Ok(apply_third_party_at(graph, &chosen, consumption, rng))
}

/// [`apply_third_party`] with the third parties given explicitly.
pub fn apply_third_party_at<R: Rng>(
    graph: &ConflictGraph,
    third_parties: &[usize],
    consumption: f64,
    rng: &mut R,
) -> ConflictGraph {
    let c = graph.channels();
    let blank = third_party_channel_count(consumption, c);
    let mut availability = graph.availability.clone();
    let mut is_third = vec![false; graph.len()];
    for &t in third_parties {
        is_third[t] = true;
        let used: ChannelSet = sample(rng, c, blank.min(c)).into_iter().collect();
        availability[t] = availability[t].difference(used);
        for &j in graph.neighbors(t) {
            availability[j] = availability[j].difference(used);
        }
    }
    let keep: Vec<usize> = (0..graph.len()).filter(|&i| !is_third[i]).collect();
    let blanked = ConflictGraph { availability, ..graph.clone() };
    blanked.induced(&keep)
}

fn round_half_up(x: f64) -> u32 {
    (x + 0.5 + 1e-9).floor().max(0.0) as u32
}

/// Per-bidder demand percentages whose mean is within one point of `avg`.
fn demand_percentages<R: Rng>(count: usize, avg: f64, rng: &mut R) -> Vec<f64> {
    let half_width = avg.min(100.0 - avg);
    let mut pct: Vec<f64> =
        (0..count).map(|_| avg - half_width + 2.0 * half_width * rng.gen::<f64>()).collect();
    for _ in 0..16 {
        let mean = pct.iter().sum::<f64>() / count.max(1) as f64;
        if (mean - avg).abs() <= 0.5 {
            break;
        }
        for p in pct.iter_mut() {
            *p = (*p + avg - mean).clamp(0.0, 100.0);
        }
    }
    pct
}

/// Demand `D_i = round(pct_i * x_i / 100)` and `D_i` valuations drawn
/// uniformly from `valuation_range`, sorted descending.
pub fn generate_demands_valuations<R: Rng>(
    graph: &ConflictGraph,
    avg_demand_pct: f64,
    valuation_range: [Price; 2],
    rng: &mut R,
) -> Result<BidderProfiles> {
    if !(avg_demand_pct > 0.0 && avg_demand_pct <= 100.0) {
        return Err(Error::Config("avg_demand_pct must be in (0,100]".into()));
    }
    if (0..graph.len()).all(|i| graph.available_count(i) == 0) {
        return Err(Error::DegenerateScenario);
    }
    let [lo, hi] = valuation_range;
    let pct = demand_percentages(graph.len(), avg_demand_pct, rng);
    let valuations = pct
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let x = graph.available_count(i);
            let demand = round_half_up(p * x as f64 / 100.0).min(x);
            ValuationVector::from_unsorted((0..demand).map(|_| rng.gen_range(lo..=hi)).collect())
        })
        .collect();
    Ok(BidderProfiles::new(valuations))
}

/// A complete auction instance: bidder graph plus private valuations.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub graph: ConflictGraph,
    pub profiles: BidderProfiles,
}

impl Instance {
    pub fn new(seed: u64, graph: ConflictGraph, profiles: BidderProfiles) -> Result<Self> {
        if graph.len() != profiles.len() {
            return Err(Error::Instance(format!(
                "{} graph nodes but {} valuation vectors",
                graph.len(),
                profiles.len()
            )));
        }
        Ok(Instance { seed, graph, profiles })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

/// Runs the full generation pipeline for `config`.
pub fn generate_instance(config: &ScenarioConfig) -> Result<Instance> {
    config.validate()?;
    let seed = config.rng_seed;
    let nodes = place_nodes(
        config.n,
        config.side_m(),
        config.density_profile,
        &mut stream_rng(seed, STREAM_PLACEMENT),
    );
    let full = build_conflict_graph(&nodes, config.interference_range, config.channels)?;
    let graph = apply_third_party(
        &full,
        config.third_party_fraction,
        config.third_party_consumption,
        &mut stream_rng(seed, STREAM_THIRD_PARTY),
    )?;
    if graph.is_empty() {
        return Err(Error::DegenerateScenario);
    }
    let profiles = generate_demands_valuations(
        &graph,
        config.avg_demand_pct,
        config.valuation_range,
        &mut stream_rng(seed, STREAM_DEMAND),
    )?;
    Instance::new(seed, graph, profiles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_nodes(distance: f64) -> Vec<Node> {
        vec![
            Node { id: 0, position: Point::new(0.0, 0.0) },
            Node { id: 1, position: Point::new(distance, 0.0) },
        ]
    }

    #[test]
    fn edge_iff_within_range() {
        let g = build_conflict_graph(&two_nodes(29.0), 30.0, 4).unwrap();
        assert!(g.are_adjacent(0, 1) && g.are_adjacent(1, 0));
        let g = build_conflict_graph(&two_nodes(31.0), 30.0, 4).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = build_conflict_graph(&two_nodes(30.0), 30.0, 4).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn grid_matches_brute_force() {
        let nodes = place_nodes(400, 300.0, DensityProfile::Uniform, &mut stream_rng(9, 0));
        let g = build_conflict_graph(&nodes, 30.0, 3).unwrap();
        for a in 0..nodes.len() {
            for b in 0..nodes.len() {
                let near = a != b && nodes[a].position.distance(nodes[b].position) <= 30.0;
                assert_eq!(g.are_adjacent(a, b), near);
            }
        }
    }

    #[test]
    fn mean_degree_grows_with_range() {
        let nodes = place_nodes(100, 1000.0, DensityProfile::Uniform, &mut stream_rng(3, 0));
        let near = build_conflict_graph(&nodes, 30.0, 1).unwrap();
        let far = build_conflict_graph(&nodes, 70.0, 1).unwrap();
        assert!(far.mean_degree() > near.mean_degree());
    }

    #[test]
    fn graph_rejects_asymmetry_and_self_loops() {
        let full = vec![ChannelSet::full(2); 2];
        let pos = vec![Point::default(); 2];
        assert!(ConflictGraph::new(2, vec![vec![1], vec![]], full.clone(), pos.clone()).is_err());
        assert!(ConflictGraph::new(2, vec![vec![0], vec![]], full, pos).is_err());
    }

    #[test]
    fn no_third_parties_keeps_full_availability() {
        let nodes = place_nodes(50, 200.0, DensityProfile::Uniform, &mut stream_rng(1, 0));
        let g = build_conflict_graph(&nodes, 30.0, 21).unwrap();
        let out = apply_third_party(&g, 0.0, 0.7, &mut stream_rng(1, 1)).unwrap();
        assert_eq!(out.len(), 50);
        assert!((0..50).all(|i| out.available_count(i) == 21));
    }

    #[test]
    fn default_consumption_blanks_fourteen_of_twenty_one() {
        assert_eq!(third_party_channel_count(0.7, 21), 14);
        // a lone third party with one neighbour: the neighbour loses exactly 14
        let g = build_conflict_graph(&two_nodes(10.0), 30.0, 21).unwrap();
        let out = apply_third_party_at(&g, &[1], 0.7, &mut stream_rng(5, 0));
        assert_eq!(out.len(), 1);
        assert_eq!(out.available_count(0), 7);
    }

    #[test]
    fn third_party_affects_only_its_neighbours() {
        // chain A-B-C-D-E, E is a third party adjacent only to D
        let nodes: Vec<Node> =
            (0..5).map(|id| Node { id, position: Point::new(25.0 * id as f64, 0.0) }).collect();
        let g = build_conflict_graph(&nodes, 30.0, 6).unwrap();
        let out = apply_third_party_at(&g, &[4], 0.5, &mut stream_rng(11, 0));
        assert_eq!(out.len(), 4);
        assert_eq!(out.available_count(3), 3);
        for i in 0..3 {
            assert_eq!(out.available_count(i), 6);
        }
        assert!(out.are_adjacent(2, 3));
    }

    #[test]
    fn demand_rounding_examples() {
        assert_eq!(round_half_up(80.0 * 5.0 / 100.0), 4);
        assert_eq!(round_half_up(100.0 * 3.0 / 100.0), 3);
        assert_eq!(round_half_up(2.5), 3);
    }

    #[test]
    fn full_demand_takes_every_channel() {
        let avail = vec![ChannelSet::full(3), ChannelSet::full(3)];
        let g = ConflictGraph::from_edges(2, 3, &[(0, 1)], avail).unwrap();
        let p = generate_demands_valuations(&g, 100.0, [0, 100], &mut stream_rng(2, 3)).unwrap();
        for i in 0..2 {
            assert_eq!(p.get(i).len(), 3);
            let v = p.get(i).values();
            assert!(v[0] >= v[1] && v[1] >= v[2]);
        }
    }

    #[test]
    fn degenerate_scenario_rejected() {
        let g = ConflictGraph::from_edges(2, 3, &[], vec![ChannelSet::EMPTY; 2]).unwrap();
        assert_eq!(
            generate_demands_valuations(&g, 50.0, [0, 100], &mut stream_rng(0, 0)),
            Err(Error::DegenerateScenario)
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let config = ScenarioConfig { n: 300, third_party_fraction: 0.4, rng_seed: 77, ..Default::default() };
        assert_eq!(generate_instance(&config).unwrap(), generate_instance(&config).unwrap());
        let other = ScenarioConfig { rng_seed: 78, ..config.clone() };
        assert_ne!(generate_instance(&config).unwrap(), generate_instance(&other).unwrap());
    }

    #[test]
    fn mean_demand_pct_is_close_to_target() {
        let pct = demand_percentages(1000, 60.0, &mut stream_rng(4, 4));
        let mean = pct.iter().sum::<f64>() / 1000.0;
        assert!((mean - 60.0).abs() <= 1.0, "mean {mean}");
        assert!(pct.iter().all(|p| (0.0..=100.0).contains(p)));
    }

    #[test]
    fn demand_never_exceeds_availability() {
        let config = ScenarioConfig { n: 400, third_party_fraction: 0.4, avg_demand_pct: 95.0, ..Default::default() };
        let inst = generate_instance(&config).unwrap();
        for i in 0..inst.len() {
            let x = inst.graph.available_count(i);
            assert!(inst.profiles.demand_cap(i) <= x && x as usize <= inst.graph.channels());
        }
    }

    #[test]
    fn dense_urban_is_denser() {
        let urban = ScenarioConfig { n: 800, ..Default::default() };
        let dense = ScenarioConfig { density_profile: DensityProfile::DenseUrban, ..urban.clone() };
        let a = generate_instance(&urban).unwrap();
        let b = generate_instance(&dense).unwrap();
        assert!(b.graph.mean_degree() > a.graph.mean_degree());
    }
}
