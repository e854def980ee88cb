use verum_core::oracle::enumerate_deviations;
use verum_core::{run_auction, AuctionConfig, BidderProfiles, ChannelSet, ConflictGraph, ValuationVector};

fn profiles(values: &[&[u32]]) -> BidderProfiles {
    BidderProfiles::new(values.iter().map(|v| ValuationVector::new(v.to_vec()).unwrap()).collect())
}

fn five_homes() -> (ConflictGraph, BidderProfiles) {
    let edges = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)];
    let two = ChannelSet::from_channels([0, 1]);
    let three = ChannelSet::full(3);
    let graph = ConflictGraph::from_edges(5, 3, &edges, vec![two, three, three, three, two]).unwrap();
    let p = profiles(&[&[13, 8, 6], &[18, 12, 5], &[17, 15, 10], &[8, 6, 3], &[14, 10, 4]]);
    (graph, p)
}

#[test]
fn five_home_example_winners_and_payments() {
    let (graph, p) = five_homes();
    let o = run_auction(&graph, &p, &AuctionConfig::new(1, 1)).unwrap();
    assert_eq!(o.counts, vec![0, 1, 2, 0, 2]);
    let pay: Vec<u64> = o.payments.iter().map(|a| a.rounded()).collect();
    assert_eq!(pay, vec![0, 13, 25, 0, 14]);
    o.assignment.validate(&graph, verum_core::AssignMode::Exclusive).unwrap();
    assert_eq!(o.unplaced, vec![0; 5]);

    // E clinches at 6 and 8, C at 12 and 13, B at 13
    let clinches: Vec<(usize, u32, u32)> = o.ledger.iter().map(|e| (e.bidder, e.price, e.count)).collect();
    for (bidder, price) in [(4, 6), (4, 8), (2, 12), (2, 13), (1, 13)] {
        assert!(clinches.iter().any(|&(b, pr, _)| b == bidder && pr == price), "missing clinch {bidder}@{price}");
    }
}

#[test]
fn five_home_example_round_log() {
    let (graph, p) = five_homes();
    let o = run_auction(&graph, &p, &AuctionConfig::new(1, 1)).unwrap();
    assert_eq!(o.log.len() as u32, o.rounds);
    let first = &o.log[0];
    assert_eq!(first.price, 1);
    assert_eq!(first.demands, vec![2, 3, 3, 3, 2]);
    assert!(o.log.windows(2).all(|w| w[1].price == w[0].price + 1));
}

/// Sealed-bid greedy with "highest losing neighbour" prices, as used by
/// earlier TVWS proposals. Bidders want one channel each.
fn greedy_single_unit(graph: &ConflictGraph, bids: &[u32]) -> (Vec<Option<usize>>, Vec<u32>) {
    let n = bids.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| bids[b].cmp(&bids[a]).then(a.cmp(&b)));
    let mut channel = vec![None; n];
    for &i in &order {
        let taken: Vec<usize> = graph.neighbors(i).iter().filter_map(|&j| channel[j]).collect();
        channel[i] = graph.availability(i).iter().find(|k| !taken.contains(k));
    }
    let prices = (0..n)
        .map(|i| {
            if channel[i].is_none() {
                return 0;
            }
            graph.neighbors(i).iter().filter(|&&j| channel[j].is_none()).map(|&j| bids[j]).max().unwrap_or(0)
        })
        .collect();
    (channel, prices)
}

fn path4() -> ConflictGraph {
    ConflictGraph::from_edges(4, 2, &[(0, 1), (1, 2), (2, 3)], vec![ChannelSet::full(2); 4]).unwrap()
}

#[test]
fn greedy_rewards_overbidding_on_a_path() {
    let graph = path4();
    let values = [5, 4, 1, 2];
    let utility = |bids: &[u32], i: usize| {
        let (channel, prices) = greedy_single_unit(&graph, bids);
        if channel[i].is_some() { values[i] as i64 - prices[i] as i64 } else { 0 }
    };
    let truthful: Vec<i64> = (0..4).map(|i| utility(&values, i)).collect();
    assert_eq!(truthful, vec![5, 3, 0, 1]);

    let (channel, prices) = greedy_single_unit(&graph, &[5, 4, 3, 2]);
    assert!(channel.iter().all(|c| c.is_some()));
    assert_eq!(prices, vec![0, 0, 0, 0]);
    assert_eq!(utility(&[5, 4, 3, 2], 2), 1);
}

#[test]
fn clinching_gives_no_gain_on_the_same_path() {
    let graph = path4();
    let p = profiles(&[&[5], &[4], &[1], &[2]]);
    for i in 0..4 {
        let report = enumerate_deviations(&p, i, 6, |reported| {
            let o = run_auction(&graph, reported, &AuctionConfig::new(0, 1))?;
            Ok((o.counts, o.payments))
        })
        .unwrap();
        assert!(report.gain() <= 0, "bidder {i}: {report:?}");
    }
}
