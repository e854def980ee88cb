use verum_core::harness::RunSettings;
use verum_core::oracle::{optimal_revenue_exclusive, optimal_revenue_sharing, optimal_welfare};
use verum_core::verify::SmallInstanceSpec;
use verum_core::{
    generate_instance, run_auction, run_sharing_auction, Amount, AssignMode, AuctionConfig, Instance, Outcome, Share,
    SharingParams,
};

fn scenarios() -> Vec<(RunSettings, Instance)> {
    let mut out = Vec::new();
    for k in 0..12u64 {
        let mut s = RunSettings::default();
        s.scenario.n = [60, 150, 300][k as usize % 3];
        s.scenario.channels = [4, 10, 21][(k / 3) as usize % 3];
        s.scenario.interference_range = [30.0, 50.0][(k / 2) as usize % 2];
        s.scenario.third_party_fraction = if k % 4 == 3 { 0.2 } else { 0.0 };
        s.scenario.rng_seed = 40 + k;
        s.auction.reserve_price = [0, 10, 30][k as usize % 3];
        s.auction.step_size = [1, 3][k as usize % 2];
        s.sharing.tau = [0.0, 300.0, 3000.0][k as usize % 3];
        let instance = generate_instance(&s.scenario).unwrap();
        out.push((s, instance));
    }
    out
}

fn check_accounting(o: &Outcome, instance: &Instance) {
    let p = &instance.profiles;
    assert_eq!(o.assignment.counts(), o.counts);
    assert_eq!(o.revenue, o.payments.iter().copied().sum::<Amount>());
    let mut clinched = vec![0u32; p.len()];
    for e in &o.ledger {
        clinched[e.bidder] += e.count;
    }
    for i in 0..p.len() {
        assert_eq!(clinched[i], o.counts[i] + o.unplaced[i], "bidder {i}");
        assert!(o.counts[i] <= instance.graph.available_count(i));
        // nobody pays more than the units are worth to them
        assert!(o.payments[i] <= Amount::from_units(p.get(i).value_of(o.counts[i] as usize)), "bidder {i}");
    }
}

#[test]
fn exclusive_outcomes_are_feasible_and_balanced() {
    for (s, instance) in scenarios() {
        let o = run_auction(&instance.graph, &instance.profiles, &s.auction).unwrap();
        o.assignment.validate(&instance.graph, AssignMode::Exclusive).unwrap();
        check_accounting(&o, &instance);
        assert!(o.ledger.iter().all(|e| e.price >= s.auction.reserve_price));
    }
}

#[test]
fn sharing_outcomes_are_feasible_and_balanced() {
    for (s, instance) in scenarios() {
        let params = s.sharing.params_for(instance.graph.len(), instance.seed).unwrap();
        let o = run_sharing_auction(&instance.graph, &instance.profiles, &s.auction, &params).unwrap();
        o.assignment.validate(&instance.graph, AssignMode::Sharing(&params)).unwrap();
        check_accounting(&o, &instance);
    }
}

#[test]
fn full_bandwidth_sharing_is_exclusive() {
    for (s, instance) in scenarios() {
        let params = SharingParams::uniform(instance.graph.len(), Share::FULL, s.sharing.tau);
        let shared = run_sharing_auction(&instance.graph, &instance.profiles, &s.auction, &params).unwrap();
        let exclusive = run_auction(&instance.graph, &instance.profiles, &s.auction).unwrap();
        assert_eq!(shared.counts, exclusive.counts);
        assert_eq!(shared.payments, exclusive.payments);
    }
}

#[test]
fn zero_tau_sharing_matches_exclusive_supply() {
    for (s, instance) in scenarios() {
        let params = s.sharing.params_for(instance.graph.len(), instance.seed).unwrap();
        let params = SharingParams { tau: 0.0, ..params };
        let shared = run_sharing_auction(&instance.graph, &instance.profiles, &s.auction, &params).unwrap();
        let exclusive = run_auction(&instance.graph, &instance.profiles, &s.auction).unwrap();
        assert_eq!(shared.counts, exclusive.counts);
    }
}

#[test]
fn oracles_agree_where_sharing_is_impossible() {
    let spec = SmallInstanceSpec { max_n: 5, max_channels: 3, ..Default::default() };
    let config = AuctionConfig::new(1, 1).without_log();
    for index in 0..40 {
        let (graph, profiles) = spec.instance(9, index);
        let params = SharingParams::uniform(graph.len(), Share::FULL, 0.0);
        let ex = optimal_revenue_exclusive(&graph, &profiles, &config).unwrap();
        let sh = optimal_revenue_sharing(&graph, &profiles, &config, &params).unwrap();
        assert_eq!(ex.best_value, sh.best_value, "instance {index}");
        let w = optimal_welfare(&graph, &profiles, AssignMode::Exclusive).unwrap();
        w.best_assignment.validate(&graph, AssignMode::Exclusive).unwrap();
        let engine = run_auction(&graph, &profiles, &config).unwrap();
        assert!(engine.welfare(&profiles) <= w.best_value.rounded());
        assert!(engine.revenue <= ex.best_value);
    }
}
