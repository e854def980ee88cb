use proptest::prelude::*;
use verum_core::format::{parse_instance, parse_result, write_instance, write_result};
use verum_core::verify::SmallInstanceSpec;
use verum_core::{run_auction, AuctionConfig, Instance};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_round_trip(seed in any::<u64>(), index in 0u64..1000, homogeneous in any::<bool>()) {
        let spec = SmallInstanceSpec { max_n: 8, homogeneous, ..Default::default() };
        let (graph, profiles) = spec.instance(seed, index);
        let instance = Instance::new(seed, graph, profiles).unwrap();
        let text = write_instance(&instance);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &instance);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn results_round_trip(seed in any::<u64>(), index in 0u64..1000, step in 1u32..4) {
        let (graph, profiles) = SmallInstanceSpec::default().instance(seed, index);
        let o = run_auction(&graph, &profiles, &AuctionConfig::new(1, step)).unwrap();
        let back = parse_result(&write_result(&o, &graph, "verum-exclusive", seed)).unwrap();
        prop_assert_eq!(back.counts, o.counts);
        prop_assert_eq!(back.payments, o.payments);
        prop_assert_eq!(back.assignment, o.assignment);
        prop_assert_eq!(back.revenue, o.revenue);
        prop_assert_eq!(back.rounds, o.rounds);
        prop_assert_eq!(back.log.len(), o.log.len());
    }
}
