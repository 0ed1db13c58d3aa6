use coopgame::formation::{max_welfare_partition, run_merge_split, ComparisonOrder, PayoffRule};
use coopgame::random::{rng_from_seed, uniform_game};
use coopgame::scenarios::{
    bankruptcy_game, css_sensing_game, gaussian_mac_game, virtual_mimo_game, BankruptcyParams,
    CssParams, MacParams, MimoParams,
};
use coopgame::solvers::{check_superadditive, core_membership, excess_vector, nucleolus};
use coopgame::{game_from_table, is_imputation, Allocation, Coalition, Partition};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mac_is_superadditive(powers in prop::collection::vec(0.01f64..10.0, 1..=6), noise in 0.01f64..10.0) {
        let g = gaussian_mac_game(&MacParams { powers, noise }).unwrap();
        prop_assert!(check_superadditive(&g).holds);
    }

    #[test]
    fn bankruptcy_monotone_and_superadditive(
        claims in prop::collection::vec(1.0f64..500.0, 1..=6),
        share in 0.0f64..=1.0,
    ) {
        let estate = share * claims.iter().sum::<f64>();
        let g = bankruptcy_game(&BankruptcyParams { claims, estate }).unwrap();
        prop_assert!(check_superadditive(&g).holds);
        for s in g.coalitions() {
            for i in 0..g.n() {
                prop_assert!(g.value(s.with(i)) >= g.value(s));
            }
        }
        // Bankruptcy games are convex, so the core is nonempty.
        let x = nucleolus(&g).unwrap();
        prop_assert!(core_membership(&g, &x).unwrap());
    }

    #[test]
    fn css_probabilities_move_with_size(miss in 0.01f64..0.99, fa in 0.001f64..0.05, n in 1usize..=8) {
        let p = CssParams::uniform(n, miss, fa, 0.1, 1.0);
        for k in 1..n {
            let small = Coalition::full(k);
            let big = Coalition::full(k + 1);
            prop_assert!(p.coalition_miss(big) <= p.coalition_miss(small));
            prop_assert!(p.coalition_false_alarm(big) >= p.coalition_false_alarm(small));
        }
    }

    #[test]
    fn mimo_grand_coalition_loses_when_a_pair_is_too_far(seed in any::<u64>(), n in 2usize..=7) {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let mut positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
        positions[n - 1] = [200.0, 0.0];
        let params = MimoParams {
            positions,
            budget: 1.0,
            exponent: 2.0,
            exchange_scale: 1e-4,
            rx_antennas: 4,
            noise: 0.1,
        };
        prop_assert!(params.exchange_power(Coalition::from_members([0, n - 1])) >= params.budget);
        let g = virtual_mimo_game(&params).unwrap();
        let (best, w) = max_welfare_partition(&g).unwrap();
        prop_assert!(best != Partition::grand(n));
        prop_assert!(w > g.grand_value());
    }

    #[test]
    fn tables_start_at_zero(seed in any::<u64>(), n in 1usize..=8) {
        let g = uniform_game(n, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(g.values()[0], 0.0);
        let mut bad = g.values().to_vec();
        bad[0] = 0.25;
        prop_assert!(game_from_table(n, bad).is_err());
    }

    #[test]
    fn imputations_are_efficient(seed in any::<u64>(), n in 1usize..=6, xs in prop::collection::vec(-1.0f64..2.0, 6)) {
        let g = uniform_game(n, &mut rng_from_seed(seed)).unwrap();
        let x = Allocation::new(xs[..n].to_vec());
        if is_imputation(&g, &x).unwrap() {
            prop_assert!((x.total() - g.grand_value()).abs() <= 1e-9 * g.grand_value().abs().max(1.0));
        }
    }

    #[test]
    fn core_iff_nonpositive_excess(seed in any::<u64>(), n in 2usize..=5, xs in prop::collection::vec(0.0f64..1.0, 5)) {
        let g = uniform_game(n, &mut rng_from_seed(seed)).unwrap();
        // Rescale onto the efficient hyperplane.
        let raw = &xs[..n];
        let total: f64 = raw.iter().sum::<f64>().max(1e-9);
        let x = Allocation::new(raw.iter().map(|v| v * g.grand_value() / total).collect());
        let ex = excess_vector(&g, &x).unwrap();
        let by_excess = ex.max_excess().unwrap() <= 1e-9;
        prop_assert_eq!(core_membership(&g, &x).unwrap(), by_excess);
    }
}

#[test]
fn css_merge_split_blocks_stay_small() {
    for n in 2..=8 {
        let g = css_sensing_game(&CssParams::uniform(n, 0.3, 0.05, 0.1, 0.1)).unwrap();
        for s in g.coalitions().filter(|s| s.len() >= 3) {
            assert_eq!(g.value(s), 0.0);
        }
        let order = ComparisonOrder::Pareto(PayoffRule::Identity);
        let trace = run_merge_split(&g, order, &Partition::singletons(n)).unwrap();
        assert!(trace.final_partition.blocks().iter().all(|b| b.len() <= 2));
        // Pairs are worth more than singletons at this β, so pairs do form.
        assert!(trace.final_partition.blocks().iter().any(|b| b.len() == 2));
    }
}
