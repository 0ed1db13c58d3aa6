use coopgame::random::{
    convex_game, nonempty_core_game, rng_from_seed, superadditive_game, uniform_game,
};
use coopgame::solvers::{
    check_balanced, check_convex, core_membership, core_nonempty, excess_vector, kernel_check,
    nucleolus, shapley_exact, shapley_sampled,
};
use coopgame::{is_imputation, Allocation, Coalition, TuGame};
use proptest::prelude::*;

/// Average marginal contribution over all `n!` orders.
fn shapley_by_permutations(g: &TuGame) -> Vec<f64> {
    fn walk(g: &TuGame, order: &mut Vec<usize>, used: Coalition, acc: &mut [f64], count: &mut f64) {
        let n = g.n();
        if order.len() == n {
            let mut s = Coalition::EMPTY;
            for &i in order.iter() {
                acc[i] += g.value(s.with(i)) - g.value(s);
                s = s.with(i);
            }
            *count += 1.0;
            return;
        }
        for i in 0..n {
            if !used.contains(i) {
                order.push(i);
                walk(g, order, used.with(i), acc, count);
                order.pop();
            }
        }
    }
    let mut acc = vec![0.0; g.n()];
    let mut count = 0.0;
    walk(g, &mut Vec::new(), Coalition::EMPTY, &mut acc, &mut count);
    acc.iter().map(|a| a / count).collect()
}

fn in_core_brute_force(g: &TuGame, x: &[f64], tol: f64) -> bool {
    let total: f64 = x.iter().sum();
    (total - g.grand_value()).abs() <= tol
        && g.coalitions()
            .all(|s| s.members().map(|i| x[i]).sum::<f64>() >= g.value(s) - tol)
}

fn swap_players(g: &TuGame, a: usize, b: usize) -> TuGame {
    TuGame::from_fn(g.n(), |s| {
        let mapped = Coalition::from_members(s.members().map(|i| match i {
            _ if i == a => b,
            _ if i == b => a,
            _ => i,
        }));
        g.value(mapped)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shapley_matches_permutation_average(seed in any::<u64>(), n in 1usize..=6) {
        let g = uniform_game(n, &mut rng_from_seed(seed)).unwrap();
        let phi = shapley_exact(&g);
        let oracle = shapley_by_permutations(&g);
        prop_assert!(phi.max_abs_diff(&oracle.into()) < 1e-9);
    }

    #[test]
    fn shapley_axioms(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = rng_from_seed(seed);
        let u = uniform_game(n, &mut rng).unwrap();
        let w = uniform_game(n, &mut rng).unwrap();
        let phi = shapley_exact(&u);
        prop_assert!((phi.total() - u.grand_value()).abs() < 1e-9);

        let sum = shapley_exact(&u.sum(&w).unwrap());
        let parts = shapley_exact(&w);
        for i in 0..n {
            prop_assert!((sum[i] - phi[i] - parts[i]).abs() < 1e-9);
        }

        // Relabelling two players swaps their payoffs.
        let swapped = shapley_exact(&swap_players(&u, 0, 1));
        prop_assert!((swapped[0] - phi[1]).abs() < 1e-9);
        prop_assert!((swapped[1] - phi[0]).abs() < 1e-9);

        // Player n-1 made a dummy.
        let last = n - 1;
        let dummy = TuGame::from_fn(n, |s| u.value(s.without(last))).unwrap();
        prop_assert!(shapley_exact(&dummy)[last].abs() < 1e-9);
    }

    #[test]
    fn symmetric_players_share_equally(seed in any::<u64>(), n in 2usize..=7) {
        let u = uniform_game(n, &mut rng_from_seed(seed)).unwrap();
        // Symmetrise players 0 and 1 by averaging with the swapped game.
        let sym = TuGame::from_fn(n, |s| 0.5 * (u.value(s) + swap_players(&u, 0, 1).value(s))).unwrap();
        let phi = shapley_exact(&sym);
        prop_assert!((phi[0] - phi[1]).abs() < 1e-9);
    }

    #[test]
    fn bondareva_shapley(seed in any::<u64>(), n in 2usize..=5, superadd in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let g = if superadd {
            superadditive_game(n, &mut rng).unwrap()
        } else {
            uniform_game(n, &mut rng).unwrap()
        };
        let core = core_nonempty(&g).unwrap();
        let bal = check_balanced(&g).unwrap();
        prop_assert_eq!(core.nonempty, bal.balanced);
        if let Some(x) = &core.sample_point {
            prop_assert!(in_core_brute_force(&g, x.payoffs(), 1e-6));
        }
        if let Some(cert) = &bal.certificate {
            prop_assert!(!bal.balanced);
            prop_assert!(cert.balance_error(n) < 1e-7);
            prop_assert!(cert.weighted_value(&g) > g.grand_value());
        }
    }

    #[test]
    fn convex_games_contain_shapley(seed in any::<u64>(), n in 2usize..=6) {
        let g = convex_game(n, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(check_convex(&g).holds);
        prop_assert!(check_balanced(&g).unwrap().balanced);
        let phi = shapley_exact(&g);
        prop_assert!(core_membership(&g, &phi).unwrap());
        prop_assert!(in_core_brute_force(&g, phi.payoffs(), 1e-9));
    }

    #[test]
    fn nucleolus_in_core_and_kernel(seed in any::<u64>(), n in 2usize..=5) {
        let g = nonempty_core_game(n, &mut rng_from_seed(seed)).unwrap();
        let x = nucleolus(&g).unwrap();
        prop_assert!(in_core_brute_force(&g, x.payoffs(), 1e-6));
        prop_assert!(core_membership(&g, &x).unwrap());
        prop_assert!(kernel_check(&g, &x).unwrap());
    }

    #[test]
    fn nucleolus_beats_core_points(seed in any::<u64>(), n in 2usize..=4) {
        let g = nonempty_core_game(n, &mut rng_from_seed(seed)).unwrap();
        let x = nucleolus(&g).unwrap();
        let ex = excess_vector(&g, &x).unwrap();
        // Any other imputation on a coarse lattice is lexicographically no better.
        let lo: Vec<f64> = (0..n).map(|i| g.value(Coalition::singleton(i))).collect();
        let spare = g.grand_value() - lo.iter().sum::<f64>();
        let steps = 8;
        let mut k = vec![0usize; n - 1];
        loop {
            let used: usize = k.iter().sum();
            if used <= steps {
                let mut y: Vec<f64> = (0..n - 1).map(|i| lo[i] + spare * k[i] as f64 / steps as f64).collect();
                y.push(lo[n - 1] + spare * (steps - used) as f64 / steps as f64);
                let y = Allocation::new(y);
                prop_assert!(is_imputation(&g, &y).unwrap());
                let ey = excess_vector(&g, &y).unwrap();
                prop_assert!(ex.lex_leq(&ey, 1e-7));
            }
            let mut d = 0;
            while d < k.len() {
                k[d] += 1;
                if k[d] <= steps { break; }
                k[d] = 0;
                d += 1;
            }
            if d == k.len() { break; }
        }
    }

    #[test]
    fn sampled_is_deterministic(seed in any::<u64>(), n in 1usize..=6) {
        let g = uniform_game(n, &mut rng_from_seed(seed)).unwrap();
        let a = shapley_sampled(&g, 200, seed).unwrap();
        let b = shapley_sampled(&g, 200, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn sampling_error_shrinks_with_samples() {
    let g = coopgame::scenarios::majority_voting_game(3).unwrap();
    let exact = shapley_exact(&g);
    // Mean absolute error over 20 seeds; the standard error drops by about
    // sqrt(10) per step, so means must decrease strictly.
    let mae = |samples: usize| {
        (0..20u64)
            .map(|seed| {
                let est = shapley_sampled(&g, samples, seed).unwrap();
                (0..3).map(|i| (est[i] - exact[i]).abs()).sum::<f64>() / 3.0
            })
            .sum::<f64>()
            / 20.0
    };
    let errors: Vec<f64> = [100, 1_000, 10_000].into_iter().map(mae).collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 0.01);
}
