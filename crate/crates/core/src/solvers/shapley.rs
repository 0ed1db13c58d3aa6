use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Allocation, CharacteristicFunction, Coalition, GameError, Result, TuGame};

/// Exact Shapley value, summing weighted marginal contributions over every coalition.
pub fn shapley_exact(game: &TuGame) -> Allocation {
    let n = game.n();
    // weight[s] = s! (n - s - 1)! / n!
    let mut weight = vec![0.0; n];
    weight[0] = 1.0 / n as f64;
    for s in 1..n {
        weight[s] = weight[s - 1] * s as f64 / (n - s) as f64;
    }
    let mut phi = vec![0.0; n];
    for s in game.coalitions() {
        let vs = game.value(s);
        let w = weight.get(s.len()).copied().unwrap_or(0.0);
        for (i, p) in phi.iter_mut().enumerate() {
            if !s.contains(i) {
                *p += w * (game.value(s.with(i)) - vs);
            }
        }
    }
    Allocation::new(phi)
}

/// Monte Carlo Shapley value over `samples` uniformly random joining orders.
///
/// Orders come from a ChaCha8 stream seeded with `seed`, so equal inputs give
/// equal outputs. Works for any [`CharacteristicFunction`], including games
/// too large to tabulate.
pub fn shapley_sampled<G: CharacteristicFunction + ?Sized>(
    game: &G,
    samples: usize,
    seed: u64,
) -> Result<Allocation> {
    if samples == 0 {
        return Err(GameError::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let n = game.player_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut totals = vec![0.0; n];
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let mut s = Coalition::EMPTY;
        let mut prev = 0.0;
        for &i in &order {
            s = s.with(i);
            let v = game.worth(s);
            totals[i] += v - prev;
            prev = v;
        }
    }
    let k = samples as f64;
    Ok(Allocation::new(totals.into_iter().map(|t| t / k).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::majority_voting_game;
    use crate::FnGame;

    /// Average of marginal contributions over all n! orders.
    fn permutation_oracle(game: &TuGame) -> Vec<f64> {
        fn permute(
            k: usize,
            order: &mut Vec<usize>,
            game: &TuGame,
            acc: &mut Vec<f64>,
            count: &mut f64,
        ) {
            if k == order.len() {
                let mut s = Coalition::EMPTY;
                for &i in order.iter() {
                    acc[i] += game.value(s.with(i)) - game.value(s);
                    s = s.with(i);
                }
                *count += 1.0;
                return;
            }
            for j in k..order.len() {
                order.swap(k, j);
                permute(k + 1, order, game, acc, count);
                order.swap(k, j);
            }
        }
        let n = game.n();
        let mut acc = vec![0.0; n];
        let mut count = 0.0;
        permute(0, &mut (0..n).collect(), game, &mut acc, &mut count);
        acc.into_iter().map(|a| a / count).collect()
    }

    #[test]
    fn majority_equal_split() {
        let phi = shapley_exact(&majority_voting_game(3).unwrap());
        for v in phi.iter() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_permutation_oracle() {
        let g = TuGame::new(
            4,
            (0..16)
                .map(|m| {
                    if m == 0 {
                        0.0
                    } else {
                        ((m * 37) % 11) as f64 / 3.0
                    }
                })
                .collect(),
        )
        .unwrap();
        let oracle = permutation_oracle(&g);
        let phi = shapley_exact(&g);
        for (a, b) in phi.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn additive_game_returns_weights() {
        let w = [0.5, 2.0, -1.0];
        let g = TuGame::additive(&w).unwrap();
        let phi = shapley_exact(&g);
        assert!(phi.max_abs_diff(&w.to_vec().into()) < 1e-12);
        let est = shapley_sampled(&g, 17, 3).unwrap();
        assert!(est.max_abs_diff(&w.to_vec().into()) < 1e-12);
    }

    #[test]
    fn single_player() {
        let g = TuGame::new(1, vec![0.0, 4.0]).unwrap();
        assert_eq!(shapley_exact(&g).payoffs(), &[4.0]);
    }

    #[test]
    fn sampling_is_deterministic_and_close() {
        let g = majority_voting_game(3).unwrap();
        let a = shapley_sampled(&g, 20_000, 42).unwrap();
        assert_eq!(a, shapley_sampled(&g, 20_000, 42).unwrap());
        for v in a.iter() {
            assert!((v - 1.0 / 3.0).abs() < 0.02);
        }
        assert!(shapley_sampled(&g, 0, 1).is_err());
    }

    #[test]
    fn sampling_untabulated_game() {
        // 30-player glove-style game: worth is the smaller side's size.
        let g = FnGame::new(30, |s: Coalition| {
            let left = (s.mask() & 0x7fff).count_ones();
            let right = (s.mask() >> 15).count_ones();
            left.min(right) as f64
        })
        .unwrap();
        let phi = shapley_sampled(&g, 2_000, 9).unwrap();
        assert!((phi.total() - 15.0).abs() < 1e-9);
    }
}
