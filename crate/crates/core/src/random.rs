//! Seeded random instances for property tests and benchmarks.
//!
//! Every generator takes an explicit `&mut impl Rng`; use
//! [`rng_from_seed`] for reproducible runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::full_mask;
use crate::{Coalition, Partition, PlayerSet, Result, TuGame};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Worths drawn independently from `U[0, 1)`, `v(∅) = 0`.
pub fn uniform_game<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TuGame> {
    let values: Vec<f64> = (0..1usize << n)
        .map(|m| if m == 0 { 0.0 } else { rng.gen::<f64>() })
        .collect();
    TuGame::new(n, values)
}

/// Smallest superadditive game above `game`:
/// `v̄(S) = max over partitions of S of the summed worths`.
pub fn superadditive_closure(game: &TuGame) -> Result<TuGame> {
    let mut v = game.values().to_vec();
    for s in 1..v.len() as u32 {
        let low = s & s.wrapping_neg();
        // Split off the block containing the lowest member; the rest is already closed.
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let block = low | sub;
            if block != s {
                let candidate = v[block as usize] + v[(s ^ block) as usize];
                if candidate > v[s as usize] {
                    v[s as usize] = candidate;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    TuGame::new(game.n(), v)
}

/// Uniform game pushed up to its superadditive closure.
pub fn superadditive_game<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TuGame> {
    superadditive_closure(&uniform_game(n, rng)?)
}

/// Strictly superadditive: the closure of a uniform game plus positive
/// dividends on every pair, so any two disjoint coalitions gain by merging.
pub fn strictly_superadditive_game<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TuGame> {
    let base = superadditive_game(n, rng)?;
    let mut pair = vec![vec![0.0; n]; n];
    for (i, row) in pair.iter_mut().enumerate() {
        for cell in row.iter_mut().skip(i + 1) {
            *cell = 0.1 + rng.gen::<f64>();
        }
    }
    TuGame::from_fn(n, |s| {
        let members: Vec<usize> = s.members().collect();
        let bonus: f64 = members
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| members[a + 1..].iter().map(move |&j| (i, j)))
            .map(|(i, j)| pair[i][j])
            .sum();
        base.value(s) + bonus
    })
}

/// Convex game from nonnegative Harsanyi dividends on coalitions of size ≥ 2
/// and arbitrary singleton worths.
pub fn convex_game<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TuGame> {
    let size = 1usize << n;
    let mut dividend = vec![0.0; size];
    for (m, d) in dividend.iter_mut().enumerate().skip(1) {
        *d = if m.count_ones() == 1 {
            rng.gen::<f64>()
        } else {
            rng.gen::<f64>() * rng.gen::<f64>()
        };
    }
    // v(S) = Σ_{T⊆S} d(T), by a subset-sum transform.
    let mut v = dividend;
    for i in 0..n {
        for m in 0..size {
            if m & (1 << i) != 0 {
                v[m] += v[m ^ (1 << i)];
            }
        }
    }
    TuGame::new(n, v)
}

/// Game with a known core point: `v(S) = u_S · x(S)` with `u_S ∈ [0, 1)` and
/// `v(N) = x(N)` for a random nonnegative `x`, so `x` lies in the core.
pub fn nonempty_core_game<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TuGame> {
    let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let full = full_mask(n);
    let values: Vec<f64> = (0..=full)
        .map(|m| {
            let s = Coalition::from_mask(m);
            let xs: f64 = s.members().map(|i| x[i]).sum();
            if m == full {
                xs
            } else if m == 0 {
                0.0
            } else {
                rng.gen::<f64>() * xs
            }
        })
        .collect();
    TuGame::new(n, values)
}

/// Players shuffled, then cut into blocks at random positions.
pub fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Partition> {
    let players = PlayerSet::new(n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks = Vec::new();
    let mut current = Coalition::EMPTY;
    for (k, &i) in order.iter().enumerate() {
        current = current.with(i);
        if k + 1 == n || rng.gen_bool(0.4) {
            blocks.push(current);
            current = Coalition::EMPTY;
        }
    }
    Partition::new(blocks, players)
}

/// Relay positions uniform in the disc of radius `radius` around the origin
/// base station, with traffic in `[1, 10)` packets per frame.
pub fn relay_layout<R: Rng + ?Sized>(
    relays: usize,
    radius: f64,
    rng: &mut R,
) -> (Vec<[f64; 2]>, Vec<f64>) {
    let positions = (0..relays)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            [r * theta.cos(), r * theta.sin()]
        })
        .collect();
    let traffic = (0..relays).map(|_| rng.gen_range(1.0..10.0)).collect();
    (positions, traffic)
}
