//! Excesses, the nucleolus and the kernel condition.

use crate::lp::{solve_with_row_generation, LinearProgram, LpStatus};
use crate::solvers::core::{coalition_sums, indicator};
use crate::{is_imputation, Allocation, Coalition, GameError, Result, Tolerance, TuGame};

/// Sequential LPs carry up to `2^n` coalition rows; beyond this the stage
/// count and confirmation LPs grow too fast for interactive use.
pub const MAX_NUCLEOLUS_PLAYERS: usize = 12;

/// `e(x, S) = v(S) - Σ_{i∈S} x_i`.
pub fn excess(game: &TuGame, x: &Allocation, s: Coalition) -> f64 {
    game.value(s) - x.coalition_total(s)
}

/// Excesses of all proper nonempty coalitions, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessVector {
    entries: Vec<(Coalition, f64)>,
}

impl ExcessVector {
    pub fn entries(&self) -> &[(Coalition, f64)] {
        &self.entries
    }

    pub fn max_excess(&self) -> Option<f64> {
        self.entries.first().map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether `self` is lexicographically no larger than `other`.
    pub fn lex_leq(&self, other: &ExcessVector, tol: f64) -> bool {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if a.1 < b.1 - tol {
                return true;
            }
            if a.1 > b.1 + tol {
                return false;
            }
        }
        true
    }
}

/// Sorted by excess non-increasing; ties by ascending mask.
pub fn excess_vector(game: &TuGame, x: &Allocation) -> Result<ExcessVector> {
    game.check_allocation(x)?;
    let sums = coalition_sums(x.payoffs());
    let mut entries: Vec<(Coalition, f64)> = game
        .proper_coalitions()
        .map(|s| (s, game.value(s) - sums[s.index()]))
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ExcessVector { entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NucleolusResult {
    pub allocation: Allocation,
    /// Excess level fixed at each stage, non-increasing.
    pub stage_levels: Vec<f64>,
    pub lp_solves: usize,
    pub lp_iterations: usize,
}

pub fn nucleolus(game: &TuGame) -> Result<Allocation> {
    nucleolus_detailed(game).map(|r| r.allocation)
}

/// Linear equalities over the payoff vector kept in reduced row echelon form.
struct FixedSystem {
    n: usize,
    /// (coefficients, rhs, pivot column)
    rows: Vec<(Vec<f64>, f64, usize)>,
    /// Original rows, for building LPs.
    originals: Vec<(Vec<f64>, f64)>,
}

const RANK_TOL: f64 = 1e-9;

impl FixedSystem {
    fn new(n: usize) -> Self {
        FixedSystem {
            n,
            rows: Vec::new(),
            originals: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<f64>, mut rhs: f64) -> (Vec<f64>, f64) {
        for (row, b, p) in &self.rows {
            let f = v[*p];
            if f != 0.0 {
                for (a, r) in v.iter_mut().zip(row) {
                    *a -= f * r;
                }
                rhs -= f * b;
            }
        }
        (v, rhs)
    }

    fn in_span(&self, s: Coalition) -> bool {
        let (v, _) = self.reduce(indicator(s, self.n), 0.0);
        v.iter().all(|a| a.abs() < RANK_TOL)
    }

    fn add(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.originals.push((coeffs.clone(), rhs));
        let (mut v, mut b) = self.reduce(coeffs, rhs);
        let Some((p, &pv)) = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        else {
            return;
        };
        if pv.abs() < RANK_TOL {
            return;
        }
        v.iter_mut().for_each(|a| *a /= pv);
        b /= pv;
        for (row, rb, _) in &mut self.rows {
            let f = row[p];
            if f != 0.0 {
                for (a, r) in row.iter_mut().zip(&v) {
                    *a -= f * r;
                }
                *rb -= f * b;
            }
        }
        self.rows.push((v, b, p));
    }

    /// The unique solution once the system has full rank.
    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (_, b, p) in &self.rows {
            x[*p] = *b;
        }
        x
    }
}

/// Sequential-LP nucleolus.
///
/// Stage `k` minimises the largest excess `ε` over the coalitions not yet
/// fixed, with every previously fixed coalition held at its level and the
/// imputation constraints in force. Coalitions tight at the optimum are
/// candidates; a candidate is fixed only if a confirmation LP shows its
/// excess cannot drop below `ε` anywhere on the optimal face. Coalitions whose
/// total is already determined by the fixed equalities leave the active set.
/// The loop ends when the fixed system pins down a single point.
pub fn nucleolus_detailed(game: &TuGame) -> Result<NucleolusResult> {
    let n = game.n();
    if n > MAX_NUCLEOLUS_PLAYERS {
        return Err(GameError::TooManyPlayers {
            players: n,
            max: MAX_NUCLEOLUS_PLAYERS,
        });
    }
    let grand = game.grand_value();
    let singletons: f64 = (0..n).map(|i| game.value(Coalition::singleton(i))).sum();
    if singletons > grand + Tolerance::DEFAULT.scaled(grand) {
        return Err(GameError::EmptyImputationSet { singletons, grand });
    }
    let scale = game.values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tight_tol = Tolerance::LP.0 * scale;
    let cut_tol = Tolerance::DEFAULT.0 * scale;

    let mut fixed = FixedSystem::new(n);
    fixed.add(vec![1.0; n], grand);
    let mut active: Vec<bool> = (0..1usize << n)
        .map(|m| m != 0 && m != (1 << n) - 1)
        .collect();
    let mut stage_levels = Vec::new();
    let mut lp_solves = 0;
    let mut lp_iterations = 0;

    // Variables: x_0..x_{n-1}, ε at index n.
    let row_with_eps = |s: Coalition| {
        let mut r = indicator(s, n + 1);
        r[n] = 1.0;
        r
    };

    while fixed.rank() < n {
        for (m, live) in active.iter_mut().enumerate() {
            if *live && fixed.in_span(Coalition::from_mask(m as u32)) {
                *live = false;
            }
        }
        let live: Vec<Coalition> = (0..active.len())
            .filter(|&m| active[m])
            .map(|m| Coalition::from_mask(m as u32))
            .collect();
        if live.is_empty() {
            break;
        }

        let mut base = LinearProgram::minimize(indicator(Coalition::singleton(n), n + 1));
        for (row, b) in &fixed.originals {
            let mut r = row.clone();
            r.push(0.0);
            base.add_eq(r, *b);
        }
        for i in 0..n {
            let s = Coalition::singleton(i);
            base.add_geq(indicator(s, n + 1), game.value(s));
        }
        let mut seeded = 0;
        for &s in &live {
            if s.len() == 1 || s.len() + 1 == n {
                base.add_geq(row_with_eps(s), game.value(s));
                seeded += 1;
            }
        }
        if seeded == 0 {
            base.add_geq(row_with_eps(live[0]), game.value(live[0]));
        }

        let separate = |x: &[f64]| {
            let sums = coalition_sums(&x[..n]);
            let eps = x[n];
            let mut violated: Vec<(f64, Coalition)> = live
                .iter()
                .filter_map(|&s| {
                    let gap = game.value(s) - sums[s.index()] - eps;
                    (gap > cut_tol).then_some((gap, s))
                })
                .collect();
            violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            violated
                .into_iter()
                .take(2 * n)
                .map(|(_, s)| (row_with_eps(s), game.value(s)))
                .collect::<Vec<_>>()
        };

        let (sol, stage_lp) = solve_with_row_generation(base, separate)?;
        lp_solves += 1;
        lp_iterations += sol.iterations;
        let x = match (sol.status, sol.x) {
            (LpStatus::Optimal, Some(x)) => x,
            (LpStatus::Infeasible, _) => return Err(GameError::LpStatus("infeasible")),
            _ => return Err(GameError::LpStatus("unbounded")),
        };
        let level = x[n];
        stage_levels.push(level);
        let sums = coalition_sums(&x[..n]);
        let candidates: Vec<Coalition> = live
            .iter()
            .copied()
            .filter(|&s| (game.value(s) - sums[s.index()] - level).abs() <= tight_tol)
            .collect();

        // Confirmation LPs run on the optimal face: ε pinned at `level`.
        let mut face = stage_lp;
        face.add_eq(indicator(Coalition::singleton(n), n + 1), level);
        let mut max_total = |target: &[f64]| -> Result<f64> {
            let mut lp = LinearProgram::maximize(target.to_vec());
            for (row, b) in face.eq_rows() {
                lp.add_eq(row.clone(), *b);
            }
            for (row, b) in face.geq_rows() {
                lp.add_geq(row.clone(), *b);
            }
            let (sol, _) = solve_with_row_generation(lp, separate)?;
            lp_solves += 1;
            lp_iterations += sol.iterations;
            let x = sol
                .x
                .ok_or(GameError::LpStatus("not optimal on the optimal face"))?;
            Ok(target.iter().zip(&x).map(|(c, v)| c * v).sum())
        };

        let floor = |s: Coalition| game.value(s) - level;
        let mut aggregate = vec![0.0; n + 1];
        for &s in &candidates {
            for i in s.members() {
                aggregate[i] += 1.0;
            }
        }
        let aggregate_floor: f64 = candidates.iter().map(|&s| floor(s)).sum();
        let all_fixed =
            max_total(&aggregate)? <= aggregate_floor + tight_tol * candidates.len() as f64;
        let mut confirmed = Vec::new();
        if all_fixed {
            confirmed = candidates.clone();
        } else {
            for &s in &candidates {
                if max_total(&indicator(s, n + 1))? <= floor(s) + tight_tol {
                    confirmed.push(s);
                }
            }
        }
        if confirmed.is_empty() {
            // Numerically degenerate face; fall back to the vertex's tight set.
            confirmed = candidates;
        }
        for s in confirmed {
            active[s.index()] = false;
            fixed.add(indicator(s, n), floor(s));
        }
    }

    Ok(NucleolusResult {
        allocation: Allocation::new(fixed.solution()),
        stage_levels,
        lp_solves,
        lp_iterations,
    })
}

/// `s[i][j]`: largest excess over coalitions containing `i` but not `j`.
pub fn surplus_matrix(game: &TuGame, x: &Allocation) -> Result<Vec<Vec<f64>>> {
    game.check_allocation(x)?;
    let n = game.n();
    let sums = coalition_sums(x.payoffs());
    let mut s = vec![vec![f64::NEG_INFINITY; n]; n];
    for c in game.proper_coalitions() {
        let e = game.value(c) - sums[c.index()];
        for i in c.members() {
            for j in (0..n).filter(|&j| !c.contains(j)) {
                if e > s[i][j] {
                    s[i][j] = e;
                }
            }
        }
    }
    Ok(s)
}

/// Kernel condition relative to the grand coalition: `s_ij(x) = s_ji(x)` for every pair.
pub fn kernel_check(game: &TuGame, x: &Allocation) -> Result<bool> {
    kernel_check_with(game, x, Tolerance::LP)
}

pub fn kernel_check_with(game: &TuGame, x: &Allocation, tol: Tolerance) -> Result<bool> {
    if !is_imputation(game, x)? {
        return Err(GameError::NotAnImputation);
    }
    let s = surplus_matrix(game, x)?;
    let n = game.n();
    Ok((0..n).all(|i| (i + 1..n).all(|j| tol.eq(s[i][j], s[j][i]))))
}
