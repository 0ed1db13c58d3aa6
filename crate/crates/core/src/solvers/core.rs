use std::collections::BTreeMap;

use crate::lp::{solve_lp, solve_with_row_generation, LinearProgram, LpStatus};
use crate::{Allocation, Coalition, GameError, Result, Tolerance, TuGame};

/// Result of the core LP.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreResult {
    pub nonempty: bool,
    /// A core member, present iff `nonempty`.
    pub sample_point: Option<Allocation>,
    /// Minimum of `Σ x_i` subject to every coalition constraint.
    pub lp_value: f64,
    pub lp_iterations: usize,
}

/// `x` is efficient and no coalition is paid less than its worth.
pub fn core_membership(game: &TuGame, x: &Allocation) -> Result<bool> {
    core_membership_with(game, x, Tolerance::DEFAULT)
}

pub fn core_membership_with(game: &TuGame, x: &Allocation, tol: Tolerance) -> Result<bool> {
    game.check_allocation(x)?;
    if !tol.eq(x.total(), game.grand_value()) {
        return Ok(false);
    }
    let sums = coalition_sums(x.payoffs());
    Ok(game
        .coalitions()
        .all(|s| tol.geq(sums[s.index()], game.value(s))))
}

/// `Σ_{i∈S} x_i` for every mask `S`.
pub(crate) fn coalition_sums(x: &[f64]) -> Vec<f64> {
    let size = 1usize << x.len();
    let mut sums = vec![0.0; size];
    for m in 1..size {
        let low = m.trailing_zeros() as usize;
        sums[m] = sums[m & (m - 1)] + x[low];
    }
    sums
}

pub(crate) fn indicator(s: Coalition, len: usize) -> Vec<f64> {
    let mut row = vec![0.0; len];
    for i in s.members() {
        row[i] = 1.0;
    }
    row
}

/// Solves `min Σ x_i  s.t.  Σ_{i∈S} x_i >= v(S)` for every nonempty `S`.
///
/// Coalition rows are generated lazily: the LP starts from the singleton and
/// grand-coalition rows and adds the most violated coalitions until the
/// point satisfies all `2^n - 1` constraints.
pub fn core_nonempty(game: &TuGame) -> Result<CoreResult> {
    let n = game.n();
    let mut lp = LinearProgram::minimize(vec![1.0; n]);
    for i in 0..n {
        let s = Coalition::singleton(i);
        lp.add_geq(indicator(s, n), game.value(s));
    }
    if n > 1 {
        lp.add_geq(vec![1.0; n], game.grand_value());
    }
    let tol = Tolerance::DEFAULT;
    let (sol, _) = solve_with_row_generation(lp, |x| {
        let sums = coalition_sums(x);
        let mut violated: Vec<(f64, Coalition)> = game
            .coalitions()
            .skip(1)
            .filter_map(|s| {
                let gap = game.value(s) - sums[s.index()];
                (gap > tol.scaled(game.value(s))).then_some((gap, s))
            })
            .collect();
        violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        violated
            .into_iter()
            .take(n.max(4))
            .map(|(_, s)| (indicator(s, n), game.value(s)))
            .collect()
    })?;
    match sol.status {
        LpStatus::Optimal => {}
        // The singleton rows bound the objective and free variables make any
        // finite system feasible, so neither can happen.
        LpStatus::Infeasible => return Err(GameError::LpStatus("infeasible")),
        LpStatus::Unbounded => return Err(GameError::LpStatus("unbounded")),
    }
    let lp_value = sol.objective_value.unwrap_or_default();
    let grand = game.grand_value();
    let nonempty = lp_value <= grand + Tolerance::LP.scaled(grand);
    let sample_point = nonempty
        .then(|| sol.x.clone().map(Allocation::new))
        .flatten();
    Ok(CoreResult {
        nonempty,
        sample_point,
        lp_value,
        lp_iterations: sol.iterations,
    })
}

/// Nonnegative weights on nonempty coalitions with `Σ_{S∋i} μ(S) = 1` for every player.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BalancedWeights(BTreeMap<Coalition, f64>);

impl BalancedWeights {
    pub fn weights(&self) -> &BTreeMap<Coalition, f64> {
        &self.0
    }

    pub fn get(&self, s: Coalition) -> f64 {
        self.0.get(&s).copied().unwrap_or(0.0)
    }

    /// `Σ_S μ(S) v(S)`.
    pub fn weighted_value(&self, game: &TuGame) -> f64 {
        self.0.iter().map(|(&s, &w)| w * game.value(s)).sum()
    }

    /// Largest deviation of any player's total weight from 1.
    pub fn balance_error(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let total: f64 = self
                    .0
                    .iter()
                    .filter(|(s, _)| s.contains(i))
                    .map(|(_, w)| w)
                    .sum();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub balanced: bool,
    /// A balanced collection with `Σ μ(S) v(S) > v(N)`, present iff not balanced.
    pub certificate: Option<BalancedWeights>,
    /// Maximum of `Σ μ(S) v(S)` over balanced collections.
    pub max_weighted_value: f64,
    pub lp_iterations: usize,
}

/// Decides balancedness through `max Σ μ(S) v(S)` over balanced collections,
/// the dual of the core LP.
pub fn check_balanced(game: &TuGame) -> Result<BalanceReport> {
    let n = game.n();
    let cols: Vec<Coalition> = game.coalitions().skip(1).collect();
    let objective = cols.iter().map(|&s| game.value(s)).collect();
    let mut lp = LinearProgram::maximize(objective).all_nonneg();
    for i in 0..n {
        let row = cols
            .iter()
            .map(|s| if s.contains(i) { 1.0 } else { 0.0 })
            .collect();
        lp.add_eq(row, 1.0);
    }
    let sol = solve_lp(&lp)?;
    let mu = match (sol.status, sol.x) {
        (LpStatus::Optimal, Some(mu)) => mu,
        (LpStatus::Infeasible, _) => return Err(GameError::LpStatus("infeasible")),
        _ => return Err(GameError::LpStatus("unbounded")),
    };
    let max_weighted_value: f64 = mu.iter().zip(&cols).map(|(w, &s)| w * game.value(s)).sum();
    let grand = game.grand_value();
    let balanced = max_weighted_value <= grand + Tolerance::LP.scaled(grand);
    let certificate = (!balanced).then(|| {
        BalancedWeights(
            cols.iter()
                .zip(&mu)
                .filter(|(_, &w)| w > 1e-12)
                .map(|(&s, &w)| (s, w))
                .collect(),
        )
    });
    Ok(BalanceReport {
        balanced,
        certificate,
        max_weighted_value,
        lp_iterations: sol.iterations,
    })
}

fn require_simple(game: &TuGame) -> Result<()> {
    let tol = Tolerance::DEFAULT;
    let binary = game
        .values()
        .iter()
        .all(|&v| tol.eq(v, 0.0) || tol.eq(v, 1.0));
    if binary && tol.eq(game.grand_value(), 1.0) {
        Ok(())
    } else {
        Err(GameError::NotSimpleGame)
    }
}

/// Players `i` with `v(N \ {i}) = 0` in a simple game.
pub fn veto_players(game: &TuGame) -> Result<Vec<usize>> {
    require_simple(game)?;
    let full = game.grand();
    Ok((0..game.n())
        .filter(|&i| Tolerance::DEFAULT.eq(game.value(full.without(i)), 0.0))
        .collect())
}

/// Core of a simple game with veto players: nonnegative payoffs summing to 1,
/// zero for every non-veto player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleCoreDescription {
    pub veto: Vec<usize>,
}

impl SimpleCoreDescription {
    pub fn contains(&self, x: &Allocation) -> bool {
        let tol = Tolerance::DEFAULT;
        tol.eq(x.total(), 1.0)
            && x.iter().enumerate().all(|(i, &xi)| {
                if self.veto.contains(&i) {
                    tol.geq(xi, 0.0)
                } else {
                    tol.eq(xi, 0.0)
                }
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleGameCore {
    pub veto: Vec<usize>,
    pub core: CoreResult,
    /// Present iff the game has at least one veto player.
    pub description: Option<SimpleCoreDescription>,
}

/// Core of a simple game. With veto players it is characterised directly;
/// without them the core LP decides.
pub fn simple_game_core(game: &TuGame) -> Result<SimpleGameCore> {
    let veto = veto_players(game)?;
    if let Some(&first) = veto.first() {
        let mut x = vec![0.0; game.n()];
        x[first] = 1.0;
        Ok(SimpleGameCore {
            core: CoreResult {
                nonempty: true,
                sample_point: Some(Allocation::new(x)),
                lp_value: 1.0,
                lp_iterations: 0,
            },
            description: Some(SimpleCoreDescription { veto: veto.clone() }),
            veto,
        })
    } else {
        Ok(SimpleGameCore {
            core: core_nonempty(game)?,
            description: None,
            veto,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::majority_voting_game;

    fn pairs_game(pair: f64) -> TuGame {
        TuGame::from_fn(3, |s| match s.len() {
            2 => pair,
            3 => 1.0,
            _ => 0.0,
        })
        .unwrap()
    }

    fn simple(n: usize, win: impl Fn(Coalition) -> bool) -> TuGame {
        TuGame::from_fn(n, |s| if win(s) { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn majority_core_point() {
        let g = majority_voting_game(3).unwrap();
        let third = 1.0 / 3.0;
        assert!(core_membership(&g, &vec![third; 3].into()).unwrap());
        assert!(!core_membership(&g, &vec![0.5, 0.5, 0.0].into()).unwrap());
        let r = core_nonempty(&g).unwrap();
        assert!(r.nonempty);
        let x = r.sample_point.unwrap();
        for v in x.iter() {
            assert!((v - third).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_core_when_pairs_worth_too_much() {
        let g = pairs_game(0.8);
        let r = core_nonempty(&g).unwrap();
        assert!(!r.nonempty);
        assert!(r.sample_point.is_none());
        assert!((r.lp_value - 1.2).abs() < 1e-9);
    }

    #[test]
    fn additive_core() {
        let w = [1.0, 2.0, -0.5, 4.0];
        let g = TuGame::additive(&w).unwrap();
        assert!(core_membership(&g, &w.to_vec().into()).unwrap());
        let r = core_nonempty(&g).unwrap();
        assert!(r.nonempty);
        assert!(r.sample_point.unwrap().max_abs_diff(&w.to_vec().into()) < 1e-9);
        assert!(check_balanced(&g).unwrap().balanced);
    }

    #[test]
    fn balancedness_and_certificate() {
        let g = majority_voting_game(3).unwrap();
        let r = check_balanced(&g).unwrap();
        assert!(r.balanced && r.certificate.is_none());
        assert!((r.max_weighted_value - 1.0).abs() < 1e-9);

        let g = pairs_game(0.8);
        let r = check_balanced(&g).unwrap();
        assert!(!r.balanced);
        let mu = r.certificate.unwrap();
        for pair in [0b011, 0b101, 0b110] {
            assert!((mu.get(Coalition::from_mask(pair)) - 0.5).abs() < 1e-9);
        }
        assert!(mu.balance_error(3) < 1e-9);
        assert!((mu.weighted_value(&g) - 1.2).abs() < 1e-9);
    }

    #[test]
    fn veto_sets() {
        let g = simple(3, |s| s.contains(0) && s.len() >= 2);
        assert_eq!(veto_players(&g).unwrap(), vec![0]);
        let u = simple(3, |s| s.contains(0) && s.contains(1));
        assert_eq!(veto_players(&u).unwrap(), vec![0, 1]);
        let m = majority_voting_game(3).unwrap();
        assert_eq!(veto_players(&m), Err(GameError::NotSimpleGame));
    }

    #[test]
    fn simple_cores() {
        let g = simple(3, |s| s.contains(0) && s.len() >= 2);
        let r = simple_game_core(&g).unwrap();
        let x = r.core.sample_point.clone().unwrap();
        assert_eq!(x.payoffs(), &[1.0, 0.0, 0.0]);
        assert!(core_membership(&g, &x).unwrap());
        // The LP agrees the core is the single point (1, 0, 0).
        let lp = core_nonempty(&g).unwrap();
        assert!(lp.sample_point.unwrap().max_abs_diff(&x) < 1e-9);

        let u = simple(3, |s| s.contains(0) && s.contains(1));
        let r = simple_game_core(&u).unwrap();
        let d = r.description.unwrap();
        assert!(d.contains(&vec![0.3, 0.7, 0.0].into()));
        assert!(!d.contains(&vec![0.3, 0.6, 0.1].into()));
        assert!(core_membership(&u, &vec![0.3, 0.7, 0.0].into()).unwrap());
        assert_eq!(r.core.sample_point.unwrap().payoffs(), &[1.0, 0.0, 0.0]);

        let maj = simple(3, |s| s.len() >= 2);
        let r = simple_game_core(&maj).unwrap();
        assert!(r.veto.is_empty() && !r.core.nonempty);
        assert!((r.core.lp_value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn coalition_sums_match_direct() {
        let x = [0.5, -1.0, 2.0, 3.5];
        let sums = coalition_sums(&x);
        for m in 0u32..16 {
            let s = Coalition::from_mask(m);
            let direct: f64 = s.members().map(|i| x[i]).sum();
            assert_eq!(sums[m as usize], direct);
        }
    }
}
