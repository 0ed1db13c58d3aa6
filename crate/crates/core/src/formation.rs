//! Partition enumeration and merge-and-split coalition formation.

use std::collections::HashMap;

use crate::solvers::{nucleolus, shapley_exact};
use crate::structure::restrict;
use crate::{Coalition, GameError, Partition, Result, Tolerance, TuGame};

/// Largest `n` whose Bell number the counter reports.
pub const MAX_BELL_PLAYERS: usize = 15;
/// Largest player set enumerated partition by partition.
pub const MAX_ENUMERATION_PLAYERS: usize = 12;
/// `dc_candidate` runs merge-and-split from all Bell(n) starting partitions.
pub const MAX_DC_PLAYERS: usize = 8;

fn out_of_range(what: &'static str, value: usize, min: usize, max: usize) -> GameError {
    GameError::OutOfRange {
        what,
        value,
        min,
        max,
    }
}

/// Bell number by the Bell triangle.
pub fn count_partitions(n: usize) -> Result<u64> {
    if !(1..=MAX_BELL_PLAYERS).contains(&n) {
        return Err(out_of_range("n", n, 1, MAX_BELL_PLAYERS));
    }
    let mut row = vec![1u64];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let prev = *next.last().unwrap();
            next.push(prev + x);
        }
        row = next;
    }
    Ok(*row.last().unwrap())
}

/// Set partitions of a coalition's members in restricted-growth-string order.
///
/// The first item is the coalition itself; blocks within each item are
/// ordered by lowest member.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    members: Vec<usize>,
    labels: Option<Vec<usize>>,
}

impl SetPartitions {
    pub fn of(s: Coalition) -> Self {
        let members: Vec<usize> = s.members().collect();
        let labels = (!members.is_empty()).then(|| vec![0; members.len()]);
        SetPartitions { members, labels }
    }

    fn advance(labels: &mut [usize]) -> bool {
        // prefix_max[i] = max(labels[..i])
        let mut prefix_max = vec![0; labels.len()];
        for i in 1..labels.len() {
            prefix_max[i] = prefix_max[i - 1].max(labels[i - 1]);
        }
        for i in (1..labels.len()).rev() {
            if labels[i] <= prefix_max[i] {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                return true;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<Coalition>;

    fn next(&mut self) -> Option<Vec<Coalition>> {
        let labels = self.labels.as_mut()?;
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Coalition::EMPTY; count];
        for (&l, &i) in labels.iter().zip(&self.members) {
            blocks[l] = blocks[l].with(i);
        }
        if !Self::advance(labels) {
            self.labels = None;
        }
        Some(blocks)
    }
}

/// All partitions of `n` players, grand coalition first.
pub fn enumerate_partitions(n: usize) -> Result<impl Iterator<Item = Partition>> {
    if !(1..=MAX_ENUMERATION_PLAYERS).contains(&n) {
        return Err(out_of_range("n", n, 1, MAX_ENUMERATION_PLAYERS));
    }
    Ok(SetPartitions::of(Coalition::full(n)).map(Partition::from_disjoint))
}

/// How a coalition's worth is shared among its members under the Pareto order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PayoffRule {
    /// `v(S) / |S|` each.
    EqualSplit,
    /// Shapley value of the restricted game on `S`.
    Shapley,
    /// Nucleolus of the restricted game on `S`.
    Nucleolus,
    /// Every member receives `v(S)` (non-transferable, one value per coalition).
    Identity,
}

impl PayoffRule {
    /// Per-member payoffs in ascending member order.
    pub fn payoffs(self, game: &TuGame, s: Coalition) -> Result<Vec<f64>> {
        let v = game.value(s);
        Ok(match self {
            PayoffRule::EqualSplit => vec![v / s.len() as f64; s.len()],
            PayoffRule::Identity => vec![v; s.len()],
            PayoffRule::Shapley => shapley_exact(restrict(game, s)?.game()).into_inner(),
            PayoffRule::Nucleolus => nucleolus(restrict(game, s)?.game())?.into_inner(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComparisonOrder {
    /// Strictly larger total worth.
    Utilitarian,
    /// Nobody worse off, somebody strictly better off.
    Pareto(PayoffRule),
}

fn covered(collection: &[Coalition]) -> Option<Coalition> {
    let mut acc = Coalition::EMPTY;
    for &c in collection {
        if c.is_empty() || !acc.is_disjoint(c) {
            return None;
        }
        acc = acc.union(c);
    }
    Some(acc)
}

/// Memoises per-coalition payoffs for one game and rule.
struct Evaluator<'a> {
    game: &'a TuGame,
    order: ComparisonOrder,
    cache: HashMap<Coalition, Vec<f64>>,
}

impl<'a> Evaluator<'a> {
    fn new(game: &'a TuGame, order: ComparisonOrder) -> Self {
        Evaluator {
            game,
            order,
            cache: HashMap::new(),
        }
    }

    fn player_payoffs(
        &mut self,
        rule: PayoffRule,
        collection: &[Coalition],
    ) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        for &c in collection {
            if !self.cache.contains_key(&c) {
                let p = rule.payoffs(self.game, c)?;
                self.cache.insert(c, p);
            }
            out.extend(c.members().zip(self.cache[&c].iter().copied()));
        }
        out.sort_by_key(|p| p.0);
        Ok(out)
    }

    fn prefers(&mut self, r: &[Coalition], s: &[Coalition]) -> Result<bool> {
        let tol = Tolerance::DEFAULT;
        match self.order {
            ComparisonOrder::Utilitarian => {
                let total = |c: &[Coalition]| c.iter().map(|&b| self.game.value(b)).sum::<f64>();
                Ok(tol.gt(total(r), total(s)))
            }
            ComparisonOrder::Pareto(rule) => {
                let x = self.player_payoffs(rule, r)?;
                let y = self.player_payoffs(rule, s)?;
                let no_loss = x.iter().zip(&y).all(|(a, b)| tol.geq(a.1, b.1));
                let gain = x.iter().zip(&y).any(|(a, b)| tol.gt(a.1, b.1));
                Ok(no_loss && gain)
            }
        }
    }

    fn find_merge(&mut self, blocks: &[Coalition]) -> Result<Option<(Coalition, Coalition)>> {
        let mut sorted = blocks.to_vec();
        sorted.sort();
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                let (a, b) = (sorted[i], sorted[j]);
                if self.prefers(&[a.union(b)], &[a, b])? {
                    return Ok(Some((a, b)));
                }
            }
        }
        Ok(None)
    }

    fn find_split(&mut self, blocks: &[Coalition]) -> Result<Option<(Coalition, Vec<Coalition>)>> {
        let mut sorted = blocks.to_vec();
        sorted.sort();
        for &b in &sorted {
            for parts in SetPartitions::of(b).skip(1) {
                if self.prefers(&parts, &[b])? {
                    return Ok(Some((b, parts)));
                }
            }
        }
        Ok(None)
    }
}

/// Whether collection `r` is strictly preferred to `s`; both must cover the same players.
pub fn prefers(
    order: ComparisonOrder,
    game: &TuGame,
    r: &[Coalition],
    s: &[Coalition],
) -> Result<bool> {
    match (covered(r), covered(s)) {
        (Some(a), Some(b)) if a == b && game.players().contains(a) => {}
        _ => return Err(GameError::PlayerSetMismatch),
    }
    Evaluator::new(game, order).prefers(r, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Merge,
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormationStep {
    pub operation: Operation,
    pub before: Vec<Coalition>,
    pub after: Vec<Coalition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormationTrace {
    pub initial: Partition,
    pub steps: Vec<FormationStep>,
    pub final_partition: Partition,
}

impl FormationTrace {
    /// Partitions visited, starting with the initial one.
    pub fn partitions(&self) -> Vec<Partition> {
        let mut current = self.initial.blocks().to_vec();
        let mut out = vec![self.initial.clone()];
        for step in &self.steps {
            current.retain(|b| !step.before.contains(b));
            current.extend(step.after.iter().copied());
            out.push(Partition::from_disjoint(current.clone()));
        }
        out
    }
}

fn check_cover(game: &TuGame, partition: &Partition) -> Result<()> {
    if partition.support() == game.grand() {
        Ok(())
    } else {
        Err(GameError::PlayerSetMismatch)
    }
}

fn step_cap(n: usize) -> usize {
    let bell = count_partitions(n.min(MAX_BELL_PLAYERS)).unwrap_or(u64::MAX);
    usize::try_from(bell)
        .unwrap_or(usize::MAX)
        .saturating_mul(1 << n)
}

/// Merge-and-split iteration from `initial` until neither rule applies.
///
/// Each pass tries pairwise merges first (block pairs in ascending mask
/// order) and applies the first preferred one; when no merge is preferred it
/// scans blocks in ascending mask order and applies the first preferred
/// split, enumerating sub-partitions in canonical order.
pub fn run_merge_split(
    game: &TuGame,
    order: ComparisonOrder,
    initial: &Partition,
) -> Result<FormationTrace> {
    check_cover(game, initial)?;
    if game.n() > MAX_ENUMERATION_PLAYERS {
        return Err(out_of_range(
            "players",
            game.n(),
            1,
            MAX_ENUMERATION_PLAYERS,
        ));
    }
    let mut eval = Evaluator::new(game, order);
    let mut blocks = initial.blocks().to_vec();
    let mut steps = Vec::new();
    let cap = step_cap(game.n());
    loop {
        if steps.len() >= cap {
            return Err(GameError::NonTermination(cap));
        }
        if let Some((a, b)) = eval.find_merge(&blocks)? {
            blocks.retain(|&c| c != a && c != b);
            blocks.push(a.union(b));
            steps.push(FormationStep {
                operation: Operation::Merge,
                before: vec![a, b],
                after: vec![a.union(b)],
            });
            continue;
        }
        if let Some((b, parts)) = eval.find_split(&blocks)? {
            blocks.retain(|&c| c != b);
            blocks.extend(parts.iter().copied());
            steps.push(FormationStep {
                operation: Operation::Split,
                before: vec![b],
                after: parts,
            });
            continue;
        }
        break;
    }
    Ok(FormationTrace {
        initial: initial.clone(),
        steps,
        final_partition: Partition::from_disjoint(blocks),
    })
}

/// No pairwise merge and no split is preferred.
pub fn dhp_stable(game: &TuGame, partition: &Partition, order: ComparisonOrder) -> Result<bool> {
    check_cover(game, partition)?;
    let mut eval = Evaluator::new(game, order);
    Ok(eval.find_merge(partition.blocks())?.is_none()
        && eval.find_split(partition.blocks())?.is_none())
}

/// Runs merge-and-split from every partition; returns the common outcome if
/// all runs agree.
pub fn dc_candidate(game: &TuGame, order: ComparisonOrder) -> Result<Option<Partition>> {
    let n = game.n();
    if n > MAX_DC_PLAYERS {
        return Err(out_of_range("players", n, 1, MAX_DC_PLAYERS));
    }
    let mut outcome: Option<Partition> = None;
    for start in enumerate_partitions(n)? {
        let end = run_merge_split(game, order, &start)?.final_partition;
        match &outcome {
            None => outcome = Some(end),
            Some(p) if *p == end => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(outcome)
}

/// `Σ_k v(B_k)`.
pub fn social_welfare(game: &TuGame, partition: &Partition) -> f64 {
    partition.blocks().iter().map(|&b| game.value(b)).sum()
}

/// Welfare-maximising partition by exhaustive enumeration (first maximiser
/// in canonical order).
pub fn max_welfare_partition(game: &TuGame) -> Result<(Partition, f64)> {
    let mut best: Option<(Partition, f64)> = None;
    for p in enumerate_partitions(game.n())? {
        let w = social_welfare(game, &p);
        if best.as_ref().is_none_or(|b| w > b.1) {
            best = Some((p, w));
        }
    }
    Ok(best.expect("at least one partition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::majority_voting_game;
    use crate::PlayerSet;

    fn c(m: &[usize]) -> Coalition {
        Coalition::from_members(m.iter().copied())
    }

    fn toy_cost_game() -> TuGame {
        TuGame::from_fn(3, |s| match s.mask() {
            0b011 => 4.0,
            0b101 | 0b110 => 3.0,
            0b111 => 0.0,
            _ => 1.0,
        })
        .unwrap()
    }

    fn strict_superadditive() -> TuGame {
        TuGame::from_fn(4, |s| (s.len() * s.len()) as f64).unwrap()
    }

    #[test]
    fn bell_numbers() {
        assert_eq!(count_partitions(1).unwrap(), 1);
        assert_eq!(count_partitions(3).unwrap(), 5);
        assert_eq!(count_partitions(4).unwrap(), 15);
        assert_eq!(count_partitions(10).unwrap(), 115_975);
        assert_eq!(count_partitions(15).unwrap(), 1_382_958_545);
        assert!(count_partitions(0).is_err());
        assert!(count_partitions(16).is_err());
    }

    #[test]
    fn enumeration() {
        let all: Vec<Partition> = enumerate_partitions(3).unwrap().collect();
        assert_eq!(all.len(), 5);
        assert_eq!(all[0], Partition::grand(3));
        assert_eq!(all[4], Partition::singletons(3));
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 5);
        assert_eq!(
            enumerate_partitions(1).unwrap().collect::<Vec<_>>(),
            vec![Partition::grand(1)]
        );
        assert_eq!(enumerate_partitions(4).unwrap().count(), 15);
        // Every item is a canonical partition.
        let ps = PlayerSet::new(5).unwrap();
        for p in enumerate_partitions(5).unwrap() {
            assert_eq!(canonical(&p, ps), p);
        }
    }

    fn canonical(p: &Partition, ps: PlayerSet) -> Partition {
        Partition::new(p.blocks().iter().rev().copied().collect(), ps).unwrap()
    }

    #[test]
    fn preference_orders() {
        let g = majority_voting_game(3).unwrap();
        let grand = [g.grand()];
        let singles = [c(&[0]), c(&[1]), c(&[2])];
        assert!(prefers(ComparisonOrder::Utilitarian, &g, &grand, &singles).unwrap());
        for order in [
            ComparisonOrder::Utilitarian,
            ComparisonOrder::Pareto(PayoffRule::EqualSplit),
        ] {
            assert!(!prefers(order, &g, &grand, &grand).unwrap());
        }
        let toy = toy_cost_game();
        let r = [c(&[0, 1]), c(&[2])];
        assert!(prefers(
            ComparisonOrder::Pareto(PayoffRule::EqualSplit),
            &toy,
            &r,
            &singles
        )
        .unwrap());
        assert_eq!(
            prefers(ComparisonOrder::Utilitarian, &toy, &r, &[c(&[0])]),
            Err(GameError::PlayerSetMismatch)
        );
    }

    #[test]
    fn toy_game_formation() {
        let toy = toy_cost_game();
        let t = run_merge_split(
            &toy,
            ComparisonOrder::Utilitarian,
            &Partition::singletons(3),
        )
        .unwrap();
        let expected = Partition::new(vec![c(&[0, 1]), c(&[2])], toy.players()).unwrap();
        assert_eq!(t.final_partition, expected);
        assert_eq!(social_welfare(&toy, &t.final_partition), 5.0);
        assert_eq!(max_welfare_partition(&toy).unwrap().1, 5.0);
        assert!(dhp_stable(&toy, &expected, ComparisonOrder::Utilitarian).unwrap());
        let other = Partition::new(vec![c(&[0, 2]), c(&[1])], toy.players()).unwrap();
        assert!(dhp_stable(&toy, &other, ComparisonOrder::Utilitarian).unwrap());
        assert_eq!(
            dc_candidate(&toy, ComparisonOrder::Utilitarian).unwrap(),
            None
        );
    }

    #[test]
    fn superadditive_converges_to_grand() {
        let g = strict_superadditive();
        for start in enumerate_partitions(4).unwrap() {
            let t = run_merge_split(&g, ComparisonOrder::Utilitarian, &start).unwrap();
            assert_eq!(t.final_partition, Partition::grand(4));
        }
        assert!(!dhp_stable(&g, &Partition::singletons(4), ComparisonOrder::Utilitarian).unwrap());
        assert_eq!(
            dc_candidate(&g, ComparisonOrder::Utilitarian).unwrap(),
            Some(Partition::grand(4))
        );
    }

    #[test]
    fn zero_game_never_moves() {
        let g = TuGame::from_fn(3, |_| 0.0).unwrap();
        for order in [
            ComparisonOrder::Utilitarian,
            ComparisonOrder::Pareto(PayoffRule::EqualSplit),
        ] {
            for start in enumerate_partitions(3).unwrap() {
                let t = run_merge_split(&g, order, &start).unwrap();
                assert!(t.steps.is_empty());
                assert_eq!(t.final_partition, start);
                assert!(dhp_stable(&g, &start, order).unwrap());
            }
            assert_eq!(dc_candidate(&g, order).unwrap(), None);
        }
        let one = TuGame::new(1, vec![0.0, 0.0]).unwrap();
        assert_eq!(
            dc_candidate(&one, ComparisonOrder::Utilitarian).unwrap(),
            Some(Partition::grand(1))
        );
    }

    #[test]
    fn social_welfare_values() {
        let g = majority_voting_game(3).unwrap();
        assert_eq!(social_welfare(&g, &Partition::grand(3)), 1.0);
        assert_eq!(social_welfare(&g, &Partition::singletons(3)), 0.0);
        let toy = toy_cost_game();
        let p = Partition::new(vec![c(&[0, 1]), c(&[2])], toy.players()).unwrap();
        assert_eq!(social_welfare(&toy, &p), 5.0);
    }

    #[test]
    fn trace_replays_to_final() {
        let g = strict_superadditive();
        let t =
            run_merge_split(&g, ComparisonOrder::Utilitarian, &Partition::singletons(4)).unwrap();
        let visited = t.partitions();
        assert_eq!(visited.first(), Some(&Partition::singletons(4)));
        assert_eq!(visited.last(), Some(&t.final_partition));
        assert_eq!(t.steps.len(), 3);
    }

    #[test]
    fn payoff_rules() {
        let toy = toy_cost_game();
        let s = c(&[0, 1]);
        assert_eq!(
            PayoffRule::EqualSplit.payoffs(&toy, s).unwrap(),
            vec![2.0, 2.0]
        );
        assert_eq!(
            PayoffRule::Identity.payoffs(&toy, s).unwrap(),
            vec![4.0, 4.0]
        );
        assert_eq!(
            PayoffRule::Shapley.payoffs(&toy, s).unwrap(),
            vec![2.0, 2.0]
        );
        let nu = PayoffRule::Nucleolus.payoffs(&toy, s).unwrap();
        assert!((nu[0] - 2.0).abs() < 1e-9 && (nu[1] - 2.0).abs() < 1e-9);
    }
}
