//! Players, coalitions, TU games, partitions and allocations.

use std::fmt;
use std::ops::Index;

use crate::{GameError, Result, Tolerance};

/// Exact solvers tabulate all `2^n` coalitions; this caps the table at `2^20`.
pub const MAX_EXACT_PLAYERS: usize = 20;

/// Largest player count a [`Coalition`] bitmask can address.
pub const MAX_MASK_PLAYERS: usize = 32;

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A set of players encoded as a bitmask, bit `i` set when player `i` is a member.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_mask(mask: u32) -> Self {
        Coalition(mask)
    }

    pub fn singleton(player: usize) -> Self {
        Coalition(1 << player)
    }

    /// The grand coalition of an `n`-player game.
    pub fn full(n: usize) -> Self {
        Coalition(full_mask(n))
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        Coalition(members.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, player: usize) -> bool {
        player < 32 && self.0 & (1 << player) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Coalition {
        Coalition(self.0 & !other.0)
    }

    pub fn with(self, player: usize) -> Coalition {
        Coalition(self.0 | (1 << player))
    }

    pub fn without(self, player: usize) -> Coalition {
        Coalition(self.0 & !(1 << player))
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest-indexed member, if any.
    pub fn lowest(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn members(self) -> Members {
        Members(self.0)
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone)]
pub struct Members(u32);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Player set `{0, …, n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlayerSet {
    n: usize,
}

impl PlayerSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GameError::NoPlayers);
        }
        if n > MAX_MASK_PLAYERS {
            return Err(GameError::TooManyPlayers {
                players: n,
                max: MAX_MASK_PLAYERS,
            });
        }
        Ok(PlayerSet { n })
    }

    pub fn count(self) -> usize {
        self.n
    }

    pub fn full(self) -> Coalition {
        Coalition::full(self.n)
    }

    pub fn contains(self, s: Coalition) -> bool {
        s.is_subset_of(self.full())
    }

    /// Rejects player counts the exact (table-based) solvers cannot handle.
    pub fn require_exact(self) -> Result<()> {
        if self.n > MAX_EXACT_PLAYERS {
            Err(GameError::TooManyPlayers {
                players: self.n,
                max: MAX_EXACT_PLAYERS,
            })
        } else {
            Ok(())
        }
    }
}

/// Anything that assigns a worth to every coalition of a fixed player set.
pub trait CharacteristicFunction {
    fn player_count(&self) -> usize;
    fn worth(&self, s: Coalition) -> f64;
}

/// A TU game given by its complete value table.
#[derive(Debug, Clone, PartialEq)]
pub struct TuGame {
    players: PlayerSet,
    values: Vec<f64>,
}

/// Validates `values` (indexed by coalition mask) and builds a game.
pub fn game_from_table(n: usize, values: Vec<f64>) -> Result<TuGame> {
    let players = PlayerSet::new(n)?;
    players.require_exact()?;
    let expected = 1usize << n;
    if values.len() != expected {
        return Err(GameError::LengthMismatch {
            expected,
            actual: values.len(),
        });
    }
    if let Some(mask) = values.iter().position(|v| !v.is_finite()) {
        return Err(GameError::NonFiniteValue(mask));
    }
    if values[0] != 0.0 {
        return Err(GameError::NonzeroEmptyCoalition(values[0]));
    }
    Ok(TuGame { players, values })
}

impl TuGame {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        game_from_table(n, values)
    }

    /// Tabulates `f` over every coalition. `f(∅)` is ignored and stored as 0.
    pub fn from_fn<F: FnMut(Coalition) -> f64>(n: usize, mut f: F) -> Result<Self> {
        let players = PlayerSet::new(n)?;
        players.require_exact()?;
        let values = (0..1u32 << n)
            .map(|m| if m == 0 { 0.0 } else { f(Coalition(m)) })
            .collect();
        game_from_table(n, values)
    }

    /// Additive game `v(S) = Σ_{i∈S} w_i`.
    pub fn additive(weights: &[f64]) -> Result<Self> {
        Self::from_fn(weights.len(), |s| s.members().map(|i| weights[i]).sum())
    }

    pub fn players(&self) -> PlayerSet {
        self.players
    }

    pub fn n(&self) -> usize {
        self.players.n
    }

    pub fn grand(&self) -> Coalition {
        self.players.full()
    }

    pub fn value(&self, s: Coalition) -> f64 {
        self.values[s.index()]
    }

    pub fn grand_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Every coalition, including the empty and the grand one, in mask order.
    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> {
        (0..self.values.len() as u32).map(Coalition)
    }

    /// Nonempty coalitions other than the grand coalition.
    pub fn proper_coalitions(&self) -> impl Iterator<Item = Coalition> {
        (1..self.values.len() as u32 - 1).map(Coalition)
    }

    /// Game whose table is the entrywise sum of `self` and `other`.
    pub fn sum(&self, other: &TuGame) -> Result<TuGame> {
        if self.n() != other.n() {
            return Err(GameError::PlayerSetMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        game_from_table(self.n(), values)
    }

    pub(crate) fn check_allocation(&self, x: &Allocation) -> Result<()> {
        if x.len() != self.n() {
            return Err(GameError::AllocationLength {
                expected: self.n(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_coalition(&self, s: Coalition) -> Result<()> {
        if self.players.contains(s) {
            Ok(())
        } else {
            Err(GameError::CoalitionOutOfRange {
                mask: s.mask(),
                players: self.n(),
            })
        }
    }
}

impl CharacteristicFunction for TuGame {
    fn player_count(&self) -> usize {
        self.n()
    }

    fn worth(&self, s: Coalition) -> f64 {
        self.value(s)
    }
}

/// A game given by a closure, for player counts too large to tabulate.
pub struct FnGame<F> {
    n: usize,
    f: F,
}

impl<F: Fn(Coalition) -> f64> FnGame<F> {
    pub fn new(n: usize, f: F) -> Result<Self> {
        PlayerSet::new(n)?;
        Ok(FnGame { n, f })
    }
}

impl<F: Fn(Coalition) -> f64> CharacteristicFunction for FnGame<F> {
    fn player_count(&self) -> usize {
        self.n
    }

    fn worth(&self, s: Coalition) -> f64 {
        if s.is_empty() {
            0.0
        } else {
            (self.f)(s)
        }
    }
}

/// A payoff per player.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Allocation(Vec<f64>);

impl Allocation {
    pub fn new(payoffs: Vec<f64>) -> Self {
        Allocation(payoffs)
    }

    pub fn zeros(n: usize) -> Self {
        Allocation(vec![0.0; n])
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `Σ_{i∈S} x_i`.
    pub fn coalition_total(&self, s: Coalition) -> f64 {
        s.members().map(|i| self.0[i]).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn max_abs_diff(&self, other: &Allocation) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for Allocation {
    fn from(v: Vec<f64>) -> Self {
        Allocation(v)
    }
}

impl Index<usize> for Allocation {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Efficiency and individual rationality, at the default tolerance.
pub fn is_imputation(game: &TuGame, x: &Allocation) -> Result<bool> {
    is_imputation_with(game, x, Tolerance::DEFAULT)
}

pub fn is_imputation_with(game: &TuGame, x: &Allocation, tol: Tolerance) -> Result<bool> {
    game.check_allocation(x)?;
    let efficient = tol.eq(x.total(), game.grand_value());
    let rational = (0..game.n()).all(|i| tol.geq(x[i], game.value(Coalition::singleton(i))));
    Ok(efficient && rational)
}

/// A disjoint cover of the player set, blocks ordered by their lowest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Coalition>,
}

/// Validates `blocks` as a partition of `players` and puts it in canonical order.
pub fn canonical_partition(blocks: Vec<Coalition>, players: PlayerSet) -> Result<Partition> {
    let full = players.full();
    let mut seen = Coalition::EMPTY;
    for &b in &blocks {
        if b.is_empty() {
            return Err(GameError::EmptyBlock);
        }
        if !b.is_subset_of(full) {
            return Err(GameError::CoalitionOutOfRange {
                mask: b.mask(),
                players: players.count(),
            });
        }
        let overlap = seen.intersection(b);
        if !overlap.is_empty() {
            return Err(GameError::Overlap(overlap.mask()));
        }
        seen = seen.union(b);
    }
    if seen != full {
        return Err(GameError::IncompleteCover(full.difference(seen).mask()));
    }
    Ok(Partition::from_disjoint(blocks))
}

impl Partition {
    /// Trusted constructor: `blocks` must already be a valid partition.
    pub(crate) fn from_disjoint(mut blocks: Vec<Coalition>) -> Self {
        blocks.sort_by_key(|b| b.lowest());
        Partition { blocks }
    }

    pub fn new(blocks: Vec<Coalition>, players: PlayerSet) -> Result<Self> {
        canonical_partition(blocks, players)
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(Coalition::singleton).collect(),
        }
    }

    pub fn grand(n: usize) -> Self {
        Partition {
            blocks: vec![Coalition::full(n)],
        }
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Coalition> {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Union of the blocks.
    pub fn support(&self) -> Coalition {
        self.blocks
            .iter()
            .fold(Coalition::EMPTY, |acc, &b| acc.union(b))
    }

    pub fn block_of(&self, player: usize) -> Option<Coalition> {
        self.blocks.iter().copied().find(|b| b.contains(player))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Vec<f64> {
        let p = 2.0 / 3.0;
        vec![0.0, 0.0, 0.0, p, 0.0, p, p, 1.0]
    }

    #[test]
    fn builds_majority_table() {
        let g = game_from_table(3, example1()).unwrap();
        assert_eq!(g.value(Coalition::from_members([0, 1])), 2.0 / 3.0);
        assert_eq!(g.grand_value(), 1.0);
    }

    #[test]
    fn single_player_game() {
        let g = game_from_table(1, vec![0.0, 5.0]).unwrap();
        assert_eq!(g.grand_value(), 5.0);
    }

    #[test]
    fn table_errors() {
        assert_eq!(
            game_from_table(2, vec![1.0, 0.0, 0.0, 0.0]),
            Err(GameError::NonzeroEmptyCoalition(1.0))
        );
        assert_eq!(
            game_from_table(2, vec![0.0, 0.0, 0.0]),
            Err(GameError::LengthMismatch {
                expected: 4,
                actual: 3
            })
        );
        assert_eq!(
            game_from_table(2, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(GameError::NonFiniteValue(1))
        );
        assert!(matches!(
            game_from_table(21, vec![]),
            Err(GameError::TooManyPlayers { .. })
        ));
        assert_eq!(game_from_table(0, vec![0.0]), Err(GameError::NoPlayers));
    }

    #[test]
    fn imputations() {
        let g = game_from_table(3, example1()).unwrap();
        let third = 1.0 / 3.0;
        assert!(is_imputation(&g, &vec![third; 3].into()).unwrap());
        assert!(is_imputation(&g, &vec![1.0, 0.0, 0.0].into()).unwrap());
        assert!(!is_imputation(&g, &vec![0.5; 3].into()).unwrap());
        assert!(!is_imputation(&g, &vec![1.5, -0.5, 0.0].into()).unwrap());
        assert!(matches!(
            is_imputation(&g, &vec![1.0].into()),
            Err(GameError::AllocationLength { .. })
        ));
    }

    #[test]
    fn canonical_ordering_and_errors() {
        let ps = PlayerSet::new(3).unwrap();
        let p = canonical_partition(
            vec![
                Coalition::from_members([2]),
                Coalition::from_members([0, 1]),
            ],
            ps,
        )
        .unwrap();
        assert_eq!(
            p.blocks(),
            &[
                Coalition::from_members([0, 1]),
                Coalition::from_members([2])
            ]
        );
        assert_eq!(canonical_partition(p.blocks().to_vec(), ps).unwrap(), p);
        assert!(matches!(
            canonical_partition(
                vec![
                    Coalition::from_members([0, 1]),
                    Coalition::from_members([1, 2])
                ],
                ps
            ),
            Err(GameError::Overlap(_))
        ));
        assert!(matches!(
            canonical_partition(vec![Coalition::from_members([0, 1])], ps),
            Err(GameError::IncompleteCover(0b100))
        ));
        assert_eq!(
            canonical_partition(vec![Coalition::full(3), Coalition::EMPTY], ps),
            Err(GameError::EmptyBlock)
        );
    }

    #[test]
    fn coalition_members_and_display() {
        let s = Coalition::from_members([4, 0, 2]);
        assert_eq!(s.members().collect::<Vec<_>>(), vec![0, 2, 4]);
        assert_eq!(s.to_string(), "{0,2,4}");
        assert_eq!(s.len(), 3);
        assert_eq!(s.lowest(), Some(0));
        assert_eq!(Coalition::full(32).len(), 32);
    }
}
