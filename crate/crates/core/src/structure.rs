//! Games under a fixed coalition structure.

use crate::solvers::shapley_exact;
use crate::{Allocation, Coalition, GameError, Partition, Result, Tolerance, TuGame};

/// `v` restricted to the members of one block, re-indexed so the block's
/// `k`-th member is player `k` of the sub-game.
#[derive(Debug, Clone)]
pub struct RestrictedGame<'a> {
    parent: &'a TuGame,
    block: Coalition,
    members: Vec<usize>,
    game: TuGame,
}

impl<'a> RestrictedGame<'a> {
    pub fn parent(&self) -> &'a TuGame {
        self.parent
    }

    pub fn block(&self) -> Coalition {
        self.block
    }

    /// Global index of each local player.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn game(&self) -> &TuGame {
        &self.game
    }

    /// Maps a local coalition back to the parent's player indices.
    pub fn lift(&self, local: Coalition) -> Coalition {
        Coalition::from_members(local.members().map(|k| self.members[k]))
    }

    /// Writes local payoffs into a full-length allocation.
    pub fn scatter(&self, local: &Allocation, into: &mut [f64]) {
        for (k, &i) in self.members.iter().enumerate() {
            into[i] = local[k];
        }
    }
}

pub fn restrict(game: &TuGame, block: Coalition) -> Result<RestrictedGame<'_>> {
    if block.is_empty() {
        return Err(GameError::EmptyBlock);
    }
    game.check_coalition(block)?;
    let members: Vec<usize> = block.members().collect();
    let local = TuGame::from_fn(members.len(), |t| {
        game.value(Coalition::from_members(t.members().map(|k| members[k])))
    })?;
    Ok(RestrictedGame {
        parent: game,
        block,
        members,
        game: local,
    })
}

/// Aumann-Drèze value: the Shapley value of each block's restricted game.
pub fn aumann_dreze_value(game: &TuGame, partition: &Partition) -> Result<Allocation> {
    check_partition(game, partition)?;
    let mut x = vec![0.0; game.n()];
    for &block in partition.blocks() {
        let r = restrict(game, block)?;
        r.scatter(&shapley_exact(r.game()), &mut x);
    }
    Ok(Allocation::new(x))
}

/// Every block's payoffs sum to that block's worth.
pub fn relative_efficiency_check(
    game: &TuGame,
    partition: &Partition,
    x: &Allocation,
) -> Result<bool> {
    check_partition(game, partition)?;
    game.check_allocation(x)?;
    let tol = Tolerance::DEFAULT;
    Ok(partition
        .blocks()
        .iter()
        .all(|&b| tol.eq(x.coalition_total(b), game.value(b))))
}

fn check_partition(game: &TuGame, partition: &Partition) -> Result<()> {
    if partition.support() == game.grand() {
        Ok(())
    } else {
        Err(GameError::PlayerSetMismatch)
    }
}
