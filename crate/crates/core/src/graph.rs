//! Graph-restricted games and the Myerson value.

use crate::solvers::shapley_exact;
use crate::{Allocation, Coalition, GameError, PlayerSet, Result, TuGame};

/// Undirected communication graph over the players.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameGraph {
    players: PlayerSet,
    /// Neighbour mask per player.
    adjacency: Vec<u32>,
}

impl GameGraph {
    /// Duplicate edges collapse; self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let players = PlayerSet::new(n)?;
        let mut adjacency = vec![0u32; n];
        for &(i, j) in edges {
            if i == j {
                return Err(GameError::InvalidGraph(format!("self-loop at player {i}")));
            }
            if i >= n || j >= n {
                return Err(GameError::InvalidGraph(format!(
                    "edge ({i}, {j}) outside {n} players"
                )));
            }
            adjacency[i] |= 1 << j;
            adjacency[j] |= 1 << i;
        }
        Ok(GameGraph { players, adjacency })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::new(n, &edges)
    }

    /// `0-1-2-…-(n-1)`.
    pub fn line(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    pub fn players(&self) -> PlayerSet {
        self.players
    }

    pub fn n(&self) -> usize {
        self.players.count()
    }

    pub fn neighbours(&self, i: usize) -> Coalition {
        Coalition::from_mask(self.adjacency[i])
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i] & (1 << j) != 0
    }

    /// Edges `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|i| {
                self.neighbours(i)
                    .members()
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }
}

/// Components of the subgraph induced by `s`, ordered by lowest member.
pub fn connected_components(s: Coalition, g: &GameGraph) -> Vec<Coalition> {
    let mut rest = s.intersection(g.players().full());
    let mut out = Vec::new();
    while let Some(seed) = rest.lowest() {
        let mut comp = Coalition::singleton(seed);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut next = Coalition::EMPTY;
            for i in frontier.members() {
                next = next.union(g.neighbours(i));
            }
            frontier = next.intersection(rest).difference(comp);
            comp = comp.union(frontier);
        }
        rest = rest.difference(comp);
        out.push(comp);
    }
    out
}

fn check_sizes(game: &TuGame, g: &GameGraph) -> Result<()> {
    if game.n() == g.n() {
        Ok(())
    } else {
        Err(GameError::PlayerSetMismatch)
    }
}

/// `u(S) = Σ_{C ∈ components(S)} v(C)`.
pub fn myerson_restricted_game(game: &TuGame, g: &GameGraph) -> Result<TuGame> {
    check_sizes(game, g)?;
    TuGame::from_fn(game.n(), |s| {
        connected_components(s, g)
            .into_iter()
            .map(|c| game.value(c))
            .sum()
    })
}

/// Shapley value of the graph-restricted game.
pub fn myerson_value(game: &TuGame, g: &GameGraph) -> Result<Allocation> {
    Ok(shapley_exact(&myerson_restricted_game(game, g)?))
}
