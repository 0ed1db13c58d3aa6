//! Solvers for coalitional games with transferable utility.
//!
//! The crate is organised around [`TuGame`], a complete table of coalition
//! values indexed by bitmask. On top of it sit:
//!
//! * [`lp`]: a small dense two-phase simplex used by the core, balancedness
//!   and nucleolus computations;
//! * [`solvers`]: superadditivity and convexity checks, core, balancedness,
//!   simple games, Shapley value (exact and sampled), excesses, nucleolus and
//!   kernel;
//! * [`structure`]: restricted games and the Aumann-Drèze value under a fixed
//!   coalition structure;
//! * [`formation`]: partition enumeration, merge-and-split dynamics and
//!   stability checks;
//! * [`graph`] and [`netform`]: Myerson graph-restricted games and myopic
//!   relay tree formation;
//! * [`scenarios`]: value generators for voting, bankruptcy and wireless
//!   settings;
//! * [`random`]: seeded random game generators for property testing.
//!
//! Players are 0-based. Coalition `S` is the bitmask with bit `i` set when
//! player `i` belongs to `S`.

pub mod error;
pub mod formation;
pub mod game;
pub mod graph;
pub mod lp;
pub mod netform;
pub mod random;
pub mod scenarios;
pub mod solvers;
pub mod structure;
pub mod tolerance;

pub use error::{GameError, LpError};
pub use game::{
    canonical_partition, game_from_table, is_imputation, is_imputation_with, Allocation,
    CharacteristicFunction, Coalition, FnGame, Partition, PlayerSet, TuGame, MAX_EXACT_PLAYERS,
};
pub use tolerance::Tolerance;

pub type Result<T, E = GameError> = std::result::Result<T, E>;
