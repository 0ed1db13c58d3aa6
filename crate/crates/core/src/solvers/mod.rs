//! Solution concepts and classification checks for canonical TU games.

mod core;
mod nucleolus;
mod properties;
mod shapley;

pub use self::core::{
    check_balanced, core_membership, core_membership_with, core_nonempty, simple_game_core,
    veto_players, BalanceReport, BalancedWeights, CoreResult, SimpleCoreDescription,
    SimpleGameCore,
};
pub use self::nucleolus::{
    excess, excess_vector, kernel_check, kernel_check_with, nucleolus, nucleolus_detailed,
    surplus_matrix, ExcessVector, NucleolusResult, MAX_NUCLEOLUS_PLAYERS,
};
pub use self::properties::{
    check_convex, check_convex_with, check_superadditive, check_superadditive_with, PropertyReport,
};
pub use self::shapley::{shapley_exact, shapley_sampled};
