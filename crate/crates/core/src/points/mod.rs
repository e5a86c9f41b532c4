//! Geometric points: the equation system of a module, a tame-tower solver,
//! the separation of points, and tame characters of simple modules.

mod character;
mod equations;
mod solver;
mod tower;

pub use character::{points_match_character, tame_character, tame_character_raw, TameCharacter};
pub use equations::{build_equations, EquationSystem};
pub use solver::{gap_within_bound, min_pairwise_gap, residuals, solve_points, LocalPoint, PointSet, MAX_BRANCHES};
pub use tower::{suggest_tame_tower, ExtensionTower, TowerField, TowerStep, MAX_TOWER_FIELD};
