//! Brute-force calculators for the combinatorial quantities behind the
//! uniform bands, and an exact level-set optimality checker.

mod class;
mod level_set;
mod order;
mod shatter;

pub use class::{FiniteFunctionClass, PoolClass, SearchBudget};
pub use level_set::{
    verify_level_set_optimality, verify_level_set_optimality_with, Counterexample, FiniteInstance,
    LevelSetReport, MAX_INSTANCE_POINTS,
};
pub use order::{order_behaviors, order_coefficient_lower_bound, OrderCoefficientSearch};
pub use shatter::{shattering_count, vc_subgraph_dimension_bounds, VcBounds, MAX_SHATTER_POINTS};
