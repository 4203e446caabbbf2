//! Equitable food-bank distribution: a welfare-guided allocation policy, a
//! distance-greedy baseline, and a deterministic simulator for comparing
//! them.
//!
//! The crate is organized around five modules:
//!
//! * [`model`]: scenario data (donors, agencies, food types) plus JSON
//!   serialization and validation.
//! * [`welfare`]: the inequality-averse welfare index over residual
//!   supplies and its weighted blend across food types.
//! * [`policy`]: the two allocation policies and their building blocks.
//! * [`metrics`]: overflow, undistributed pounds, and people served for a
//!   finished allocation plan.
//! * [`simulate`]: seeded scenario generation, Monte Carlo replications,
//!   and the inequality-aversion sweep.
//!
//! Everything is deterministic given a seed: the same config always
//! produces the same scenarios, plans, and statistics, bit for bit.

pub mod metrics;
pub mod model;
pub mod policy;
pub mod simulate;
pub mod welfare;

pub use metrics::{
    compute_metrics, compute_overflow, compute_people_served, compute_people_served_with,
    AgencyMetrics, MetricsError, RunMetrics, ServedRule,
};
pub use model::{
    myplate_weights, validate_scenario, Agency, AgencyId, Donor, DonorId, FoodType, Location,
    PolicyParams, PresetError, Scenario, Violation,
};
pub use policy::{
    allocate_from_subset, effective_demand, enumerate_feasible_combinations,
    order_agencies_by_distance, order_agencies_by_poverty, order_donors, run_baseline_policy,
    run_proposed_policy, run_proposed_policy_with, select_best_combination, AgencyOrdering,
    Allocation, AllocationPlan, CombinationEvaluation, FeasibleCombinations, PolicyError,
    PolicyRun, SupplyMap,
};
pub use simulate::{
    aggregate_replications, epsilon_sweep, epsilon_sweep_with, generate_scenario,
    replication_seed, run_replication, run_replications, run_replications_with, ComparisonStats,
    EpsilonSpec, GeneratorConfig, PolicyStats, ReplicationOutcome, SimError, SummaryStat,
};
pub use welfare::{
    atkinson_welfare, combined_welfare, head_count_ratio, ResidualProfile, WelfareError,
    WelfareReport,
};
