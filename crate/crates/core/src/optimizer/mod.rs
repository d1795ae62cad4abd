//! Revenue- and welfare-maximising training schemes.
//!
//! * [`brute_force_revenue_opt`] / [`brute_force_welfare_opt`] enumerate every
//!   scheme (exact, exponential in `T`).
//! * [`arms`] runs a backward-induction dynamic program over a discretised
//!   proportion grid (approximate, polynomial in `T`).
//! * [`price_of_anarchy`] compares the best achievable welfare with the worst
//!   welfare among revenue-maximising schemes.
//! * [`training_gap_bound`] certifies how long an optimal platform can go
//!   without retraining.

mod arms;
mod brute;
mod gap_bound;

pub use arms::{arms, solve_arms, Action, ArmsSolution, DpTable};
pub use brute::{
    brute_force_revenue_opt, brute_force_revenue_opt_with, brute_force_welfare_opt,
    brute_force_welfare_opt_with, price_of_anarchy, price_of_anarchy_with, BruteForceOptions,
    DEFAULT_BRUTE_FORCE_CAP,
};
pub use gap_bound::{training_gap_bound, training_gap_bound_with, GapBoundOptions, GapCertificate};

use crate::model::TrainingScheme;

/// How an [`OptimizationResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimality {
    /// Exhaustive enumeration.
    Exact,
    /// Dynamic program on a proportion grid with the given step.
    ApproxEps(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub scheme: TrainingScheme,
    /// Re-simulated objective of `scheme`: average revenue `V` or cumulative
    /// welfare `U`, depending on the optimiser.
    pub objective: f64,
    pub optimality: Optimality,
    /// Number of schemes attaining the optimum (exact mode only).
    pub ties: Option<u64>,
}
