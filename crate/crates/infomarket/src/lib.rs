//! Equilibrium analysis for markets of binary event-detection services.
//!
//! Competing services sell a binary report ("event" / "no event") to a
//! heterogeneous user population. Each user weighs detection benefit against
//! false alarms and price; services pick prices to maximize profit. This
//! crate computes:
//!
//! - per-service demand, analytically for uniform valuation distributions
//!   and by seeded Monte Carlo for any distribution ([`demand`]);
//! - profits, best responses, Nash equilibria via iterated best response,
//!   and epsilon-Nash certificates ([`equilibrium`]);
//! - substitute markets (each user buys from at most one service) and
//!   complementary markets (users buy from all services and fuse the
//!   reports with an OR or AND rule, [`market`]);
//! - value of information for finite Bayesian decision problems: posteriors,
//!   optimal decisions, expected value, gain, and source selection ([`voi`]).
//!
//! The `examples/` directory has one runnable program per capability; the
//! `infomarket` binary drives the same computations from scenario files
//! ([`scenario`]) and writes CSV suitable for plotting and regression
//! testing ([`cli`]).

pub mod cli;
pub mod demand;
pub mod equilibrium;
pub mod market;
pub mod output;
pub mod scenario;
pub mod voi;

pub use demand::{
    demand_analytic, demand_complementary, demand_monte_carlo, demand_substitute,
    segment_substitute, Choice, DemandError, DemandResult, Segment,
};
pub use equilibrium::{
    best_response, best_response_curve, nash_solve, profit, verify_epsilon_nash, BestResponse,
    EquilibriumError, EquilibriumResult, NashCertificate, SolverConfig,
};
pub use market::{
    fused_detection, fused_false_alarm, utility_complementary, utility_substitute, FusionRule,
    MarketError, MarketMode, PriceVector, Scenario, Service, ValuationDistribution,
};
pub use scenario::{ScenarioError, ScenarioFile};
pub use voi::{
    expected_voi, information_gain, optimal_action, posterior, select_source, value_pointwise,
    DecisionProblem, ProblemBase, Source, VoiError, VoiReport,
};
