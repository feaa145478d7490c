//! Profit, best responses, and Nash equilibria of the pricing game.
//!
//! Each service's payoff is `p * D(p) - C`. Under uniform valuations the
//! demand is piecewise linear in the own price, so the payoff is piecewise
//! quadratic with kinks at regime boundaries. Derivative-based searches can
//! stall on those kinks; [`best_response`] instead scans a uniform price grid
//! and refines locally around the incumbent, which cannot miss the global
//! piece once the grid is finer than the narrowest regime.
//!
//! [`nash_solve`] iterates best responses in service order (Gauss-Seidel)
//! until a full sweep moves no price more than the fixed-point tolerance.
//! Convergence of the iteration is not guaranteed in general, so candidate
//! equilibria are certified after the fact: [`verify_epsilon_nash`] bounds
//! the best unilateral deviation gain of every service on a dense grid.

use thiserror::Error;

use crate::demand::{demand_analytic, DemandError};
use crate::market::{MarketError, PriceVector, Scenario};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("service index {index} out of range for {services} services")]
    BadServiceIndex { index: usize, services: usize },
    #[error("solver config invalid: {reason}")]
    BadConfig { reason: String },
    #[error("initial prices must lie within [{lo}, {hi}]")]
    InitialOutOfBounds { lo: f64, hi: f64 },
    #[error("best-response curves are only defined for two-service scenarios, got {services}")]
    NotTwoServices { services: usize },
}

/// Search parameters for best responses and equilibrium iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Lower edge of the price search interval.
    pub price_lo: f64,
    /// Upper edge of the price search interval.
    pub price_hi: f64,
    /// Points of the initial uniform grid.
    pub grid_points: usize,
    /// Local refinement passes around the incumbent maximizer.
    pub refine_rounds: usize,
    /// Guaranteed distance to a global maximizer at the default resolution.
    pub br_tolerance: f64,
    /// A sweep that moves no price more than this has converged.
    pub fixed_point_tolerance: f64,
    /// Maximum Gauss-Seidel sweeps before giving up.
    pub max_iterations: usize,
}

impl SolverConfig {
    /// Defaults with price bounds [0, v_max * max P_d]; beyond the upper
    /// bound demand is zero in every mode, so no maximizer is excluded.
    pub fn for_scenario(scenario: &Scenario) -> SolverConfig {
        let max_pd = scenario
            .services()
            .iter()
            .map(|s| s.detection_prob())
            .fold(0.0, f64::max);
        let hi = scenario.valuation().v_max() * max_pd;
        SolverConfig {
            price_lo: 0.0,
            // All-zero detection makes any price bound equally good; keep
            // the config valid.
            price_hi: if hi > 0.0 { hi } else { 1.0 },
            grid_points: 2001,
            refine_rounds: 3,
            br_tolerance: 1e-6,
            fixed_point_tolerance: 1e-6,
            max_iterations: 500,
        }
    }

    pub fn validate(&self) -> Result<(), EquilibriumError> {
        if !(self.price_lo.is_finite() && self.price_hi.is_finite())
            || self.price_lo < 0.0
            || self.price_lo >= self.price_hi
        {
            return Err(EquilibriumError::BadConfig {
                reason: format!(
                    "price bounds must satisfy 0 <= lo < hi, got [{}, {}]",
                    self.price_lo, self.price_hi
                ),
            });
        }
        if self.grid_points < 3 {
            return Err(EquilibriumError::BadConfig {
                reason: format!("grid_points must be at least 3, got {}", self.grid_points),
            });
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.br_tolerance) || !positive(self.fixed_point_tolerance) {
            return Err(EquilibriumError::BadConfig {
                reason: "tolerances must be positive".to_string(),
            });
        }
        if self.max_iterations == 0 {
            return Err(EquilibriumError::BadConfig {
                reason: "max_iterations must be positive".to_string(),
            });
        }
        Ok(())
    }
}

/// Outcome of a single-service price optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub price: f64,
    pub profit: f64,
    /// Demand was zero over the whole search range; any price is a best
    /// response and `price` is pinned to the lower bound.
    pub flat_demand: bool,
}

/// A candidate equilibrium with its iteration history.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub prices: PriceVector,
    pub profits: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Price vector after each sweep, starting with the initial point.
    pub trace: Vec<PriceVector>,
}

/// Per-service outcome of an epsilon-Nash deviation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationCheck {
    pub service: usize,
    pub incumbent_profit: f64,
    /// Most profitable unilateral deviation found on the grid.
    pub best_deviation_price: f64,
    /// Its profit gain over the incumbent; at most epsilon for a pass.
    pub best_deviation_gain: f64,
}

/// Numerical certificate that no service can gain more than epsilon by a
/// unilateral price move on the scanned grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NashCertificate {
    pub epsilon: f64,
    pub passed: bool,
    pub checks: Vec<DeviationCheck>,
}

fn check_index(scenario: &Scenario, s: usize) -> Result<(), EquilibriumError> {
    if s >= scenario.num_services() {
        return Err(EquilibriumError::BadServiceIndex {
            index: s,
            services: scenario.num_services(),
        });
    }
    Ok(())
}

/// Profit of service `s` at the given prices: `p_s * D_s(p) - C_s`.
pub fn profit(
    s: usize,
    prices: &PriceVector,
    scenario: &Scenario,
) -> Result<f64, EquilibriumError> {
    check_index(scenario, s)?;
    prices.check_matches(scenario)?;
    let demand = demand_analytic(scenario, prices)?;
    Ok(prices.get(s) * demand.demand[s] - scenario.services()[s].fixed_cost())
}

fn revenue(s: usize, prices: &PriceVector, scenario: &Scenario) -> Result<f64, EquilibriumError> {
    let demand = demand_analytic(scenario, prices)?;
    Ok(prices.get(s) * demand.demand[s])
}

fn grid_point(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Price in [cfg.price_lo, cfg.price_hi] maximizing the profit of service
/// `s`, holding the other entries of `prices` fixed.
///
/// The search maximizes revenue `p * D_s`; the fixed cost shifts profit by a
/// constant and can never move the argmax. Grid ties resolve to the lowest
/// price.
pub fn best_response(
    s: usize,
    prices: &PriceVector,
    scenario: &Scenario,
    cfg: &SolverConfig,
) -> Result<BestResponse, EquilibriumError> {
    check_index(scenario, s)?;
    prices.check_matches(scenario)?;
    cfg.validate()?;

    let mut lo = cfg.price_lo;
    let mut hi = cfg.price_hi;
    let mut best_price = lo;
    let mut best_revenue = f64::NEG_INFINITY;
    let mut any_positive = false;

    for _ in 0..=cfg.refine_rounds {
        let mut round_best_price = lo;
        let mut round_best_revenue = f64::NEG_INFINITY;
        for i in 0..cfg.grid_points {
            let p = grid_point(lo, hi, i, cfg.grid_points);
            let r = revenue(s, &prices.with_price(s, p), scenario)?;
            if r > 0.0 {
                any_positive = true;
            }
            if r > round_best_revenue {
                round_best_revenue = r;
                round_best_price = p;
            }
        }
        if round_best_revenue > best_revenue {
            best_revenue = round_best_revenue;
            best_price = round_best_price;
        }
        // Zoom into one grid step either side of the incumbent.
        let step = (hi - lo) / (cfg.grid_points - 1) as f64;
        lo = (best_price - step).max(cfg.price_lo);
        hi = (best_price + step).min(cfg.price_hi);
    }

    let cost = scenario.services()[s].fixed_cost();
    if !any_positive {
        // Revenue is zero everywhere the grid looked: flat payoff.
        return Ok(BestResponse {
            price: cfg.price_lo,
            profit: -cost,
            flat_demand: true,
        });
    }
    Ok(BestResponse {
        price: best_price,
        profit: best_revenue - cost,
        flat_demand: false,
    })
}

/// Iterated best response in service index order from `initial`, stopping
/// when a full sweep moves no price more than the fixed-point tolerance.
///
/// Exceeding `max_iterations` is not an error: the result comes back with
/// `converged = false` and the full trace.
pub fn nash_solve(
    scenario: &Scenario,
    cfg: &SolverConfig,
    initial: &PriceVector,
) -> Result<EquilibriumResult, EquilibriumError> {
    cfg.validate()?;
    initial.check_matches(scenario)?;
    if initial
        .as_slice()
        .iter()
        .any(|p| *p < cfg.price_lo || *p > cfg.price_hi)
    {
        return Err(EquilibriumError::InitialOutOfBounds {
            lo: cfg.price_lo,
            hi: cfg.price_hi,
        });
    }

    let mut prices = initial.clone();
    let mut trace = vec![prices.clone()];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iterations {
        iterations += 1;
        let mut max_move = 0.0f64;
        for s in 0..scenario.num_services() {
            let br = best_response(s, &prices, scenario, cfg)?;
            max_move = max_move.max((br.price - prices.get(s)).abs());
            prices = prices.with_price(s, br.price);
        }
        trace.push(prices.clone());
        if max_move <= cfg.fixed_point_tolerance {
            converged = true;
            break;
        }
    }

    let profits = (0..scenario.num_services())
        .map(|s| profit(s, &prices, scenario))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EquilibriumResult {
        prices,
        profits,
        iterations,
        converged,
        trace,
    })
}

/// Scans `check_grid` unilateral deviations per service over the default
/// price bounds of the scenario and reports the largest profit gain found.
pub fn verify_epsilon_nash(
    prices: &PriceVector,
    scenario: &Scenario,
    epsilon: f64,
    check_grid: usize,
) -> Result<NashCertificate, EquilibriumError> {
    prices.check_matches(scenario)?;
    let bounds = SolverConfig::for_scenario(scenario);
    let (lo, hi) = (bounds.price_lo, bounds.price_hi);
    let n = check_grid.max(2);

    let mut checks = Vec::with_capacity(scenario.num_services());
    for s in 0..scenario.num_services() {
        let incumbent = profit(s, prices, scenario)?;
        let mut best_gain = f64::NEG_INFINITY;
        let mut best_price = lo;
        for i in 0..n {
            let p = grid_point(lo, hi, i, n);
            let gain = profit(s, &prices.with_price(s, p), scenario)? - incumbent;
            if gain > best_gain {
                best_gain = gain;
                best_price = p;
            }
        }
        checks.push(DeviationCheck {
            service: s,
            incumbent_profit: incumbent,
            best_deviation_price: best_price,
            best_deviation_gain: best_gain,
        });
    }
    let passed = checks.iter().all(|c| c.best_deviation_gain <= epsilon);
    Ok(NashCertificate {
        epsilon,
        passed,
        checks,
    })
}

/// Best response of service `s` at each opponent price in `other_price_grid`,
/// for two-service scenarios. The crossing of the two curves brackets the
/// equilibrium.
pub fn best_response_curve(
    s: usize,
    other_price_grid: &[f64],
    scenario: &Scenario,
    cfg: &SolverConfig,
) -> Result<Vec<(f64, f64)>, EquilibriumError> {
    if scenario.num_services() != 2 {
        return Err(EquilibriumError::NotTwoServices {
            services: scenario.num_services(),
        });
    }
    check_index(scenario, s)?;
    let other = 1 - s;
    let mut curve = Vec::with_capacity(other_price_grid.len());
    for &q in other_price_grid {
        let mut prices = PriceVector::new(vec![0.0, 0.0]).map_err(EquilibriumError::Market)?;
        prices = prices.with_price(other, q);
        let br = best_response(s, &prices, scenario, cfg)?;
        curve.push((q, br.price));
    }
    Ok(curve)
}
