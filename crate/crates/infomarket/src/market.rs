//! Domain types for markets of binary event-detection services.
//!
//! A [`Service`] sells a binary report ("event" / "no event") characterized by
//! its detection probability and false-alarm probability. A [`Scenario`]
//! collects the competing services, the market mode (substitute goods, where a
//! user buys from at most one service, or complementary goods, where a user
//! buys from all services and fuses their reports), and the distribution of
//! the valuation weight `v` across the user population.
//!
//! A user with weight `v` values a report with detection probability `d` and
//! false-alarm probability `f` sold at price `p` at `v*d - f - p`.

use thiserror::Error;

/// Errors raised while constructing or combining market types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("{field} must be a probability in [0, 1], got {value}")]
    InvalidProbability { field: &'static str, value: f64 },
    #[error("{field} must be finite and nonnegative, got {value}")]
    InvalidAmount { field: &'static str, value: f64 },
    #[error("fusion requires at least one service")]
    EmptyFusion,
    #[error("a scenario requires at least one service")]
    NoServices,
    #[error("uniform valuation bounds must satisfy 0 <= lo < hi, got [{lo}, {hi}]")]
    InvalidSupport { lo: f64, hi: f64 },
    #[error("empirical valuation requires at least one nonnegative finite sample")]
    InvalidSamples,
    #[error("operation requires {expected} mode but scenario is {actual}")]
    WrongMode {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("price vector has {got} entries but the scenario has {expected} services")]
    PriceLength { expected: usize, got: usize },
}

/// One seller of sensing information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Service {
    detection_prob: f64,
    false_alarm_prob: f64,
    fixed_cost: f64,
}

impl Service {
    /// Builds a service, rejecting NaN/infinite fields and out-of-range
    /// probabilities.
    pub fn new(
        detection_prob: f64,
        false_alarm_prob: f64,
        fixed_cost: f64,
    ) -> Result<Self, MarketError> {
        if !detection_prob.is_finite() || !(0.0..=1.0).contains(&detection_prob) {
            return Err(MarketError::InvalidProbability {
                field: "detection_prob",
                value: detection_prob,
            });
        }
        if !false_alarm_prob.is_finite() || !(0.0..=1.0).contains(&false_alarm_prob) {
            return Err(MarketError::InvalidProbability {
                field: "false_alarm_prob",
                value: false_alarm_prob,
            });
        }
        if !fixed_cost.is_finite() || fixed_cost < 0.0 {
            return Err(MarketError::InvalidAmount {
                field: "fixed_cost",
                value: fixed_cost,
            });
        }
        Ok(Service {
            detection_prob,
            false_alarm_prob,
            fixed_cost,
        })
    }

    pub fn detection_prob(&self) -> f64 {
        self.detection_prob
    }

    pub fn false_alarm_prob(&self) -> f64 {
        self.false_alarm_prob
    }

    pub fn fixed_cost(&self) -> f64 {
        self.fixed_cost
    }
}

/// How reports from multiple services are combined into one decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionRule {
    /// Any positive report implies "event".
    Or,
    /// All reports must be positive to imply "event".
    And,
}

/// Distribution of the valuation weight `v` over the user population.
#[derive(Debug, Clone, PartialEq)]
pub enum ValuationDistribution {
    Uniform { lo: f64, hi: f64 },
    Empirical { samples: Vec<f64> },
}

impl ValuationDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, MarketError> {
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || lo >= hi {
            return Err(MarketError::InvalidSupport { lo, hi });
        }
        Ok(ValuationDistribution::Uniform { lo, hi })
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self, MarketError> {
        if samples.is_empty() || samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(MarketError::InvalidSamples);
        }
        Ok(ValuationDistribution::Empirical { samples })
    }

    /// Largest valuation any user can hold; beyond `v_max * P_d` no price
    /// can attract demand.
    pub fn v_max(&self) -> f64 {
        match self {
            ValuationDistribution::Uniform { hi, .. } => *hi,
            ValuationDistribution::Empirical { samples } => {
                samples.iter().copied().fold(0.0, f64::max)
            }
        }
    }
}

/// Whether users treat the services as substitutes or complements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarketMode {
    /// Each user buys from at most one service, the utility-maximizing one.
    Substitute,
    /// Each user buys from all services or none; reports are fused.
    Complementary(FusionRule),
}

impl MarketMode {
    pub fn name(&self) -> &'static str {
        match self {
            MarketMode::Substitute => "substitute",
            MarketMode::Complementary(_) => "complementary",
        }
    }
}

/// A market: services, mode, and the population's valuation distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    services: Vec<Service>,
    mode: MarketMode,
    valuation: ValuationDistribution,
}

impl Scenario {
    pub fn new(
        services: Vec<Service>,
        mode: MarketMode,
        valuation: ValuationDistribution,
    ) -> Result<Self, MarketError> {
        if services.is_empty() {
            return Err(MarketError::NoServices);
        }
        Ok(Scenario {
            services,
            mode,
            valuation,
        })
    }

    pub fn services(&self) -> &[Service] {
        &self.services
    }

    pub fn num_services(&self) -> usize {
        self.services.len()
    }

    pub fn mode(&self) -> MarketMode {
        self.mode
    }

    pub fn valuation(&self) -> &ValuationDistribution {
        &self.valuation
    }

    /// Fused detection probability of the full service set, for
    /// complementary scenarios.
    pub fn fused_detection(&self) -> Result<f64, MarketError> {
        match self.mode {
            MarketMode::Complementary(rule) => fused_detection(&self.services, rule),
            MarketMode::Substitute => Err(MarketError::WrongMode {
                expected: "complementary",
                actual: "substitute",
            }),
        }
    }

    /// Fused false-alarm probability of the full service set, for
    /// complementary scenarios.
    pub fn fused_false_alarm(&self) -> Result<f64, MarketError> {
        match self.mode {
            MarketMode::Complementary(rule) => fused_false_alarm(&self.services, rule),
            MarketMode::Substitute => Err(MarketError::WrongMode {
                expected: "complementary",
                actual: "substitute",
            }),
        }
    }
}

/// Prices of all services, in service order.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector {
    prices: Vec<f64>,
}

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self, MarketError> {
        if let Some(p) = prices.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(MarketError::InvalidAmount {
                field: "price",
                value: *p,
            });
        }
        Ok(PriceVector { prices })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn get(&self, s: usize) -> f64 {
        self.prices[s]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.prices
    }

    pub fn total(&self) -> f64 {
        self.prices.iter().sum()
    }

    /// Copy with the price of service `s` replaced.
    pub fn with_price(&self, s: usize, price: f64) -> PriceVector {
        let mut prices = self.prices.clone();
        prices[s] = price;
        PriceVector { prices }
    }

    /// Errors unless the vector has one price per service of `scenario`.
    pub fn check_matches(&self, scenario: &Scenario) -> Result<(), MarketError> {
        if self.prices.len() != scenario.num_services() {
            return Err(MarketError::PriceLength {
                expected: scenario.num_services(),
                got: self.prices.len(),
            });
        }
        Ok(())
    }
}

/// Detection probability of a fused report, assuming independent errors
/// across services: OR gives `1 - prod(1 - P_d)`, AND gives `prod(P_d)`.
pub fn fused_detection(services: &[Service], rule: FusionRule) -> Result<f64, MarketError> {
    fuse(services, rule, Service::detection_prob)
}

/// False-alarm probability of a fused report under the same independence
/// assumption as [`fused_detection`].
pub fn fused_false_alarm(services: &[Service], rule: FusionRule) -> Result<f64, MarketError> {
    fuse(services, rule, Service::false_alarm_prob)
}

fn fuse(
    services: &[Service],
    rule: FusionRule,
    prob: impl Fn(&Service) -> f64,
) -> Result<f64, MarketError> {
    if services.is_empty() {
        return Err(MarketError::EmptyFusion);
    }
    let fused = match rule {
        FusionRule::Or => 1.0 - services.iter().map(|s| 1.0 - prob(s)).product::<f64>(),
        FusionRule::And => services.iter().map(&prob).product(),
    };
    Ok(fused.clamp(0.0, 1.0))
}

/// Utility of a user with weight `v` buying from a single service at `price`:
/// `v * P_d - P_f - price`.
pub fn utility_substitute(v: f64, service: &Service, price: f64) -> f64 {
    v * service.detection_prob() - service.false_alarm_prob() - price
}

/// Utility of a user with weight `v` buying from every service of a
/// complementary scenario: `v * P_d(S) - P_f(S) - sum of prices`.
pub fn utility_complementary(
    v: f64,
    scenario: &Scenario,
    prices: &PriceVector,
) -> Result<f64, MarketError> {
    prices.check_matches(scenario)?;
    let d = scenario.fused_detection()?;
    let f = scenario.fused_false_alarm()?;
    Ok(v * d - f - prices.total())
}
