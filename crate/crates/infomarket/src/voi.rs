//! Value of information for finite Bayesian decision problems.
//!
//! A [`DecisionProblem`] holds states with a prior, actions with a payoff
//! table, and an observation channel `p(y|x)`. A decision maker without
//! information picks the action maximizing expected payoff under the prior;
//! one who sees observation `y` picks the action maximizing expected payoff
//! under the posterior `p(x|y)`. The pointwise value of an observation at a
//! realized state is `payoff(x, a_y) - payoff(x, a_0)`, which can be positive,
//! zero, or negative; its expectation over the joint law of `(x, y)` is
//! nonnegative and is the price-free worth of the information source.
//!
//! All argmax ties break toward the lowest index, so every quantity here is
//! deterministic.

use thiserror::Error;

/// Tolerance for probability normalization checks.
pub const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoiError {
    #[error("{what} must be nonempty")]
    Empty { what: &'static str },
    #[error("{what} has wrong dimensions: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} must contain finite values, entry {index} is {value}")]
    NonFinite {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{what} must be nonnegative, entry {index} is {value}")]
    Negative {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{what} must sum to 1 within {tolerance}, sums to {sum}")]
    NotNormalized {
        what: &'static str,
        sum: f64,
        tolerance: f64,
    },
    #[error("observation {observation} has zero probability under the prior and channel")]
    ImpossibleObservation { observation: usize },
    #[error("index {index} out of range for {what} of size {size}")]
    BadIndex {
        what: &'static str,
        index: usize,
        size: usize,
    },
}

fn check_distribution(what: &'static str, v: &[f64]) -> Result<(), VoiError> {
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(VoiError::NonFinite {
                what,
                index: i,
                value: x,
            });
        }
        if x < 0.0 {
            return Err(VoiError::Negative {
                what,
                index: i,
                value: x,
            });
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(VoiError::NotNormalized {
            what,
            sum,
            tolerance: PROB_TOLERANCE,
        });
    }
    Ok(())
}

/// States, actions, and prior of a decision problem, without an observation
/// channel. Attach a channel to obtain a full [`DecisionProblem`]; compare
/// channels with [`select_source`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemBase {
    states: Vec<String>,
    actions: Vec<String>,
    prior: Vec<f64>,
    payoff: Vec<Vec<f64>>,
}

impl ProblemBase {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        prior: Vec<f64>,
        payoff: Vec<Vec<f64>>,
    ) -> Result<Self, VoiError> {
        if states.is_empty() {
            return Err(VoiError::Empty { what: "states" });
        }
        if actions.is_empty() {
            return Err(VoiError::Empty { what: "actions" });
        }
        if prior.len() != states.len() {
            return Err(VoiError::Dimension {
                what: "prior",
                expected: states.len(),
                got: prior.len(),
            });
        }
        check_distribution("prior", &prior)?;
        if payoff.len() != states.len() {
            return Err(VoiError::Dimension {
                what: "payoff rows",
                expected: states.len(),
                got: payoff.len(),
            });
        }
        for row in &payoff {
            if row.len() != actions.len() {
                return Err(VoiError::Dimension {
                    what: "payoff columns",
                    expected: actions.len(),
                    got: row.len(),
                });
            }
            for (i, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(VoiError::NonFinite {
                        what: "payoff",
                        index: i,
                        value: x,
                    });
                }
            }
        }
        Ok(ProblemBase {
            states,
            actions,
            prior,
            payoff,
        })
    }

    pub fn with_channel(
        &self,
        observations: Vec<String>,
        channel: Vec<Vec<f64>>,
    ) -> Result<DecisionProblem, VoiError> {
        DecisionProblem::new(
            self.states.clone(),
            self.actions.clone(),
            self.prior.clone(),
            self.payoff.clone(),
            observations,
            channel,
        )
    }
}

/// A finite Bayesian decision problem with an observation channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    base: ProblemBase,
    observations: Vec<String>,
    channel: Vec<Vec<f64>>,
}

impl DecisionProblem {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        prior: Vec<f64>,
        payoff: Vec<Vec<f64>>,
        observations: Vec<String>,
        channel: Vec<Vec<f64>>,
    ) -> Result<Self, VoiError> {
        let base = ProblemBase::new(states, actions, prior, payoff)?;
        if observations.is_empty() {
            return Err(VoiError::Empty {
                what: "observations",
            });
        }
        if channel.len() != base.states.len() {
            return Err(VoiError::Dimension {
                what: "channel rows",
                expected: base.states.len(),
                got: channel.len(),
            });
        }
        for row in &channel {
            if row.len() != observations.len() {
                return Err(VoiError::Dimension {
                    what: "channel columns",
                    expected: observations.len(),
                    got: row.len(),
                });
            }
            check_distribution("channel row", row)?;
        }
        Ok(DecisionProblem {
            base,
            observations,
            channel,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.base.states
    }

    pub fn actions(&self) -> &[String] {
        &self.base.actions
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn prior(&self) -> &[f64] {
        &self.base.prior
    }

    pub fn payoff(&self, x: usize, a: usize) -> f64 {
        self.base.payoff[x][a]
    }

    pub fn channel(&self) -> &[Vec<f64>] {
        &self.channel
    }

    /// Marginal probability of observation `y` under prior and channel.
    pub fn observation_prob(&self, y: usize) -> Result<f64, VoiError> {
        if y >= self.observations.len() {
            return Err(VoiError::BadIndex {
                what: "observations",
                index: y,
                size: self.observations.len(),
            });
        }
        Ok(self
            .base
            .prior
            .iter()
            .zip(&self.channel)
            .map(|(p, row)| p * row[y])
            .sum())
    }
}

/// Posterior distribution over states after observing `y`, by Bayes rule.
pub fn posterior(problem: &DecisionProblem, y: usize) -> Result<Vec<f64>, VoiError> {
    let py = problem.observation_prob(y)?;
    if py == 0.0 {
        return Err(VoiError::ImpossibleObservation { observation: y });
    }
    Ok(problem
        .prior()
        .iter()
        .zip(problem.channel())
        .map(|(p, row)| p * row[y] / py)
        .collect())
}

/// Action maximizing expected payoff under `belief`; ties break to the
/// lowest action index.
pub fn optimal_action(problem: &DecisionProblem, belief: &[f64]) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for a in 0..problem.actions().len() {
        let value: f64 = belief
            .iter()
            .enumerate()
            .map(|(x, b)| b * problem.payoff(x, a))
            .sum();
        if value > best_value {
            best_value = value;
            best = a;
        }
    }
    best
}

/// Payoff improvement at realized state `x` from deciding with observation
/// `y` instead of from the prior alone.
pub fn value_pointwise(problem: &DecisionProblem, x: usize, y: usize) -> Result<f64, VoiError> {
    if x >= problem.states().len() {
        return Err(VoiError::BadIndex {
            what: "states",
            index: x,
            size: problem.states().len(),
        });
    }
    let a0 = optimal_action(problem, problem.prior());
    let ay = optimal_action(problem, &posterior(problem, y)?);
    Ok(problem.payoff(x, ay) - problem.payoff(x, a0))
}

/// Full value-of-information report for a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct VoiReport {
    /// Optimal action under the prior alone.
    pub prior_action: usize,
    /// Optimal action after each observation. Observations with zero
    /// probability keep the prior action.
    pub posterior_actions: Vec<usize>,
    /// Pointwise values, states x observations. Zero-probability
    /// observations contribute zero.
    pub pointwise: Vec<Vec<f64>>,
    /// Expected pointwise value over the joint law of state and observation.
    pub expected_value: f64,
    /// Expected value net of acquisition cost; equals `expected_value` here
    /// and is discounted by [`information_gain`].
    pub gain: f64,
}

/// Expected value of information: the payoff of deciding after the
/// observation minus the payoff of deciding from the prior, averaged over
/// states and observations.
pub fn expected_voi(problem: &DecisionProblem) -> VoiReport {
    let a0 = optimal_action(problem, problem.prior());
    let n_states = problem.states().len();
    let n_obs = problem.observations().len();

    let mut posterior_actions = vec![a0; n_obs];
    let mut pointwise = vec![vec![0.0; n_obs]; n_states];
    let mut expected_value = 0.0;

    for y in 0..n_obs {
        let py = problem
            .observation_prob(y)
            .expect("observation index in range");
        if py == 0.0 {
            continue;
        }
        let post = posterior(problem, y).expect("p(y) > 0");
        let ay = optimal_action(problem, &post);
        posterior_actions[y] = ay;
        let mut conditional = 0.0;
        for x in 0..n_states {
            let v = problem.payoff(x, ay) - problem.payoff(x, a0);
            pointwise[x][y] = v;
            conditional += post[x] * v;
        }
        expected_value += py * conditional;
    }

    VoiReport {
        prior_action: a0,
        posterior_actions,
        pointwise,
        expected_value,
        gain: expected_value,
    }
}

/// Expected value of information minus the cost of acquiring it.
pub fn information_gain(problem: &DecisionProblem, cost: f64) -> f64 {
    expected_voi(problem).expected_value - cost
}

/// An information source: an observation channel and its acquisition cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub observations: Vec<String>,
    pub channel: Vec<Vec<f64>>,
    pub cost: f64,
}

/// Picks the source with the highest information gain for the base problem;
/// ties break to the lowest index. Returns the index and its gain.
pub fn select_source(base: &ProblemBase, sources: &[Source]) -> Result<(usize, f64), VoiError> {
    if sources.is_empty() {
        return Err(VoiError::Empty { what: "sources" });
    }
    let mut best = 0;
    let mut best_gain = f64::NEG_INFINITY;
    for (i, source) in sources.iter().enumerate() {
        let problem = base.with_channel(source.observations.clone(), source.channel.clone())?;
        let gain = information_gain(&problem, source.cost);
        if gain > best_gain {
            best_gain = gain;
            best = i;
        }
    }
    Ok((best, best_gain))
}
