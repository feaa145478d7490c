//! Per-service demand as a fraction of the user population.
//!
//! Under a uniform valuation distribution the demand has a closed form. Each
//! user's utility is linear in the weight `v`, so the support splits into
//! maximal intervals on which the purchase choice is constant. The breakpoints
//! can only be participation thresholds `(P_f + p) / P_d` (where one service's
//! utility crosses zero) or pairwise indifference points (where two services'
//! utilities cross). [`segment_substitute`] collects these candidates, sorts
//! them, and evaluates the exact choice rule at each interval midpoint, which
//! is exact for utilities linear in `v`.
//!
//! [`demand_monte_carlo`] applies the same per-user choice rule to sampled
//! valuations. It is the independent check for the analytic path and the only
//! path for empirical valuation distributions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::market::{
    utility_substitute, MarketError, MarketMode, PriceVector, Scenario, ValuationDistribution,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DemandError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("analytic demand requires a uniform valuation distribution; use demand_monte_carlo")]
    NonUniformValuation,
}

/// What the users in a valuation interval buy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// No service yields positive utility.
    None,
    /// The single utility-maximizing service (0-based index).
    Service(usize),
    /// The full bundle, in complementary mode.
    AllServices,
}

/// A maximal valuation interval with a constant purchase choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub choice: Choice,
}

/// Demand of every service plus the segmentation that produced it.
///
/// `segments` is empty for Monte Carlo estimates, which do not build one.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandResult {
    pub demand: Vec<f64>,
    pub segments: Vec<Segment>,
}

/// The purchase a single user with weight `v` makes in a substitute market:
/// the utility-maximizing service if its utility is strictly positive, ties
/// broken toward the lowest index.
pub fn choose_substitute(scenario: &Scenario, prices: &PriceVector, v: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (s, service) in scenario.services().iter().enumerate() {
        let u = utility_substitute(v, service, prices.get(s));
        if u > 0.0 && best.is_none_or(|(_, b)| u > b) {
            best = Some((s, u));
        }
    }
    best.map(|(s, _)| s)
}

/// Whether a user with weight `v` buys the bundle in a complementary market.
pub fn buys_complementary(
    scenario: &Scenario,
    prices: &PriceVector,
    v: f64,
) -> Result<bool, MarketError> {
    Ok(crate::market::utility_complementary(v, scenario, prices)? > 0.0)
}

fn uniform_support(scenario: &Scenario) -> Result<(f64, f64), DemandError> {
    match scenario.valuation() {
        ValuationDistribution::Uniform { lo, hi } => Ok((*lo, *hi)),
        ValuationDistribution::Empirical { .. } => Err(DemandError::NonUniformValuation),
    }
}

fn require_mode(scenario: &Scenario, substitute: bool) -> Result<(), DemandError> {
    match (scenario.mode(), substitute) {
        (MarketMode::Substitute, true) | (MarketMode::Complementary(_), false) => Ok(()),
        (MarketMode::Substitute, false) => Err(MarketError::WrongMode {
            expected: "complementary",
            actual: "substitute",
        }
        .into()),
        (MarketMode::Complementary(_), true) => Err(MarketError::WrongMode {
            expected: "substitute",
            actual: "complementary",
        }
        .into()),
    }
}

/// Partitions the valuation support into maximal intervals of constant
/// choice for a substitute market with uniform valuations.
pub fn segment_substitute(
    scenario: &Scenario,
    prices: &PriceVector,
) -> Result<Vec<Segment>, DemandError> {
    require_mode(scenario, true)?;
    prices.check_matches(scenario)?;
    let (lo, hi) = uniform_support(scenario)?;

    let services = scenario.services();
    let mut cuts = vec![lo, hi];
    for (s, service) in services.iter().enumerate() {
        if service.detection_prob() > 0.0 {
            let t = (service.false_alarm_prob() + prices.get(s)) / service.detection_prob();
            if t > lo && t < hi {
                cuts.push(t);
            }
        }
    }
    for i in 0..services.len() {
        for j in i + 1..services.len() {
            let dd = services[j].detection_prob() - services[i].detection_prob();
            if dd != 0.0 {
                let cross = (services[j].false_alarm_prob() - services[i].false_alarm_prob()
                    + prices.get(j)
                    - prices.get(i))
                    / dd;
                if cross > lo && cross < hi {
                    cuts.push(cross);
                }
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("cuts are finite"));
    cuts.dedup();

    let mut segments: Vec<Segment> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let choice = match choose_substitute(scenario, prices, 0.5 * (a + b)) {
            Some(s) => Choice::Service(s),
            None => Choice::None,
        };
        match segments.last_mut() {
            Some(last) if last.choice == choice => last.hi = b,
            _ => segments.push(Segment {
                lo: a,
                hi: b,
                choice,
            }),
        }
    }
    Ok(segments)
}

/// Demand of each service in a substitute market with uniform valuations:
/// the probability mass of the valuation segments that choose it.
pub fn demand_substitute(
    scenario: &Scenario,
    prices: &PriceVector,
) -> Result<DemandResult, DemandError> {
    let segments = segment_substitute(scenario, prices)?;
    let (lo, hi) = uniform_support(scenario)?;
    let width = hi - lo;
    let mut demand = vec![0.0; scenario.num_services()];
    for seg in &segments {
        if let Choice::Service(s) = seg.choice {
            demand[s] += (seg.hi - seg.lo) / width;
        }
    }
    Ok(DemandResult { demand, segments })
}

/// Demand in a complementary market with uniform valuations. Every service
/// sees the same demand: the mass of users whose bundle utility is positive,
/// i.e. those above the threshold `(P_f(S) + sum of prices) / P_d(S)`.
pub fn demand_complementary(
    scenario: &Scenario,
    prices: &PriceVector,
) -> Result<DemandResult, DemandError> {
    require_mode(scenario, false)?;
    prices.check_matches(scenario)?;
    let (lo, hi) = uniform_support(scenario)?;

    let d = scenario.fused_detection()?;
    let f = scenario.fused_false_alarm()?;
    // With P_d(S) = 0 the threshold is +inf and nobody buys; avoid the division.
    let cut = if d > 0.0 {
        ((f + prices.total()) / d).clamp(lo, hi)
    } else {
        hi
    };

    let mut segments = Vec::new();
    if cut > lo {
        segments.push(Segment {
            lo,
            hi: cut,
            choice: Choice::None,
        });
    }
    if cut < hi {
        segments.push(Segment {
            lo: cut,
            hi,
            choice: Choice::AllServices,
        });
    }
    let share = ((hi - cut) / (hi - lo)).clamp(0.0, 1.0);
    Ok(DemandResult {
        demand: vec![share; scenario.num_services()],
        segments,
    })
}

/// Analytic demand for whichever mode the scenario is in.
pub fn demand_analytic(
    scenario: &Scenario,
    prices: &PriceVector,
) -> Result<DemandResult, DemandError> {
    match scenario.mode() {
        MarketMode::Substitute => demand_substitute(scenario, prices),
        MarketMode::Complementary(_) => demand_complementary(scenario, prices),
    }
}

/// Estimates demand by applying the exact per-user choice rule to
/// `n_samples` seeded valuation draws. Identical inputs and seed give a
/// bit-identical result. Works for any valuation distribution and both modes.
pub fn demand_monte_carlo(
    scenario: &Scenario,
    prices: &PriceVector,
    n_samples: usize,
    seed: u64,
) -> Result<DemandResult, DemandError> {
    assert!(n_samples >= 1, "demand_monte_carlo requires n_samples >= 1");
    prices.check_matches(scenario)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| match scenario.valuation() {
        ValuationDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        ValuationDistribution::Empirical { samples } => samples[rng.random_range(0..samples.len())],
    };

    let demand = match scenario.mode() {
        MarketMode::Substitute => {
            let mut counts = vec![0u64; scenario.num_services()];
            for _ in 0..n_samples {
                if let Some(s) = choose_substitute(scenario, prices, draw(&mut rng)) {
                    counts[s] += 1;
                }
            }
            counts
                .into_iter()
                .map(|c| c as f64 / n_samples as f64)
                .collect()
        }
        MarketMode::Complementary(_) => {
            let d = scenario.fused_detection()?;
            let f = scenario.fused_false_alarm()?;
            let total = prices.total();
            let mut count = 0u64;
            for _ in 0..n_samples {
                if draw(&mut rng) * d - f - total > 0.0 {
                    count += 1;
                }
            }
            // Every service sees the same buyers.
            vec![count as f64 / n_samples as f64; scenario.num_services()]
        }
    };
    Ok(DemandResult {
        demand,
        segments: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{FusionRule, Service};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn svc(d: f64, f: f64) -> Service {
        Service::new(d, f, 0.0).unwrap()
    }

    fn duopoly(mode: MarketMode) -> Scenario {
        Scenario::new(
            vec![svc(0.8, 0.1), svc(0.9, 0.2)],
            mode,
            ValuationDistribution::uniform(0.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    fn prices(p: &[f64]) -> PriceVector {
        PriceVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn monopoly_segmentation_has_participation_threshold() {
        let scenario = Scenario::new(
            vec![svc(0.8, 0.1)],
            MarketMode::Substitute,
            ValuationDistribution::uniform(0.0, 2.0).unwrap(),
        )
        .unwrap();
        let segs = segment_substitute(&scenario, &prices(&[0.51])).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].choice, Choice::None);
        assert_abs_diff_eq!(segs[0].hi, 0.7625, epsilon = 1e-12);
        assert_eq!(segs[1].choice, Choice::Service(0));
        assert_eq!(segs[1].hi, 2.0);
    }

    #[test]
    fn duopoly_segmentation_has_indifference_point() {
        let scenario = duopoly(MarketMode::Substitute);
        let segs = segment_substitute(&scenario, &prices(&[0.51, 0.60])).unwrap();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].choice, Choice::None);
        assert_abs_diff_eq!(segs[0].hi, 0.7625, epsilon = 1e-12);
        assert_eq!(segs[1].choice, Choice::Service(0));
        // Indifference at v = 1 + 10 (p_2 - p_1).
        assert_abs_diff_eq!(segs[1].hi, 1.9, epsilon = 1e-12);
        assert_eq!(segs[2].choice, Choice::Service(1));
    }

    #[test]
    fn overpriced_service_gets_no_segment() {
        let scenario = duopoly(MarketMode::Substitute);
        let segs = segment_substitute(&scenario, &prices(&[0.51, 2.0])).unwrap();
        assert!(segs.iter().all(|s| s.choice != Choice::Service(1)));
        let d = demand_substitute(&scenario, &prices(&[0.51, 2.0])).unwrap();
        assert_eq!(d.demand[1], 0.0);
        assert!(d.demand[0] > 0.0);
    }

    #[test]
    fn segmentation_rejects_wrong_mode_and_valuation() {
        let compl = duopoly(MarketMode::Complementary(FusionRule::Or));
        assert!(matches!(
            segment_substitute(&compl, &prices(&[0.1, 0.1])),
            Err(DemandError::Market(MarketError::WrongMode { .. }))
        ));
        let empirical = Scenario::new(
            vec![svc(0.8, 0.1)],
            MarketMode::Substitute,
            ValuationDistribution::empirical(vec![1.0, 2.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            segment_substitute(&empirical, &prices(&[0.5])),
            Err(DemandError::NonUniformValuation)
        );
    }

    #[test]
    fn duopoly_demand_values() {
        let scenario = duopoly(MarketMode::Substitute);
        let d = demand_substitute(&scenario, &prices(&[0.51, 0.60])).unwrap();
        assert_abs_diff_eq!(d.demand[0], 0.56875, epsilon = 1e-12);
        assert_abs_diff_eq!(d.demand[1], 0.05, epsilon = 1e-12);
    }

    #[test]
    fn free_prices_split_at_equal_utility_point() {
        // At zero prices the utilities cross at v = 1; service 0 takes
        // [0.125, 1], service 1 takes [1, 2].
        let scenario = duopoly(MarketMode::Substitute);
        let d = demand_substitute(&scenario, &prices(&[0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(d.demand[0], 0.4375, epsilon = 1e-12);
        assert_abs_diff_eq!(d.demand[1], 0.5, epsilon = 1e-12);
        let mc = demand_monte_carlo(&scenario, &prices(&[0.0, 0.0]), 200_000, 3).unwrap();
        assert_abs_diff_eq!(mc.demand[0], 0.4375, epsilon = 5e-3);
        assert_abs_diff_eq!(mc.demand[1], 0.5, epsilon = 5e-3);
    }

    #[test]
    fn price_above_max_willingness_kills_demand() {
        let scenario = Scenario::new(
            vec![svc(0.8, 0.1)],
            MarketMode::Substitute,
            ValuationDistribution::uniform(0.0, 2.0).unwrap(),
        )
        .unwrap();
        let d = demand_substitute(&scenario, &prices(&[1.6])).unwrap();
        assert_eq!(d.demand[0], 0.0);
    }

    #[test]
    fn zero_detection_service_sells_nothing() {
        let scenario = Scenario::new(
            vec![svc(0.0, 0.0), svc(0.9, 0.2)],
            MarketMode::Substitute,
            ValuationDistribution::uniform(0.0, 2.0).unwrap(),
        )
        .unwrap();
        let d = demand_substitute(&scenario, &prices(&[0.01, 0.3])).unwrap();
        assert_eq!(d.demand[0], 0.0);
        assert!(d.demand[1] > 0.0);
    }

    #[test]
    fn equal_detection_services_split_by_effective_price() {
        // Same P_d: no indifference point; the lower P_f + p service takes
        // the whole participating mass.
        let scenario = Scenario::new(
            vec![svc(0.8, 0.1), svc(0.8, 0.05)],
            MarketMode::Substitute,
            ValuationDistribution::uniform(0.0, 2.0).unwrap(),
        )
        .unwrap();
        let d = demand_substitute(&scenario, &prices(&[0.2, 0.2])).unwrap();
        assert_eq!(d.demand[0], 0.0);
        assert!(d.demand[1] > 0.0);

        // Exact tie goes to the lowest index.
        let tied = Scenario::new(
            vec![svc(0.8, 0.1), svc(0.8, 0.1)],
            MarketMode::Substitute,
            ValuationDistribution::uniform(0.0, 2.0).unwrap(),
        )
        .unwrap();
        let d = demand_substitute(&tied, &prices(&[0.2, 0.2])).unwrap();
        assert!(d.demand[0] > 0.0);
        assert_eq!(d.demand[1], 0.0);
    }

    #[test]
    fn complementary_demand_values() {
        let or = duopoly(MarketMode::Complementary(FusionRule::Or));
        let d = demand_complementary(&or, &prices(&[0.3, 0.3])).unwrap();
        // Threshold 0.88/0.98, demand (2 - 44/49)/2 = 27/49.
        assert_abs_diff_eq!(d.demand[0], 27.0 / 49.0, epsilon = 1e-12);
        assert_eq!(d.demand[0], d.demand[1]);

        let and = duopoly(MarketMode::Complementary(FusionRule::And));
        let d = demand_complementary(&and, &prices(&[0.1, 0.1])).unwrap();
        assert_abs_diff_eq!(d.demand[0], 61.0 / 72.0, epsilon = 1e-12);
        assert_eq!(d.demand[0], d.demand[1]);
    }

    #[test]
    fn complementary_demand_zero_when_prices_exhaust_support() {
        let or = duopoly(MarketMode::Complementary(FusionRule::Or));
        // Sum of prices >= v_max * P_d(S) - P_f(S) = 1.68 puts the
        // threshold at or beyond the support.
        let d = demand_complementary(&or, &prices(&[0.9, 0.78])).unwrap();
        assert_eq!(d.demand, vec![0.0, 0.0]);
        assert_eq!(d.segments.len(), 1);
        assert_eq!(d.segments[0].choice, Choice::None);
    }

    #[test]
    fn complementary_rejects_substitute_scenario() {
        let sub = duopoly(MarketMode::Substitute);
        assert!(matches!(
            demand_complementary(&sub, &prices(&[0.1, 0.1])),
            Err(DemandError::Market(MarketError::WrongMode { .. }))
        ));
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let scenario = duopoly(MarketMode::Substitute);
        let p = prices(&[0.51, 0.60]);
        let a = demand_monte_carlo(&scenario, &p, 10_000, 7).unwrap();
        let b = demand_monte_carlo(&scenario, &p, 10_000, 7).unwrap();
        assert_eq!(a, b);
        let c = demand_monte_carlo(&scenario, &p, 10_000, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn monte_carlo_matches_analytic_duopoly() {
        let scenario = duopoly(MarketMode::Substitute);
        let p = prices(&[0.51, 0.60]);
        let mc = demand_monte_carlo(&scenario, &p, 1_000_000, 42).unwrap();
        assert_abs_diff_eq!(mc.demand[0], 0.56875, epsilon = 3e-3);
        assert_abs_diff_eq!(mc.demand[1], 0.05, epsilon = 3e-3);
    }

    #[test]
    fn monte_carlo_zero_valuations_buy_nothing() {
        let scenario = Scenario::new(
            vec![svc(0.8, 0.1)],
            MarketMode::Substitute,
            ValuationDistribution::empirical(vec![0.0, 0.0, 0.0]).unwrap(),
        )
        .unwrap();
        let d = demand_monte_carlo(&scenario, &prices(&[0.2]), 1000, 1).unwrap();
        assert_eq!(d.demand[0], 0.0);
    }

    fn assert_partition(segments: &[Segment], lo: f64, hi: f64) {
        assert!(!segments.is_empty());
        assert_eq!(segments[0].lo, lo);
        assert_eq!(segments.last().unwrap().hi, hi);
        for w in segments.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
            assert_ne!(w[0].choice, w[1].choice);
        }
        for s in segments {
            assert!(s.lo <= s.hi);
        }
    }

    proptest! {
        #[test]
        fn segmentation_partitions_support_and_rebuilds_demand(
            params in proptest::collection::vec((0.05f64..1.0, 0.0f64..0.5, 0.0f64..1.5), 1..5),
        ) {
            let services: Vec<Service> = params.iter().map(|(d, f, _)| svc(*d, *f)).collect();
            let p = PriceVector::new(params.iter().map(|(_, _, p)| *p).collect()).unwrap();
            let scenario = Scenario::new(
                services,
                MarketMode::Substitute,
                ValuationDistribution::uniform(0.0, 2.0).unwrap(),
            )
            .unwrap();

            let result = demand_substitute(&scenario, &p).unwrap();
            assert_partition(&result.segments, 0.0, 2.0);

            // Pointwise oracle: the segment choice matches the per-user rule
            // on a dense valuation grid, away from segment boundaries.
            for i in 0..1000 {
                let v = 2.0 * (i as f64 + 0.5) / 1000.0;
                let seg = result
                    .segments
                    .iter()
                    .find(|s| s.lo <= v && v < s.hi)
                    .expect("segments cover the support");
                if (v - seg.lo).min(seg.hi - v) < 1e-9 {
                    continue;
                }
                let expected = match choose_substitute(&scenario, &p, v) {
                    Some(s) => Choice::Service(s),
                    None => Choice::None,
                };
                prop_assert_eq!(seg.choice, expected, "mismatch at v = {}", v);
            }

            // Reassembling demand from segment masses reproduces it exactly.
            let mut rebuilt = vec![0.0; scenario.num_services()];
            for seg in &result.segments {
                if let Choice::Service(s) = seg.choice {
                    rebuilt[s] += (seg.hi - seg.lo) / 2.0;
                }
            }
            prop_assert_eq!(rebuilt, result.demand.clone());

            let total: f64 = result.demand.iter().sum();
            prop_assert!(total <= 1.0 + 1e-12);
            prop_assert!(result.demand.iter().all(|d| (0.0..=1.0).contains(d)));
        }

        #[test]
        fn substitute_own_price_decreases_and_cross_price_increases_demand(
            base in 0.0f64..1.0,
            bump in 0.01f64..0.5,
            other in 0.0f64..1.0,
        ) {
            let scenario = duopoly(MarketMode::Substitute);
            let before = demand_substitute(&scenario, &prices(&[base, other])).unwrap();
            let after = demand_substitute(&scenario, &prices(&[base + bump, other])).unwrap();
            prop_assert!(after.demand[0] <= before.demand[0] + 1e-12);
            prop_assert!(after.demand[1] >= before.demand[1] - 1e-12);
        }

        #[test]
        fn complementary_demand_decreases_in_any_price(
            p1 in 0.0f64..1.0,
            p2 in 0.0f64..1.0,
            bump in 0.01f64..0.5,
            rule in prop_oneof![Just(FusionRule::Or), Just(FusionRule::And)],
        ) {
            let scenario = duopoly(MarketMode::Complementary(rule));
            let before = demand_complementary(&scenario, &prices(&[p1, p2])).unwrap();
            let after = demand_complementary(&scenario, &prices(&[p1 + bump, p2])).unwrap();
            prop_assert!(after.demand[0] <= before.demand[0] + 1e-12);
            prop_assert!(after.demand[1] <= before.demand[1] + 1e-12);
        }

        #[test]
        fn monte_carlo_tracks_analytic(
            p1 in 0.0f64..1.2,
            p2 in 0.0f64..1.2,
            substitute in proptest::bool::ANY,
            seed in 0u64..1000,
        ) {
            let mode = if substitute {
                MarketMode::Substitute
            } else {
                MarketMode::Complementary(FusionRule::Or)
            };
            let scenario = duopoly(mode);
            let p = prices(&[p1, p2]);
            let exact = demand_analytic(&scenario, &p).unwrap();
            let mc = demand_monte_carlo(&scenario, &p, 100_000, seed).unwrap();
            for (e, m) in exact.demand.iter().zip(&mc.demand) {
                prop_assert!((e - m).abs() < 0.01);
            }
        }
    }
}
