//! How the market mode and fusion rule move equilibrium prices.
//!
//! The same two services are sold as substitutes, as complements fused with
//! OR, and as complements fused with AND. Complementary selling softens
//! competition, so equilibrium prices and profits rise; OR fusion adds more
//! detection value than AND, so it supports the highest prices.
//!
//! Run with: cargo run --example fusion_comparison

use infomarket::{
    nash_solve, FusionRule, MarketMode, PriceVector, Scenario, Service, SolverConfig,
    ValuationDistribution,
};

fn main() {
    let services = vec![
        Service::new(0.8, 0.1, 0.0).unwrap(),
        Service::new(0.9, 0.2, 0.0).unwrap(),
    ];
    let valuation = ValuationDistribution::uniform(0.0, 2.0).unwrap();

    println!("mode                 p_1*      p_2*      F_1*      F_2*");
    for (name, mode) in [
        ("substitute", MarketMode::Substitute),
        (
            "complementary AND",
            MarketMode::Complementary(FusionRule::And),
        ),
        (
            "complementary OR",
            MarketMode::Complementary(FusionRule::Or),
        ),
    ] {
        let scenario = Scenario::new(services.clone(), mode, valuation.clone()).unwrap();
        let cfg = SolverConfig::for_scenario(&scenario);
        let initial = PriceVector::new(vec![0.5, 0.5]).unwrap();
        let eq = nash_solve(&scenario, &cfg, &initial).unwrap();
        assert!(eq.converged);
        println!(
            "{name:<20} {:<9.6} {:<9.6} {:<9.6} {:<9.6}",
            eq.prices.get(0),
            eq.prices.get(1),
            eq.profits[0],
            eq.profits[1]
        );
    }

    let or = Scenario::new(
        services.clone(),
        MarketMode::Complementary(FusionRule::Or),
        valuation.clone(),
    )
    .unwrap();
    let and = Scenario::new(
        services,
        MarketMode::Complementary(FusionRule::And),
        valuation,
    )
    .unwrap();
    println!(
        "\nfused (P_d, P_f): OR = ({:.2}, {:.2}), AND = ({:.2}, {:.2})",
        or.fused_detection().unwrap(),
        or.fused_false_alarm().unwrap(),
        and.fused_detection().unwrap(),
        and.fused_false_alarm().unwrap()
    );
}
