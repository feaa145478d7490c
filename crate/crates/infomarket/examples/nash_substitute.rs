//! Nash equilibrium of two substitute services by iterated best response.
//!
//! From any starting prices, each service in turn re-optimizes against the
//! other's current price. The iteration settles at a fixed point, which an
//! independent deviation scan then certifies as an epsilon-Nash equilibrium.
//!
//! Run with: cargo run --example nash_substitute

use infomarket::{
    nash_solve, verify_epsilon_nash, MarketMode, PriceVector, Scenario, Service, SolverConfig,
    ValuationDistribution,
};

fn main() {
    let scenario = Scenario::new(
        vec![
            Service::new(0.8, 0.1, 0.0).unwrap(),
            Service::new(0.9, 0.2, 0.0).unwrap(),
        ],
        MarketMode::Substitute,
        ValuationDistribution::uniform(0.0, 2.0).unwrap(),
    )
    .unwrap();
    let cfg = SolverConfig::for_scenario(&scenario);

    let initial = PriceVector::new(vec![1.0, 0.2]).unwrap();
    let eq = nash_solve(&scenario, &cfg, &initial).unwrap();

    println!("sweep  p_1        p_2");
    for (i, prices) in eq.trace.iter().enumerate() {
        println!("{i:<6} {:<10.6} {:<10.6}", prices.get(0), prices.get(1));
    }
    println!(
        "\nconverged: {} after {} sweeps",
        eq.converged, eq.iterations
    );
    println!(
        "equilibrium prices: ({:.6}, {:.6}), profits: ({:.6}, {:.6})",
        eq.prices.get(0),
        eq.prices.get(1),
        eq.profits[0],
        eq.profits[1]
    );

    let cert = verify_epsilon_nash(&eq.prices, &scenario, 1e-4, 10_000).unwrap();
    println!(
        "\nepsilon-Nash certificate (epsilon = {:.0e}):",
        cert.epsilon
    );
    for check in &cert.checks {
        println!(
            "  service {}: best unilateral deviation gains {:+.3e} at price {:.6}",
            check.service + 1,
            check.best_deviation_gain,
            check.best_deviation_price
        );
    }
    println!("certified: {}", cert.passed);
}
