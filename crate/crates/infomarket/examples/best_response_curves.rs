//! Best-response curves of a duopoly and their crossing.
//!
//! Each curve maps an opponent price to the profit-maximizing reply. The
//! point where the two curves cross is the Nash equilibrium; tabulating both
//! curves makes the fixed point visible.
//!
//! Run with: cargo run --example best_response_curves

use infomarket::{
    best_response_curve, nash_solve, MarketMode, PriceVector, Scenario, Service, SolverConfig,
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

    let grid: Vec<f64> = (0..=12).map(|i| 0.3 * i as f64 / 12.0).collect();
    let br1 = best_response_curve(0, &grid, &scenario, &cfg).unwrap();
    let br2 = best_response_curve(1, &grid, &scenario, &cfg).unwrap();

    println!("opponent price   BR of service 1   BR of service 2");
    for ((q, b1), (_, b2)) in br1.iter().zip(&br2) {
        println!("{q:<16.4} {b1:<17.6} {b2:<17.6}");
    }

    let eq = nash_solve(&scenario, &cfg, &PriceVector::new(vec![0.1, 0.1]).unwrap()).unwrap();
    println!(
        "\ncurves cross at the equilibrium ({:.6}, {:.6})",
        eq.prices.get(0),
        eq.prices.get(1)
    );
}
