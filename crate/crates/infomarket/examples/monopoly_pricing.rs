//! Optimal price of a single service facing uniform valuations.
//!
//! With one service of detection probability 0.8 and false-alarm
//! probability 0.1 on uniform [0, 2] valuations, demand is
//! 1 - (0.1 + p) / 1.6 and profit p * D(p) peaks at p = 0.75.
//!
//! Run with: cargo run --example monopoly_pricing

use infomarket::{
    best_response, profit, MarketMode, PriceVector, Scenario, Service, SolverConfig,
    ValuationDistribution,
};

fn main() {
    let scenario = Scenario::new(
        vec![Service::new(0.8, 0.1, 0.0).unwrap()],
        MarketMode::Substitute,
        ValuationDistribution::uniform(0.0, 2.0).unwrap(),
    )
    .unwrap();
    let cfg = SolverConfig::for_scenario(&scenario);

    println!("price    profit");
    for i in 0..=16 {
        let p = 1.6 * i as f64 / 16.0;
        let f = profit(0, &PriceVector::new(vec![p]).unwrap(), &scenario).unwrap();
        println!("{p:<8.2} {f:.6}");
    }

    let br = best_response(0, &PriceVector::new(vec![0.0]).unwrap(), &scenario, &cfg).unwrap();
    println!(
        "\nbest response: price {:.6}, profit {:.7}",
        br.price, br.profit
    );
    println!("analytic optimum: price 0.75, profit 0.3515625");
}
