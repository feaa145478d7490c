//! Segment the user population of a substitute market by valuation weight.
//!
//! Every user weighs detection benefit `v * P_d` against false alarms and
//! price. With utilities linear in `v`, the population splits into intervals
//! that all make the same choice: abstain, buy from service 1, or buy from
//! service 2. Demand is just the length of each interval under the uniform
//! valuation distribution.
//!
//! Run with: cargo run --example demand_segments

use infomarket::{
    demand_substitute, Choice, MarketMode, PriceVector, Scenario, Service, ValuationDistribution,
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

    for prices in [[0.51, 0.60], [0.51, 0.30], [0.51, 2.0]] {
        let prices = PriceVector::new(prices.to_vec()).unwrap();
        let result = demand_substitute(&scenario, &prices).unwrap();
        println!("prices ({:.2}, {:.2}):", prices.get(0), prices.get(1));
        for seg in &result.segments {
            let label = match seg.choice {
                Choice::None => "no purchase".to_string(),
                Choice::Service(s) => format!("service {}", s + 1),
                Choice::AllServices => "all services".to_string(),
            };
            println!("  v in [{:.4}, {:.4}] -> {label}", seg.lo, seg.hi);
        }
        println!(
            "  demand: service 1 = {:.6}, service 2 = {:.6}\n",
            result.demand[0], result.demand[1]
        );
    }
}
