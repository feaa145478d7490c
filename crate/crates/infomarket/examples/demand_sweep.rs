//! Demand response to a rival's price in a substitute duopoly.
//!
//! Holding service 1 at a low, medium, or high price, sweep the price of
//! service 2. Its demand curve has three regimes: a shallow decline while
//! only the participation margin moves, a steep decline once users start
//! switching to service 1, and zero once it is priced out.
//!
//! Run with: cargo run --example demand_sweep

use infomarket::{
    demand_substitute, MarketMode, PriceVector, Scenario, Service, ValuationDistribution,
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

    let steps = 11;
    println!("p_2      | D_2 at p_1=0.11 | D_2 at p_1=0.51 | D_2 at p_1=0.91");
    println!("---------+-----------------+-----------------+----------------");
    for i in 0..steps {
        let p2 = 2.0 * i as f64 / (steps - 1) as f64;
        let mut row = format!("{p2:<8.2} |");
        for p1 in [0.11, 0.51, 0.91] {
            let prices = PriceVector::new(vec![p1, p2]).unwrap();
            let d = demand_substitute(&scenario, &prices).unwrap();
            row.push_str(&format!(" {:<15.6} |", d.demand[1]));
        }
        println!("{}", row.trim_end_matches(" |"));
    }
    println!("\nFor CSV output at plotting resolution use the CLI:");
    println!("  infomarket demand-sweep --scenario <file> --service 2 --fixed 0.51 \\");
    println!("      --sweep-lo 0 --sweep-hi 2 --steps 201");
}
