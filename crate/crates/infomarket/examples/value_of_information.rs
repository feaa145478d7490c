//! What is a sensor report worth to a decision maker?
//!
//! A user must decide whether to act on a possible event. Acting on a false
//! alarm costs 0.5; missing a real event costs 1; acting on a real event
//! pays 1. A sensor with detection probability 0.8 and false-alarm
//! probability 0.1 shifts the user's belief, and the value of its report is
//! the expected payoff improvement from deciding after seeing it.
//!
//! Run with: cargo run --example value_of_information

use infomarket::{
    expected_voi, information_gain, posterior, select_source, DecisionProblem, ProblemBase, Source,
};

fn main() {
    let problem = DecisionProblem::new(
        vec!["no_event".into(), "event".into()],
        vec!["ignore".into(), "act".into()],
        vec![0.5, 0.5],
        vec![vec![0.0, -0.5], vec![-1.0, 1.0]],
        vec!["negative".into(), "positive".into()],
        vec![vec![0.9, 0.1], vec![0.2, 0.8]],
    )
    .unwrap();

    for y in 0..2 {
        let post = posterior(&problem, y).unwrap();
        println!(
            "after a {} report: P(event) = {:.4}",
            problem.observations()[y],
            post[1]
        );
    }

    let report = expected_voi(&problem);
    println!("\nprior action: {}", problem.actions()[report.prior_action]);
    for (y, a) in report.posterior_actions.iter().enumerate() {
        println!(
            "action after {}: {}",
            problem.observations()[y],
            problem.actions()[*a]
        );
    }
    println!("expected value of the report: {:.4}", report.expected_value);
    println!(
        "gain at acquisition cost 0.01: {:.4}",
        information_gain(&problem, 0.01)
    );

    // Source selection: the same sensor against a perfect but pricey one.
    let base = ProblemBase::new(
        vec!["no_event".into(), "event".into()],
        vec!["ignore".into(), "act".into()],
        vec![0.5, 0.5],
        vec![vec![0.0, -0.5], vec![-1.0, 1.0]],
    )
    .unwrap();
    let sources = [
        Source {
            observations: vec!["negative".into(), "positive".into()],
            channel: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            cost: 0.01,
        },
        Source {
            observations: vec!["negative".into(), "positive".into()],
            channel: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            cost: 0.3,
        },
    ];
    let (idx, gain) = select_source(&base, &sources).unwrap();
    println!(
        "\nbest source: {} (gain {:.4}) - perfect information is not worth 0.3 here",
        idx + 1,
        gain
    );
}
