//! Helpers shared by the integration test suites.

#![allow(dead_code)]

use infomarket::{MarketMode, Scenario, Service, ValuationDistribution};

/// The reference experiment: services (0.8, 0.1) and (0.9, 0.2) with zero
/// costs, uniform valuation weights on [0, 2].
pub fn duopoly(mode: MarketMode) -> Scenario {
    Scenario::new(
        vec![
            Service::new(0.8, 0.1, 0.0).unwrap(),
            Service::new(0.9, 0.2, 0.0).unwrap(),
        ],
        mode,
        ValuationDistribution::uniform(0.0, 2.0).unwrap(),
    )
    .unwrap()
}

/// Slopes of the maximal constant-slope runs of a sampled piecewise-linear
/// function. Consecutive finite differences are grouped when they agree
/// within `tol`; single-cell runs are transition cells straddling a kink
/// and are dropped. The number of interior slope changes is
/// `slope_runs(..).len() - 1`.
pub fn slope_runs(xs: &[f64], ys: &[f64], tol: f64) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    let diffs: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    let mut runs: Vec<(f64, usize)> = Vec::new();
    for &d in &diffs {
        match runs.last_mut() {
            Some((slope, len)) if (d - *slope).abs() <= tol => *len += 1,
            _ => runs.push((d, 1)),
        }
    }
    runs.into_iter()
        .filter(|(_, len)| *len >= 2)
        .map(|(slope, _)| slope)
        .collect()
}

/// Path of a scenario fixture file.
pub fn scenario_path(name: &str) -> String {
    format!("{}/tests/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Path of a golden output file.
pub fn golden_path(name: &str) -> String {
    format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Runs the CLI binary, returning (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_infomarket"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("no signal"),
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    )
}

/// Parses a numeric CSV produced by the CLI into (header, columns).
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let mut columns = vec![Vec::new(); header.len()];
    for line in lines {
        for (i, cell) in line.split(',').enumerate() {
            columns[i].push(cell.parse::<f64>().expect("numeric cell"));
        }
    }
    (header, columns)
}
