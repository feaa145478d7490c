//! Line-oriented scenario files.
//!
//! A scenario file is sectioned key-value text. `#` starts a comment and
//! blank lines are ignored. Sections:
//!
//! ```text
//! [market]      mode = substitute | complementary; fusion = or | and
//! [valuation]   kind = uniform (lo, hi) | empirical (samples = v, v, ...)
//! [service]     detection, false_alarm, cost (optional, default 0); repeatable
//! [solver]      optional overrides: price_lo, price_hi, grid_points,
//!               refine_rounds, br_tolerance, fixed_point_tolerance,
//!               max_iterations
//! [voi]         optional decision problem: states, actions, prior, payoff,
//!               and optionally observations, channel, cost (an inline source)
//! [source]      extra information sources: observations, channel, cost;
//!               repeatable, requires [voi]
//! ```
//!
//! Lists are comma separated; matrices separate rows with `;` (payoff rows
//! are states x actions, channel rows are states x observations). Parsing
//! produces a normalized form, available via `Display`, that parses back to
//! the identical value.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::equilibrium::SolverConfig;
use crate::market::{
    FusionRule, MarketError, MarketMode, Scenario, Service, ValuationDistribution,
};
use crate::voi::{ProblemBase, Source, VoiError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ScenarioError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ScenarioError::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<MarketError> for ScenarioError {
    fn from(e: MarketError) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}

impl From<VoiError> for ScenarioError {
    fn from(e: VoiError) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}

/// Optional `[solver]` overrides; unset fields keep scenario defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverOverrides {
    pub price_lo: Option<f64>,
    pub price_hi: Option<f64>,
    pub grid_points: Option<usize>,
    pub refine_rounds: Option<usize>,
    pub br_tolerance: Option<f64>,
    pub fixed_point_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
}

impl SolverOverrides {
    pub fn is_empty(&self) -> bool {
        *self == SolverOverrides::default()
    }

    /// Scenario defaults with these overrides applied.
    pub fn resolve(&self, scenario: &Scenario) -> SolverConfig {
        let mut cfg = SolverConfig::for_scenario(scenario);
        if let Some(v) = self.price_lo {
            cfg.price_lo = v;
        }
        if let Some(v) = self.price_hi {
            cfg.price_hi = v;
        }
        if let Some(v) = self.grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = self.refine_rounds {
            cfg.refine_rounds = v;
        }
        if let Some(v) = self.br_tolerance {
            cfg.br_tolerance = v;
        }
        if let Some(v) = self.fixed_point_tolerance {
            cfg.fixed_point_tolerance = v;
        }
        if let Some(v) = self.max_iterations {
            cfg.max_iterations = v;
        }
        cfg
    }
}

/// The `[voi]` section: a decision problem plus its information sources.
/// The first source is the problem's own channel when one is given inline.
#[derive(Debug, Clone, PartialEq)]
pub struct VoiSection {
    pub base: ProblemBase,
    pub sources: Vec<Source>,
}

/// A parsed scenario file in normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub solver: SolverOverrides,
    pub voi: Option<VoiSection>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile, ScenarioError> {
        Parser::new(text).parse()
    }
}

#[derive(Debug, Default)]
struct RawSection {
    name: String,
    line: usize,
    entries: Vec<(usize, String, String)>,
}

impl RawSection {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(line, _, v)| (*line, v.as_str()))
    }

    fn require(&self, key: &str) -> Result<(usize, &str), ScenarioError> {
        self.get(key).ok_or_else(|| {
            ScenarioError::at(self.line, format!("[{}] is missing key '{key}'", self.name))
        })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ScenarioError> {
        for (line, key, _) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(ScenarioError::at(
                    *line,
                    format!("unknown key '{key}' in [{}]", self.name),
                ));
            }
        }
        Ok(())
    }
}

struct Parser {
    sections: Vec<RawSection>,
    errors: Option<ScenarioError>,
}

fn parse_number<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ScenarioError> {
    value
        .parse()
        .map_err(|_| ScenarioError::at(line, format!("cannot parse '{value}' as {key}")))
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ScenarioError> {
    value
        .split(',')
        .map(|s| parse_number::<f64>(line, key, s.trim()))
        .collect()
}

fn parse_matrix(line: usize, key: &str, value: &str) -> Result<Vec<Vec<f64>>, ScenarioError> {
    value
        .split(';')
        .map(|row| parse_list(line, key, row.trim()))
        .collect()
}

fn parse_labels(value: &str) -> Vec<String> {
    value.split(',').map(|s| s.trim().to_string()).collect()
}

impl Parser {
    fn new(text: &str) -> Parser {
        let mut sections: Vec<RawSection> = Vec::new();
        let mut errors = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                match name.strip_suffix(']') {
                    Some(name) => sections.push(RawSection {
                        name: name.trim().to_string(),
                        line: line_no,
                        entries: Vec::new(),
                    }),
                    None => {
                        errors.get_or_insert(ScenarioError::at(
                            line_no,
                            format!("malformed section header '{line}'"),
                        ));
                    }
                }
            } else if let Some((key, value)) = line.split_once('=') {
                match sections.last_mut() {
                    Some(section) => section.entries.push((
                        line_no,
                        key.trim().to_string(),
                        value.trim().to_string(),
                    )),
                    None => {
                        errors.get_or_insert(ScenarioError::at(
                            line_no,
                            "key-value pair before any section header",
                        ));
                    }
                }
            } else {
                errors.get_or_insert(ScenarioError::at(
                    line_no,
                    format!("expected 'key = value' or '[section]', got '{line}'"),
                ));
            }
        }
        Parser { sections, errors }
    }

    fn single(&self, name: &str) -> Result<Option<&RawSection>, ScenarioError> {
        let mut found = None;
        for s in self.sections.iter().filter(|s| s.name == name) {
            if found.is_some() {
                return Err(ScenarioError::at(
                    s.line,
                    format!("duplicate [{name}] section"),
                ));
            }
            found = Some(s);
        }
        Ok(found)
    }

    fn parse(self) -> Result<ScenarioFile, ScenarioError> {
        if let Some(e) = self.errors {
            return Err(e);
        }
        for s in &self.sections {
            if !["market", "valuation", "service", "solver", "voi", "source"]
                .contains(&s.name.as_str())
            {
                return Err(ScenarioError::at(
                    s.line,
                    format!("unknown section [{}]", s.name),
                ));
            }
        }

        let market = self
            .single("market")?
            .ok_or_else(|| ScenarioError::Invalid("missing [market] section".into()))?;
        market.check_keys(&["mode", "fusion"])?;
        let (mode_line, mode_text) = market.require("mode")?;
        let mode = match mode_text {
            "substitute" => {
                if let Some((line, _)) = market.get("fusion") {
                    return Err(ScenarioError::at(
                        line,
                        "fusion only applies to complementary mode",
                    ));
                }
                MarketMode::Substitute
            }
            "complementary" => {
                let (fusion_line, fusion) = market.require("fusion")?;
                match fusion {
                    "or" => MarketMode::Complementary(FusionRule::Or),
                    "and" => MarketMode::Complementary(FusionRule::And),
                    other => {
                        return Err(ScenarioError::at(
                            fusion_line,
                            format!("fusion must be 'or' or 'and', got '{other}'"),
                        ))
                    }
                }
            }
            other => {
                return Err(ScenarioError::at(
                    mode_line,
                    format!("mode must be 'substitute' or 'complementary', got '{other}'"),
                ))
            }
        };

        let valuation_section = self
            .single("valuation")?
            .ok_or_else(|| ScenarioError::Invalid("missing [valuation] section".into()))?;
        valuation_section.check_keys(&["kind", "lo", "hi", "samples"])?;
        let (kind_line, kind) = valuation_section.require("kind")?;
        let valuation = match kind {
            "uniform" => {
                let (line, lo) = valuation_section.require("lo")?;
                let lo: f64 = parse_number(line, "lo", lo)?;
                let (line, hi) = valuation_section.require("hi")?;
                let hi: f64 = parse_number(line, "hi", hi)?;
                ValuationDistribution::uniform(lo, hi)?
            }
            "empirical" => {
                let (line, samples) = valuation_section.require("samples")?;
                ValuationDistribution::empirical(parse_list(line, "samples", samples)?)?
            }
            other => {
                return Err(ScenarioError::at(
                    kind_line,
                    format!("kind must be 'uniform' or 'empirical', got '{other}'"),
                ))
            }
        };

        let mut services = Vec::new();
        for section in self.sections.iter().filter(|s| s.name == "service") {
            section.check_keys(&["detection", "false_alarm", "cost"])?;
            let (line, d) = section.require("detection")?;
            let d: f64 = parse_number(line, "detection", d)?;
            let (line, f) = section.require("false_alarm")?;
            let f: f64 = parse_number(line, "false_alarm", f)?;
            let cost: f64 = match section.get("cost") {
                Some((line, c)) => parse_number(line, "cost", c)?,
                None => 0.0,
            };
            services.push(Service::new(d, f, cost)?);
        }
        let scenario = Scenario::new(services, mode, valuation)?;

        let mut solver = SolverOverrides::default();
        if let Some(section) = self.single("solver")? {
            section.check_keys(&[
                "price_lo",
                "price_hi",
                "grid_points",
                "refine_rounds",
                "br_tolerance",
                "fixed_point_tolerance",
                "max_iterations",
            ])?;
            for (line, key, value) in &section.entries {
                match key.as_str() {
                    "price_lo" => solver.price_lo = Some(parse_number(*line, key, value)?),
                    "price_hi" => solver.price_hi = Some(parse_number(*line, key, value)?),
                    "grid_points" => solver.grid_points = Some(parse_number(*line, key, value)?),
                    "refine_rounds" => {
                        solver.refine_rounds = Some(parse_number(*line, key, value)?)
                    }
                    "br_tolerance" => solver.br_tolerance = Some(parse_number(*line, key, value)?),
                    "fixed_point_tolerance" => {
                        solver.fixed_point_tolerance = Some(parse_number(*line, key, value)?)
                    }
                    "max_iterations" => {
                        solver.max_iterations = Some(parse_number(*line, key, value)?)
                    }
                    _ => unreachable!("keys checked above"),
                }
            }
        }

        let voi = match self.single("voi")? {
            Some(section) => Some(self.parse_voi(section)?),
            None => {
                if let Some(s) = self.sections.iter().find(|s| s.name == "source") {
                    return Err(ScenarioError::at(
                        s.line,
                        "[source] requires a [voi] section",
                    ));
                }
                None
            }
        };

        Ok(ScenarioFile {
            scenario,
            solver,
            voi,
        })
    }

    fn parse_voi(&self, section: &RawSection) -> Result<VoiSection, ScenarioError> {
        section.check_keys(&[
            "states",
            "actions",
            "prior",
            "payoff",
            "observations",
            "channel",
            "cost",
        ])?;
        let (_, states) = section.require("states")?;
        let states = parse_labels(states);
        let (_, actions) = section.require("actions")?;
        let actions = parse_labels(actions);
        let (line, prior) = section.require("prior")?;
        let prior = parse_list(line, "prior", prior)?;
        let (line, payoff) = section.require("payoff")?;
        let payoff = parse_matrix(line, "payoff", payoff)?;
        let base = ProblemBase::new(states, actions, prior, payoff)?;

        let mut sources = Vec::new();
        if let Some((line, channel)) = section.get("channel") {
            let channel = parse_matrix(line, "channel", channel)?;
            let observations = match section.get("observations") {
                Some((_, o)) => parse_labels(o),
                None => (0..channel.first().map_or(0, Vec::len))
                    .map(|i| format!("y{i}"))
                    .collect(),
            };
            let cost = match section.get("cost") {
                Some((line, c)) => parse_number(line, "cost", c)?,
                None => 0.0,
            };
            sources.push(Source {
                observations,
                channel,
                cost,
            });
        } else if section.get("observations").is_some() || section.get("cost").is_some() {
            return Err(ScenarioError::at(
                section.line,
                "[voi] has observations/cost but no channel",
            ));
        }

        for source_section in self.sections.iter().filter(|s| s.name == "source") {
            source_section.check_keys(&["observations", "channel", "cost"])?;
            let (line, channel) = source_section.require("channel")?;
            let channel = parse_matrix(line, "channel", channel)?;
            let observations = match source_section.get("observations") {
                Some((_, o)) => parse_labels(o),
                None => (0..channel.first().map_or(0, Vec::len))
                    .map(|i| format!("y{i}"))
                    .collect(),
            };
            let cost = match source_section.get("cost") {
                Some((line, c)) => parse_number(line, "cost", c)?,
                None => 0.0,
            };
            sources.push(Source {
                observations,
                channel,
                cost,
            });
        }
        if sources.is_empty() {
            return Err(ScenarioError::at(
                section.line,
                "[voi] needs an inline channel or at least one [source] section",
            ));
        }

        // Validate every source against the base problem now, so errors
        // surface at parse time.
        for source in &sources {
            base.with_channel(source.observations.clone(), source.channel.clone())?;
        }
        Ok(VoiSection { base, sources })
    }
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn fmt_matrix(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| fmt_list(r))
        .collect::<Vec<_>>()
        .join(" ; ")
}

impl fmt::Display for ScenarioFile {
    /// The normalized form: canonical section order and key order, exact
    /// (shortest round-trip) float rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[market]")?;
        match self.scenario.mode() {
            MarketMode::Substitute => writeln!(f, "mode = substitute")?,
            MarketMode::Complementary(rule) => {
                writeln!(f, "mode = complementary")?;
                writeln!(
                    f,
                    "fusion = {}",
                    match rule {
                        FusionRule::Or => "or",
                        FusionRule::And => "and",
                    }
                )?;
            }
        }
        writeln!(f)?;
        writeln!(f, "[valuation]")?;
        match self.scenario.valuation() {
            ValuationDistribution::Uniform { lo, hi } => {
                writeln!(f, "kind = uniform")?;
                writeln!(f, "lo = {lo}")?;
                writeln!(f, "hi = {hi}")?;
            }
            ValuationDistribution::Empirical { samples } => {
                writeln!(f, "kind = empirical")?;
                writeln!(f, "samples = {}", fmt_list(samples))?;
            }
        }
        for service in self.scenario.services() {
            writeln!(f)?;
            writeln!(f, "[service]")?;
            writeln!(f, "detection = {}", service.detection_prob())?;
            writeln!(f, "false_alarm = {}", service.false_alarm_prob())?;
            writeln!(f, "cost = {}", service.fixed_cost())?;
        }
        if !self.solver.is_empty() {
            writeln!(f)?;
            writeln!(f, "[solver]")?;
            if let Some(v) = self.solver.price_lo {
                writeln!(f, "price_lo = {v}")?;
            }
            if let Some(v) = self.solver.price_hi {
                writeln!(f, "price_hi = {v}")?;
            }
            if let Some(v) = self.solver.grid_points {
                writeln!(f, "grid_points = {v}")?;
            }
            if let Some(v) = self.solver.refine_rounds {
                writeln!(f, "refine_rounds = {v}")?;
            }
            if let Some(v) = self.solver.br_tolerance {
                writeln!(f, "br_tolerance = {v}")?;
            }
            if let Some(v) = self.solver.fixed_point_tolerance {
                writeln!(f, "fixed_point_tolerance = {v}")?;
            }
            if let Some(v) = self.solver.max_iterations {
                writeln!(f, "max_iterations = {v}")?;
            }
        }
        if let Some(voi) = &self.voi {
            let problem = voi
                .base
                .with_channel(
                    voi.sources[0].observations.clone(),
                    voi.sources[0].channel.clone(),
                )
                .expect("sources validated at parse time");
            writeln!(f)?;
            writeln!(f, "[voi]")?;
            writeln!(f, "states = {}", problem.states().join(", "))?;
            writeln!(f, "actions = {}", problem.actions().join(", "))?;
            writeln!(f, "prior = {}", fmt_list(problem.prior()))?;
            let payoff: Vec<Vec<f64>> = (0..problem.states().len())
                .map(|x| {
                    (0..problem.actions().len())
                        .map(|a| problem.payoff(x, a))
                        .collect()
                })
                .collect();
            writeln!(f, "payoff = {}", fmt_matrix(&payoff))?;
            writeln!(
                f,
                "observations = {}",
                voi.sources[0].observations.join(", ")
            )?;
            writeln!(f, "channel = {}", fmt_matrix(&voi.sources[0].channel))?;
            writeln!(f, "cost = {}", voi.sources[0].cost)?;
            for source in &voi.sources[1..] {
                writeln!(f)?;
                writeln!(f, "[source]")?;
                writeln!(f, "observations = {}", source.observations.join(", "))?;
                writeln!(f, "channel = {}", fmt_matrix(&source.channel))?;
                writeln!(f, "cost = {}", source.cost)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUOPOLY: &str = "\
# two services selling event reports
[market]
mode = substitute

[valuation]
kind = uniform
lo = 0
hi = 2

[service]
detection = 0.8
false_alarm = 0.1

[service]
detection = 0.9
false_alarm = 0.2
cost = 0.05
";

    #[test]
    fn parses_market_and_services() {
        let file = ScenarioFile::parse(DUOPOLY).unwrap();
        assert_eq!(file.scenario.num_services(), 2);
        assert_eq!(file.scenario.mode(), MarketMode::Substitute);
        assert_eq!(file.scenario.services()[0].fixed_cost(), 0.0);
        assert_eq!(file.scenario.services()[1].fixed_cost(), 0.05);
        assert!(file.solver.is_empty());
        assert!(file.voi.is_none());
    }

    #[test]
    fn parses_complementary_with_fusion_and_solver() {
        let text = "\
[market]
mode = complementary
fusion = and

[valuation]
kind = uniform
lo = 0
hi = 2

[service]
detection = 0.8
false_alarm = 0.1

[solver]
grid_points = 501
max_iterations = 50
";
        let file = ScenarioFile::parse(text).unwrap();
        assert_eq!(
            file.scenario.mode(),
            MarketMode::Complementary(FusionRule::And)
        );
        let cfg = file.solver.resolve(&file.scenario);
        assert_eq!(cfg.grid_points, 501);
        assert_eq!(cfg.max_iterations, 50);
        assert_eq!(cfg.refine_rounds, 3);
    }

    #[test]
    fn parses_voi_with_extra_sources() {
        let text = "\
[market]
mode = substitute

[valuation]
kind = uniform
lo = 0
hi = 2

[service]
detection = 0.8
false_alarm = 0.1

[voi]
states = no_event, event
actions = ignore, act
prior = 0.5, 0.5
payoff = 0, -0.5 ; -1, 1
observations = negative, positive
channel = 0.9, 0.1 ; 0.2, 0.8
cost = 0.01

[source]
channel = 1, 0 ; 0, 1
cost = 0.3
";
        let file = ScenarioFile::parse(text).unwrap();
        let voi = file.voi.unwrap();
        assert_eq!(voi.sources.len(), 2);
        assert_eq!(voi.sources[0].cost, 0.01);
        assert_eq!(voi.sources[1].observations, vec!["y0", "y1"]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "\
[market]
mode = substitute

[valuation]
kind = uniform
lo = zero
hi = 2

[service]
detection = 0.8
false_alarm = 0.1
";
        match ScenarioFile::parse(text) {
            Err(ScenarioError::Parse { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("zero"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        let stray = "detection = 0.8\n";
        assert!(matches!(
            ScenarioFile::parse(stray),
            Err(ScenarioError::Parse { line: 1, .. })
        ));

        let unknown = "[market]\nmode = substitute\nflavor = mild\n";
        assert!(matches!(
            ScenarioFile::parse(unknown),
            Err(ScenarioError::Parse { line: 3, .. })
        ));

        let fusion_on_substitute = "\
[market]
mode = substitute
fusion = or

[valuation]
kind = uniform
lo = 0
hi = 2

[service]
detection = 0.8
false_alarm = 0.1
";
        assert!(matches!(
            ScenarioFile::parse(fusion_on_substitute),
            Err(ScenarioError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn missing_sections_are_rejected() {
        assert!(ScenarioFile::parse("").is_err());
        let no_service = "\
[market]
mode = substitute

[valuation]
kind = uniform
lo = 0
hi = 2
";
        assert!(matches!(
            ScenarioFile::parse(no_service),
            Err(ScenarioError::Invalid(_))
        ));
    }

    #[test]
    fn normalized_form_round_trips() {
        for text in [
            DUOPOLY,
            "\
[market]
mode = complementary
fusion = or

[valuation]
kind = empirical
samples = 0.5, 1, 1.5, 2

[service]
detection = 0.8
false_alarm = 0.1

[solver]
price_hi = 1.5

[voi]
states = a, b
actions = l, r
prior = 0.25, 0.75
payoff = 1, 0 ; 0, 1
channel = 0.6, 0.4 ; 0.3, 0.7
",
        ] {
            let parsed = ScenarioFile::parse(text).unwrap();
            let normalized = parsed.to_string();
            let reparsed = ScenarioFile::parse(&normalized).unwrap();
            assert_eq!(parsed, reparsed);
            assert_eq!(normalized, reparsed.to_string());
        }
    }
}
