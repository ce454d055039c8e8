//! Run configuration: defaults, JSON config files and long-flag parsing.
//!
//! Command-line flags override config-file values, which override the
//! experiment defaults. The defaults reproduce the standard measurement
//! setup: n = 32, alpha = 1e-3, a = 0.5, delta = 1e-4, l = 4.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DemoTable1,
    SweepAlpha,
    SweepIterations,
    Lcurve,
    CompareTable2,
    Rate,
    CheckFilters,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::DemoTable1,
        Experiment::SweepAlpha,
        Experiment::SweepIterations,
        Experiment::Lcurve,
        Experiment::CompareTable2,
        Experiment::Rate,
        Experiment::CheckFilters,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::DemoTable1 => "demo-table1",
            Experiment::SweepAlpha => "sweep-alpha",
            Experiment::SweepIterations => "sweep-iterations",
            Experiment::Lcurve => "lcurve",
            Experiment::CompareTable2 => "compare-table2",
            Experiment::Rate => "rate",
            Experiment::CheckFilters => "check-filters",
        }
    }

    pub fn from_name(s: &str) -> Option<Experiment> {
        Experiment::ALL.iter().copied().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Complete description of one experiment run. The JSON config file mirrors
/// these field names exactly; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub problem: String,
    /// Point counts; experiments other than demo-table1 use the first entry.
    pub n: Vec<usize>,
    pub alpha: f64,
    /// Explicit alpha grid / per-delta alpha list, experiment-dependent.
    pub alpha_list: Option<Vec<f64>>,
    pub l: u32,
    pub r: f64,
    pub m: u32,
    pub a: f64,
    pub sigma: f64,
    #[serde(rename = "E")]
    pub e_bound: f64,
    pub delta: f64,
    pub delta_list: Option<Vec<f64>>,
    pub seed: u64,
    pub out: Option<String>,
    pub format: OutputFormat,
    /// Filter family for sweep-alpha / check-filters.
    pub method: String,
    /// Parameter rule for the rate experiment: "apriori" or "order-optimal".
    pub alpha_rule: String,
    /// compare-table2: also minimize over an alpha grid per delta.
    pub optimize_alpha: bool,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> RunConfig {
        let mut config = RunConfig {
            experiment,
            problem: "laplace".into(),
            n: vec![32],
            alpha: 1e-3,
            alpha_list: None,
            l: 4,
            r: 0.8,
            m: 100,
            a: 0.5,
            sigma: 2.0,
            e_bound: 1.0,
            delta: 1e-4,
            delta_list: None,
            seed: 42,
            out: None,
            format: OutputFormat::Csv,
            method: "tikhonov".into(),
            alpha_rule: "order-optimal".into(),
            optimize_alpha: false,
        };
        match experiment {
            Experiment::DemoTable1 => {
                config.problem = "simpson".into();
                config.n = vec![4, 8, 16, 32];
            }
            Experiment::SweepAlpha | Experiment::Lcurve => {
                config.alpha_list = Some(decade_grid(1, 10));
                config.delta_list = Some(vec![1e-1, 1e-2, 1e-3, 1e-4]);
            }
            Experiment::SweepIterations => {}
            Experiment::CompareTable2 => {
                config.l = 2;
                config.delta_list = Some(vec![1e-4, 1e-3, 1e-2, 1e-1]);
                config.alpha_list = Some(vec![1e-0, 9e-1, 1e-3, 1e-3]);
            }
            Experiment::Rate => {
                config.m = 1;
                config.sigma = 2.0;
                config.e_bound = 100.0;
                config.delta_list = Some(vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]);
            }
            Experiment::CheckFilters => {
                config.method = "iterated-fractional-weighted".into();
                config.m = 2;
                config.sigma = 2.0;
                // extends to 1e-12 so the limit check sees a converged filter
                config.alpha_list = Some(decade_grid(1, 12));
            }
        }
        config
    }

    pub fn output_path(&self) -> String {
        match &self.out {
            Some(path) => path.clone(),
            None => {
                let ext = match self.format {
                    OutputFormat::Csv => "csv",
                    OutputFormat::Json => "json",
                };
                format!("{}.{ext}", self.experiment.name())
            }
        }
    }

    /// Range and consistency checks; returns every problem found.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        if self.problem != "laplace" && self.problem != "simpson" {
            errors.push(format!("problem: unknown problem '{}'", self.problem));
        }
        if self.n.is_empty() {
            errors.push("n: need at least one point count".into());
        }
        for &n in &self.n {
            if n < 1 || n > 64 {
                errors.push(format!("n: {n} outside [1, 64]"));
            }
            if self.problem == "simpson" && (n % 2 != 0 || n < 4) {
                errors.push(format!("n: Simpson rule needs even n >= 4, got {n}"));
            }
        }
        if !(self.alpha > 0.0) {
            errors.push(format!("alpha: must be positive, got {}", self.alpha));
        }
        if let Some(list) = &self.alpha_list {
            if list.iter().any(|&v| !(v > 0.0)) {
                errors.push("alpha_list: entries must be positive".into());
            }
        }
        if !(self.r >= 0.5) {
            errors.push(format!("r: must satisfy r >= 1/2, got {}", self.r));
        }
        if self.m < 1 {
            errors.push("m: must be at least 1".into());
        }
        if !(self.a > 0.0) {
            errors.push(format!("a: must be positive, got {}", self.a));
        }
        if !(self.sigma >= 0.0) {
            errors.push(format!("sigma: must be non-negative, got {}", self.sigma));
        }
        if !(self.e_bound > 0.0) {
            errors.push(format!("E: must be positive, got {}", self.e_bound));
        }
        if !(self.delta >= 0.0) {
            errors.push(format!("delta: must be non-negative, got {}", self.delta));
        }
        if let Some(list) = &self.delta_list {
            if list.iter().any(|&v| !(v >= 0.0)) {
                errors.push("delta_list: entries must be non-negative".into());
            }
        }
        if parse_method(&self.method, self).is_none() {
            errors.push(format!("method: unknown filter family '{}'", self.method));
        }
        if self.alpha_rule != "apriori" && self.alpha_rule != "order-optimal" {
            errors.push(format!(
                "alpha_rule: expected 'apriori' or 'order-optimal', got '{}'",
                self.alpha_rule
            ));
        }
        if self.experiment == Experiment::CompareTable2 && !self.optimize_alpha {
            let deltas = self.delta_list.as_deref().map_or(0, |d| d.len());
            let alphas = self.alpha_list.as_deref().map_or(0, |a| a.len());
            if deltas != alphas {
                errors.push(format!(
                    "alpha_list: need one alpha per delta ({alphas} alphas, {deltas} deltas)"
                ));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// `10^-lo ..= 10^-hi` decade grid.
pub fn decade_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|i| 10f64.powi(-i)).collect()
}

/// Builds the filter family selected by `method` with the config's
/// parameters.
pub fn parse_method(name: &str, config: &RunConfig) -> Option<illposed::filters::FilterSpec> {
    use illposed::filters::FilterSpec;
    Some(match name {
        "tikhonov" => FilterSpec::Tikhonov { alpha: config.alpha },
        "landweber" => FilterSpec::Landweber { a: config.a, m: config.m },
        "iterated-tikhonov" => FilterSpec::IteratedTikhonov { alpha: config.alpha, m: config.m },
        "weighted-ii" => FilterSpec::WeightedII { alpha: config.alpha, l: config.l },
        "fractional-tikhonov" => {
            FilterSpec::FractionalTikhonov { alpha: config.alpha, r: config.r }
        }
        "fractional-weighted" => {
            FilterSpec::FractionalWeighted { alpha: config.alpha, l: config.l, r: config.r }
        }
        "iterated-fractional-weighted" => FilterSpec::IteratedFractionalWeighted {
            alpha: config.alpha,
            l: config.l,
            r: config.r,
            m: config.m,
        },
        _ => return None,
    })
}

/// Parses the command line: `<experiment> [--flag value]...`, with
/// `--config <file.json>` merged underneath the flags.
pub fn parse_config(args: &[String]) -> Result<RunConfig, Vec<String>> {
    if args.is_empty() {
        return Err(vec![format!(
            "usage: illposed <experiment> [--flags]; experiments: {}",
            Experiment::ALL.map(|e| e.name()).join(", ")
        )]);
    }
    let experiment = Experiment::from_name(&args[0])
        .ok_or_else(|| vec![format!("experiment: unknown experiment '{}'", args[0])])?;

    // first pass: collect flag/value pairs, reporting malformed flags together
    let mut errors = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut i = 1;
    while i < args.len() {
        let flag = &args[i];
        if !flag.starts_with("--") {
            errors.push(format!("expected a --flag, got '{flag}'"));
            i += 1;
            continue;
        }
        let name = flag.trim_start_matches("--").to_string();
        if i + 1 >= args.len() {
            errors.push(format!("{name}: missing value"));
            break;
        }
        pairs.push((name, args[i + 1].clone()));
        i += 2;
    }

    let mut config = RunConfig::defaults(experiment);
    if let Some((_, path)) = pairs.iter().find(|(name, _)| name == "config") {
        match load_config_file(Path::new(path), experiment) {
            Ok(file_config) => config = file_config,
            Err(e) => errors.push(format!("config: {e}")),
        }
    }

    for (name, value) in &pairs {
        if let Err(e) = apply_flag(&mut config, name, value) {
            errors.push(e);
        }
    }

    if let Err(mut validation) = config.validate() {
        errors.append(&mut validation);
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

/// Reads a JSON config file; missing fields fall back to the experiment
/// defaults, unknown fields are rejected.
fn load_config_file(path: &Path, experiment: Experiment) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    let defaults =
        serde_json::to_value(RunConfig::defaults(experiment)).expect("defaults serialize");
    let overlay: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("invalid JSON: {e}"))?;
    let merged = match (defaults, overlay) {
        (serde_json::Value::Object(mut base), serde_json::Value::Object(over)) => {
            for (k, v) in over {
                base.insert(k, v);
            }
            serde_json::Value::Object(base)
        }
        (_, other) => other,
    };
    serde_json::from_value(merged).map_err(|e| format!("invalid config: {e}"))
}

fn apply_flag(config: &mut RunConfig, name: &str, value: &str) -> Result<(), String> {
    fn num<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, String> {
        value.parse::<T>().map_err(|_| format!("{name}: malformed value '{value}'"))
    }
    fn list<T: std::str::FromStr>(name: &str, value: &str) -> Result<Vec<T>, String> {
        value
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<T>()
                    .map_err(|_| format!("{name}: malformed list entry '{part}'"))
            })
            .collect()
    }
    match name {
        "config" => {} // handled in the merge pass
        "problem" => config.problem = value.to_string(),
        "n" => config.n = list(name, value)?,
        "alpha" => config.alpha = num(name, value)?,
        "alpha-list" => config.alpha_list = Some(list(name, value)?),
        "l" => config.l = num(name, value)?,
        "r" => config.r = num(name, value)?,
        "m" => config.m = num(name, value)?,
        "a" => config.a = num(name, value)?,
        "sigma" => config.sigma = num(name, value)?,
        "E" => config.e_bound = num(name, value)?,
        "delta" => config.delta = num(name, value)?,
        "delta-list" => config.delta_list = Some(list(name, value)?),
        "seed" => config.seed = num(name, value)?,
        "out" => config.out = Some(value.to_string()),
        "format" => {
            config.format = match value {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => return Err(format!("format: expected csv or json, got '{other}'")),
            }
        }
        "method" => config.method = value.to_string(),
        "alpha-rule" => config.alpha_rule = value.to_string(),
        "optimize-alpha" => config.optimize_alpha = num::<bool>(name, value)?,
        other => return Err(format!("unknown flag --{other}")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn defaults_reproduce_measurement_setup() {
        let config = parse_config(&args(&["sweep-iterations"])).unwrap();
        assert_eq!(config.n, vec![32]);
        assert_eq!(config.alpha, 1e-3);
        assert_eq!(config.a, 0.5);
        assert_eq!(config.delta, 1e-4);
        assert_eq!(config.l, 4);
        assert_eq!(config.seed, 42);
    }

    #[test]
    fn table2_default_config() {
        let config = parse_config(&args(&["compare-table2"])).unwrap();
        assert_eq!(config.l, 2);
        assert_eq!(config.m, 100);
        assert_eq!(config.r, 0.8);
        assert_eq!(config.delta_list.as_deref().unwrap().len(), 4);
        assert_eq!(config.alpha_list.as_deref().unwrap(), &[1e-0, 9e-1, 1e-3, 1e-3]);
    }

    #[test]
    fn flags_override_defaults() {
        let config =
            parse_config(&args(&["sweep-alpha", "--delta", "1e-3", "--seed", "7"])).unwrap();
        assert_eq!(config.delta, 1e-3);
        assert_eq!(config.seed, 7);
    }

    #[test]
    fn rejects_r_below_half() {
        let errors = parse_config(&args(&["sweep-alpha", "--r", "0.3"])).unwrap_err();
        assert!(errors.iter().any(|e| e.starts_with("r:")), "{errors:?}");
    }

    #[test]
    fn unknown_flag_rejected() {
        let errors = parse_config(&args(&["sweep-alpha", "--frobnicate", "1"])).unwrap_err();
        assert!(errors.iter().any(|e| e.contains("unknown flag")));
    }

    #[test]
    fn all_problems_reported_at_once() {
        let errors =
            parse_config(&args(&["sweep-alpha", "--r", "0.1", "--alpha", "-1", "--m", "0"]))
                .unwrap_err();
        assert!(errors.len() >= 3, "{errors:?}");
    }

    #[test]
    fn comma_lists_parse() {
        let config = parse_config(&args(&["demo-table1", "--n", "4,8,16,32"])).unwrap();
        assert_eq!(config.n, vec![4, 8, 16, 32]);
    }

    #[test]
    fn config_file_merge_and_flag_precedence() {
        let dir = std::env::temp_dir().join(format!("illposed-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.json");
        std::fs::write(&path, r#"{"seed": 9, "delta": 0.01}"#).unwrap();
        let config = parse_config(&args(&[
            "sweep-alpha",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "11",
        ]))
        .unwrap();
        assert_eq!(config.delta, 0.01); // from file
        assert_eq!(config.seed, 11); // flag wins
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir =
            std::env::temp_dir().join(format!("illposed-config-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"seeed": 9}"#).unwrap();
        let errors =
            parse_config(&args(&["sweep-alpha", "--config", path.to_str().unwrap()])).unwrap_err();
        assert!(errors.iter().any(|e| e.contains("config:")), "{errors:?}");
        std::fs::remove_dir_all(&dir).ok();
    }
}
