//! Experiment dispatch: builds the problem, runs the requested experiment,
//! writes the output file and produces the one-line summary.

use crate::config::{parse_method, Experiment, OutputFormat, RunConfig};
use illposed::experiments::{
    alpha_sweep, argmin_by_error, comparison_rows_to_csv, comparison_table,
    comparison_table_optimized, iteration_sweep, lcurve_data, naive_rows_to_csv, naive_solve_demo,
    rate_estimate, sweep_records_to_csv, synthetic_diagonal_operator, AlphaRule, ComparisonConfig,
    ComparisonRow, NaiveSolveRow, RateConfig, SweepRecord,
};
use illposed::filters::{check_filter_conditions, check_order_conditions, make_mu_grid, FilterSpec};
use illposed::problems::{laplace_problem, simpson_problem, DiscreteProblem};
use std::fmt;

#[derive(Debug)]
pub enum RunError {
    Numerical(String),
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            RunError::Io(msg) => write!(f, "io failure: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

pub struct RunOutcome {
    pub summary: String,
    pub path: String,
}

fn numerical<E: fmt::Display>(e: E) -> RunError {
    RunError::Numerical(e.to_string())
}

fn build_problem(config: &RunConfig, n: usize) -> Result<DiscreteProblem, RunError> {
    match config.problem.as_str() {
        "laplace" => laplace_problem(n).map_err(numerical),
        "simpson" => simpson_problem(n).map_err(numerical),
        other => Err(RunError::Numerical(format!("unknown problem '{other}'"))),
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Runs the configured experiment and writes its output file.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let (body, summary) = match config.experiment {
        Experiment::DemoTable1 => run_demo_table1(config)?,
        Experiment::SweepAlpha => run_sweep_alpha(config)?,
        Experiment::SweepIterations => run_sweep_iterations(config)?,
        Experiment::Lcurve => run_lcurve(config)?,
        Experiment::CompareTable2 => run_compare_table2(config)?,
        Experiment::Rate => run_rate(config)?,
        Experiment::CheckFilters => run_check_filters(config)?,
    };
    let path = config.output_path();
    std::fs::write(&path, body).map_err(|e| RunError::Io(format!("writing {path}: {e}")))?;
    Ok(RunOutcome { summary, path })
}

/// Comment header carried by every output file.
fn header_comments(config: &RunConfig, extra: &[String]) -> String {
    let mut out = format!("# seed={}\n# experiment={}\n", config.seed, config.experiment);
    for line in extra {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn json_document(
    config: &RunConfig,
    extra: &[(&str, serde_json::Value)],
    rows: serde_json::Value,
) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("seed".into(), config.seed.into());
    doc.insert("experiment".into(), config.experiment.name().into());
    for (key, value) in extra {
        doc.insert((*key).into(), value.clone());
    }
    doc.insert("rows".into(), rows);
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))
        .expect("json document serialization");
    text.push('\n');
    text
}

fn sweep_body(config: &RunConfig, records: &[SweepRecord], extra: &[String]) -> String {
    match config.format {
        OutputFormat::Csv => {
            format!("{}{}", header_comments(config, extra), sweep_records_to_csv(records))
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "param": r.parameter,
                        "error": r.error,
                        "residual_norm": r.residual_norm,
                        "solution_norm": r.solution_norm,
                        "method": r.method,
                    })
                })
                .collect();
            let notes: Vec<(&str, serde_json::Value)> =
                extra.iter().map(|s| ("note", serde_json::Value::from(s.clone()))).collect();
            json_document(config, &notes, serde_json::Value::Array(rows))
        }
    }
}

fn run_demo_table1(config: &RunConfig) -> Result<(String, String), RunError> {
    let rows = naive_solve_demo(&config.n).map_err(numerical)?;
    let worst = rows
        .iter()
        .max_by(|a, b| a.max_error.partial_cmp(&b.max_error).unwrap())
        .expect("non-empty rows");
    let summary = format!(
        "max nodal error {:.4e} at n={}; condition at largest n {:.3e}",
        worst.max_error,
        worst.n,
        rows.last().unwrap().condition
    );
    let body = match config.format {
        OutputFormat::Csv => {
            format!("{}{}", header_comments(config, &[]), naive_rows_to_csv(&rows))
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = rows.iter().map(naive_row_json).collect();
            json_document(config, &[], serde_json::Value::Array(rows))
        }
    };
    Ok((body, summary))
}

fn naive_row_json(row: &NaiveSolveRow) -> serde_json::Value {
    serde_json::json!({
        "n": row.n,
        "mark_errors": row
            .mark_errors
            .iter()
            .map(|(t, e)| serde_json::json!({"t": t, "error": e}))
            .collect::<Vec<_>>(),
        "max_error": row.max_error,
        "condition": row.condition,
    })
}

fn run_sweep_alpha(config: &RunConfig) -> Result<(String, String), RunError> {
    let problem = build_problem(config, config.n[0])?;
    let family = parse_method(&config.method, config)
        .ok_or_else(|| RunError::Numerical(format!("unknown method '{}'", config.method)))?;
    let grid = config.alpha_list.clone().unwrap_or_else(|| crate::config::decade_grid(1, 10));
    let records =
        alpha_sweep(&problem, &family, &grid, config.delta, config.seed).map_err(numerical)?;
    let best = argmin_by_error(&records);
    let summary = format!(
        "min error {:.6e} at alpha={:.3e}",
        records[best].error, records[best].parameter
    );
    Ok((sweep_body(config, &records, &[]), summary))
}

fn run_sweep_iterations(config: &RunConfig) -> Result<(String, String), RunError> {
    let problem = build_problem(config, config.n[0])?;
    let specs = vec![
        FilterSpec::IteratedTikhonov { alpha: config.alpha, m: 1 },
        FilterSpec::Landweber { a: config.a, m: 1 },
        FilterSpec::IteratedFractionalWeighted {
            alpha: config.alpha,
            l: config.l,
            r: config.r,
            m: 1,
        },
    ];
    let trajectories = iteration_sweep(&problem, &specs, config.m, config.delta, config.seed)
        .map_err(numerical)?;
    let mut extra = Vec::new();
    let mut flat = Vec::new();
    let mut best: Option<(f64, f64, String)> = None;
    for trajectory in &trajectories {
        if trajectory.step_rescaled {
            extra.push(format!(
                "landweber step rescaled to satisfy a*mu1^2 < 2: {}",
                trajectory.method
            ));
        }
        let idx = argmin_by_error(&trajectory.records);
        let record = &trajectory.records[idx];
        if best.as_ref().map_or(true, |(e, _, _)| record.error < *e) {
            best = Some((record.error, record.parameter, trajectory.method.clone()));
        }
        flat.extend(trajectory.records.iter().cloned());
    }
    let (err, at_m, method) = best.expect("at least one trajectory");
    let summary = format!("min error {err:.6e} at m={at_m} ({method})");
    Ok((sweep_body(config, &flat, &extra), summary))
}

fn run_lcurve(config: &RunConfig) -> Result<(String, String), RunError> {
    let problem = build_problem(config, config.n[0])?;
    let grid = config.alpha_list.clone().unwrap_or_else(|| crate::config::decade_grid(1, 10));
    let deltas = config.delta_list.clone().unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3, 1e-4]);
    let series = lcurve_data(&problem, &grid, &deltas, config.seed).map_err(numerical)?;
    // flatten with the noise level folded into the method tag
    let mut flat = Vec::new();
    for s in &series {
        for r in &s.records {
            let mut tagged = r.clone();
            tagged.method = format!("{};delta={:e}", r.method, s.delta);
            flat.push(tagged);
        }
    }
    let best = argmin_by_error(&flat);
    let summary = format!(
        "min error {:.6e} at alpha={:.3e} ({})",
        flat[best].error, flat[best].parameter, flat[best].method
    );
    Ok((sweep_body(config, &flat, &[]), summary))
}

fn comparison_body(config: &RunConfig, rows: &[ComparisonRow], extra: &[String]) -> String {
    match config.format {
        OutputFormat::Csv => {
            format!("{}{}", header_comments(config, extra), comparison_rows_to_csv(rows))
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "delta": r.delta,
                        "err_iterated_tikhonov": r.err_iterated_tikhonov,
                        "err_landweber": r.err_landweber,
                        "err_fractional_weighted": r.err_fractional_weighted,
                    })
                })
                .collect();
            let notes: Vec<(&str, serde_json::Value)> =
                extra.iter().map(|s| ("note", serde_json::Value::from(s.clone()))).collect();
            json_document(config, &notes, serde_json::Value::Array(rows))
        }
    }
}

fn run_compare_table2(config: &RunConfig) -> Result<(String, String), RunError> {
    let problem = build_problem(config, config.n[0])?;
    let deltas = config.delta_list.clone().unwrap_or_else(|| vec![1e-4, 1e-3, 1e-2, 1e-1]);
    let alphas = config.alpha_list.clone().unwrap_or_else(|| vec![1e-0, 9e-1, 1e-3, 1e-3]);
    let table_config = ComparisonConfig {
        l: config.l,
        r: config.r,
        m: config.m,
        step: config.a,
        alphas,
        seed: config.seed,
    };
    let (rows, extra) = if config.optimize_alpha {
        let grid: Vec<f64> = (-10..=4).map(|k| 10f64.powf(k as f64 * 0.5)).collect();
        let rows = comparison_table_optimized(&problem, &deltas, &grid, &table_config)
            .map_err(numerical)?;
        (rows, vec!["alpha minimized per delta over 1e-5..1e2".to_string()])
    } else {
        let rows = comparison_table(&problem, &deltas, &table_config).map_err(numerical)?;
        (rows, Vec::new())
    };
    let best = rows
        .iter()
        .min_by(|a, b| a.err_fractional_weighted.partial_cmp(&b.err_fractional_weighted).unwrap())
        .expect("non-empty table");
    let summary = format!(
        "min fractional-weighted error {:.6e} at delta={:.1e}",
        best.err_fractional_weighted, best.delta
    );
    Ok((comparison_body(config, &rows, &extra), summary))
}

fn run_rate(config: &RunConfig) -> Result<(String, String), RunError> {
    let operator = synthetic_diagonal_operator(config.n[0].max(2), 1e-4);
    let family = parse_method(&config.method, config)
        .ok_or_else(|| RunError::Numerical(format!("unknown method '{}'", config.method)))?;
    let rate_config = RateConfig {
        family,
        m: config.m,
        sigma: config.sigma,
        bound: config.e_bound,
        delta_list: config
            .delta_list
            .clone()
            .unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]),
        seeds: (0..10).map(|i| config.seed.wrapping_add(i)).collect(),
        alpha_rule: if config.alpha_rule == "apriori" {
            AlphaRule::Apriori
        } else {
            AlphaRule::OrderOptimal
        },
    };
    let estimate = rate_estimate(&operator, &rate_config).map_err(numerical)?;
    let records: Vec<SweepRecord> = estimate
        .median_errors
        .iter()
        .map(|&(delta, error)| SweepRecord {
            parameter: delta,
            error,
            residual_norm: 0.0,
            solution_norm: 0.0,
            method: format!(
                "rate-median({};m={};sigma={})",
                config.method, config.m, config.sigma
            ),
        })
        .collect();
    let extra = vec![
        format!("slope={}", fmt_float(estimate.slope)),
        format!(
            "alphas={}",
            estimate.alphas.iter().map(|a| fmt_float(*a)).collect::<Vec<_>>().join(";")
        ),
        format!("alpha_rule={}", config.alpha_rule),
    ];
    let summary =
        format!("fitted slope {:.4} over {} noise levels", estimate.slope, records.len());
    Ok((sweep_body(config, &records, &extra), summary))
}

fn run_check_filters(config: &RunConfig) -> Result<(String, String), RunError> {
    let spec = parse_method(&config.method, config)
        .ok_or_else(|| RunError::Numerical(format!("unknown method '{}'", config.method)))?;
    let alpha_grid = config.alpha_list.clone().unwrap_or_else(|| crate::config::decade_grid(1, 8));
    let mu_grid = make_mu_grid(1.0, 200, &alpha_grid);
    let filter_report =
        check_filter_conditions(&spec, &mu_grid, &alpha_grid).map_err(numerical)?;
    let sigma = if config.sigma > 0.0 { config.sigma } else { 2.0 };
    let order_report =
        check_order_conditions(&spec, sigma, &mu_grid, &alpha_grid).map_err(numerical)?;
    let summary = format!(
        "q_bound={:.6} gamma_fit={:.4} limit_check={} qualification_sup={:.3e}",
        filter_report.q_bound,
        order_report.gamma_fit,
        filter_report.limit_check,
        order_report.qualification_sup
    );
    let body = match config.format {
        OutputFormat::Csv => {
            let extra = vec![
                format!("method={spec}"),
                format!("sigma={sigma}"),
                format!("q_bound={}", fmt_float(filter_report.q_bound)),
                format!("c_alpha={}", fmt_float(filter_report.c_alpha)),
                format!("limit_check={}", filter_report.limit_check),
                format!("gamma_fit={}", fmt_float(order_report.gamma_fit)),
                format!("qualification_sup={}", fmt_float(order_report.qualification_sup)),
            ];
            let mut csv = String::from("alpha,c_alpha,qualification_sup\n");
            for ((c, q), &alpha) in filter_report
                .c_alpha_curve
                .iter()
                .zip(&order_report.qualification_curve)
                .zip(&alpha_grid)
            {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_float(alpha),
                    fmt_float(*c),
                    fmt_float(*q)
                ));
            }
            format!("{}{}", header_comments(config, &extra), csv)
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = alpha_grid
                .iter()
                .zip(filter_report.c_alpha_curve.iter().zip(&order_report.qualification_curve))
                .map(|(&alpha, (c, q))| {
                    serde_json::json!({"alpha": alpha, "c_alpha": c, "qualification_sup": q})
                })
                .collect();
            json_document(
                config,
                &[
                    ("method", spec.to_string().into()),
                    ("sigma", sigma.into()),
                    ("q_bound", filter_report.q_bound.into()),
                    ("limit_check", filter_report.limit_check.into()),
                    ("gamma_fit", order_report.gamma_fit.into()),
                    ("qualification_sup", order_report.qualification_sup.into()),
                ],
                serde_json::Value::Array(rows),
            )
        }
    };
    Ok((body, summary))
}
