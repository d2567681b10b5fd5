use anyhow::Context;
use ecd_core::majorization::DeltaSample;
use ecd_core::{schur_scan, Grid, ParamVector, SchurReport, SchurVerdict};
use serde::Serialize;

use crate::config::{set, OutputFormat, ParamsConfig, RunConfig};
use crate::render::{num, Table};
use crate::{Report, ScanArgs};

const DEFAULT_MIN: f64 = 0.05;
const DEFAULT_MAX: f64 = 3.0;
const DEFAULT_COUNT: usize = 200;

#[derive(Serialize)]
struct ScanOutput<'a> {
    config: &'a RunConfig,
    report: &'a SchurReport,
}

pub fn run(cfg: &mut RunConfig, args: ScanArgs) -> anyhow::Result<Report> {
    set(&mut cfg.target, args.target);
    set(&mut cfg.vector, args.vector);
    if args.alpha.is_some() || args.beta.is_some() || args.lambda.is_some() {
        let p = cfg.params.get_or_insert_with(ParamsConfig::default);
        set(&mut p.alpha, args.alpha);
        set(&mut p.beta, args.beta);
        set(&mut p.lambda, args.lambda);
    }
    args.grid.apply(cfg);

    let target = cfg.target.context("missing --target")?;
    let point = ParamVector::new(cfg.vector.clone().context("missing --vector")?)?;
    let fixed = cfg.params.clone().unwrap_or_default().resolve_or_unit()?;
    let grid = match cfg.grid.as_ref().map(|g| g.resolve()).transpose()?.flatten() {
        Some(g) => g,
        None => Grid::linear(DEFAULT_MIN, DEFAULT_MAX, DEFAULT_COUNT)?,
    };
    let report = schur_scan(target, &fixed, &point, &grid)?;

    let text = match cfg.format() {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&ScanOutput {
                config: cfg,
                report: &report,
            })? + "\n"
        }
        OutputFormat::Csv => table(&report).csv(),
        OutputFormat::Table => table(&report).text(),
    };
    Ok(Report::ok(text))
}

fn verdict_label(v: SchurVerdict) -> &'static str {
    match v {
        SchurVerdict::SchurConvex => "SchurConvex",
        SchurVerdict::SchurConcave => "SchurConcave",
        SchurVerdict::Constant => "Constant",
        SchurVerdict::Indeterminate => "Indeterminate",
    }
}

fn sample(s: &Option<DeltaSample>) -> String {
    match s {
        Some(d) => format!(
            "pair ({}; {}) x={} delta={} scaled={} tol={}",
            d.i,
            d.j,
            num(d.x),
            num(d.delta),
            num(d.scaled_delta),
            num(d.tolerance)
        ),
        None => "-".into(),
    }
}

fn table(r: &SchurReport) -> Table {
    let mut t = Table::new(["field", "value"]);
    let rows = [
        ("verdict", verdict_label(r.verdict).to_string()),
        ("pairs_evaluated", r.pairs_evaluated.to_string()),
        ("ties_skipped", r.ties_skipped.to_string()),
        ("worst_violation", sample(&r.worst_violation)),
        ("max_delta", sample(&r.max_delta)),
        ("min_delta", sample(&r.min_delta)),
        ("note", r.note.clone().unwrap_or_else(|| "-".into())),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v]);
    }
    t
}
