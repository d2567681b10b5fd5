use anyhow::Context;
use ecd_core::montecarlo::{
    compare_sf, empirical_st_check, sample_system, SfComparison, MIN_ST_SAMPLES, SECOND_SYSTEM_SALT,
};
use ecd_core::{default_grid, Direction, Grid, OrderingVerdict, SystemSpec};
use serde::Serialize;

use crate::config::{set, OutputFormat, RunConfig};
use crate::order::witness;
use crate::render::{num, Table};
use crate::{McArgs, Report, EXIT_NEITHER, EXIT_OK};

pub const DEFAULT_SAMPLES: usize = 100_000;
/// Rows of the default grid: evenly spaced picks from the quantile grid.
const DEFAULT_ROWS: usize = 10;

#[derive(Debug, Serialize)]
struct SystemComparison {
    label: char,
    within_band: usize,
    points: usize,
    rows: Vec<SfComparison>,
}

#[derive(Serialize)]
struct McOutput<'a> {
    config: &'a RunConfig,
    systems: &'a [SystemComparison],
    #[serde(skip_serializing_if = "Option::is_none")]
    st: Option<&'a OrderingVerdict>,
    warnings: &'a [String],
}

pub fn run(cfg: &mut RunConfig, args: McArgs) -> anyhow::Result<Report> {
    args.systems.apply(cfg);
    args.grid.apply(cfg);
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.seed, args.seed);

    let seed = cfg.seed.context("mc-verify needs --seed")?;
    let n = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    cfg.samples = Some(n);
    let a = cfg.system_a.as_ref().context("missing system A")?.resolve('A')?;
    let b = cfg.system_b.as_ref().map(|s| s.resolve('B')).transpose()?;
    let grid = match cfg.grid.as_ref().map(|g| g.resolve()).transpose()?.flatten() {
        Some(g) => g,
        None => thin(&default_grid(&a, b.as_ref().unwrap_or(&a))?)?,
    };

    let mut warnings = vec![];
    if n < MIN_ST_SAMPLES {
        warnings.push(format!(
            "n = {n} is below {MIN_ST_SAMPLES}; bands are wide and the empirical order check is skipped"
        ));
    }
    let mut systems = vec![compare('A', &a, &grid, n, seed)?];
    if let Some(b) = &b {
        systems.push(compare('B', b, &grid, n, seed ^ SECOND_SYSTEM_SALT)?);
    }
    let st = match &b {
        Some(b) if n >= MIN_ST_SAMPLES => Some(empirical_st_check(&a, b, &grid, n, seed)?),
        _ => None,
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let exit = match &st {
        Some(v) if v.direction == Direction::Neither => EXIT_NEITHER,
        _ => EXIT_OK,
    };
    let text = match cfg.format() {
        OutputFormat::Json => {
            let out = McOutput {
                config: cfg,
                systems: &systems,
                st: st.as_ref(),
                warnings: &warnings,
            };
            serde_json::to_string_pretty(&out)? + "\n"
        }
        OutputFormat::Csv => table(&systems).csv(),
        OutputFormat::Table => {
            let mut s = table(&systems).text();
            for c in &systems {
                s.push_str(&format!(
                    "system {}: {}/{} points within 3 sigma ({:.1}%)\n",
                    c.label,
                    c.within_band,
                    c.points,
                    100.0 * c.within_band as f64 / c.points as f64
                ));
            }
            if let Some(v) = &st {
                s.push_str(&st_summary(v));
            }
            s
        }
    };
    Ok(Report { text, exit })
}

fn thin(g: &Grid) -> anyhow::Result<Grid> {
    let p = g.points();
    let picks = (0..DEFAULT_ROWS)
        .map(|i| p[i * (p.len() - 1) / (DEFAULT_ROWS - 1)])
        .collect();
    Ok(Grid::new(picks)?)
}

fn compare(label: char, s: &SystemSpec, grid: &Grid, n: usize, seed: u64) -> anyhow::Result<SystemComparison> {
    let sample = sample_system(s, n, seed).sorted();
    let rows = compare_sf(s, &sample, grid)?;
    Ok(SystemComparison {
        label,
        within_band: rows.iter().filter(|r| r.within_band).count(),
        points: rows.len(),
        rows,
    })
}

fn table(systems: &[SystemComparison]) -> Table {
    let mut t = Table::new(["system", "x", "analytic", "empirical", "sigma", "within_band"]);
    for c in systems {
        for r in &c.rows {
            t.push(vec![
                c.label.to_string(),
                num(r.x),
                num(r.analytic),
                num(r.empirical),
                num(r.sigma),
                if r.within_band { "pass" } else { "fail" }.into(),
            ]);
        }
    }
    t
}

fn st_summary(v: &OrderingVerdict) -> String {
    let separated = v.evaluated_points;
    if separated == 0 {
        return format!(
            "empirical st: all {} points inconclusive (bands overlap)\n",
            v.inconclusive_points.len()
        );
    }
    let mut s = format!(
        "empirical st: {} ({} separated, {} inconclusive)\n",
        v.direction,
        separated,
        v.inconclusive_points.len()
    );
    if let Some(w) = v.witnesses.first() {
        s.push_str(&format!("  witness: {}\n", witness(w)));
    }
    s
}
