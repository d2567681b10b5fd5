use anyhow::Context;
use ecd_core::{EcdError, EcdParams};
use serde::Serialize;

use crate::config::{set, OutputFormat, ParamsConfig, RunConfig};
use crate::render::{num, Table};
use crate::{DistArgs, Report};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistRow {
    pub x: f64,
    pub cdf: f64,
    pub sf: f64,
    pub pdf: f64,
    /// `None` where the survival underflows.
    pub hazard: Option<f64>,
    pub reversed_hazard: f64,
}

pub fn run(cfg: &mut RunConfig, args: DistArgs) -> anyhow::Result<Report> {
    let p = cfg.params.get_or_insert_with(ParamsConfig::default);
    set(&mut p.alpha, args.alpha);
    set(&mut p.beta, args.beta);
    set(&mut p.lambda, args.lambda);
    set(&mut cfg.x, args.x);
    let params = cfg.params.as_ref().expect("set above").resolve()?;
    let xs = cfg.x.as_deref().context("missing --x")?;
    let rows = xs
        .iter()
        .map(|&x| row(&params, x))
        .collect::<Result<Vec<_>, _>>()?;

    let text = match cfg.format() {
        OutputFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
        f => {
            let t = table(&rows);
            if f == OutputFormat::Csv {
                t.csv()
            } else {
                t.text()
            }
        }
    };
    Ok(Report::ok(text))
}

pub fn row(p: &EcdParams, x: f64) -> Result<DistRow, EcdError> {
    let cdf = p.cdf(x)?.value();
    let sf = p.sf(x)?.value();
    if x == 0.0 {
        let (pdf, reversed_hazard) = origin_limits(p);
        return Ok(DistRow {
            x,
            cdf,
            sf,
            pdf,
            hazard: Some(pdf),
            reversed_hazard,
        });
    }
    let hazard = match p.hazard(x) {
        Ok(h) => Some(h),
        Err(EcdError::Saturated { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(DistRow {
        x,
        cdf,
        sf,
        pdf: p.pdf(x)?,
        hazard,
        reversed_hazard: p.reversed_hazard(x)?,
    })
}

/// Right limits at 0: `f(x) ~ α β λ^α x^{αβ-1}` and `f/F ~ αβ/x`.
fn origin_limits(p: &EcdParams) -> (f64, f64) {
    let ab = p.alpha() * p.beta();
    let pdf = if ab > 1.0 {
        0.0
    } else if ab == 1.0 {
        p.lambda().powf(p.alpha())
    } else {
        f64::INFINITY
    };
    (pdf, f64::INFINITY)
}

fn table(rows: &[DistRow]) -> Table {
    let mut t = Table::new(["x", "cdf", "sf", "pdf", "hazard", "reversed_hazard"]);
    for r in rows {
        t.push(vec![
            num(r.x),
            num(r.cdf),
            num(r.sf),
            num(r.pdf),
            r.hazard.map_or_else(|| "saturated".into(), num),
            num(r.reversed_hazard),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_parameters_at_one() {
        let p = EcdParams::new(1.0, 1.0, 1.0).unwrap();
        let r = row(&p, 1.0).unwrap();
        let want = 1.0 - (1.0 - std::f64::consts::E).exp();
        assert!((r.cdf - want).abs() < 1e-15);
        assert!((r.cdf - 0.820625921).abs() < 1e-9);
        assert!((r.hazard.unwrap() - r.pdf / r.sf).abs() < 1e-12);
    }

    #[test]
    fn origin_row() {
        let p = EcdParams::new(1.0, 1.0, 2.0).unwrap();
        let r = row(&p, 0.0).unwrap();
        assert_eq!((r.cdf, r.sf), (0.0, 1.0));
        assert_eq!(r.pdf, 2.0);
        let p = EcdParams::new(2.0, 1.0, 2.0).unwrap();
        assert_eq!(row(&p, 0.0).unwrap().pdf, 0.0);
    }

    #[test]
    fn saturated_hazard_is_none() {
        let p = EcdParams::new(1.0, 2.0, 1.0).unwrap();
        let r = row(&p, 3.0).unwrap();
        assert!(r.hazard.is_none());
        assert_eq!(r.sf, 0.0);
    }
}
