use anyhow::{bail, Context};
use ecd_core::{
    check, default_grid, majorizes, Direction, OrderingVerdict, ParamVector, Relation, SystemKind,
    SystemSpec, Witness,
};
use serde::Serialize;

use crate::config::{set, OutputFormat, RelationChoice, RunConfig};
use crate::render::{num, Table};
use crate::{OrderArgs, Report, EXIT_NEITHER, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expected {
    #[serde(rename = "A_le_B")]
    ALeB,
    #[serde(rename = "B_le_A")]
    BLeA,
    #[serde(rename = "equal")]
    Equal,
}

impl Expected {
    fn flip(self) -> Self {
        match self {
            Expected::ALeB => Expected::BLeA,
            Expected::BLeA => Expected::ALeB,
            Expected::Equal => Expected::Equal,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Expected::ALeB => "A_le_B",
            Expected::BLeA => "B_le_A",
            Expected::Equal => "equal",
        }
    }

    fn holds(self, v: &OrderingVerdict) -> bool {
        match self {
            Expected::ALeB => v.a_le_b(),
            Expected::BLeA => v.b_le_a(),
            Expected::Equal => v.both_directions,
        }
    }
}

/// What a theorem predicts for a pair of systems that meets its hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremPrediction {
    pub theorem: u8,
    pub relation: Relation,
    pub expected: Expected,
    pub basis: String,
    /// `None` when the checked relation is not the theorem's.
    pub consistent: Option<bool>,
}

#[derive(Serialize)]
struct OrderOutput<'a> {
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    theorem: Option<&'a TheoremPrediction>,
    verdicts: &'a [OrderingVerdict],
}

pub fn run(cfg: &mut RunConfig, args: OrderArgs) -> anyhow::Result<Report> {
    args.systems.apply(cfg);
    args.grid.apply(cfg);
    set(&mut cfg.relation, args.relation);
    set(&mut cfg.theorem, args.theorem);

    let a = cfg.system_a.as_ref().context("missing system A")?.resolve('A')?;
    let b = cfg.system_b.as_ref().context("missing system B (--b-alpha, --b-beta, --b-lambda)")?.resolve('B')?;
    let mut prediction = match cfg.theorem {
        Some(n) => Some(predict(n, &a, &b)?),
        None => None,
    };
    let relations: Vec<Relation> = match cfg.relation {
        Some(r) => expand(r),
        None => match &prediction {
            Some(p) => vec![p.relation],
            None => vec![Relation::St],
        },
    };
    let grid = match cfg.grid.as_ref().map(|g| g.resolve()).transpose()?.flatten() {
        Some(g) => g,
        None => default_grid(&a, &b)?,
    };
    let verdicts = relations
        .iter()
        .map(|&r| check(r, &a, &b, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(p) = prediction.as_mut() {
        p.consistent = verdicts
            .iter()
            .find(|v| v.relation == p.relation)
            .map(|v| p.expected.holds(v));
    }

    let exit = if verdicts.iter().any(|v| v.direction == Direction::Neither) {
        EXIT_NEITHER
    } else {
        EXIT_OK
    };
    let text = match cfg.format() {
        OutputFormat::Json => {
            let out = OrderOutput {
                config: cfg,
                theorem: prediction.as_ref(),
                verdicts: &verdicts,
            };
            serde_json::to_string_pretty(&out)? + "\n"
        }
        OutputFormat::Csv => table(&verdicts).csv(),
        OutputFormat::Table => {
            let mut s = table(&verdicts).text();
            if let Some(p) = &prediction {
                s.push_str(&describe(p));
            }
            s
        }
    };
    Ok(Report { text, exit })
}

fn expand(r: RelationChoice) -> Vec<Relation> {
    match r {
        RelationChoice::St => vec![Relation::St],
        RelationChoice::Hr => vec![Relation::Hr],
        RelationChoice::Rh => vec![Relation::Rh],
        RelationChoice::Lr => vec![Relation::Lr],
        RelationChoice::All => Relation::ALL.to_vec(),
    }
}

pub fn relation_label(r: Relation) -> &'static str {
    match r {
        Relation::St => "st",
        Relation::Hr => "hr",
        Relation::Rh => "rh",
        Relation::Lr => "lr",
    }
}

fn table(verdicts: &[OrderingVerdict]) -> Table {
    let mut t = Table::new([
        "relation",
        "direction",
        "both_directions",
        "points",
        "saturated",
        "witness",
    ]);
    for v in verdicts {
        t.push(vec![
            relation_label(v.relation).into(),
            v.direction.to_string(),
            v.both_directions.to_string(),
            v.evaluated_points.to_string(),
            v.saturated_points.len().to_string(),
            v.witnesses.first().map_or_else(|| "-".into(), witness),
        ]);
    }
    t
}

pub fn witness(w: &Witness) -> String {
    match w {
        Witness::Crossing {
            x, value_a, value_b, ..
        } => format!("crossing x={} A={} B={}", num(*x), num(*value_a), num(*value_b)),
        Witness::Violation(t) => format!(
            "x=({}; {}; {}) ratio=({}; {}; {})",
            num(t.x[0]),
            num(t.x[1]),
            num(t.x[2]),
            num(t.ratio[0]),
            num(t.ratio[1]),
            num(t.ratio[2])
        ),
    }
}

fn describe(p: &TheoremPrediction) -> String {
    let status = match p.consistent {
        Some(true) => "consistent",
        Some(false) => "NOT consistent",
        None => "not checked (different relation)",
    };
    format!(
        "theorem {}: predicts {} in {} ({}); {}\n",
        p.theorem,
        p.expected.label(),
        relation_label(p.relation),
        p.basis,
        status
    )
}

/// The single value shared by every component of both systems.
fn shared(name: &str, a: &[f64], b: &[f64]) -> anyhow::Result<f64> {
    let v = a[0];
    if a.iter().chain(b).all(|&u| u == v) {
        Ok(v)
    } else {
        bail!("{name} must be the same for every component of both systems")
    }
}

fn require_kind(n: u8, a: &SystemSpec, b: &SystemSpec, kind: SystemKind) -> anyhow::Result<()> {
    if a.kind != kind || b.kind != kind {
        let want = if kind == SystemKind::Series { "series" } else { "parallel" };
        bail!("theorem {n} compares two {want} systems");
    }
    Ok(())
}

/// `ALeB` when the varied vector of A is majorized by that of B.
fn majorization_sign(name: &str, a: &[f64], b: &[f64]) -> anyhow::Result<Expected> {
    let (pa, pb) = (ParamVector::new(a.to_vec())?, ParamVector::new(b.to_vec())?);
    if majorizes(&pa, &pb)? {
        Ok(Expected::ALeB)
    } else if majorizes(&pb, &pa)? {
        Ok(Expected::BLeA)
    } else {
        bail!("the {name} vectors of A and B are not comparable in majorization")
    }
}

/// Validates the hypotheses of theorem `n` for `(a, b)` and derives the
/// predicted direction.
pub fn predict(n: u8, a: &SystemSpec, b: &SystemSpec) -> anyhow::Result<TheoremPrediction> {
    let (ca, cb) = (&a.components, &b.components);
    if ca.len() != cb.len() {
        bail!(
            "theorem {n} needs equal component counts (A has {}, B has {})",
            ca.len(),
            cb.len()
        );
    }
    let (aa, ab) = (ca.alphas(), cb.alphas());
    let (ba, bb) = (ca.betas(), cb.betas());
    let (la, lb) = (ca.lambdas(), cb.lambdas());
    let (relation, expected, basis) = match n {
        1 => {
            require_kind(n, a, b, SystemKind::Series)?;
            let alpha = shared("alpha", &aa, &ab)?;
            shared("beta", &ba, &bb)?;
            let sign = majorization_sign("lambda", &la, &lb)?;
            let e = if alpha < 1.0 {
                sign
            } else if alpha > 1.0 {
                sign.flip()
            } else {
                Expected::Equal
            };
            (Relation::St, e, format!("lambda varied, alpha = {}", num(alpha)))
        }
        2 => {
            require_kind(n, a, b, SystemKind::Parallel)?;
            shared("alpha", &aa, &ab)?;
            shared("beta", &ba, &bb)?;
            let sign = majorization_sign("lambda", &la, &lb)?;
            (Relation::St, sign, "lambda varied".into())
        }
        3 => {
            require_kind(n, a, b, SystemKind::Parallel)?;
            shared("alpha", &aa, &ab)?;
            let lambda = shared("lambda", &la, &lb)?;
            if lambda <= 1.0 {
                bail!("theorem 3 needs lambda > 1, got {lambda}");
            }
            let sign = majorization_sign("beta", &ba, &bb)?;
            (Relation::St, sign, format!("beta varied, lambda = {}", num(lambda)))
        }
        4 => {
            require_kind(n, a, b, SystemKind::Series)?;
            shared("beta", &ba, &bb)?;
            shared("lambda", &la, &lb)?;
            // series survival is Schur-concave in alpha
            let sign = majorization_sign("alpha", &aa, &ab)?.flip();
            (Relation::St, sign, "alpha varied".into())
        }
        5 => {
            require_kind(n, a, b, SystemKind::Parallel)?;
            shared("beta", &ba, &bb)?;
            shared("lambda", &la, &lb)?;
            let (sa, sb) = (ca.total_alpha(), cb.total_alpha());
            let e = if sa < sb {
                Expected::ALeB
            } else if sa > sb {
                Expected::BLeA
            } else {
                Expected::Equal
            };
            (
                Relation::Lr,
                e,
                format!("alpha totals {} and {}", num(sa), num(sb)),
            )
        }
        _ => bail!("no theorem {n} (expected 1-5)"),
    };
    Ok(TheoremPrediction {
        theorem: n,
        relation,
        expected,
        basis,
        consistent: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ecd_core::ComponentSet;

    fn sys(kind: SystemKind, a: &[f64], b: &[f64], l: &[f64]) -> SystemSpec {
        SystemSpec::new(ComponentSet::from_vectors(a, b, l).unwrap(), kind)
    }

    #[test]
    fn theorem_one_direction_follows_alpha() {
        let lam = [0.8, 1.2, 1.3, 1.9];
        let mu = [0.5, 0.7, 1.5, 2.5];
        for (alpha, want) in [(0.7, Expected::ALeB), (1.5, Expected::BLeA), (1.0, Expected::Equal)] {
            let a = sys(SystemKind::Series, &[alpha], &[2.0], &lam);
            let b = sys(SystemKind::Series, &[alpha], &[2.0], &mu);
            assert_eq!(predict(1, &a, &b).unwrap().expected, want);
            assert_eq!(predict(1, &b, &a).unwrap().expected, want.flip());
        }
    }

    #[test]
    fn theorem_four_matches_example_orientation() {
        let a = sys(SystemKind::Series, &[0.2, 1.0, 2.4], &[3.0], &[2.0]);
        let b = sys(SystemKind::Series, &[0.4, 1.0, 2.2], &[3.0], &[2.0]);
        assert_eq!(predict(4, &a, &b).unwrap().expected, Expected::ALeB);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let a = sys(SystemKind::Series, &[0.7], &[2.0], &[1.0, 2.0]);
        let b3 = sys(SystemKind::Series, &[0.7], &[2.0], &[1.0, 1.0, 1.0]);
        assert!(predict(1, &a, &b3).unwrap_err().to_string().contains("equal component counts"));
        assert!(predict(2, &a, &a).is_err());
        let p = sys(SystemKind::Parallel, &[0.7], &[1.0, 2.0], &[0.9]);
        assert!(predict(3, &p, &p).unwrap_err().to_string().contains("lambda > 1"));
        let unequal = sys(SystemKind::Series, &[0.7], &[2.0], &[1.0, 3.0]);
        assert!(predict(1, &a, &unequal).unwrap_err().to_string().contains("not comparable"));
    }
}
