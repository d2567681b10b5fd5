//! Grid checks for the usual stochastic, hazard rate, reversed hazard rate
//! and likelihood ratio orders between two system lifetimes.
//!
//! Every comparison is done in log space. A point where a needed quantity
//! is not finite for both systems is listed in `saturated_points` and left
//! out of the decision.

use serde::{Deserialize, Serialize};

use crate::error::{EcdError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::math::log_noise;
use crate::systems::{log_lr_ratio_common, SystemKind, SystemPoint, SystemSpec};

/// Relative tolerance for survival comparisons.
pub const ST_TOL: f64 = 1e-12;
/// Absolute tolerance on log ratios (relative on the ratios themselves).
pub const RATIO_TOL: f64 = 1e-9;
/// Default grid size and tail levels used by [`default_grid`].
pub const DEFAULT_GRID_POINTS: usize = 400;
pub const DEFAULT_TAIL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    St,
    Hr,
    Rh,
    Lr,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::St, Relation::Hr, Relation::Rh, Relation::Lr];
}

/// `ALeB` reads "A is smaller than B in the relation".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A_le_B")]
    ALeB,
    #[serde(rename = "B_le_A")]
    BLeA,
    Neither,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::ALeB => "A_le_B",
            Direction::BLeA => "B_le_A",
            Direction::Neither => "Neither",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A grid point where one system's value exceeds the other's.
    Crossing {
        x: f64,
        value_a: f64,
        value_b: f64,
        log_a: f64,
        log_b: f64,
    },
    /// Three points on which the ratio rises then falls, or falls then rises.
    Violation(ViolationTriple),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationTriple {
    pub indices: [usize; 3],
    pub x: [f64; 3],
    pub ratio: [f64; 3],
    pub log_ratio: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub relation: Relation,
    pub direction: Direction,
    /// Both directions hold within tolerance (equal or indistinguishable).
    pub both_directions: bool,
    pub witnesses: Vec<Witness>,
    pub saturated_points: Vec<f64>,
    /// Points where empirical bands overlapped; only set by Monte Carlo checks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inconclusive_points: Vec<f64>,
    pub evaluated_points: usize,
}

impl OrderingVerdict {
    /// `true` iff the verdict establishes `A ≤ B`.
    pub fn a_le_b(&self) -> bool {
        self.direction == Direction::ALeB || self.both_directions
    }

    pub fn b_le_a(&self) -> bool {
        self.direction == Direction::BLeA || self.both_directions
    }
}

fn require_same_kind(a: &SystemSpec, b: &SystemSpec) -> Result<()> {
    if a.kind == b.kind {
        Ok(())
    } else {
        Err(EcdError::KindMismatch)
    }
}

fn evaluate_both(
    a: &SystemSpec,
    b: &SystemSpec,
    grid: &Grid,
) -> Result<Vec<(SystemPoint, SystemPoint)>> {
    require_same_kind(a, b)?;
    let exec = Execution::default();
    let pa = a.evaluate_grid(grid.points(), exec)?;
    let pb = b.evaluate_grid(grid.points(), exec)?;
    Ok(pa.into_iter().zip(pb).collect())
}

/// 400 log-spaced points from the smallest lower tail quantile to the
/// largest upper tail quantile over all components of both systems.
pub fn default_grid(a: &SystemSpec, b: &SystemSpec) -> Result<Grid> {
    let comps = a.components.components().iter().chain(b.components.components());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for c in comps {
        lo = lo.min(c.quantile(DEFAULT_TAIL)?);
        hi = hi.max(c.quantile(1.0 - DEFAULT_TAIL)?);
    }
    Grid::logarithmic(lo, hi, DEFAULT_GRID_POINTS)
}

/// `A ≤st B` iff `S_A(x) ≤ S_B(x)` at every evaluated point.
pub fn check_st(a: &SystemSpec, b: &SystemSpec, grid: &Grid) -> Result<OrderingVerdict> {
    let pts = evaluate_both(a, b, grid)?;
    let mut saturated = Vec::new();
    let mut a_ok = true;
    let mut b_ok = true;
    // largest excess of A over B and of B over A, relative to tolerance
    let mut worst_a_above: Option<(f64, Witness)> = None;
    let mut worst_b_above: Option<(f64, Witness)> = None;
    let mut evaluated = 0;

    for (pa, pb) in &pts {
        let (la, lb) = (pa.log_sf, pb.log_sf);
        if la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY || la.is_nan() || lb.is_nan() {
            saturated.push(pa.x);
            continue;
        }
        evaluated += 1;
        let tol = ST_TOL * 1f64.max(la.abs()).max(lb.abs()) + log_noise(la, lb);
        let w = Witness::Crossing {
            x: pa.x,
            value_a: la.exp(),
            value_b: lb.exp(),
            log_a: la,
            log_b: lb,
        };
        if la > lb + tol {
            a_ok = false;
            let excess = la - lb;
            if worst_a_above.is_none_or(|(e, _)| excess > e) {
                worst_a_above = Some((excess, w));
            }
        }
        if lb > la + tol {
            b_ok = false;
            let excess = lb - la;
            if worst_b_above.is_none_or(|(e, _)| excess > e) {
                worst_b_above = Some((excess, w));
            }
        }
    }
    if evaluated == 0 {
        return Err(EcdError::AllSaturated);
    }
    let (direction, witnesses) = match (a_ok, b_ok) {
        (true, _) => (Direction::ALeB, vec![]),
        (false, true) => (Direction::BLeA, vec![]),
        (false, false) => (
            Direction::Neither,
            vec![worst_a_above.unwrap().1, worst_b_above.unwrap().1],
        ),
    };
    Ok(OrderingVerdict {
        relation: Relation::St,
        direction,
        both_directions: a_ok && b_ok,
        witnesses,
        saturated_points: saturated,
        inconclusive_points: vec![],
        evaluated_points: evaluated,
    })
}

/// Monotonicity verdict for a log-ratio sequence `ln(g_B / g_A)`:
/// nondecreasing gives `ALeB`.
///
/// Each value carries its own rounding allowance `noise[i]`; one point is
/// below another only when the two allowance intervals are separated by
/// more than `RATIO_TOL`.
fn ratio_verdict(
    relation: Relation,
    xs: Vec<f64>,
    log_ratio: Vec<f64>,
    noise: Vec<f64>,
    saturated: Vec<f64>,
) -> Result<OrderingVerdict> {
    if xs.is_empty() {
        return Err(EcdError::AllSaturated);
    }
    let lo = |i: usize| log_ratio[i] - noise[i];
    let hi = |i: usize| log_ratio[i] + noise[i];
    // highest lower bound and lowest upper bound seen so far
    let (mut top, mut bottom) = (lo(0), hi(0));
    let (mut inc, mut dec) = (true, true);
    for j in 1..log_ratio.len() {
        if hi(j) + RATIO_TOL < top {
            inc = false;
        }
        if lo(j) - RATIO_TOL > bottom {
            dec = false;
        }
        top = top.max(lo(j));
        bottom = bottom.min(hi(j));
    }
    let (direction, witnesses) = match (inc, dec) {
        (true, _) => (Direction::ALeB, vec![]),
        (false, true) => (Direction::BLeA, vec![]),
        (false, false) => {
            let w = find_violation_with(&xs, &log_ratio, &noise, RATIO_TOL)
                .map(Witness::Violation)
                .into_iter()
                .collect();
            (Direction::Neither, w)
        }
    };
    Ok(OrderingVerdict {
        relation,
        direction,
        both_directions: inc && dec,
        witnesses,
        saturated_points: saturated,
        inconclusive_points: vec![],
        evaluated_points: xs.len(),
    })
}

fn ratio_check<F>(
    relation: Relation,
    pts: &[(SystemPoint, SystemPoint)],
    value: F,
) -> Result<OrderingVerdict>
where
    F: Fn(&SystemPoint) -> f64,
{
    let mut xs = Vec::new();
    let mut d = Vec::new();
    let mut saturated = Vec::new();
    let mut noise = Vec::new();
    for (pa, pb) in pts {
        let (va, vb) = (value(pa), value(pb));
        if !va.is_finite() || !vb.is_finite() {
            saturated.push(pa.x);
            continue;
        }
        xs.push(pa.x);
        d.push(vb - va);
        noise.push(log_noise(va, vb));
    }
    ratio_verdict(relation, xs, d, noise, saturated)
}

/// `A ≤hr B` iff `S_B / S_A` is nondecreasing.
pub fn check_hr(a: &SystemSpec, b: &SystemSpec, grid: &Grid) -> Result<OrderingVerdict> {
    let pts = evaluate_both(a, b, grid)?;
    ratio_check(Relation::Hr, &pts, |p| p.log_sf)
}

/// `A ≤rh B` iff `F_B / F_A` is nondecreasing.
pub fn check_rh(a: &SystemSpec, b: &SystemSpec, grid: &Grid) -> Result<OrderingVerdict> {
    let pts = evaluate_both(a, b, grid)?;
    ratio_check(Relation::Rh, &pts, |p| p.log_cdf)
}

/// `A ≤lr B` iff `f_B / f_A` is nondecreasing.
///
/// Parallel systems sharing one `(β, λ)` use the closed-form ratio, which
/// stays finite far into both tails; other pairs use the analytic system
/// log densities.
pub fn check_lr(a: &SystemSpec, b: &SystemSpec, grid: &Grid) -> Result<OrderingVerdict> {
    require_same_kind(a, b)?;
    let common = a.kind == SystemKind::Parallel
        && matches!(
            (a.components.common_beta_lambda(), b.components.common_beta_lambda()),
            (Some(p), Some(q)) if p == q
        );
    if !common {
        let pts = evaluate_both(a, b, grid)?;
        return ratio_check(Relation::Lr, &pts, |p| p.log_pdf);
    }
    let values = Execution::default().map(grid.points(), |&x| {
        log_lr_ratio_common(&a.components, &b.components, x)
    });
    let mut xs = Vec::new();
    let mut d = Vec::new();
    let mut saturated = Vec::new();
    let mut noise = Vec::new();
    for (&x, v) in grid.points().iter().zip(values) {
        let v = v?;
        if v.is_finite() {
            xs.push(x);
            d.push(v);
            noise.push(log_noise(v, 0.0));
        } else {
            saturated.push(x);
        }
    }
    ratio_verdict(Relation::Lr, xs, d, noise, saturated)
}

pub fn check(relation: Relation, a: &SystemSpec, b: &SystemSpec, grid: &Grid) -> Result<OrderingVerdict> {
    match relation {
        Relation::St => check_st(a, b, grid),
        Relation::Hr => check_hr(a, b, grid),
        Relation::Rh => check_rh(a, b, grid),
        Relation::Lr => check_lr(a, b, grid),
    }
}

/// Finds `i < j < k` where a ratio sequence changes direction by more than
/// a relative `1e-9`.
///
/// `j` is the first point that rises (or falls) beyond tolerance from the
/// prefix extreme at `i`, and `k` the first later point that moves back
/// beyond tolerance from `j`. Values must be positive.
pub fn find_violation(points: &[(f64, f64)]) -> Option<ViolationTriple> {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let logs: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    find_violation_with(&xs, &logs, &vec![0.0; xs.len()], RATIO_TOL)
}

fn find_violation_with(
    xs: &[f64],
    log_ratio: &[f64],
    noise: &[f64],
    tol: f64,
) -> Option<ViolationTriple> {
    let n = log_ratio.len();
    if n < 3 {
        return None;
    }
    let lo = |i: usize| log_ratio[i] - noise[i];
    let hi = |i: usize| log_ratio[i] + noise[i];
    let make = |i: usize, j: usize, k: usize| ViolationTriple {
        indices: [i, j, k],
        x: [xs[i], xs[j], xs[k]],
        ratio: [log_ratio[i].exp(), log_ratio[j].exp(), log_ratio[k].exp()],
        log_ratio: [log_ratio[i], log_ratio[j], log_ratio[k]],
    };
    // rise then fall
    let mut low = 0;
    for j in 1..n {
        if lo(j) - tol > hi(low) {
            if let Some(k) = (j + 1..n).find(|&k| hi(k) + tol < lo(j)) {
                let peak = (j..k).max_by(|&p, &q| lo(p).total_cmp(&lo(q))).unwrap();
                return Some(make(low, peak, k));
            }
        }
        if hi(j) < hi(low) {
            low = j;
        }
    }
    // fall then rise
    let mut high = 0;
    for j in 1..n {
        if hi(j) + tol < lo(high) {
            if let Some(k) = (j + 1..n).find(|&k| lo(k) - tol > hi(j)) {
                let valley = (j..k).min_by(|&p, &q| hi(p).total_cmp(&hi(q))).unwrap();
                return Some(make(high, valley, k));
            }
        }
        if lo(j) > lo(high) {
            high = j;
        }
    }
    None
}
