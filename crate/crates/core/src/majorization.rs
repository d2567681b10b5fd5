//! Vector majorization, pairwise averaging (T-transforms), the auxiliary
//! monotone functions used in the ordering arguments, and a finite-difference
//! Schur-convexity scanner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::EcdParams;
use crate::error::{check_positive, EcdError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::math::{log1mexp, pow_pos};
use crate::systems::{ComponentSet, SystemKind, SystemSpec};

/// Tolerance on the totals of two vectors.
pub const TOTAL_TOL: f64 = 1e-9;
/// Tolerance on partial sums of the increasing rearrangements.
pub const PARTIAL_SUM_TOL: f64 = 1e-12;
/// Relative finite-difference step: `h = FD_STEP * max(1, |a_i|)`.
pub const FD_STEP: f64 = 1e-6;
/// A Schur difference counts as nonzero only when `Δ / ψ` exceeds
/// `DELTA_TOL * |a_i - a_j| * max(1, |ln ψ(a)|)`.
pub const DELTA_TOL: f64 = 1e-8;

/// Positive parameter vector of length at least two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ParamVector {
    entries: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ParamVector {
    type Error = EcdError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ParamVector::new(v)
    }
}

impl From<ParamVector> for Vec<f64> {
    fn from(p: ParamVector) -> Self {
        p.entries
    }
}

impl ParamVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(EcdError::InvalidParameter {
                name: "vector length",
                value: entries.len() as f64,
                requirement: "at least 2",
            });
        }
        for &v in &entries {
            check_positive("vector entry", v)?;
        }
        Ok(ParamVector { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }
}

/// `true` iff `a` is majorized by `b`: equal totals, and every partial sum
/// of the increasing rearrangement of `a` dominates that of `b`.
pub fn majorizes(a: &ParamVector, b: &ParamVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(EcdError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (sa, sb) = (a.sorted(), b.sorted());
    let total_a: f64 = sa.iter().sum();
    let total_b: f64 = sb.iter().sum();
    let scale = total_a.abs().max(total_b.abs()).max(1.0);
    if (total_a - total_b).abs() > TOTAL_TOL * scale {
        return Ok(false);
    }
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..sa.len() - 1 {
        pa += sa[k];
        pb += sb[k];
        if pa < pb - PARTIAL_SUM_TOL * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces `(v_i, v_j)` by `(t v_i + (1-t) v_j, (1-t) v_i + t v_j)`.
pub fn t_transform(v: &ParamVector, i: usize, j: usize, t: f64) -> Result<ParamVector> {
    if i >= v.len() || j >= v.len() || i == j {
        return Err(EcdError::InvalidParameter {
            name: "index pair",
            value: i as f64,
            requirement: "two distinct in-range indices",
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(EcdError::Domain {
            name: "t",
            value: t,
            domain: "[0, 1]",
        });
    }
    let mut e = v.entries.clone();
    let (ai, aj) = (e[i], e[j]);
    e[i] = t * ai + (1.0 - t) * aj;
    e[j] = (1.0 - t) * ai + t * aj;
    ParamVector::new(e)
}

/// A vector majorized by `b`, built from one to three random T-transforms
/// on pairs with distinct entries.
pub fn random_majorized<R: Rng + ?Sized>(b: &ParamVector, rng: &mut R) -> ParamVector {
    let mut v = b.clone();
    let steps = rng.gen_range(1..=3);
    for _ in 0..steps {
        let distinct: Vec<(usize, usize)> = (0..v.len())
            .flat_map(|i| (i + 1..v.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| v.entries[i] != v.entries[j])
            .collect();
        if distinct.is_empty() {
            break;
        }
        let (i, j) = distinct[rng.gen_range(0..distinct.len())];
        let t = loop {
            let t: f64 = rng.gen();
            if t > 0.0 {
                break t;
            }
        };
        v = t_transform(&v, i, j, t).expect("convex combination of positive entries");
    }
    v
}

/// [`random_majorized`] on a ChaCha8 stream seeded with `seed`.
pub fn random_majorized_seeded(b: &ParamVector, seed: u64) -> ParamVector {
    random_majorized(b, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn check_unit_open(name: &'static str, y: f64) -> Result<f64> {
    if y > 0.0 && y < 1.0 {
        Ok(y)
    } else {
        Err(EcdError::Domain {
            name,
            value: y,
            domain: "(0, 1)",
        })
    }
}

/// `ψ₁(α, y) = y (1-y)^{α-1} / (1 - (1-y)^α)`.
///
/// Increasing in `y` for `α < 1`, decreasing for `α > 1`, identically 1 at
/// `α = 1`.
pub fn psi1(alpha: f64, y: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    let y = check_unit_open("y", y)?;
    let log_1my = (-y).ln_1p();
    let num = y * ((alpha - 1.0) * log_1my).exp();
    let den = -(alpha * log_1my).exp_m1();
    Ok(num / den)
}

/// `φ₁(λ) = 1 - 1 / (1 - e^{λ(1 - e^{x^β})})`; negative and increasing in λ.
pub fn phi1(lambda: f64, x: f64, beta: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("x", x)?;
    check_positive("beta", beta)?;
    // 1 - 1/(1 - e^z) = -1 / (e^{-z} - 1)
    let minus_z = lambda * pow_pos(x, beta).exp_m1();
    Ok(-1.0 / minus_z.exp_m1())
}

/// `φ₂(t) = t e^{λ(1-e^t) + t} / (1 - e^{λ(1-e^t)})`; tends to `1/λ` at 0.
pub fn phi2(t: f64, lambda: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("lambda", lambda)?;
    let s = t.exp_m1();
    if s.is_infinite() {
        return Ok(0.0);
    }
    let z = -lambda * s;
    Ok(t * (z + t).exp() / -z.exp_m1())
}

/// `ψ₂(α) = 1 - 1 / (1 - w^α)` with `w` the Chen cdf at `x`; negative and
/// increasing in α.
pub fn psi2(alpha: f64, x: f64, beta: f64, lambda: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("x", x)?;
    let chen = EcdParams::new(1.0, beta, lambda)?;
    let z = chen.tail(x).z;
    let log_w_alpha = alpha * log1mexp(z);
    // -w^α / (1 - w^α)
    Ok(log_w_alpha.exp() / log_w_alpha.exp_m1())
}

/// Which system function is scanned and which parameter is varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchurTarget {
    /// Series survival as a function of the λ vector.
    SeriesSfLambda,
    /// Parallel cdf as a function of the λ vector.
    ParallelCdfLambda,
    /// Parallel cdf as a function of the β vector.
    ParallelCdfBeta,
    /// Series survival as a function of the α vector.
    SeriesSfAlpha,
}

impl SchurTarget {
    fn kind(self) -> SystemKind {
        match self {
            SchurTarget::SeriesSfLambda | SchurTarget::SeriesSfAlpha => SystemKind::Series,
            SchurTarget::ParallelCdfLambda | SchurTarget::ParallelCdfBeta => SystemKind::Parallel,
        }
    }

    fn system(self, fixed: &EcdParams, v: &[f64]) -> Result<SystemSpec> {
        let (a, b, l) = ([fixed.alpha()], [fixed.beta()], [fixed.lambda()]);
        let comps = match self {
            SchurTarget::SeriesSfLambda | SchurTarget::ParallelCdfLambda => {
                ComponentSet::from_vectors(&a, &b, v)?
            }
            SchurTarget::ParallelCdfBeta => ComponentSet::from_vectors(&a, v, &l)?,
            SchurTarget::SeriesSfAlpha => ComponentSet::from_vectors(v, &b, &l)?,
        };
        Ok(SystemSpec::new(comps, self.kind()))
    }

    fn log_value(self, fixed: &EcdParams, v: &[f64], x: f64) -> Result<f64> {
        let p = self.system(fixed, v)?.evaluate(x)?;
        Ok(match self.kind() {
            SystemKind::Series => p.log_sf,
            SystemKind::Parallel => p.log_cdf,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchurVerdict {
    SchurConvex,
    SchurConcave,
    /// Every sampled difference vanishes within tolerance (both hold).
    Constant,
    Indeterminate,
}

/// One sampled `Δ = (a_i - a_j)(∂ψ/∂a_i - ∂ψ/∂a_j)`.
///
/// `scaled_delta = Δ / ψ` carries the sign and stays representable when
/// `ψ` itself underflows; `tolerance` applies to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSample {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub delta: f64,
    pub scaled_delta: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub verdict: SchurVerdict,
    /// The sample that breaks the otherwise dominant sign, if any.
    pub worst_violation: Option<DeltaSample>,
    pub max_delta: Option<DeltaSample>,
    pub min_delta: Option<DeltaSample>,
    pub pairs_evaluated: usize,
    pub ties_skipped: usize,
    pub note: Option<String>,
}

/// Samples the Schur difference of `target` at `point` for every pair
/// `i < j` and every grid abscissa, using central differences.
///
/// `fixed` supplies the two parameters shared by all components; its value
/// for the varied parameter is ignored. Pairs with `a_i = a_j` are skipped,
/// as are abscissas where `ψ` is zero even in log space. Derivatives are
/// taken of `ln ψ`, so the sign of `Δ` is resolved in both tails.
pub fn schur_scan(
    target: SchurTarget,
    fixed: &EcdParams,
    point: &ParamVector,
    grid: &Grid,
) -> Result<SchurReport> {
    schur_scan_with(target, fixed, point, grid, Execution::default())
}

pub fn schur_scan_with(
    target: SchurTarget,
    fixed: &EcdParams,
    point: &ParamVector,
    grid: &Grid,
    exec: Execution,
) -> Result<SchurReport> {
    let a = point.entries();
    let n = a.len();
    target.system(fixed, a)?;

    let steps: Vec<f64> = a
        .iter()
        .map(|&ai| (FD_STEP * ai.abs().max(1.0)).min(0.5 * ai))
        .collect();

    let per_point: Vec<Result<Vec<DeltaSample>>> = exec.map(grid.points(), |&x| {
        let log_psi = target.log_value(fixed, a, x)?;
        if !log_psi.is_finite() {
            return Ok(vec![]);
        }
        let mut grad = vec![0.0; n];
        for i in 0..n {
            let mut up = a.to_vec();
            let mut down = a.to_vec();
            up[i] += steps[i];
            down[i] -= steps[i];
            let fu = target.log_value(fixed, &up, x)?;
            let fd = target.log_value(fixed, &down, x)?;
            grad[i] = (fu - fd) / (up[i] - down[i]);
        }
        let psi = log_psi.exp();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if a[i] == a[j] {
                    continue;
                }
                let gap = a[i] - a[j];
                let scaled = gap * (grad[i] - grad[j]);
                out.push(DeltaSample {
                    i,
                    j,
                    x,
                    delta: psi * scaled,
                    scaled_delta: scaled,
                    tolerance: DELTA_TOL * gap.abs() * log_psi.abs().max(1.0),
                });
            }
        }
        Ok(out)
    });

    let mut samples = Vec::new();
    for r in per_point {
        samples.extend(r?);
    }
    let pairs_total = n * (n - 1) / 2;
    let informative_pairs = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a[i] != a[j])
        .count();
    let ties_skipped = pairs_total - informative_pairs;

    if samples.is_empty() {
        return Ok(SchurReport {
            verdict: SchurVerdict::Indeterminate,
            worst_violation: None,
            max_delta: None,
            min_delta: None,
            pairs_evaluated: 0,
            ties_skipped,
            note: Some("no informative pair or abscissa".into()),
        });
    }

    let by_delta = |s: &&DeltaSample, t: &&DeltaSample| s.scaled_delta.total_cmp(&t.scaled_delta);
    let max = *samples.iter().max_by(by_delta).unwrap();
    let min = *samples.iter().min_by(by_delta).unwrap();
    let any_pos = samples.iter().any(|s| s.scaled_delta > s.tolerance);
    let any_neg = samples.iter().any(|s| s.scaled_delta < -s.tolerance);

    let (verdict, worst) = match (any_pos, any_neg) {
        (true, false) => (SchurVerdict::SchurConvex, None),
        (false, true) => (SchurVerdict::SchurConcave, None),
        (false, false) => (SchurVerdict::Constant, None),
        (true, true) => {
            // the minority sign, judged by its largest excess over tolerance
            let np = samples.iter().filter(|s| s.scaled_delta > s.tolerance).count();
            let nn = samples.iter().filter(|s| s.scaled_delta < -s.tolerance).count();
            let sign = if np < nn { 1.0 } else { -1.0 };
            let worst = samples
                .iter()
                .filter(|s| sign * s.scaled_delta > s.tolerance)
                .max_by(|s, t| {
                    (s.scaled_delta.abs() / s.tolerance).total_cmp(&(t.scaled_delta.abs() / t.tolerance))
                })
                .copied();
            (SchurVerdict::Indeterminate, worst)
        }
    };
    let note = (ties_skipped > 0).then(|| format!("{ties_skipped} tied pair(s) skipped"));
    Ok(SchurReport {
        verdict,
        worst_violation: worst,
        max_delta: Some(max),
        min_delta: Some(min),
        pairs_evaluated: informative_pairs,
        ties_skipped,
        note,
    })
}
