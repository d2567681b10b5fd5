//! Lifetimes of series (minimum) and parallel (maximum) systems built from
//! independent, heterogeneous Exponentiated Chen components.
//!
//! Products over components are accumulated as sums of logs. The
//! complement of each product goes through the nested-log form, so a
//! parallel survival of `1e-16` (or `1e-4000`) is still resolved from its
//! dominant surviving components rather than from `1 - (1 - tiny)`.

use serde::{Deserialize, Serialize};

use crate::distribution::{EcdParams, LogProbability, Probability, TailState};
use crate::error::{check_abscissa, EcdError, Result};
use crate::exec::Execution;
use crate::math::{canonical_sum, log_complement_from_nested, log_sum_exp};

/// The independent components of one system. Never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<EcdParams>", into = "Vec<EcdParams>")]
pub struct ComponentSet {
    components: Vec<EcdParams>,
}

impl TryFrom<Vec<EcdParams>> for ComponentSet {
    type Error = EcdError;
    fn try_from(v: Vec<EcdParams>) -> Result<Self> {
        ComponentSet::new(v)
    }
}

impl From<ComponentSet> for Vec<EcdParams> {
    fn from(c: ComponentSet) -> Self {
        c.components
    }
}

impl ComponentSet {
    pub fn new(components: Vec<EcdParams>) -> Result<Self> {
        if components.is_empty() {
            return Err(EcdError::EmptyComponents);
        }
        Ok(ComponentSet { components })
    }

    /// Builds a set from per-parameter vectors; a vector of length 1 is
    /// shared by every component.
    pub fn from_vectors(alpha: &[f64], beta: &[f64], lambda: &[f64]) -> Result<Self> {
        let n = alpha.len().max(beta.len()).max(lambda.len());
        let pick = |v: &[f64], i: usize| -> Result<f64> {
            match v.len() {
                1 => Ok(v[0]),
                len if len == n => Ok(v[i]),
                len => Err(EcdError::LengthMismatch { left: len, right: n }),
            }
        };
        if n == 0 || alpha.is_empty() || beta.is_empty() || lambda.is_empty() {
            return Err(EcdError::EmptyComponents);
        }
        let comps = (0..n)
            .map(|i| EcdParams::new(pick(alpha, i)?, pick(beta, i)?, pick(lambda, i)?))
            .collect::<Result<Vec<_>>>()?;
        ComponentSet::new(comps)
    }

    pub fn components(&self) -> &[EcdParams] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_alpha(&self) -> f64 {
        let mut a: Vec<f64> = self.components.iter().map(|c| c.alpha()).collect();
        canonical_sum(&mut a)
    }

    /// `(β, λ)` when every component shares them exactly.
    pub fn common_beta_lambda(&self) -> Option<(f64, f64)> {
        let first = self.components[0];
        self.components
            .iter()
            .all(|c| c.beta() == first.beta() && c.lambda() == first.lambda())
            .then(|| (first.beta(), first.lambda()))
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.alpha()).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.beta()).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.lambda()).collect()
    }

    fn tails(&self, x: f64) -> Vec<TailState> {
        self.components.iter().map(|c| c.tail(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// Lifetime is the minimum of the component lifetimes.
    Series,
    /// Lifetime is the maximum of the component lifetimes.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub components: ComponentSet,
    pub kind: SystemKind,
}

/// Log-space values of a system lifetime at one abscissa. Entries may be
/// `-inf` where the quantity underflows even in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemPoint {
    pub x: f64,
    pub log_cdf: f64,
    pub log_sf: f64,
    pub log_pdf: f64,
}

impl SystemSpec {
    pub fn new(components: ComponentSet, kind: SystemKind) -> Self {
        SystemSpec { components, kind }
    }

    pub fn series(components: ComponentSet) -> Self {
        SystemSpec::new(components, SystemKind::Series)
    }

    pub fn parallel(components: ComponentSet) -> Self {
        SystemSpec::new(components, SystemKind::Parallel)
    }

    /// Evaluates cdf, survival and density logs at `x >= 0`.
    pub fn evaluate(&self, x: f64) -> Result<SystemPoint> {
        let x = check_abscissa(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: f64) -> SystemPoint {
        let comps = self.components.components();
        let tails = self.components.tails(x);
        let (log_cdf, log_sf) = match self.kind {
            SystemKind::Series => series_logs(&tails),
            SystemKind::Parallel => parallel_logs(&tails),
        };
        let log_pdf = if x == 0.0 {
            f64::NAN
        } else {
            match self.kind {
                // f = S * sum of component hazards
                SystemKind::Series => {
                    let mut terms: Vec<f64> =
                        comps.iter().zip(&tails).map(|(c, s)| c.log_hazard_at(s)).collect();
                    log_sf + log_sum_exp(&mut terms)
                }
                // f = F * sum of component reversed hazards
                SystemKind::Parallel => {
                    let mut terms: Vec<f64> = comps
                        .iter()
                        .zip(&tails)
                        .map(|(c, s)| c.log_reversed_hazard_at(s))
                        .collect();
                    log_cdf + log_sum_exp(&mut terms)
                }
            }
        };
        SystemPoint {
            x,
            log_cdf,
            log_sf,
            log_pdf,
        }
    }

    pub fn evaluate_grid(&self, xs: &[f64], exec: Execution) -> Result<Vec<SystemPoint>> {
        for &x in xs {
            check_abscissa(x)?;
        }
        Ok(exec.map(xs, |&x| self.evaluate_unchecked(x)))
    }

    pub fn sf(&self, x: f64) -> Result<Probability> {
        Ok(Probability::clamped(self.evaluate(x)?.log_sf.exp()))
    }

    pub fn cdf(&self, x: f64) -> Result<Probability> {
        Ok(Probability::clamped(self.evaluate(x)?.log_cdf.exp()))
    }

    pub fn log_sf(&self, x: f64) -> Result<LogProbability> {
        finite_log(x, self.evaluate(x)?.log_sf)
    }

    pub fn log_cdf(&self, x: f64) -> Result<LogProbability> {
        finite_log(x, self.evaluate(x)?.log_cdf)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(EcdError::Domain {
                name: "x",
                value: x,
                domain: "(0, inf)",
            });
        }
        Ok(self.evaluate(x)?.log_pdf.exp())
    }
}

fn series_logs(tails: &[TailState]) -> (f64, f64) {
    let mut log_sfs: Vec<f64> = tails.iter().map(|s| s.log_sf).collect();
    let log_sf = canonical_sum(&mut log_sfs);
    let mut nested: Vec<f64> = tails.iter().map(|s| s.nested_sf).collect();
    let log_cdf = log_complement_from_nested(log_sum_exp(&mut nested));
    (log_cdf, log_sf)
}

fn parallel_logs(tails: &[TailState]) -> (f64, f64) {
    let mut log_cdfs: Vec<f64> = tails.iter().map(|s| s.log_cdf).collect();
    let log_cdf = canonical_sum(&mut log_cdfs);
    let mut nested: Vec<f64> = tails.iter().map(|s| s.nested_cdf).collect();
    let log_sf = log_complement_from_nested(log_sum_exp(&mut nested));
    (log_cdf, log_sf)
}

fn finite_log(x: f64, v: f64) -> Result<LogProbability> {
    if v == f64::NEG_INFINITY && x > 0.0 {
        Err(EcdError::Saturated { x })
    } else {
        Ok(LogProbability::clamped(v))
    }
}

/// Survival of the series system, `prod_k [1 - (1 - e^{λ_k(1 - e^{x^{β_k}})})^{α_k}]`.
pub fn series_sf(c: &ComponentSet, x: f64) -> Result<Probability> {
    SystemSpec::series(c.clone()).sf(x)
}

pub fn series_log_sf(c: &ComponentSet, x: f64) -> Result<LogProbability> {
    SystemSpec::series(c.clone()).log_sf(x)
}

pub fn series_cdf(c: &ComponentSet, x: f64) -> Result<Probability> {
    SystemSpec::series(c.clone()).cdf(x)
}

pub fn series_log_cdf(c: &ComponentSet, x: f64) -> Result<LogProbability> {
    SystemSpec::series(c.clone()).log_cdf(x)
}

/// Distribution of the parallel system, `prod_k (1 - e^{λ_k(1 - e^{x^{β_k}})})^{α_k}`.
pub fn parallel_cdf(c: &ComponentSet, x: f64) -> Result<Probability> {
    SystemSpec::parallel(c.clone()).cdf(x)
}

pub fn parallel_log_cdf(c: &ComponentSet, x: f64) -> Result<LogProbability> {
    SystemSpec::parallel(c.clone()).log_cdf(x)
}

/// Survival of the parallel system.
///
/// Fails with [`EcdError::Saturated`] when the value is indistinguishable
/// from zero, so that callers never form `0 / 0` ratios from it.
pub fn parallel_sf(c: &ComponentSet, x: f64) -> Result<Probability> {
    let log_sf = SystemSpec::parallel(c.clone()).evaluate(x)?.log_sf;
    let sf = log_sf.exp();
    if sf == 0.0 && x > 0.0 {
        return Err(EcdError::Saturated { x });
    }
    Ok(Probability::clamped(sf))
}

pub fn parallel_log_sf(c: &ComponentSet, x: f64) -> Result<LogProbability> {
    SystemSpec::parallel(c.clone()).log_sf(x)
}

fn require_common(c: &ComponentSet) -> Result<(f64, f64)> {
    c.common_beta_lambda().ok_or(EcdError::Heterogeneous {
        what: "beta and lambda",
    })
}

/// Density of a parallel system whose components share `β` and `λ`:
/// the maximum is then Exponentiated Chen with `α = Σ α_k`.
pub fn parallel_pdf_common(c: &ComponentSet, x: f64) -> Result<f64> {
    let (beta, lambda) = require_common(c)?;
    EcdParams::new(c.total_alpha(), beta, lambda)?.pdf(x)
}

/// `ln(f_B / f_A)` for two common-`(β, λ)` parallel systems.
pub fn log_lr_ratio_common(a: &ComponentSet, b: &ComponentSet, x: f64) -> Result<f64> {
    let (beta, lambda) = require_common(a)?;
    if require_common(b)? != (beta, lambda) {
        return Err(EcdError::Heterogeneous {
            what: "beta and lambda across systems",
        });
    }
    let chen = EcdParams::new(1.0, beta, lambda)?;
    let log_chen = chen.log_cdf(x)?.value();
    if !(x > 0.0) {
        return Err(EcdError::Domain {
            name: "x",
            value: x,
            domain: "(0, inf)",
        });
    }
    let (sa, sb) = (a.total_alpha(), b.total_alpha());
    let diff = sb - sa;
    // 0 * -inf when the sums agree
    let power = if diff == 0.0 { 0.0 } else { diff * log_chen };
    Ok((sb / sa).ln() + power)
}

/// `f_B(x) / f_A(x) = (Σα_B / Σα_A) · (1 - e^{λ(1 - e^{x^β})})^{Σα_B - Σα_A}`.
pub fn lr_ratio_common(a: &ComponentSet, b: &ComponentSet, x: f64) -> Result<f64> {
    Ok(log_lr_ratio_common(a, b, x)?.exp())
}
