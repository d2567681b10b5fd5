//! Exponentiated Chen distribution of a single component.
//!
//! With `t = x^β` the cdf is `F(x) = (1 - e^{λ(1 - e^t)})^α` on `x > 0`;
//! `α = 1` gives the two-parameter Chen law. Every tail-sensitive quantity
//! is derived from the log of the Chen survival `z = λ(1 - e^t) = -λ expm1(t)`
//! so that neither `F` near 1 nor `1 - F` near 0 loses precision.

use serde::{Deserialize, Serialize};

use crate::error::{check_abscissa, check_positive, EcdError, Result};
use crate::math::{log1mexp, log_complement_from_nested, nested_log_of_complement, pow_pos};

/// `z` below which `e^z` is negligible next to 1 for every α we accept.
const LINEAR_TAIL_CUTOFF: f64 = -690.0;

/// Parameters `(α, β, λ)` of one component. All three are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct EcdParams {
    alpha: f64,
    beta: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: f64,
    beta: f64,
    lambda: f64,
}

impl TryFrom<RawParams> for EcdParams {
    type Error = EcdError;
    fn try_from(raw: RawParams) -> Result<Self> {
        EcdParams::new(raw.alpha, raw.beta, raw.lambda)
    }
}

impl From<EcdParams> for RawParams {
    fn from(p: EcdParams) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
            lambda: p.lambda,
        }
    }
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(EcdError::Domain {
                name: "probability",
                value,
                domain: "[0, 1]",
            })
        }
    }

    // callers guarantee the range
    pub(crate) fn clamped(value: f64) -> Self {
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Natural log of a probability. `-inf` stands for a probability that is
/// exactly zero (for instance the cdf at `x = 0`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LogProbability(f64);

impl LogProbability {
    pub fn new(value: f64) -> Result<Self> {
        if value <= 0.0 {
            Ok(LogProbability(value))
        } else {
            Err(EcdError::Domain {
                name: "log probability",
                value,
                domain: "[-inf, 0]",
            })
        }
    }

    pub(crate) fn clamped(value: f64) -> Self {
        LogProbability(value.min(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> Probability {
        Probability(self.0.exp())
    }
}

/// Log-space state of one component at one abscissa.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailState {
    /// `ln x`
    pub ln_x: f64,
    /// `x^β`
    pub t: f64,
    /// `λ(1 - e^t)`, the log of the Chen survival
    pub z: f64,
    /// `ln(1 - e^z)`
    pub log_chen_cdf: f64,
    pub log_cdf: f64,
    pub log_sf: f64,
    /// `ln(-log_cdf)`
    pub nested_cdf: f64,
    /// `ln(-log_sf)`
    pub nested_sf: f64,
}

impl EcdParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        Ok(EcdParams {
            alpha: check_positive("alpha", alpha)?,
            beta: check_positive("beta", beta)?,
            lambda: check_positive("lambda", lambda)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        EcdParams::new(alpha, self.beta, self.lambda)
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        EcdParams::new(self.alpha, beta, self.lambda)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        EcdParams::new(self.alpha, self.beta, lambda)
    }

    /// Unchecked evaluation for `x >= 0`.
    pub(crate) fn tail(&self, x: f64) -> TailState {
        let t = pow_pos(x, self.beta);
        let s = t.exp_m1();
        let z = if s.is_infinite() { f64::NEG_INFINITY } else { -self.lambda * s };
        let log_chen_cdf = log1mexp(z);
        let log_cdf = self.alpha * log_chen_cdf;
        let nested_cdf = self.alpha.ln() + nested_log_of_complement(z);
        let log_sf = log_complement_from_nested(nested_cdf);
        let nested_sf = if log_cdf < -700.0 {
            log_cdf
        } else {
            (-log_sf).ln()
        };
        TailState {
            ln_x: x.ln(),
            t,
            z,
            log_chen_cdf,
            log_cdf,
            log_sf,
            nested_cdf,
            nested_sf,
        }
    }

    pub fn cdf(&self, x: f64) -> Result<Probability> {
        let x = check_abscissa(x)?;
        let chen = chen_cdf_unchecked(self.beta, self.lambda, x);
        Ok(Probability::clamped(chen.powf(self.alpha)))
    }

    pub fn log_cdf(&self, x: f64) -> Result<LogProbability> {
        let x = check_abscissa(x)?;
        Ok(LogProbability::clamped(self.tail(x).log_cdf))
    }

    /// Survival `1 - F(x)`, evaluated without forming `1 - F`.
    pub fn sf(&self, x: f64) -> Result<Probability> {
        let x = check_abscissa(x)?;
        Ok(Probability::clamped(self.tail(x).log_sf.exp()))
    }

    pub fn log_sf(&self, x: f64) -> Result<LogProbability> {
        let x = check_abscissa(x)?;
        Ok(LogProbability::clamped(self.tail(x).log_sf))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        let x = strictly_positive_abscissa(x)?;
        Ok(self.log_pdf_at(&self.tail(x)))
    }

    pub(crate) fn log_pdf_at(&self, s: &TailState) -> f64 {
        if s.z == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.alpha.ln()
            + (self.alpha - 1.0) * s.log_chen_cdf
            + self.beta.ln()
            + self.lambda.ln()
            + (self.beta - 1.0) * s.ln_x
            + s.t
            + s.z
    }

    /// `f / F`, in closed form.
    pub fn reversed_hazard(&self, x: f64) -> Result<f64> {
        let x = strictly_positive_abscissa(x)?;
        Ok(self.log_reversed_hazard_at(&self.tail(x)).exp())
    }

    pub(crate) fn log_reversed_hazard_at(&self, s: &TailState) -> f64 {
        if s.z == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.alpha.ln()
            + self.beta.ln()
            + self.lambda.ln()
            + (self.beta - 1.0) * s.ln_x
            + s.t
            + s.z
            - s.log_chen_cdf
    }

    /// `f / (1 - F)`.
    ///
    /// Fails with [`EcdError::Saturated`] once the survival drops below the
    /// smallest positive normal `f64`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let x = strictly_positive_abscissa(x)?;
        let s = self.tail(x);
        if s.log_sf < f64::MIN_POSITIVE.ln() {
            return Err(EcdError::Saturated { x });
        }
        Ok(self.log_hazard_at(&s).exp())
    }

    pub(crate) fn log_hazard_at(&self, s: &TailState) -> f64 {
        // z - ln(sf): sf / e^z -> α as e^z -> 0
        let z_minus_log_sf = if s.z < LINEAR_TAIL_CUTOFF {
            -self.alpha.ln()
        } else {
            s.z - s.log_sf
        };
        self.alpha.ln()
            + (self.alpha - 1.0) * s.log_chen_cdf
            + self.beta.ln()
            + self.lambda.ln()
            + (self.beta - 1.0) * s.ln_x
            + s.t
            + z_minus_log_sf
    }

    /// Closed-form inverse of the cdf,
    /// `x = [ln(1 - ln(1 - u^{1/α}) / λ)]^{1/β}`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(EcdError::Domain {
                name: "u",
                value: u,
                domain: "(0, 1)",
            });
        }
        // ln(1 - u^{1/α})
        let log_chen_sf = log1mexp(u.ln() / self.alpha);
        let t = (-log_chen_sf / self.lambda).ln_1p();
        Ok((t.ln() / self.beta).exp())
    }
}

fn strictly_positive_abscissa(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(EcdError::Domain {
            name: "x",
            value: x,
            domain: "(0, inf)",
        })
    }
}

fn chen_cdf_unchecked(beta: f64, lambda: f64, x: f64) -> f64 {
    let s = pow_pos(x, beta).exp_m1();
    if s.is_infinite() {
        1.0
    } else {
        -(-lambda * s).exp_m1()
    }
}

/// Two-parameter Chen cdf `1 - e^{λ(1 - e^{x^β})}`.
pub fn chen_cdf(beta: f64, lambda: f64, x: f64) -> Result<Probability> {
    check_positive("beta", beta)?;
    check_positive("lambda", lambda)?;
    let x = check_abscissa(x)?;
    Ok(Probability::clamped(chen_cdf_unchecked(beta, lambda, x)))
}

/// Survival at `t` of `T = (e^{X^β} - 1)^{1/β}` for `X ~ Chen(β, λ)`.
///
/// Evaluated through the Chen survival at `x = (ln(1 + t^β))^{1/β}`; the
/// result is the Weibull survival `e^{-λ t^β}`.
pub fn weibull_transform_sf(beta: f64, lambda: f64, t: f64) -> Result<Probability> {
    let chen = EcdParams::new(1.0, beta, lambda)?;
    let t = strictly_positive_abscissa(t)?;
    let x = (pow_pos(t, beta).ln_1p().ln() / beta).exp();
    chen.sf(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, l: f64) -> EcdParams {
        EcdParams::new(a, b, l).unwrap()
    }

    // 50-digit values, see tests/oracle.rs for the generator
    const CDF_111_AT_1: f64 = 0.820_625_921_265_983;
    const PDF_111_AT_1: f64 = 0.487_589_298_719_261;
    const RH_111_AT_1: f64 = 0.594_167_556_841_313;

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(EcdParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(EcdParams::new(1.0, 0.0, 1.0).is_err());
        assert!(EcdParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(EcdParams::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn chen_cdf_values() {
        assert!((chen_cdf(1.0, 1.0, 1.0).unwrap().value() - CDF_111_AT_1).abs() < 1e-15);
        assert!(chen_cdf(1.0, 1.0, 1e-300).unwrap().value() < 1e-299);
        assert_eq!(chen_cdf(2.0, 2.0, 10.0).unwrap().value(), 1.0);
        assert!(chen_cdf(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn cdf_alpha_one_is_chen() {
        for x in [0.01, 0.3, 1.0, 1.7, 2.5] {
            assert_eq!(
                p(1.0, 1.3, 0.7).cdf(x).unwrap().value(),
                chen_cdf(1.3, 0.7, x).unwrap().value()
            );
        }
        let sq = p(2.0, 1.0, 1.0).cdf(1.0).unwrap().value();
        assert!((sq - 0.673_426_902_653_643).abs() < 1e-15);
    }

    #[test]
    fn zero_is_continuity_point() {
        let d = p(0.7, 2.0, 0.8);
        assert_eq!(d.cdf(0.0).unwrap().value(), 0.0);
        assert_eq!(d.sf(0.0).unwrap().value(), 1.0);
        assert_eq!(d.log_cdf(0.0).unwrap().value(), f64::NEG_INFINITY);
        assert!(d.cdf(-1e-12).is_err());
        assert!(d.pdf(0.0).is_err());
    }

    #[test]
    fn log_cdf_linear_in_alpha() {
        let one = p(1.0, 1.0, 1.0).log_cdf(1.0).unwrap().value();
        let three = p(3.0, 1.0, 1.0).log_cdf(1.0).unwrap().value();
        assert!((three - 3.0 * one).abs() < 1e-15);
        assert!((one - CDF_111_AT_1.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_cdf_near_one() {
        let l = p(1.0, 2.0, 2.0).log_cdf(1.9524).unwrap().value();
        assert!(l.is_finite() && l > -1e-8 && l < 0.0);
    }

    #[test]
    fn deep_tail_sf_follows_first_order_term() {
        let d = p(0.7, 2.0, 0.8);
        let x: f64 = 1.9524;
        let z = 0.8 * (1.0 - (x * x).exp());
        let lead = 0.7 * z.exp();
        let sf = d.sf(x).unwrap().value();
        assert!(sf > 1e-300);
        assert!((sf / lead - 1.0).abs() < 1e-10);
        // still finite where e^z underflows
        let far = d.log_sf(6.0).unwrap().value();
        let z_far = 0.8 * (1.0 - 36f64.exp());
        assert!(far.is_finite());
        assert!((far - (0.7f64.ln() + z_far)).abs() <= 1e-12 * z_far.abs());
    }

    #[test]
    fn complement_identity() {
        let d = p(0.7, 2.0, 0.8);
        for x in [0.5, 1.0, 1.5] {
            let s = d.sf(x).unwrap().value() + d.cdf(x).unwrap().value();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pdf_values() {
        assert!((p(1.0, 1.0, 1.0).pdf(1.0).unwrap() - PDF_111_AT_1).abs() < 1e-14);
        let d = p(0.7, 2.0, 0.8);
        let h = 1e-5;
        let fd = (d.cdf(0.8 + h).unwrap().value() - d.cdf(0.8 - h).unwrap().value()) / (2.0 * h);
        assert!((fd - d.pdf(0.8).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn reversed_hazard_values() {
        assert!((p(1.0, 1.0, 1.0).reversed_hazard(1.0).unwrap() - RH_111_AT_1).abs() < 1e-14);
        let d = p(0.7, 2.0, 0.8);
        for x in [0.3, 0.9, 1.7] {
            let direct = d.pdf(x).unwrap() / d.cdf(x).unwrap().value();
            let rh = d.reversed_hazard(x).unwrap();
            assert!((rh / direct - 1.0).abs() < 1e-10);
        }
        let r1 = p(1.0, 2.0, 0.8).reversed_hazard(1.1).unwrap();
        let r2 = p(2.0, 2.0, 0.8).reversed_hazard(1.1).unwrap();
        assert!((r2 / r1 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hazard_values() {
        // Chen hazard βλ x^{β-1} e^{x^β} at (1, 1, x = 1) is e
        let h = p(1.0, 1.0, 1.0).hazard(1.0).unwrap();
        assert!((h - std::f64::consts::E).abs() < 1e-13);
        let d = p(0.7, 2.0, 0.8);
        let x = 0.5;
        let prod = d.hazard(x).unwrap() * d.sf(x).unwrap().value();
        assert!((prod / d.pdf(x).unwrap() - 1.0).abs() < 1e-10);
        for i in 1..=80 {
            assert!(d.hazard(i as f64 * 0.03).unwrap() >= 0.0);
        }
        assert!(matches!(d.hazard(7.0), Err(EcdError::Saturated { .. })));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let one = p(1.0, 1.0, 1.0).quantile(CDF_111_AT_1).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let d = p(0.6, 3.0, 2.0);
        for u in [0.01, 0.5, 0.99] {
            let back = d.cdf(d.quantile(u).unwrap()).unwrap().value();
            assert!((back - u).abs() <= 1e-10);
        }
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(1e-300).unwrap() < 1e-50);
        assert!(d.quantile(1.0 - 1e-16).unwrap() > d.quantile(0.999).unwrap());
    }

    #[test]
    fn weibull_transform_matches_weibull_survival() {
        let e1 = (-1.0f64).exp();
        assert!((weibull_transform_sf(2.0, 1.0, 1.0).unwrap().value() - e1).abs() < 1e-12);
        assert!((weibull_transform_sf(1.0, 2.0, 0.5).unwrap().value() - e1).abs() < 1e-12);
        assert!(weibull_transform_sf(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn saturated_component_has_no_nan() {
        let d = p(0.6, 7.7, 2.0);
        let s = d.tail(9.9);
        assert_eq!(s.z, f64::NEG_INFINITY);
        assert_eq!(s.log_cdf, 0.0);
        assert_eq!(s.log_sf, f64::NEG_INFINITY);
        assert_eq!(d.log_pdf_at(&s), f64::NEG_INFINITY);
        assert!(!d.log_hazard_at(&s).is_nan());
    }
}
