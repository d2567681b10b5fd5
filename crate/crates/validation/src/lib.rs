//! Multiprecision reference values computed straight from the defining
//! formulas, with no log-space tricks, at 1280 bits (enough to resolve
//! `1 - F` down to about 1e-380).
//!
//! Test support for the workspace; the acceptance run lives in this
//! crate's `tests/acceptance.rs`.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const PREC: usize = 1280;
const RM: RoundingMode = RoundingMode::ToEven;
/// Beyond this `λ(e^t - 1)` the Chen survival is below `e^{-1e6}` and is
/// taken as exactly zero.
const SATURATION: f64 = 1e6;

pub struct Oracle {
    cc: Consts,
}

/// Survival and distribution of one component, as exact big numbers.
pub struct Big {
    pub cdf: BigFloat,
    pub sf: BigFloat,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        Oracle {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn big(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, PREC)
    }

    pub fn to_f64(&mut self, v: &BigFloat) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        let s = v.format(Radix::Dec, RM, &mut self.cc).expect("format");
        s.parse().unwrap_or_else(|_| panic!("unparsable oracle value {s}"))
    }

    fn exp(&mut self, v: &BigFloat) -> BigFloat {
        v.exp(PREC, RM, &mut self.cc)
    }

    fn ln(&mut self, v: &BigFloat) -> BigFloat {
        v.ln(PREC, RM, &mut self.cc)
    }

    fn powf(&mut self, base: &BigFloat, e: &BigFloat) -> BigFloat {
        base.pow(e, PREC, RM, &mut self.cc)
    }

    fn one(&self) -> BigFloat {
        BigFloat::from_word(1, PREC)
    }

    /// `F = (1 - e^{λ(1 - e^{x^β})})^α` and `1 - F`.
    pub fn component(&mut self, alpha: f64, beta: f64, lambda: f64, x: f64) -> Big {
        let one = self.one();
        if x == 0.0 {
            return Big {
                cdf: BigFloat::from_word(0, PREC),
                sf: one,
            };
        }
        let t = self.powf(&self.big(x), &self.big(beta));
        let et = self.exp(&t);
        let s = et.sub(&one, PREC, RM);
        let m = s.mul(&self.big(lambda), PREC, RM);
        let chen_sf = if m.cmp(&self.big(SATURATION)) == Some(1) {
            BigFloat::from_word(0, PREC)
        } else {
            self.exp(&m.neg())
        };
        let chen = one.sub(&chen_sf, PREC, RM);
        let cdf = if chen.is_zero() {
            chen
        } else {
            let l = self.ln(&chen).mul(&self.big(alpha), PREC, RM);
            self.exp(&l)
        };
        let sf = one.sub(&cdf, PREC, RM);
        Big { cdf, sf }
    }

    /// `αβλ x^{β-1} e^{x^β} e^{λ(1-e^{x^β})} c^{α-1}`.
    pub fn pdf(&mut self, alpha: f64, beta: f64, lambda: f64, x: f64) -> f64 {
        let one = self.one();
        let bx = self.big(x);
        let t = self.powf(&bx, &self.big(beta));
        let et = self.exp(&t);
        let z = one.sub(&et, PREC, RM).mul(&self.big(lambda), PREC, RM);
        let ez = self.exp(&z);
        let chen = one.sub(&ez, PREC, RM);
        let xb1 = self.powf(&bx, &self.big(beta - 1.0));
        let ca1 = self.powf(&chen, &self.big(alpha - 1.0));
        let coef = self.big(alpha * beta).mul(&self.big(lambda), PREC, RM);
        let v = coef
            .mul(&xb1, PREC, RM)
            .mul(&et, PREC, RM)
            .mul(&ez, PREC, RM)
            .mul(&ca1, PREC, RM);
        self.to_f64(&v)
    }

    /// `(cdf, sf)` of the minimum of independent components.
    pub fn series(&mut self, comps: &[(f64, f64, f64)], x: f64) -> Big {
        let mut sf = self.one();
        for &(a, b, l) in comps {
            let c = self.component(a, b, l, x);
            sf = sf.mul(&c.sf, PREC, RM);
        }
        let cdf = self.one().sub(&sf, PREC, RM);
        Big { cdf, sf }
    }

    /// `(cdf, sf)` of the maximum of independent components.
    pub fn parallel(&mut self, comps: &[(f64, f64, f64)], x: f64) -> Big {
        let mut cdf = self.one();
        for &(a, b, l) in comps {
            let c = self.component(a, b, l, x);
            cdf = cdf.mul(&c.cdf, PREC, RM);
        }
        let sf = self.one().sub(&cdf, PREC, RM);
        Big { cdf, sf }
    }

    pub fn ratio(&mut self, num: &BigFloat, den: &BigFloat) -> f64 {
        let r = num.div(den, PREC, RM);
        self.to_f64(&r)
    }

    pub fn value(&mut self, v: &BigFloat) -> f64 {
        self.to_f64(v)
    }
}

pub fn comps(alpha: &[f64], beta: &[f64], lambda: &[f64]) -> Vec<(f64, f64, f64)> {
    let n = alpha.len().max(beta.len()).max(lambda.len());
    let pick = |v: &[f64], i: usize| if v.len() == 1 { v[0] } else { v[i] };
    (0..n)
        .map(|i| (pick(alpha, i), pick(beta, i), pick(lambda, i)))
        .collect()
}
