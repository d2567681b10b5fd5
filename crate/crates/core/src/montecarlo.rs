//! Seeded inverse-transform sampling and empirical checks.
//!
//! Draws are produced in fixed-size partitions; partition `p` uses the
//! ChaCha8 stream `p` of the run seed. Output therefore depends only on the
//! seed and the sample size, never on the number of worker threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::EcdParams;
use crate::error::{EcdError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::ordering::{Direction, OrderingVerdict, Relation, Witness};
use crate::systems::{SystemKind, SystemSpec};

/// Draws per partition.
pub const PARTITION: usize = 4096;
/// Half-width of the acceptance band in binomial standard deviations.
pub const BAND_SIGMAS: f64 = 3.0;
/// Smallest sample size accepted by [`empirical_st_check`].
pub const MIN_ST_SAMPLES: usize = 10_000;

/// Mixed into the seed for the second system of [`empirical_st_check`].
pub const SECOND_SYSTEM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Uniform on the open interval `(0, 1)`: 53 random bits, offset by half
/// a unit so neither endpoint is reachable.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub draws: Vec<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn sorted(&self) -> SortedSample {
        let mut v = self.draws.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        SortedSample { values: v }
    }
}

fn partitioned<F>(n: usize, seed: u64, exec: Execution, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    let parts = n.div_ceil(PARTITION);
    let chunks = exec.map_range(parts, |p| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(p as u64);
        let len = PARTITION.min(n - p * PARTITION);
        (0..len).map(|_| draw(&mut rng)).collect::<Vec<f64>>()
    });
    chunks.concat()
}

fn component_draw(c: &EcdParams, rng: &mut ChaCha8Rng) -> f64 {
    c.quantile(open_unit(rng))
        .expect("quantile is defined on the open unit interval")
}

pub fn sample_component(c: &EcdParams, n: usize, seed: u64) -> SampleBatch {
    sample_component_with(c, n, seed, Execution::default())
}

pub fn sample_component_with(c: &EcdParams, n: usize, seed: u64, exec: Execution) -> SampleBatch {
    SampleBatch {
        seed,
        draws: partitioned(n, seed, exec, |rng| component_draw(c, rng)),
    }
}

/// Lifetimes of a system: per draw, one lifetime per component in order,
/// reduced by `min` (series) or `max` (parallel).
pub fn sample_system(s: &SystemSpec, n: usize, seed: u64) -> SampleBatch {
    sample_system_with(s, n, seed, Execution::default())
}

pub fn sample_system_with(s: &SystemSpec, n: usize, seed: u64, exec: Execution) -> SampleBatch {
    let comps = s.components.components();
    let draws = partitioned(n, seed, exec, |rng| {
        let lifetimes = comps.iter().map(|c| component_draw(c, rng));
        match s.kind {
            SystemKind::Series => lifetimes.fold(f64::INFINITY, f64::min),
            SystemKind::Parallel => lifetimes.fold(0.0, f64::max),
        }
    });
    SampleBatch { seed, draws }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fraction of draws strictly greater than `x`.
    pub fn sf(&self, x: f64) -> f64 {
        let at_or_below = self.values.partition_point(|&v| v <= x);
        (self.values.len() - at_or_below) as f64 / self.values.len() as f64
    }
}

pub fn empirical_sf(batch: &SampleBatch, x: f64) -> f64 {
    batch.sorted().sf(x)
}

/// Kolmogorov–Smirnov distance between the sample and a cdf.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &SortedSample, cdf: F) -> f64 {
    let n = sample.len() as f64;
    sample
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// `sqrt(p (1 - p) / n)`.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfComparison {
    pub x: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub sigma: f64,
    pub within_band: bool,
}

/// Empirical against analytic survival on every grid point, with a
/// `BAND_SIGMAS` binomial band around the analytic value.
pub fn compare_sf(s: &SystemSpec, sample: &SortedSample, grid: &Grid) -> Result<Vec<SfComparison>> {
    let n = sample.len();
    if n == 0 {
        return Err(EcdError::InvalidParameter {
            name: "sample size",
            value: 0.0,
            requirement: "at least 1",
        });
    }
    grid.points()
        .iter()
        .map(|&x| {
            let analytic = s.sf(x)?.value();
            let empirical = sample.sf(x);
            let sigma = binomial_sigma(analytic, n);
            Ok(SfComparison {
                x,
                analytic,
                empirical,
                sigma,
                within_band: (empirical - analytic).abs() <= BAND_SIGMAS * sigma,
            })
        })
        .collect()
}

/// Usual stochastic order decided from two samples: a point counts only
/// where the two `BAND_SIGMAS` bands around the empirical survivals are
/// disjoint; other points are listed as inconclusive.
pub fn empirical_st_check(
    a: &SystemSpec,
    b: &SystemSpec,
    grid: &Grid,
    n: usize,
    seed: u64,
) -> Result<OrderingVerdict> {
    if n < MIN_ST_SAMPLES {
        return Err(EcdError::InvalidParameter {
            name: "sample size",
            value: n as f64,
            requirement: "at least 10000",
        });
    }
    if a.kind != b.kind {
        return Err(EcdError::KindMismatch);
    }
    let sa = sample_system(a, n, seed).sorted();
    let sb = sample_system(b, n, seed ^ SECOND_SYSTEM_SALT).sorted();

    let mut a_below = Vec::new();
    let mut a_above = Vec::new();
    let mut inconclusive = Vec::new();
    for &x in grid.points() {
        let (pa, pb) = (sa.sf(x), sb.sf(x));
        let (wa, wb) = (BAND_SIGMAS * binomial_sigma(pa, n), BAND_SIGMAS * binomial_sigma(pb, n));
        let w = Witness::Crossing {
            x,
            value_a: pa,
            value_b: pb,
            log_a: pa.ln(),
            log_b: pb.ln(),
        };
        if pa + wa < pb - wb {
            a_below.push(w);
        } else if pb + wb < pa - wa {
            a_above.push(w);
        } else {
            inconclusive.push(x);
        }
    }
    let (direction, both, witnesses) = match (a_below.is_empty(), a_above.is_empty()) {
        (true, true) => (Direction::ALeB, true, vec![]),
        (false, true) => (Direction::ALeB, false, vec![]),
        (true, false) => (Direction::BLeA, false, vec![]),
        (false, false) => (Direction::Neither, false, vec![a_below[0], a_above[0]]),
    };
    Ok(OrderingVerdict {
        relation: Relation::St,
        direction,
        both_directions: both,
        witnesses,
        saturated_points: vec![],
        evaluated_points: grid.len() - inconclusive.len(),
        inconclusive_points: inconclusive,
    })
}
