use serde::{Deserialize, Serialize};

use crate::error::{EcdError, Result};

/// Strictly increasing, strictly positive evaluation points (at least two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = EcdError;
    fn try_from(points: Vec<f64>) -> Result<Self> {
        Grid::new(points)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.points
    }
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(EcdError::InvalidGrid {
                reason: "need at least two points",
            });
        }
        if !points.iter().all(|&x| x.is_finite() && x > 0.0) {
            return Err(EcdError::InvalidGrid {
                reason: "points must be finite and > 0",
            });
        }
        if !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(EcdError::InvalidGrid {
                reason: "points must be strictly increasing",
            });
        }
        Ok(Grid { points })
    }

    /// `count` evenly spaced points from `min` to `max` inclusive.
    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(EcdError::InvalidGrid {
                reason: "need at least two points",
            });
        }
        let step = (max - min) / (count - 1) as f64;
        let mut pts: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();
        pts[count - 1] = max;
        Grid::new(pts)
    }

    /// `count` logarithmically spaced points from `min` to `max` inclusive.
    pub fn logarithmic(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0) {
            return Err(EcdError::InvalidGrid {
                reason: "log spacing needs min > 0",
            });
        }
        if count < 2 {
            return Err(EcdError::InvalidGrid {
                reason: "need at least two points",
            });
        }
        let (lo, hi) = (min.ln(), max.ln());
        let step = (hi - lo) / (count - 1) as f64;
        let mut pts: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
        pts[0] = min;
        pts[count - 1] = max;
        Grid::new(pts)
    }

    /// Inserts the midpoint of every interval.
    pub fn refined(&self) -> Grid {
        let mut pts = Vec::with_capacity(2 * self.points.len() - 1);
        for w in self.points.windows(2) {
            pts.push(w[0]);
            pts.push(0.5 * (w[0] + w[1]));
        }
        pts.push(*self.points.last().unwrap());
        Grid { points: pts }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
