//! Order statistics shared by the iteration and right-hand-side reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linearly interpolated quantile of an ascending sample (the `(n-1)p`
/// convention).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Min, whiskers, quartiles and max. `low = Q1 - 1.5 IQR`,
/// `high = Q3 + 1.5 IQR`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SevenNumber {
    pub min: f64,
    pub low: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub high: f64,
    pub max: f64,
}

impl SevenNumber {
    pub fn from_sample(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q1 = quantile_sorted(&sorted, 0.25);
        let q3 = quantile_sorted(&sorted, 0.75);
        let iqr = q3 - q1;
        Ok(Self {
            min: sorted[0],
            low: q1 - 1.5 * iqr,
            q1,
            median: quantile_sorted(&sorted, 0.5),
            q3,
            high: q3 + 1.5 * iqr,
            max: sorted[sorted.len() - 1],
        })
    }

    pub fn as_array(&self) -> [f64; 7] {
        [self.min, self.low, self.q1, self.median, self.q3, self.high, self.max]
    }
}
