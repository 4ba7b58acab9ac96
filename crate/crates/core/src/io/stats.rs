//! Right-hand-side and objective statistics per coding distribution, and
//! their CSV form.
//!
//! For each instance the mean of `b` (and of `c`) is taken; the batch of
//! means is then reduced to min, whiskers, quartiles and max.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{generate, GeneratorConfig};
use crate::distributions::DistributionKind;
use crate::error::{Error, Result};
use crate::summary::SevenNumber;

pub const CSV_HEADER: &str = "distribution,Min,Low,Q1,Median,Q3,High,Max";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub distribution: String,
    pub rhs: SevenNumber,
    pub objective: SevenNumber,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub count: usize,
    pub rows: Vec<SummaryRow>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Generate `count` instances for `kind` (stream indices `0..count` under
/// a seed derived from `master_seed` and the kind) and summarize the means
/// of `b` and `c`. `base` supplies every other setting; its `dist_x1` is
/// replaced by the kind's reference parameters.
pub fn summarize_kind(
    base: &GeneratorConfig,
    kind: DistributionKind,
    count: usize,
    master_seed: u64,
) -> Result<SummaryRow> {
    if count == 0 {
        return Err(Error::EmptyBatch);
    }
    let config = GeneratorConfig {
        dist_x1: kind.reference_spec(),
        ..base.clone()
    };
    let offset = DistributionKind::ALL.iter().position(|k| *k == kind).unwrap_or(0) as u64;
    let seed = master_seed.wrapping_add(offset);
    let means: Vec<(f64, f64)> = (0..count as u64)
        .into_par_iter()
        .map(|i| generate(&config, seed, i).map(|g| (mean(&g.instance.b), mean(&g.instance.c))))
        .collect::<Result<_>>()?;
    let (bs, cs): (Vec<f64>, Vec<f64>) = means.into_iter().unzip();
    Ok(SummaryRow {
        distribution: kind.name().to_string(),
        rhs: SevenNumber::from_sample(&bs)?,
        objective: SevenNumber::from_sample(&cs)?,
    })
}

/// One row per distribution kind.
pub fn summarize_batch(base: &GeneratorConfig, count: usize, master_seed: u64) -> Result<BatchSummary> {
    let rows = DistributionKind::ALL
        .iter()
        .map(|&k| summarize_kind(base, k, count, master_seed))
        .collect::<Result<_>>()?;
    Ok(BatchSummary { count, rows })
}

/// CSV text for the `b` statistics (`objective == false`) or the `c`
/// statistics.
pub fn stats_csv_string(summary: &BatchSummary, objective: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &summary.rows {
        let s = if objective { &row.objective } else { &row.rhs };
        out.push_str(&row.distribution);
        for v in s.as_array() {
            let _ = write!(out, ",{v:e}");
        }
        out.push('\n');
    }
    out
}

pub fn stats_csv(summary: &BatchSummary, objective: bool, path: &Path) -> Result<()> {
    if summary.rows.is_empty() {
        return Err(Error::EmptyBatch);
    }
    fs::write(path, stats_csv_string(summary, objective)).map_err(|e| Error::io(path, e))
}
