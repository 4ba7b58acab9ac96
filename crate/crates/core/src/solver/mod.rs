//! Dense revised simplex for `max c^T x  s.t.  Ax <= b, x >= 0`.
//!
//! The problem is solved in inequality form with one slack per row. When
//! some `b_i < 0` a first phase minimizes the sum of artificial variables
//! (column `-e_i` for each such row) before the objective is optimized.
//! The basis is kept as a dense LU factorization plus product-form eta
//! updates and is refactored every [`REFACTOR_EVERY`] pivots.

mod lu;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{inf_norm, LpInstance};
use crate::summary::quantile_sorted;
use lu::DenseLu;

pub const REFACTOR_EVERY: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotRule {
    /// Most negative reduced cost; falls back to Bland after a long run of
    /// degenerate pivots.
    Dantzig,
    /// Smallest eligible index for both entering and leaving variables.
    Bland,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    IterationLimit,
    Infeasible,
    Unbounded,
    Numerical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// `c^T x` at the final basic solution.
    pub objective: f64,
    pub x: Vec<f64>,
    /// Pivots over both phases.
    pub iterations: usize,
    /// Rule in effect when the solve stopped.
    pub pivot_rule: PivotRule,
    pub switched_to_bland: bool,
}

/// `1/eps^0.75`: basis pivot ratios above this are reported as
/// [`SolveStatus::Numerical`].
fn conditioning_limit() -> f64 {
    f64::EPSILON.powf(-0.75)
}

struct Simplex<'a> {
    inst: &'a LpInstance,
    m: usize,
    n: usize,
    /// Rows carrying an artificial column, in column order.
    art_rows: Vec<usize>,
    basis: Vec<usize>,
    /// Basis position of each column, if basic.
    position: Vec<Option<usize>>,
    lu: DenseLu,
    etas: Vec<(usize, Vec<f64>)>,
    xb: Vec<f64>,
    iterations: usize,
    rule: PivotRule,
    switched: bool,
    degenerate_run: usize,
}

enum Outcome {
    Optimal,
    Stopped(SolveStatus),
}

impl<'a> Simplex<'a> {
    fn ncols(&self) -> usize {
        self.n + self.m + self.art_rows.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        if j < self.n {
            self.inst.a.column(j)
        } else {
            let mut e = vec![0.0; m];
            if j < self.n + m {
                e[j - self.n] = 1.0;
            } else {
                e[self.art_rows[j - self.n - m]] = -1.0;
            }
            e
        }
    }

    /// `col_j . y` without materializing unit columns.
    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (0..self.m).map(|i| self.inst.a.get(i, j) * y[i]).sum()
        } else if j < self.n + self.m {
            y[j - self.n]
        } else {
            -y[self.art_rows[j - self.n - self.m]]
        }
    }

    fn ftran(&self, v: &[f64]) -> Vec<f64> {
        let mut x = self.lu.solve(v);
        for (r, d) in &self.etas {
            let xr = x[*r] / d[*r];
            for (i, xi) in x.iter_mut().enumerate() {
                if i == *r {
                    *xi = xr;
                } else {
                    *xi -= d[i] * xr;
                }
            }
        }
        x
    }

    fn btran(&self, c: &[f64]) -> Vec<f64> {
        let mut v = c.to_vec();
        for (r, d) in self.etas.iter().rev() {
            let s: f64 = d
                .iter()
                .zip(&v)
                .enumerate()
                .filter(|(i, _)| i != r)
                .map(|(_, (di, vi))| di * vi)
                .sum();
            v[*r] = (v[*r] - s) / d[*r];
        }
        self.lu.solve_transpose(&v)
    }

    fn factor_basis(&self) -> Option<DenseLu> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j).into_iter().enumerate() {
                b[i * m + k] = v;
            }
        }
        let lu = DenseLu::factor(m, b)?;
        (lu.pivot_ratio() <= conditioning_limit()).then_some(lu)
    }

    /// Refactor and recompute the basic values from scratch.
    fn refactor(&mut self) -> bool {
        match self.factor_basis() {
            Some(lu) => {
                self.lu = lu;
                self.etas.clear();
                let mut xb = self.lu.solve(&self.inst.b);
                let tol = 1e-9 * self.inst.scale();
                for v in &mut xb {
                    if *v < 0.0 && *v > -tol {
                        *v = 0.0;
                    }
                }
                self.xb = xb;
                true
            }
            None => false,
        }
    }

    fn pivot(&mut self, r: usize, q: usize, d: Vec<f64>) -> bool {
        let theta = self.xb[r] / d[r];
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r {
                *x -= theta * d[i];
                if *x < 0.0 && *x > -1e-12 {
                    *x = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        self.position[self.basis[r]] = None;
        self.basis[r] = q;
        self.position[q] = Some(r);
        self.etas.push((r, d));
        self.iterations += 1;
        if self.etas.len() >= REFACTOR_EVERY {
            return self.refactor();
        }
        true
    }

    /// Run simplex iterations for the given column costs (minimization).
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool, max_iter: usize) -> Outcome {
        let tol = 1e-9 * (1.0 + inf_norm(cost));
        let bland_after = 3 * (self.m + self.n);
        loop {
            let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
            let y = self.btran(&cb);

            let mut entering = None;
            let mut best = -tol;
            for j in 0..self.ncols() {
                if self.position[j].is_some() || (!allow_artificial && self.is_artificial(j)) {
                    continue;
                }
                let dj = cost[j] - self.column_dot(j, &y);
                if dj < best {
                    entering = Some(j);
                    if self.rule == PivotRule::Bland {
                        break;
                    }
                    best = dj;
                }
            }

            let Some(q) = entering else {
                // confirm against a fresh factorization before stopping
                if self.etas.is_empty() {
                    return Outcome::Optimal;
                }
                if !self.refactor() {
                    return Outcome::Stopped(SolveStatus::Numerical);
                }
                continue;
            };
            if self.iterations >= max_iter {
                return Outcome::Stopped(SolveStatus::IterationLimit);
            }

            let d = self.ftran(&self.column(q));
            let piv_tol = 1e-9 * d.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
            let mut leave: Option<(usize, f64)> = None;
            for (i, &di) in d.iter().enumerate() {
                if di <= piv_tol {
                    continue;
                }
                let ratio = self.xb[i].max(0.0) / di;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best);
                        if (tie && self.basis[i] < self.basis[r]) || (!tie && ratio < best) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, theta)) = leave else {
                return Outcome::Stopped(SolveStatus::Unbounded);
            };

            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.rule == PivotRule::Dantzig && self.degenerate_run > bland_after {
                    self.rule = PivotRule::Bland;
                    self.switched = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            if !self.pivot(r, q, d) {
                return Outcome::Stopped(SolveStatus::Numerical);
            }
        }
    }

    /// Pivot basic artificials at zero level out of the basis where a
    /// structural or slack column can replace them.
    fn drive_out_artificials(&mut self) -> bool {
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut e = vec![0.0; self.m];
            e[r] = 1.0;
            let row = self.btran(&e);
            let candidate = (0..self.n + self.m)
                .filter(|&j| self.position[j].is_none())
                .find(|&j| self.column_dot(j, &row).abs() > 1e-7);
            if let Some(j) = candidate {
                let d = self.ftran(&self.column(j));
                if !self.pivot(r, j, d) {
                    return false;
                }
            }
        }
        true
    }

    fn result(&self, status: SolveStatus) -> SolveResult {
        let mut x = vec![0.0; self.n];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.xb[k].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.inst.c).map(|(a, b)| a * b).sum();
        SolveResult {
            status,
            objective,
            x,
            iterations: self.iterations,
            pivot_rule: self.rule,
            switched_to_bland: self.switched,
        }
    }
}

/// Solve `max c^T x  s.t.  Ax <= b, x >= 0`. Never fails; problems surface
/// through [`SolveResult::status`].
///
/// # Panics
///
/// If `inst` has inconsistent dimensions.
pub fn solve(inst: &LpInstance, rule: PivotRule, max_iter: usize) -> SolveResult {
    inst.validate().expect("solve needs a dimensionally valid instance");
    let (m, n) = (inst.m(), inst.n());
    let art_rows: Vec<usize> = (0..m).filter(|&i| inst.b[i] < 0.0).collect();
    let ncols = n + m + art_rows.len();
    let mut basis: Vec<usize> = (n..n + m).collect();
    for (k, &i) in art_rows.iter().enumerate() {
        basis[i] = n + m + k;
    }
    let mut position = vec![None; ncols];
    for (k, &j) in basis.iter().enumerate() {
        position[j] = Some(k);
    }
    let mut sx = Simplex {
        inst,
        m,
        n,
        art_rows,
        basis,
        position,
        lu: DenseLu::factor(0, Vec::new()).expect("empty factorization"),
        etas: Vec::new(),
        xb: Vec::new(),
        iterations: 0,
        rule,
        switched: false,
        degenerate_run: 0,
    };
    if !sx.refactor() {
        return sx.result(SolveStatus::Numerical);
    }

    if !sx.art_rows.is_empty() {
        let mut cost = vec![0.0; ncols];
        for c in &mut cost[n + m..] {
            *c = 1.0;
        }
        if let Outcome::Stopped(status) = sx.optimize(&cost, true, max_iter) {
            let status = if status == SolveStatus::Unbounded {
                SolveStatus::Numerical
            } else {
                status
            };
            return sx.result(status);
        }
        let infeasibility: f64 = sx
            .basis
            .iter()
            .zip(&sx.xb)
            .filter(|(j, _)| **j >= n + m)
            .map(|(_, v)| v.max(0.0))
            .sum();
        if infeasibility > 1e-7 * inst.scale() {
            return sx.result(SolveStatus::Infeasible);
        }
        if !sx.drive_out_artificials() {
            return sx.result(SolveStatus::Numerical);
        }
        sx.degenerate_run = 0;
    }

    let mut cost = vec![0.0; ncols];
    for (cj, v) in cost.iter_mut().zip(&inst.c) {
        *cj = -v;
    }
    match sx.optimize(&cost, false, max_iter) {
        Outcome::Optimal => sx.result(SolveStatus::Optimal),
        Outcome::Stopped(status) => sx.result(status),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Iteration counts of the optimal runs in a batch. Order statistics are
/// NaN when no run reached optimality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub runs: usize,
    pub optimal: usize,
    /// Runs that ended in any status other than optimal.
    pub failures: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Ten equal-width bins over `[min, max]` (one bin for a constant
    /// sample).
    pub histogram: Vec<HistogramBin>,
}

impl IterationStats {
    pub fn from_counts(counts: &[usize], failures: usize) -> Self {
        let mut sorted: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        sorted.sort_by(f64::total_cmp);
        let runs = counts.len() + failures;
        if sorted.is_empty() {
            return Self {
                runs,
                optimal: 0,
                failures,
                min: f64::NAN,
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
                max: f64::NAN,
                histogram: Vec::new(),
            };
        }
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        let bins = if max > min { 10 } else { 1 };
        let width = (max - min) / bins as f64;
        let mut histogram: Vec<HistogramBin> = (0..bins)
            .map(|k| HistogramBin {
                lo: min + k as f64 * width,
                hi: if k + 1 == bins { max } else { min + (k + 1) as f64 * width },
                count: 0,
            })
            .collect();
        for &v in &sorted {
            let k = if width > 0.0 {
                (((v - min) / width) as usize).min(bins - 1)
            } else {
                0
            };
            histogram[k].count += 1;
        }
        Self {
            runs,
            optimal: sorted.len(),
            failures,
            min,
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            max,
            histogram,
        }
    }
}

/// Solve every instance (in parallel) and summarize the iteration counts.
pub fn iteration_stats(instances: &[LpInstance], rule: PivotRule, max_iter: usize) -> Result<IterationStats> {
    if instances.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let results: Vec<SolveResult> = instances.par_iter().map(|inst| solve(inst, rule, max_iter)).collect();
    let counts: Vec<usize> = results
        .iter()
        .filter(|r| r.status == SolveStatus::Optimal)
        .map(|r| r.iterations)
        .collect();
    let failures = results.len() - counts.len();
    Ok(IterationStats::from_counts(&counts, failures))
}

/// Generous iteration cap, `500 (m + n)`.
pub fn default_max_iter(inst: &LpInstance) -> usize {
    500 * (inst.m() + inst.n())
}
