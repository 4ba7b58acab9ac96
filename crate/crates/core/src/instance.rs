//! LP instances `max c^T x  s.t.  Ax <= b, x >= 0` assembled around a preset
//! optimal point, and the strong-duality certificate check.
//!
//! The dual is `min b^T y  s.t.  A^T y - r = c, y >= 0, r >= 0`. Given the
//! decoded point, `b = A x + s` makes `(x, s)` primal feasible and
//! `c = A^T y - r` makes `(y, r)` dual feasible. Complementarity
//! (`x o r = 0`, `s o y = 0`) then closes the duality gap.

use serde::{Deserialize, Serialize};

use crate::coding::{decode, Coding, PrimalDualPoint};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Default relative tolerance for [`verify_optimality`].
pub const DEFAULT_CERT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub master_seed: Option<u64>,
    pub stream_index: Option<u64>,
    #[serde(with = "crate::serde_exact::option")]
    pub kappa_target: Option<f64>,
    /// Condition number of `A` over its nonzero singular values.
    #[serde(with = "crate::serde_exact::option")]
    pub achieved_cond: Option<f64>,
    pub rank: Option<usize>,
    /// Lower bound used for `sigma_max - sigma_min`.
    #[serde(with = "crate::serde_exact::option")]
    pub gap: Option<f64>,
    /// Effective coding distribution in text form.
    pub dist_x1: Option<String>,
    pub beta_spec: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    pub a: DenseMatrix,
    #[serde(with = "crate::serde_exact::vec")]
    pub b: Vec<f64>,
    #[serde(with = "crate::serde_exact::vec")]
    pub c: Vec<f64>,
    #[serde(default)]
    pub meta: InstanceMeta,
}

impl LpInstance {
    pub fn new(a: DenseMatrix, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let inst = Self {
            a,
            b,
            c,
            meta: InstanceMeta::default(),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.rows() != self.b.len() || self.a.cols() != self.c.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, b has {} entries, c has {}",
                self.a.rows(),
                self.a.cols(),
                self.b.len(),
                self.c.len()
            )));
        }
        if self.b.iter().chain(&self.c).any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite entry in b or c".into()));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `1 + max(|b|_inf, |c|_inf)`, the scale for relative tolerances.
    pub fn scale(&self) -> f64 {
        1.0 + inf_norm(&self.b).max(inf_norm(&self.c))
    }
}

/// Residuals of a candidate primal-dual pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    /// `|Ax + s - b|_inf`
    pub primal_residual: f64,
    /// `|A^T y - r - c|_inf`
    pub dual_residual: f64,
    /// `max(x_i r_i, s_j y_j)`
    pub complementarity: f64,
    /// `|c^T x - b^T y|`
    pub duality_gap: f64,
    /// Magnitude of the most negative entry of `x, s, y, r` (0 if none).
    pub sign_violation: f64,
    /// Absolute threshold every field was compared against.
    pub threshold: f64,
    pub passed: bool,
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-hand side and objective that make the decoded coding optimal.
pub fn construct_instance(coding: &Coding, a: &DenseMatrix) -> Result<(LpInstance, PrimalDualPoint)> {
    if a.rows() != coding.m() || a.cols() != coding.n() {
        return Err(Error::DimensionMismatch(format!(
            "coding has m={}, n={} but A is {}x{}",
            coding.m(),
            coding.n(),
            a.rows(),
            a.cols()
        )));
    }
    let pt = decode(coding);
    let b: Vec<f64> = a.mul_vec(&pt.x).iter().zip(&pt.s).map(|(ax, s)| ax + s).collect();
    let c: Vec<f64> = a
        .mul_vec_transposed(&pt.y)
        .iter()
        .zip(&pt.r)
        .map(|(aty, r)| aty - r)
        .collect();
    let inst = LpInstance {
        a: a.clone(),
        b,
        c,
        meta: InstanceMeta::default(),
    };
    Ok((inst, pt))
}

/// Check primal and dual feasibility, complementarity and the duality gap.
/// Passes iff every residual is at most `tol * (1 + max(|b|_inf, |c|_inf))`.
pub fn verify_optimality(inst: &LpInstance, pt: &PrimalDualPoint, tol: f64) -> Result<OptimalityReport> {
    let (m, n) = (inst.m(), inst.n());
    if pt.x.len() != n || pt.r.len() != n || pt.s.len() != m || pt.y.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "point has |x|={}, |r|={}, |s|={}, |y|={} for a {m}x{n} instance",
            pt.x.len(),
            pt.r.len(),
            pt.s.len(),
            pt.y.len()
        )));
    }
    inst.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidFraction {
            name: "tol",
            value: tol,
            requirement: "must be positive",
        });
    }

    let ax = inst.a.mul_vec(&pt.x);
    let primal_residual = (0..m).fold(0.0f64, |acc, i| acc.max((ax[i] + pt.s[i] - inst.b[i]).abs()));
    let aty = inst.a.mul_vec_transposed(&pt.y);
    let dual_residual = (0..n).fold(0.0f64, |acc, j| acc.max((aty[j] - pt.r[j] - inst.c[j]).abs()));
    let complementarity = pt
        .x
        .iter()
        .zip(&pt.r)
        .chain(pt.s.iter().zip(&pt.y))
        .fold(0.0f64, |acc, (p, d)| acc.max((p * d).abs()));
    let duality_gap = (dot(&inst.c, &pt.x) - dot(&inst.b, &pt.y)).abs();
    let sign_violation = pt
        .x
        .iter()
        .chain(&pt.s)
        .chain(&pt.y)
        .chain(&pt.r)
        .fold(0.0f64, |acc, v| acc.max(-v));

    let threshold = tol * inst.scale();
    let passed = [primal_residual, dual_residual, complementarity, duality_gap, sign_violation]
        .iter()
        .all(|v| *v <= threshold);
    Ok(OptimalityReport {
        primal_residual,
        dual_residual,
        complementarity,
        duality_gap,
        sign_violation,
        threshold,
        passed,
    })
}
