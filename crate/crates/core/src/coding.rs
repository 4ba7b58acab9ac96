//! The `(alpha, beta)` encoding of a preset primal-dual optimal pair.
//!
//! Positions `0..n` correspond to structural columns (primal `x`, dual slack
//! `r`) and positions `n..N` to rows (primal slack `s`, dual `y`). A flag
//! `beta[i] == true` marks the primal member of the pair as basic, so the
//! value `alpha[i]` goes to `x`/`s`; otherwise it goes to `r`/`y`.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, RngStream};
use crate::error::{Error, Result};
use crate::serde_exact;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CodingRepr", into = "CodingRepr")]
pub struct Coding {
    alpha: Vec<f64>,
    beta: Vec<bool>,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct CodingRepr {
    #[serde(with = "serde_exact::vec")]
    alpha: Vec<f64>,
    beta: Vec<u8>,
}

impl TryFrom<CodingRepr> for Coding {
    type Error = Error;

    fn try_from(repr: CodingRepr) -> Result<Self> {
        let beta = repr
            .beta
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidCoding(format!("beta entries must be 0 or 1, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Coding::new(repr.alpha, beta)
    }
}

impl From<Coding> for CodingRepr {
    fn from(c: Coding) -> Self {
        CodingRepr {
            beta: c.beta.iter().map(|&b| u8::from(b)).collect(),
            alpha: c.alpha,
        }
    }
}

/// Preset primal-dual point `(x, s, y, r)` for `max c^T x, Ax + s = b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    #[serde(with = "serde_exact::vec")]
    pub x: Vec<f64>,
    #[serde(with = "serde_exact::vec")]
    pub s: Vec<f64>,
    #[serde(with = "serde_exact::vec")]
    pub y: Vec<f64>,
    #[serde(with = "serde_exact::vec")]
    pub r: Vec<f64>,
}

/// Bounds `a <= b` for the total coding length `N = ceil(U(a, b))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub a: f64,
    pub b: f64,
}

/// How values are drawn for a coding entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaRule {
    pub dist_x1: DistributionSpec,
    pub beta_spec: DistributionSpec,
    /// Probability of a fractional entry.
    pub lambda: f64,
}

impl AlphaRule {
    pub fn validate(&self) -> Result<()> {
        self.dist_x1.validate()?;
        self.beta_spec.validate()?;
        check_fraction("lambda", self.lambda)
    }
}

pub(crate) fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidFraction {
            name,
            value,
            requirement: "must lie in the open interval (0, 1)",
        })
    }
}

/// `ceil(X1)`, floored at one so that `ceil(X1) - X2` stays positive even
/// when a draw lands exactly on zero.
#[inline]
pub(crate) fn integer_part(x1: f64) -> f64 {
    x1.ceil().max(1.0)
}

impl Coding {
    pub fn new(alpha: Vec<f64>, beta: Vec<bool>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::InvalidCoding(format!(
                "alpha has {} entries, beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        let total = alpha.len();
        if total < 2 {
            return Err(Error::InvalidCoding(format!("need N >= 2, got {total}")));
        }
        if let Some(i) = alpha.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidCoding(format!(
                "alpha[{i}] = {} is not a finite nonnegative value",
                alpha[i]
            )));
        }
        let m = beta.iter().filter(|&&b| b).count();
        if m == 0 || m == total {
            return Err(Error::InvalidCoding(format!(
                "sum(beta) = {m} must lie in 1..={}",
                total - 1
            )));
        }
        Ok(Self { alpha, beta, m })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[bool] {
        &self.beta
    }

    /// Total length `N = m + n`.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of structural variables.
    pub fn n(&self) -> usize {
        self.alpha.len() - self.m
    }

    pub(crate) fn set_alpha(&mut self, pos: usize, value: f64) {
        self.alpha[pos] = value;
    }

    /// Flip two entries with opposite flags; keeps `sum(beta)` unchanged.
    pub(crate) fn swap_flags(&mut self, i: usize, j: usize) {
        debug_assert_ne!(self.beta[i], self.beta[j]);
        self.beta[i] = !self.beta[i];
        self.beta[j] = !self.beta[j];
    }
}

/// Draw a coding with `N = ceil(U(a, b))` and `k` primal basic entries.
///
/// The stream is consumed in a fixed order: `N`, `k`, the partial
/// Fisher-Yates shuffle for the basic index set, then for every position
/// `X1`, `X2` and the fractional coin, even when a branch ignores a draw.
pub fn encode(bounds: SizeBounds, rule: &AlphaRule, rng: &mut RngStream) -> Result<Coding> {
    let SizeBounds { a, b } = bounds;
    if !(a.is_finite() && b.is_finite() && a >= 2.0 && b >= a) {
        return Err(Error::InvalidSizeBounds { a, b });
    }
    rule.validate()?;
    let total = (rng.uniform(a, b).ceil() as usize).max(2);
    // k is uniform over the integers 1..=N-1.
    let k = 1 + rng.index(total - 1);
    Ok(fill_coding(total, k, rule, rng))
}

/// Draw a coding of fixed size: `N = m + n` and `k = m`.
pub fn encode_exact(m: usize, n: usize, rule: &AlphaRule, rng: &mut RngStream) -> Result<Coding> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidSizeBounds {
            a: m as f64,
            b: n as f64,
        });
    }
    rule.validate()?;
    Ok(fill_coding(m + n, m, rule, rng))
}

fn fill_coding(total: usize, k: usize, rule: &AlphaRule, rng: &mut RngStream) -> Coding {
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..k {
        let j = i + rng.index(total - i);
        idx.swap(i, j);
    }
    let mut beta = vec![false; total];
    for &i in &idx[..k] {
        beta[i] = true;
    }

    let mut alpha = Vec::with_capacity(total);
    for _ in 0..total {
        let x1 = rule.dist_x1.sample_unchecked(rng);
        let x2 = rule.beta_spec.sample_unchecked(rng);
        let p1 = rng.next_f64();
        let base = integer_part(x1);
        alpha.push(if p1 <= rule.lambda { base - x2 } else { base });
    }
    Coding { alpha, beta, m: k }
}

/// Expand a coding into its primal-dual point.
pub fn decode(coding: &Coding) -> PrimalDualPoint {
    let n = coding.n();
    let m = coding.m();
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut y = vec![0.0; m];
    let mut s = vec![0.0; m];
    for (i, (&a, &b)) in coding.alpha.iter().zip(&coding.beta).enumerate() {
        match (i < n, b) {
            (true, true) => x[i] = a,
            (true, false) => r[i] = a,
            (false, true) => s[i - n] = a,
            (false, false) => y[i - n] = a,
        }
    }
    PrimalDualPoint { x, s, y, r }
}
