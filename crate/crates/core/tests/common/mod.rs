//! Helpers shared by the integration tests.

#![allow(dead_code)]

use lpforge::LpInstance;
use nalgebra::{DMatrix, DVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Kolmogorov-Smirnov statistic of `sample` against `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.001.
pub fn ks_critical_001(n: usize) -> f64 {
    1.9495 / (n as f64).sqrt()
}

/// Raw generator for `(seed, index)` built from the documented key
/// derivation, without going through the crate.
pub fn oracle_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut key = Vec::new();
    key.extend_from_slice(b"lpforge.stream.v1");
    key.extend_from_slice(&seed.to_le_bytes());
    key.extend_from_slice(&index.to_le_bytes());
    let digest: [u8; 32] = Sha256::digest(&key).into();
    ChaCha20Rng::from_seed(digest)
}

/// Textbook samplers over a raw 64-bit stream.
pub struct Oracle {
    pub rng: ChaCha20Rng,
}

impl Oracle {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { rng: oracle_rng(seed, index) }
    }

    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / 9007199254740992.0
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((u128::from(self.rng.next_u64()) * n as u128) >> 64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Marsaglia and Tsang (2000), with the `U^(1/a)` boost for `a < 1`.
    pub fn gamma(&mut self, a: f64) -> f64 {
        if a < 1.0 {
            let g = self.gamma(a + 1.0);
            return g * self.unit().powf(1.0 / a);
        }
        let d = a - 1.0 / 3.0;
        let c = (1.0 / 3.0) / d.sqrt();
        loop {
            let z = self.normal();
            let v = (1.0 + c * z).powi(3);
            if 1.0 + c * z <= 0.0 {
                continue;
            }
            let u = self.unit();
            if u.ln() < z * z / 2.0 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    pub fn beta(&mut self, a: f64, b: f64) -> f64 {
        loop {
            let x = self.gamma(a);
            let y = self.gamma(b);
            let v = x / (x + y);
            if v > 0.0 && v < 1.0 {
                return v;
            }
        }
    }
}

/// Best objective over all basic feasible solutions of `Ax + s = b`,
/// `x, s >= 0`, found by trying every choice of `m` basic columns.
pub fn vertex_enumeration(inst: &LpInstance) -> Option<f64> {
    let (m, n) = (inst.m(), inst.n());
    let column = |j: usize| -> Vec<f64> {
        if j < n {
            inst.a.column(j)
        } else {
            (0..m).map(|i| if i == j - n { 1.0 } else { 0.0 }).collect()
        }
    };
    let b = DVector::from_column_slice(&inst.b);
    let tol = 1e-9 * (1.0 + inst.b.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..m).collect();
    loop {
        let cols: Vec<f64> = pick.iter().flat_map(|&j| column(j)).collect();
        let basis = DMatrix::from_column_slice(m, m, &cols);
        if let Some(xb) = basis.clone().lu().solve(&b) {
            let residual = (&basis * &xb - &b).amax();
            let feas_tol = 1e-9 * (1.0 + xb.amax());
            if residual <= tol && xb.iter().all(|&v| v >= -feas_tol) {
                let obj: f64 = pick
                    .iter()
                    .zip(xb.iter())
                    .filter(|(&j, _)| j < n)
                    .map(|(&j, &v)| inst.c[j] * v)
                    .sum();
                best = Some(best.map_or(obj, |b: f64| b.max(obj)));
            }
        }
        // next combination of m out of n + m
        let total = n + m;
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < total - m + i {
                break;
            }
        }
        pick[i] += 1;
        for k in i + 1..m {
            pick[k] = pick[k - 1] + 1;
        }
    }
}
