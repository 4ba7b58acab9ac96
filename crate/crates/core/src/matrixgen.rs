//! Constraint matrices with a prescribed condition number and rank, built as
//! `A = U diag(sigma) V^T` from Haar-random orthogonal factors.

use serde::{Deserialize, Serialize};

use crate::distributions::RngStream;
use crate::error::{Error, Result};
use crate::linalg::{compose_svd, rank_threshold, singular_values, DenseMatrix};

/// Below this every singular value counts as zero.
pub const ZERO_SINGULAR_FLOOR: f64 = 1e-300;

/// Orthogonal factors and the nonzero singular values of a generated matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    /// Nonzero singular values, strictly positive and nonincreasing.
    #[serde(with = "crate::serde_exact::vec")]
    pub sigma: Vec<f64>,
    #[serde(with = "crate::serde_exact")]
    pub kappa_target: f64,
}

impl SvdFactors {
    pub fn new(u: DenseMatrix, v: DenseMatrix, sigma: Vec<f64>, kappa_target: f64) -> Result<Self> {
        let factors = Self {
            u,
            v,
            sigma,
            kappa_target,
        };
        factors.validate()?;
        Ok(factors)
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.m(), self.n());
        if self.u.rows() != self.u.cols() || self.v.rows() != self.v.cols() {
            return Err(Error::DimensionMismatch("U and V must be square".into()));
        }
        let rank = self.sigma.len();
        if rank == 0 || rank > m.min(n) {
            return Err(Error::InvalidRank { rank, m, n });
        }
        if self.sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidSingularValueParams(
                "singular values must be finite and positive".into(),
            ));
        }
        if self.sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSingularValueParams(
                "singular values must be nonincreasing".into(),
            ));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.u.rows()
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma[0]
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma[self.sigma.len() - 1]
    }

    /// `sigma_max / sigma_min` of the stored values; 1 for rank one.
    pub fn cond(&self) -> f64 {
        self.sigma_max() / self.sigma_min()
    }

    pub fn compose(&self) -> DenseMatrix {
        compose_svd(&self.u, &self.sigma, &self.v)
    }
}

/// Parameters of the singular value construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixParams {
    pub rank: usize,
    pub kappa: f64,
    /// Lower bound on `sigma_max - sigma_min`.
    pub gap: f64,
    pub a_kappa: f64,
    pub b_kappa: f64,
}

fn check_draw_range(a_kappa: f64, b_kappa: f64) -> Result<()> {
    if a_kappa.is_finite() && b_kappa.is_finite() && 0.0 < a_kappa && a_kappa < b_kappa {
        Ok(())
    } else {
        Err(Error::InvalidSingularValueParams(format!(
            "need 0 < a_kappa < b_kappa, got {a_kappa}, {b_kappa}"
        )))
    }
}

/// Extreme singular values with ratio exactly `kappa` and spread above `gap`.
///
/// `sigma_min` starts at a `U(a_kappa, b_kappa)` draw and is doubled until
/// `kappa * sigma_min - sigma_min > gap`.
pub fn generate_cond(
    kappa: f64,
    gap: f64,
    a_kappa: f64,
    b_kappa: f64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::InvalidKappa(kappa));
    }
    if !(gap.is_finite() && gap > 0.0) {
        return Err(Error::InvalidSingularValueParams(format!("gap must be > 0, got {gap}")));
    }
    check_draw_range(a_kappa, b_kappa)?;
    let mut sigma_min = rng.uniform(a_kappa, b_kappa);
    let mut sigma_max = kappa * sigma_min;
    while sigma_max - sigma_min <= gap {
        sigma_min *= 2.0;
        sigma_max = kappa * sigma_min;
    }
    Ok((sigma_max, sigma_min))
}

/// Draw `L` singular values, sorted descending.
///
/// * `L = 1`: the single value `kappa`.
/// * `L >= 2, kappa = 1`: all values equal one `U(a_kappa, b_kappa)` draw.
/// * `L >= 2, kappa > 1`: the extremes from [`generate_cond`] plus `L - 2`
///   uniform draws strictly between them.
pub fn generate_singular_values(params: &MatrixParams, rng: &mut RngStream) -> Result<Vec<f64>> {
    let MatrixParams {
        rank,
        kappa,
        gap,
        a_kappa,
        b_kappa,
    } = *params;
    if rank == 0 {
        return Err(Error::InvalidRank { rank, m: 0, n: 0 });
    }
    if rank == 1 {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidKappa(kappa));
        }
        return Ok(vec![kappa]);
    }
    if kappa == 1.0 {
        check_draw_range(a_kappa, b_kappa)?;
        let s = rng.uniform(a_kappa, b_kappa);
        return Ok(vec![s; rank]);
    }
    let (sigma_max, sigma_min) = generate_cond(kappa, gap, a_kappa, b_kappa, rng)?;
    let mut sigma = Vec::with_capacity(rank);
    sigma.push(sigma_max);
    for _ in 0..rank - 2 {
        let v = loop {
            let v = rng.uniform(sigma_min, sigma_max);
            if v > sigma_min && v < sigma_max {
                break v;
            }
        };
        sigma.push(v);
    }
    sigma.push(sigma_min);
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

/// Haar-distributed orthogonal matrix: QR of a standard normal matrix
/// (filled row by row) with each column of `Q` multiplied by the sign of the
/// matching diagonal entry of `R`.
pub fn random_orthogonal(dim: usize, rng: &mut RngStream) -> DenseMatrix {
    assert!(dim >= 1, "orthogonal matrix dimension must be positive");
    let mut g = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(i, j, rng.standard_normal());
        }
    }
    let qr = g.to_nalgebra().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    DenseMatrix::from_nalgebra(&q)
}

/// Build `A = U Sigma V^T` for an `m x n` matrix of rank `params.rank`.
/// Stream order: singular values, then `U`, then `V`.
pub fn generate_a(
    params: &MatrixParams,
    m: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<(DenseMatrix, SvdFactors)> {
    if params.rank == 0 || params.rank > m.min(n) {
        return Err(Error::InvalidRank {
            rank: params.rank,
            m,
            n,
        });
    }
    let sigma = generate_singular_values(params, rng)?;
    let u = random_orthogonal(m, rng);
    let v = random_orthogonal(n, rng);
    let factors = SvdFactors {
        u,
        v,
        sigma,
        kappa_target: params.kappa,
    };
    Ok((factors.compose(), factors))
}

/// Ratio of the largest to the smallest numerically nonzero singular value.
pub fn measured_cond(a: &DenseMatrix) -> Result<f64> {
    let sv = singular_values(a);
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest < ZERO_SINGULAR_FLOOR {
        return Err(Error::ZeroMatrix);
    }
    let threshold = rank_threshold(a.rows(), a.cols(), largest);
    let smallest = sv.iter().copied().rfind(|&s| s > threshold).unwrap_or(largest);
    Ok(largest / smallest)
}

/// Count of singular values above `max(m, n) * eps * sigma_max`.
pub fn measured_rank(a: &DenseMatrix) -> usize {
    let sv = singular_values(a);
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest < ZERO_SINGULAR_FLOOR {
        return 0;
    }
    let threshold = rank_threshold(a.rows(), a.cols(), largest);
    sv.iter().filter(|&&s| s > threshold).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::derive_stream;

    fn params(rank: usize, kappa: f64) -> MatrixParams {
        MatrixParams {
            rank,
            kappa,
            gap: 3.0 * kappa,
            a_kappa: 0.1,
            b_kappa: 5.0,
        }
    }

    #[test]
    fn cond_rejects_kappa_at_most_one() {
        let mut rng = derive_stream(0, 0);
        for kappa in [1.0, 0.5, -3.0, f64::NAN] {
            assert!(matches!(
                generate_cond(kappa, 1.0, 0.1, 5.0, &mut rng),
                Err(Error::InvalidKappa(_))
            ));
        }
    }

    #[test]
    fn cond_doubles_until_gap_exceeded() {
        let mut rng = derive_stream(2, 0);
        for _ in 0..200 {
            let (hi, lo) = generate_cond(2.0, 12.0, 0.1, 5.0, &mut rng).unwrap();
            assert!(lo > 12.0);
            assert_eq!(hi, 2.0 * lo);
            // initial draws are below 5, so at least one doubling happened
            // and the previous value did not clear the gap
            assert!(lo / 2.0 <= 12.0);
        }
    }

    #[test]
    fn rank_one_is_kappa() {
        let mut rng = derive_stream(0, 0);
        assert_eq!(generate_singular_values(&params(1, 7.0), &mut rng).unwrap(), vec![7.0]);
    }

    #[test]
    fn unit_kappa_gives_equal_values() {
        let mut rng = derive_stream(0, 1);
        let sv = generate_singular_values(&params(4, 1.0), &mut rng).unwrap();
        assert_eq!(sv.len(), 4);
        assert!(sv.iter().all(|s| *s == sv[0]));
        assert!((0.1..5.0).contains(&sv[0]));
    }

    #[test]
    fn rank_zero_rejected() {
        let mut rng = derive_stream(0, 1);
        assert!(matches!(
            generate_singular_values(&params(0, 4.0), &mut rng),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            generate_a(&params(6, 4.0), 5, 8, &mut rng),
            Err(Error::InvalidRank { .. })
        ));
    }

    #[test]
    fn orthogonal_one_by_one() {
        let mut rng = derive_stream(4, 0);
        for _ in 0..20 {
            let q = random_orthogonal(1, &mut rng);
            assert_eq!(q.get(0, 0).abs(), 1.0);
        }
    }

    #[test]
    fn orthogonality_drift() {
        let mut rng = derive_stream(4, 1);
        for dim in [2, 5, 17, 50] {
            let q = random_orthogonal(dim, &mut rng);
            assert!(q.orthogonality_error() <= 1e-12 * dim as f64);
        }
    }

    #[test]
    fn identity_factors_give_padded_diagonal() {
        let sigma = vec![9.0, 4.0, 1.5];
        let f = SvdFactors::new(DenseMatrix::identity(3), DenseMatrix::identity(5), sigma.clone(), 6.0)
            .unwrap();
        let a = f.compose();
        for (i, s) in sigma.iter().enumerate() {
            for j in 0..5 {
                let expect = if i == j { *s } else { 0.0 };
                assert_eq!(a.get(i, j), expect);
            }
        }
    }

    #[test]
    fn identity_has_unit_cond_and_zero_matrix_errors() {
        assert!((measured_cond(&DenseMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(measured_cond(&DenseMatrix::zeros(3, 2)), Err(Error::ZeroMatrix)));
        assert_eq!(measured_rank(&DenseMatrix::zeros(4, 4)), 0);
    }

    #[test]
    fn generated_matrix_hits_targets() {
        let mut rng = derive_stream(10, 0);
        let (a, f) = generate_a(&params(17, 1000.0), 50, 50, &mut rng).unwrap();
        assert_eq!(measured_rank(&a), 17);
        let cond = measured_cond(&a).unwrap();
        assert!((cond / 1000.0 - 1.0).abs() < 1e-6);
        assert!((f.cond() / 1000.0 - 1.0).abs() < 1e-12);
        assert_eq!(f.compose(), a);
    }

    #[test]
    fn factors_validation() {
        let u = DenseMatrix::identity(2);
        let v = DenseMatrix::identity(2);
        assert!(SvdFactors::new(u.clone(), v.clone(), vec![1.0, 2.0], 2.0).is_err());
        assert!(SvdFactors::new(u.clone(), v.clone(), vec![2.0, 0.0], 2.0).is_err());
        assert!(SvdFactors::new(u.clone(), v.clone(), vec![3.0, 2.0, 1.0], 3.0).is_err());
        assert!(SvdFactors::new(u, v, vec![2.0, 1.0], 2.0).is_ok());
    }
}
