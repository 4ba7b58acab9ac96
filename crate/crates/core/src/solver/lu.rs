//! Dense LU factorization with partial pivoting, `P B = L U`.

pub(crate) struct DenseLu {
    dim: usize,
    /// Unit-lower `L` below the diagonal, `U` on and above, row-major.
    lu: Vec<f64>,
    /// `perm[i]` is the original row stored at position `i`.
    perm: Vec<usize>,
}

impl DenseLu {
    /// Factor a row-major `dim x dim` matrix. Returns `None` when a pivot
    /// is exactly zero.
    pub(crate) fn factor(dim: usize, mut a: Vec<f64>) -> Option<Self> {
        debug_assert_eq!(a.len(), dim * dim);
        let mut perm: Vec<usize> = (0..dim).collect();
        for k in 0..dim {
            let (p, best) = (k..dim)
                .map(|i| (i, a[i * dim + k].abs()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..dim {
                    a.swap(k * dim + j, p * dim + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * dim + k];
            for i in k + 1..dim {
                let f = a[i * dim + k] / pivot;
                a[i * dim + k] = f;
                if f != 0.0 {
                    for j in k + 1..dim {
                        a[i * dim + j] -= f * a[k * dim + j];
                    }
                }
            }
        }
        Some(Self { dim, lu: a, perm })
    }

    /// `max |U_ii| / min |U_ii|`, a cheap conditioning estimate.
    pub(crate) fn pivot_ratio(&self) -> f64 {
        let d = self.dim;
        let (lo, hi) = (0..d)
            .map(|i| self.lu[i * d + i].abs())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if d == 0 {
            1.0
        } else {
            hi / lo
        }
    }

    /// Solve `B x = rhs`.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..d {
            let row = &self.lu[i * d..i * d + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..d).rev() {
            let row = &self.lu[i * d + i + 1..(i + 1) * d];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * d + i];
        }
        x
    }

    /// Solve `B^T y = rhs`.
    pub(crate) fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let d = self.dim;
        // U^T z = rhs
        let mut z = rhs.to_vec();
        for i in 0..d {
            let s: f64 = (0..i).map(|k| self.lu[k * d + i] * z[k]).sum();
            z[i] = (z[i] - s) / self.lu[i * d + i];
        }
        // L^T w = z
        for i in (0..d).rev() {
            let s: f64 = (i + 1..d).map(|k| self.lu[k * d + i] * z[k]).sum();
            z[i] -= s;
        }
        // y = P^T w
        let mut y = vec![0.0; d];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat() -> Vec<f64> {
        vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 4.0]
    }

    fn mul(a: &[f64], x: &[f64], transpose: bool) -> Vec<f64> {
        let d = x.len();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if transpose { a[j * d + i] } else { a[i * d + j] } * x[j])
                    .sum()
            })
            .collect()
    }

    #[test]
    fn solves_both_systems() {
        let lu = DenseLu::factor(3, mat()).unwrap();
        let rhs = [1.0, -2.0, 0.5];
        let x = lu.solve(&rhs);
        let y = lu.solve_transpose(&rhs);
        for (got, want) in mul(&mat(), &x, false).iter().zip(rhs) {
            assert!((got - want).abs() < 1e-14);
        }
        for (got, want) in mul(&mat(), &y, true).iter().zip(rhs) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_rejected() {
        assert!(DenseLu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_none());
    }
}
