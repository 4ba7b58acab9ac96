//! Neighborhood exchange operators over the generator state
//! `(U, V, sigma, alpha, beta)`.
//!
//! Three operators are composed with configurable weights (uniform by
//! default):
//!
//! 1. replace `U` with a fresh Haar-random `m x m` orthogonal matrix;
//! 2. replace `V` likewise (`n x n`);
//! 3. pick a position `pos` in `0..max(m, n)`. If `pos < min(m, n)` the
//!    `pos`-th diagonal entry of `Sigma` is redrawn and the coding entries of
//!    column `pos` and row `pos` are redrawn; otherwise only the coding entry
//!    of the unmatched column (`m <= n`) or row (`m > n`) is redrawn.
//!
//! [`morph`] builds the deterministic exchange sequence that carries one
//! state onto any other state of the same size.

use serde::{Deserialize, Serialize};

use crate::coding::{integer_part, AlphaRule, Coding, PrimalDualPoint};
use crate::distributions::RngStream;
use crate::error::{Error, Result};
use crate::instance::{construct_instance, LpInstance};
use crate::linalg::{compose_svd, DenseMatrix};
use crate::matrixgen::{random_orthogonal, SvdFactors};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorState {
    factors: SvdFactors,
    coding: Coding,
}

impl GeneratorState {
    pub fn new(factors: SvdFactors, coding: Coding) -> Result<Self> {
        factors.validate()?;
        if factors.m() != coding.m() || factors.n() != coding.n() {
            return Err(Error::DimensionMismatch(format!(
                "factors are {}x{}, coding is {}x{}",
                factors.m(),
                factors.n(),
                coding.m(),
                coding.n()
            )));
        }
        Ok(Self { factors, coding })
    }

    pub fn factors(&self) -> &SvdFactors {
        &self.factors
    }

    pub fn coding(&self) -> &Coding {
        &self.coding
    }

    pub fn m(&self) -> usize {
        self.coding.m()
    }

    pub fn n(&self) -> usize {
        self.coding.n()
    }

    pub fn constraint_matrix(&self) -> DenseMatrix {
        self.factors.compose()
    }

    /// Rebuild `A`, `b`, `c` and the certificate point. Metadata records the
    /// condition number and rank implied by the stored singular values.
    pub fn instance(&self) -> Result<(LpInstance, PrimalDualPoint)> {
        let a = self.constraint_matrix();
        let (mut inst, pt) = construct_instance(&self.coding, &a)?;
        inst.meta.kappa_target = Some(self.factors.kappa_target);
        inst.meta.achieved_cond = Some(self.factors.cond());
        inst.meta.rank = Some(self.factors.rank());
        Ok((inst, pt))
    }
}

/// Parameters shared by the coding mutation and the operator mix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    pub rule: AlphaRule,
    /// Probability of exchanging a basic flag.
    pub xi: f64,
    /// Relative weights of operators 1, 2 and 3.
    pub weights: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    ReplaceU,
    ReplaceV,
    Exchange,
}

impl Operator {
    pub fn number(self) -> u8 {
        match self {
            Operator::ReplaceU => 1,
            Operator::ReplaceV => 2,
            Operator::Exchange => 3,
        }
    }
}

/// Redraw the `pos`-th singular value uniformly in `[sigma_min, sigma_max]`
/// and re-sort. The rank does not change.
pub fn mutate_sigma(state: &mut GeneratorState, pos: usize, rng: &mut RngStream) -> Result<()> {
    let rank = state.factors.rank();
    if rank < 2 {
        return Err(Error::RankTooSmall(rank));
    }
    if pos >= rank {
        return Err(Error::PositionOutOfRange { pos, len: rank });
    }
    let (lo, hi) = (state.factors.sigma_min(), state.factors.sigma_max());
    let sigma = &mut state.factors.sigma;
    sigma[pos] = rng.uniform(lo, hi);
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(())
}

/// Fill a zero diagonal slot with `U(sigma_min, sigma_max)`; the rank grows
/// by one.
fn activate_sigma(state: &mut GeneratorState, rng: &mut RngStream) {
    let (lo, hi) = (state.factors.sigma_min(), state.factors.sigma_max());
    let sigma = &mut state.factors.sigma;
    sigma.push(rng.uniform(lo, hi));
    sigma.sort_by(|a, b| b.total_cmp(a));
}

/// Redraw `alpha[pos]` and, with probability `xi`, exchange `beta[pos]` with
/// a uniformly chosen entry of opposite value. One coin `p1` decides both
/// the fractional branch (`p1 <= lambda`) and the exchange (`p1 <= xi`).
///
/// Returns whether an exchange happened.
pub fn mutate_coding(
    state: &mut GeneratorState,
    pos: usize,
    params: &OperatorParams,
    rng: &mut RngStream,
) -> Result<bool> {
    let total = state.coding.len();
    if pos >= total {
        return Err(Error::PositionOutOfRange { pos, len: total });
    }
    let p1 = rng.next_f64();
    let x1 = params.rule.dist_x1.sample_unchecked(rng);
    let x2 = params.rule.beta_spec.sample_unchecked(rng);
    let base = integer_part(x1);
    let value = if p1 <= params.rule.lambda { base - x2 } else { base };
    state.coding.set_alpha(pos, value);

    if p1 <= params.xi {
        let flag = state.coding.beta()[pos];
        let partners: Vec<usize> = state
            .coding
            .beta()
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b != flag)
            .map(|(i, _)| i)
            .collect();
        let partner = partners[rng.index(partners.len())];
        state.coding.swap_flags(pos, partner);
        return Ok(true);
    }
    Ok(false)
}

/// One applied neighbor step.
#[derive(Clone, Debug)]
pub struct NeighborStep {
    pub operator: Operator,
    /// Drawn position for operator 3.
    pub pos: Option<usize>,
    pub exchanges: usize,
    pub instance: LpInstance,
    pub point: PrimalDualPoint,
}

fn pick_operator(weights: &[f64; 3], rng: &mut RngStream) -> Operator {
    let total: f64 = weights.iter().sum();
    let mut u = rng.next_f64() * total;
    for (op, w) in [Operator::ReplaceU, Operator::ReplaceV, Operator::Exchange]
        .into_iter()
        .zip(weights)
    {
        if u < *w {
            return op;
        }
        u -= w;
    }
    // rounding at the top end
    if weights[2] > 0.0 {
        Operator::Exchange
    } else if weights[1] > 0.0 {
        Operator::ReplaceV
    } else {
        Operator::ReplaceU
    }
}

/// Apply a randomly chosen operator and rebuild the instance.
pub fn neighbor_step(
    state: &mut GeneratorState,
    params: &OperatorParams,
    rng: &mut RngStream,
) -> Result<NeighborStep> {
    let (m, n) = (state.m(), state.n());
    let operator = pick_operator(&params.weights, rng);
    let mut pos = None;
    let mut exchanges = 0;
    match operator {
        Operator::ReplaceU => state.factors.u = random_orthogonal(m, rng),
        Operator::ReplaceV => state.factors.v = random_orthogonal(n, rng),
        Operator::Exchange => {
            let p = rng.index(m.max(n));
            pos = Some(p);
            let coding_positions: Vec<usize> = if p < m.min(n) {
                let rank = state.factors.rank();
                if p >= rank {
                    activate_sigma(state, rng);
                } else if rank >= 2 {
                    mutate_sigma(state, p, rng)?;
                }
                vec![p, p + n]
            } else if m <= n {
                vec![p]
            } else {
                vec![p + n]
            };
            for q in coding_positions {
                exchanges += usize::from(mutate_coding(state, q, params, rng)?);
            }
        }
    }
    let (instance, point) = state.instance()?;
    Ok(NeighborStep {
        operator,
        pos,
        exchanges,
        instance,
        point,
    })
}

/// Apply `steps` neighbor steps, handing each (1-based step number, step)
/// to `visit`.
pub fn run_chain<F>(
    state: &mut GeneratorState,
    params: &OperatorParams,
    rng: &mut RngStream,
    steps: usize,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &NeighborStep) -> Result<()>,
{
    for k in 1..=steps {
        let step = neighbor_step(state, params, rng)?;
        visit(k, &step)?;
    }
    Ok(())
}

/// One deterministic stage of a morph.
#[derive(Clone, Debug, PartialEq)]
pub enum MorphStep {
    ReplaceU(DenseMatrix),
    ReplaceV(DenseMatrix),
    /// Overwrite diagonal entry `pos` (when it exists) and the listed coding
    /// entries, then flip the `corrections` flags so `sum(beta)` stays `m`.
    Exchange {
        pos: usize,
        sigma: Option<f64>,
        assignments: Vec<(usize, f64, bool)>,
        corrections: Vec<usize>,
    },
}

impl MorphStep {
    pub fn operator(&self) -> Operator {
        match self {
            MorphStep::ReplaceU(_) => Operator::ReplaceU,
            MorphStep::ReplaceV(_) => Operator::ReplaceV,
            MorphStep::Exchange { .. } => Operator::Exchange,
        }
    }
}

/// Working state for morph replay. The diagonal is kept at full length
/// `min(m, n)` because intermediate diagonals need not be sorted or have a
/// zero-free prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphState {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    pub diag: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<bool>,
    kappa_target: f64,
}

fn full_diagonal(factors: &SvdFactors) -> Vec<f64> {
    let mut diag = vec![0.0; factors.m().min(factors.n())];
    diag[..factors.rank()].copy_from_slice(&factors.sigma);
    diag
}

impl MorphState {
    pub fn from_state(state: &GeneratorState) -> Self {
        Self {
            u: state.factors.u.clone(),
            v: state.factors.v.clone(),
            diag: full_diagonal(&state.factors),
            alpha: state.coding.alpha().to_vec(),
            beta: state.coding.beta().to_vec(),
            kappa_target: state.factors.kappa_target,
        }
    }

    pub fn apply(&mut self, step: &MorphStep) {
        match step {
            MorphStep::ReplaceU(u) => self.u = u.clone(),
            MorphStep::ReplaceV(v) => self.v = v.clone(),
            MorphStep::Exchange {
                pos,
                sigma,
                assignments,
                corrections,
            } => {
                if let Some(s) = sigma {
                    self.diag[*pos] = *s;
                }
                for &(i, a, b) in assignments {
                    self.alpha[i] = a;
                    self.beta[i] = b;
                }
                for &i in corrections {
                    self.beta[i] = !self.beta[i];
                }
            }
        }
    }

    pub fn constraint_matrix(&self) -> DenseMatrix {
        compose_svd(&self.u, &self.diag, &self.v)
    }

    pub fn coding(&self) -> Result<Coding> {
        Coding::new(self.alpha.clone(), self.beta.clone())
    }

    pub fn instance(&self) -> Result<(LpInstance, PrimalDualPoint)> {
        construct_instance(&self.coding()?, &self.constraint_matrix())
    }

    /// Convert back to a generator state. Fails if the diagonal is not a
    /// sorted positive prefix followed by zeros.
    pub fn into_state(self) -> Result<GeneratorState> {
        let rank = self.diag.iter().take_while(|&&s| s > 0.0).count();
        if self.diag[rank..].iter().any(|&s| s != 0.0) {
            return Err(Error::InvalidSingularValueParams(
                "diagonal has a nonzero entry after a zero".into(),
            ));
        }
        let sigma = self.diag[..rank].to_vec();
        let coding = Coding::new(self.alpha, self.beta)?;
        let factors = SvdFactors::new(self.u, self.v, sigma, self.kappa_target)?;
        GeneratorState::new(factors, coding)
    }
}

/// Coding positions touched by exchange stage `r`.
fn stage_positions(r: usize, m: usize, n: usize) -> Vec<usize> {
    if r < m.min(n) {
        vec![r, n + r]
    } else if m <= n {
        vec![r]
    } else {
        vec![n + r]
    }
}

/// Deterministic exchange sequence carrying `source` onto `target`: replace
/// `U`, replace `V`, then one exchange stage per position `0..max(m, n)`,
/// `max(m, n) + 2` steps in total.
pub fn morph(source: &GeneratorState, target: &GeneratorState) -> Result<Vec<MorphStep>> {
    let (m, n) = (source.m(), source.n());
    if (m, n) != (target.m(), target.n()) {
        return Err(Error::SizeMismatch {
            source_m: m,
            source_n: n,
            target_m: target.m(),
            target_n: target.n(),
        });
    }
    let target_diag = full_diagonal(&target.factors);
    let t_alpha = target.coding.alpha();
    let t_beta = target.coding.beta();

    let mut steps = Vec::with_capacity(m.max(n) + 2);
    steps.push(MorphStep::ReplaceU(target.factors.u.clone()));
    steps.push(MorphStep::ReplaceV(target.factors.v.clone()));

    let mut beta = source.coding.beta().to_vec();
    let mut done = vec![false; m + n];
    for r in 0..m.max(n) {
        let positions = stage_positions(r, m, n);
        let mut assignments = Vec::with_capacity(positions.len());
        for &p in &positions {
            assignments.push((p, t_alpha[p], t_beta[p]));
            beta[p] = t_beta[p];
            done[p] = true;
        }
        // Restore sum(beta) == m using untouched positions. The untouched
        // set always holds enough flags of the needed value because its
        // target sum is attainable.
        let ones = beta.iter().filter(|&&b| b).count();
        let mut corrections = Vec::new();
        if ones != m {
            let surplus = ones > m;
            let need = ones.abs_diff(m);
            for i in 0..m + n {
                if corrections.len() == need {
                    break;
                }
                if !done[i] && beta[i] == surplus {
                    beta[i] = !surplus;
                    corrections.push(i);
                }
            }
            debug_assert_eq!(corrections.len(), need);
        }
        steps.push(MorphStep::Exchange {
            pos: r,
            sigma: (r < m.min(n)).then(|| target_diag[r]),
            assignments,
            corrections,
        });
    }
    Ok(steps)
}

/// Apply `steps` to `source` and return the resulting state.
pub fn replay(source: &GeneratorState, steps: &[MorphStep]) -> Result<GeneratorState> {
    let mut work = MorphState::from_state(source);
    for step in steps {
        work.apply(step);
    }
    work.into_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{generate, GeneratorConfig, SizeSpec};
    use crate::distributions::{derive_stream, DistributionSpec};

    fn params(xi: f64) -> OperatorParams {
        OperatorParams {
            rule: AlphaRule {
                dist_x1: DistributionSpec::Uniform { lo: 1.0, hi: 1000.0 },
                beta_spec: DistributionSpec::Beta { a: 2.0 },
                lambda: 0.7,
            },
            xi,
            weights: [1.0, 1.0, 1.0],
        }
    }

    fn state_with(sigma: Vec<f64>, m: usize, n: usize) -> GeneratorState {
        let factors = SvdFactors::new(DenseMatrix::identity(m), DenseMatrix::identity(n), sigma, 5.0).unwrap();
        let mut beta = vec![false; m + n];
        for b in beta.iter_mut().take(m) {
            *b = true;
        }
        let coding = Coding::new(vec![1.0; m + n], beta).unwrap();
        GeneratorState::new(factors, coding).unwrap()
    }

    #[test]
    fn sigma_mutation_requires_rank_two() {
        let mut s = state_with(vec![3.0], 2, 2);
        let mut rng = derive_stream(0, 0);
        assert!(matches!(mutate_sigma(&mut s, 0, &mut rng), Err(Error::RankTooSmall(1))));
    }

    #[test]
    fn two_element_sigma_resorts() {
        let mut rng = derive_stream(1, 0);
        for _ in 0..100 {
            let mut s = state_with(vec![10.0, 2.0], 2, 2);
            mutate_sigma(&mut s, 0, &mut rng).unwrap();
            let sig = &s.factors().sigma;
            assert_eq!(sig.len(), 2);
            assert!(sig[0] >= sig[1]);
            assert!(sig.contains(&2.0));
            assert!(sig.iter().all(|v| (2.0..=10.0).contains(v)));
        }
    }

    #[test]
    fn interior_sigma_keeps_extremes() {
        let mut rng = derive_stream(2, 0);
        for _ in 0..1000 {
            let mut s = state_with(vec![10.0, 5.0, 2.0], 3, 3);
            mutate_sigma(&mut s, 1, &mut rng).unwrap();
            let sig = &s.factors().sigma;
            assert_eq!(sig.len(), 3);
            assert_eq!((sig[0], sig[2]), (10.0, 2.0));
        }
    }

    #[test]
    fn zero_xi_never_flips() {
        let mut rng = derive_stream(3, 0);
        let mut s = state_with(vec![4.0, 1.0], 2, 3);
        let before = s.coding().beta().to_vec();
        // xi must lie in (0, 1) for configs; the operator itself accepts 0
        for pos in 0..5 {
            assert!(!mutate_coding(&mut s, pos, &params(0.0), &mut rng).unwrap());
        }
        assert_eq!(s.coding().beta(), &before[..]);
    }

    #[test]
    fn forced_flip_swaps_pair() {
        let factors = SvdFactors::new(DenseMatrix::identity(1), DenseMatrix::identity(1), vec![1.0], 1.0).unwrap();
        let coding = Coding::new(vec![2.0, 3.0], vec![true, false]).unwrap();
        let mut s = GeneratorState::new(factors, coding).unwrap();
        let mut rng = derive_stream(3, 1);
        let flipped = mutate_coding(&mut s, 0, &params(1.0 - 1e-16), &mut rng).unwrap();
        assert!(flipped);
        assert_eq!(s.coding().beta(), &[false, true]);
        assert_eq!(s.coding().m(), 1);
    }

    #[test]
    fn out_of_range_positions() {
        let mut s = state_with(vec![4.0, 1.0], 2, 3);
        let mut rng = derive_stream(3, 2);
        assert!(mutate_sigma(&mut s, 2, &mut rng).is_err());
        assert!(mutate_coding(&mut s, 5, &params(0.5), &mut rng).is_err());
    }

    #[test]
    fn replace_u_keeps_sigma_and_coding() {
        let cfg = GeneratorConfig {
            size: SizeSpec::Exact { m: 6, n: 4 },
            ..GeneratorConfig::default()
        };
        let g = generate(&cfg, 5, 0).unwrap();
        let mut state = g.state.clone();
        let mut p = params(0.5);
        p.weights = [1.0, 0.0, 0.0];
        let mut rng = derive_stream(5, 100);
        let step = neighbor_step(&mut state, &p, &mut rng).unwrap();
        assert_eq!(step.operator, Operator::ReplaceU);
        assert_eq!(state.factors().sigma, g.state.factors().sigma);
        assert_eq!(state.coding(), g.state.coding());
        assert_ne!(step.instance.b, g.instance.b);
    }

    #[test]
    fn morph_identity_is_noop() {
        let cfg = GeneratorConfig {
            size: SizeSpec::Exact { m: 3, n: 7 },
            ..GeneratorConfig::default()
        };
        let g = generate(&cfg, 9, 0).unwrap();
        let steps = morph(&g.state, &g.state).unwrap();
        assert_eq!(steps.len(), 9);
        let mut work = MorphState::from_state(&g.state);
        for step in &steps {
            let before = work.clone();
            work.apply(step);
            assert_eq!(work, before);
        }
        assert_eq!(replay(&g.state, &steps).unwrap(), g.state);
    }

    #[test]
    fn morph_size_mismatch() {
        let a = generate(&GeneratorConfig { size: SizeSpec::Exact { m: 3, n: 4 }, ..Default::default() }, 1, 0).unwrap();
        let b = generate(&GeneratorConfig { size: SizeSpec::Exact { m: 4, n: 3 }, ..Default::default() }, 1, 1).unwrap();
        assert!(matches!(morph(&a.state, &b.state), Err(Error::SizeMismatch { .. })));
    }
}
