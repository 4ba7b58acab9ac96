//! Generator configuration and the one-call instance pipeline.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coding::{check_fraction, encode, encode_exact, AlphaRule, SizeBounds};
use crate::distributions::{derive_stream, randomized_beta_shape, DistributionSpec, RngStream};
use crate::error::{Error, Result};
use crate::instance::{construct_instance, LpInstance};
use crate::coding::PrimalDualPoint;
use crate::matrixgen::{generate_a, measured_cond, MatrixParams};
use crate::neighborhood::{GeneratorState, OperatorParams};

/// Problem size: either exact `(m, n)` or bounds on `N = m + n` with `m`
/// drawn uniformly from `1..N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeSpec {
    Exact { m: usize, n: usize },
    Bounds { a: f64, b: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaSpec {
    Fixed(f64),
    /// `U(lo, hi)` per instance.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSpec {
    Fixed(usize),
    /// Uniform over the integers `1..=min(m, n)`.
    Uniform,
}

/// Every tunable of the generator. [`Default`] gives the reference setup:
/// 50x50 (`N = 100`, `k = 50`), `U(1, 1000)` integer parts, `lambda = 0.7`,
/// `xi = 0.5`, `kappa ~ U(2, 70000)`, `G = 3 kappa`, `a_kappa = 0.1`,
/// `b_kappa = 5`, random rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub size: SizeSpec,
    pub dist_x1: DistributionSpec,
    /// Symmetric beta shape for the fractional parts.
    pub beta_a: f64,
    pub lambda: f64,
    pub xi: f64,
    pub kappa: KappaSpec,
    pub rank: RankSpec,
    /// `G = gap_factor * kappa`.
    pub gap_factor: f64,
    pub a_kappa: f64,
    pub b_kappa: f64,
    /// Redraw the coding hyperparameters per instance from the experiment
    /// ranges (see [`crate::distributions::DistributionKind::randomized`]).
    pub randomize_hyperparams: bool,
    /// Selection weights of the three neighborhood operators.
    pub operator_weights: [f64; 3],
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            size: SizeSpec::Exact { m: 50, n: 50 },
            dist_x1: DistributionSpec::Uniform { lo: 1.0, hi: 1000.0 },
            // median of lognormal(-0.2, 1.8)
            beta_a: (-0.2f64).exp(),
            lambda: 0.7,
            xi: 0.5,
            kappa: KappaSpec::Uniform { lo: 2.0, hi: 70000.0 },
            rank: RankSpec::Uniform,
            gap_factor: 3.0,
            a_kappa: 0.1,
            b_kappa: 5.0,
            randomize_hyperparams: false,
            operator_weights: [1.0, 1.0, 1.0],
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        match self.size {
            SizeSpec::Exact { m, n } => {
                if m == 0 || n == 0 {
                    return Err(Error::InvalidSizeBounds {
                        a: m as f64,
                        b: n as f64,
                    });
                }
            }
            SizeSpec::Bounds { a, b } => {
                if !(a.is_finite() && b.is_finite() && a >= 2.0 && b >= a) {
                    return Err(Error::InvalidSizeBounds { a, b });
                }
            }
        }
        self.alpha_rule().validate()?;
        check_fraction("xi", self.xi)?;
        match self.kappa {
            KappaSpec::Fixed(k) => {
                if !(k.is_finite() && k >= 1.0) {
                    return Err(Error::InvalidKappa(k));
                }
            }
            KappaSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo >= 1.0 && lo < hi) {
                    return Err(Error::InvalidKappa(lo));
                }
            }
        }
        if let RankSpec::Fixed(0) = self.rank {
            return Err(Error::InvalidRank { rank: 0, m: 0, n: 0 });
        }
        if !(self.gap_factor.is_finite() && self.gap_factor > 0.0) {
            return Err(Error::InvalidSingularValueParams(format!(
                "gap factor must be > 0, got {}",
                self.gap_factor
            )));
        }
        if !(self.a_kappa > 0.0 && self.a_kappa < self.b_kappa && self.b_kappa.is_finite()) {
            return Err(Error::InvalidSingularValueParams(format!(
                "need 0 < a_kappa < b_kappa, got {}, {}",
                self.a_kappa, self.b_kappa
            )));
        }
        let w = self.operator_weights;
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidFraction {
                name: "operator_weights",
                value: w.iter().sum(),
                requirement: "weights must be nonnegative with a positive sum",
            });
        }
        Ok(())
    }

    pub fn alpha_rule(&self) -> AlphaRule {
        AlphaRule {
            dist_x1: self.dist_x1,
            beta_spec: DistributionSpec::Beta { a: self.beta_a },
            lambda: self.lambda,
        }
    }

    pub fn operator_params(&self) -> OperatorParams {
        OperatorParams {
            rule: self.alpha_rule(),
            xi: self.xi,
            weights: self.operator_weights,
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

/// Output of one generation: the mutable generator state plus the instance
/// and its certificate point.
#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub state: GeneratorState,
    pub instance: LpInstance,
    pub point: PrimalDualPoint,
}

/// Generate instance `index` of the batch seeded by `master_seed`.
pub fn generate(config: &GeneratorConfig, master_seed: u64, index: u64) -> Result<GeneratedInstance> {
    let mut rng = derive_stream(master_seed, index);
    generate_with(config, &mut rng)
}

/// Generate from an explicit stream.
///
/// Stream order: hyperparameters (only when randomized), coding, kappa,
/// rank, singular values, `U`, `V`.
pub fn generate_with(config: &GeneratorConfig, rng: &mut RngStream) -> Result<GeneratedInstance> {
    config.validate()?;
    let mut rule = config.alpha_rule();
    if config.randomize_hyperparams {
        if let Some(kind) = config.dist_x1.kind() {
            rule.dist_x1 = kind.randomized(rng);
        }
        rule.beta_spec = DistributionSpec::Beta {
            a: randomized_beta_shape(rng),
        };
    }

    let coding = match config.size {
        SizeSpec::Exact { m, n } => encode_exact(m, n, &rule, rng)?,
        SizeSpec::Bounds { a, b } => encode(SizeBounds { a, b }, &rule, rng)?,
    };
    let (m, n) = (coding.m(), coding.n());

    let kappa = match config.kappa {
        KappaSpec::Fixed(k) => k,
        KappaSpec::Uniform { lo, hi } => rng.uniform(lo, hi),
    };
    let max_rank = m.min(n);
    let rank = match config.rank {
        RankSpec::Fixed(l) => l,
        RankSpec::Uniform => 1 + rng.index(max_rank),
    };
    let gap = config.gap_factor * kappa;
    let params = MatrixParams {
        rank,
        kappa,
        gap,
        a_kappa: config.a_kappa,
        b_kappa: config.b_kappa,
    };
    let (a, factors) = generate_a(&params, m, n, rng)?;
    let (mut instance, point) = construct_instance(&coding, &a)?;
    instance.meta.master_seed = Some(rng.master_seed());
    instance.meta.stream_index = Some(rng.stream_index());
    instance.meta.kappa_target = Some(kappa);
    instance.meta.achieved_cond = Some(measured_cond(&a)?);
    instance.meta.rank = Some(rank);
    instance.meta.gap = Some(gap);
    instance.meta.dist_x1 = Some(rule.dist_x1.to_string());
    instance.meta.beta_spec = Some(rule.beta_spec.to_string());

    let state = GeneratorState::new(factors, coding)?;
    Ok(GeneratedInstance { state, instance, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::verify_optimality;

    #[test]
    fn default_config_is_valid() {
        GeneratorConfig::default().validate().unwrap();
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = GeneratorConfig {
            size: SizeSpec::Bounds { a: 10.0, b: 20.0 },
            kappa: KappaSpec::Fixed(12.5),
            rank: RankSpec::Fixed(3),
            ..GeneratorConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: GeneratorConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        // missing fields fall back to defaults
        let partial: GeneratorConfig = serde_json::from_str(r#"{"lambda":0.25}"#).unwrap();
        assert_eq!(partial.lambda, 0.25);
        assert_eq!(partial.size, SizeSpec::Exact { m: 50, n: 50 });
    }

    #[test]
    fn rejects_bad_kappa() {
        let cfg = GeneratorConfig {
            kappa: KappaSpec::Fixed(0.5),
            ..GeneratorConfig::default()
        };
        assert!(matches!(generate(&cfg, 1, 0), Err(Error::InvalidKappa(_))));
    }

    #[test]
    fn generation_is_deterministic_and_certified() {
        let cfg = GeneratorConfig::default();
        let g1 = generate(&cfg, 42, 3).unwrap();
        let g2 = generate(&cfg, 42, 3).unwrap();
        assert_eq!(g1.instance, g2.instance);
        assert_eq!(g1.instance.m(), 50);
        assert!(verify_optimality(&g1.instance, &g1.point, 1e-8).unwrap().passed);
    }

    #[test]
    fn randomized_hyperparams_recorded() {
        let cfg = GeneratorConfig {
            size: SizeSpec::Exact { m: 5, n: 6 },
            dist_x1: DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 },
            randomize_hyperparams: true,
            ..GeneratorConfig::default()
        };
        let g = generate(&cfg, 7, 0).unwrap();
        let text = g.instance.meta.dist_x1.unwrap();
        assert!(text.starts_with("lognormal:"));
        assert_ne!(text, "lognormal:0:1");
    }
}
