//! Seeded samplers for the coding distributions.
//!
//! The samplers are written out here instead of delegating to a
//! distribution crate so that the exact consumption of the underlying
//! stream is part of this crate's contract: an instance is replayable from
//! `(master_seed, index)` independently of third-party algorithm changes.

mod stream;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use stream::{derive_stream, stream_key, RngStream, STREAM_DOMAIN};

/// A parameterised distribution. The canonical text form is
/// `kind:param[:param]`, e.g. `uniform:1:1000` or `lognormal:-0.5:2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistributionSpec {
    LogNormal { mu: f64, sigma: f64 },
    /// `|N(mu, sigma^2)|`
    AbsNormal { mu: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    ChiSquare { df: u32 },
    FDist { d1: u32, d2: u32 },
    Gamma { shape: f64, scale: f64 },
    Exponential { rate: f64 },
    /// Symmetric `Beta(a, a)`.
    Beta { a: f64 },
}

/// The seven coding distributions compared for the right-hand side and
/// objective statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    LogNormal,
    AbsNormal,
    Uniform,
    ChiSquare,
    FDist,
    Gamma,
    Exponential,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 7] = [
        DistributionKind::LogNormal,
        DistributionKind::AbsNormal,
        DistributionKind::Uniform,
        DistributionKind::ChiSquare,
        DistributionKind::FDist,
        DistributionKind::Gamma,
        DistributionKind::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::LogNormal => "lognormal",
            DistributionKind::AbsNormal => "absnormal",
            DistributionKind::Uniform => "uniform",
            DistributionKind::ChiSquare => "chisquare",
            DistributionKind::FDist => "f",
            DistributionKind::Gamma => "gamma",
            DistributionKind::Exponential => "exponential",
        }
    }

    /// Fixed parameters near the middle of the experiment ranges.
    pub fn reference_spec(self) -> DistributionSpec {
        match self {
            DistributionKind::LogNormal => DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 },
            DistributionKind::AbsNormal => DistributionSpec::AbsNormal { mu: 0.0, sigma: 1.0 },
            DistributionKind::Uniform => DistributionSpec::Uniform { lo: 1.0, hi: 1000.0 },
            DistributionKind::ChiSquare => DistributionSpec::ChiSquare { df: 25 },
            DistributionKind::FDist => DistributionSpec::FDist { d1: 25, d2: 25 },
            DistributionKind::Gamma => DistributionSpec::Gamma { shape: 5.0, scale: 5.0 },
            DistributionKind::Exponential => DistributionSpec::Exponential { rate: 1.0 / 11.0 },
        }
    }

    /// Draw hyperparameters from the experiment ranges:
    /// lognormal/normal `mu ~ U(-2, 2)`, `sigma ~ U(0.1, 10)`; uniform fixed
    /// at `(1, 1000)`; chi-square and F degrees of freedom `ceil(U(1, 50))`;
    /// gamma shape and scale `U(0.05, 10)`; exponential scale `U(2, 20)`.
    pub fn randomized(self, rng: &mut RngStream) -> DistributionSpec {
        let ceil_df = |rng: &mut RngStream| rng.uniform(1.0, 50.0).ceil().max(1.0) as u32;
        match self {
            DistributionKind::LogNormal => {
                let mu = rng.uniform(-2.0, 2.0);
                let sigma = rng.uniform(0.1, 10.0);
                DistributionSpec::LogNormal { mu, sigma }
            }
            DistributionKind::AbsNormal => {
                let mu = rng.uniform(-2.0, 2.0);
                let sigma = rng.uniform(0.1, 10.0);
                DistributionSpec::AbsNormal { mu, sigma }
            }
            DistributionKind::Uniform => DistributionSpec::Uniform {
                lo: 1.0,
                hi: 1000.0,
            },
            DistributionKind::ChiSquare => DistributionSpec::ChiSquare { df: ceil_df(rng) },
            DistributionKind::FDist => {
                let d1 = ceil_df(rng);
                let d2 = ceil_df(rng);
                DistributionSpec::FDist { d1, d2 }
            }
            DistributionKind::Gamma => {
                let shape = rng.uniform(0.05, 10.0);
                let scale = rng.uniform(0.05, 10.0);
                DistributionSpec::Gamma { shape, scale }
            }
            DistributionKind::Exponential => {
                let scale = rng.uniform(2.0, 20.0);
                DistributionSpec::Exponential { rate: 1.0 / scale }
            }
        }
    }
}

/// Beta shape drawn as `lognormal(-0.2, 1.8)`, the experiment-mode rule.
pub fn randomized_beta_shape(rng: &mut RngStream) -> f64 {
    (-0.2 + 1.8 * rng.standard_normal()).exp()
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistributionParams(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDistributionParams(format!(
            "{name} must be finite, got {v}"
        )))
    }
}

impl DistributionSpec {
    pub fn kind(&self) -> Option<DistributionKind> {
        Some(match self {
            DistributionSpec::LogNormal { .. } => DistributionKind::LogNormal,
            DistributionSpec::AbsNormal { .. } => DistributionKind::AbsNormal,
            DistributionSpec::Uniform { .. } => DistributionKind::Uniform,
            DistributionSpec::ChiSquare { .. } => DistributionKind::ChiSquare,
            DistributionSpec::FDist { .. } => DistributionKind::FDist,
            DistributionSpec::Gamma { .. } => DistributionKind::Gamma,
            DistributionSpec::Exponential { .. } => DistributionKind::Exponential,
            DistributionSpec::Beta { .. } => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::LogNormal { mu, sigma } | DistributionSpec::AbsNormal { mu, sigma } => {
                finite("mu", mu)?;
                positive("sigma", sigma)
            }
            DistributionSpec::Uniform { lo, hi } => {
                finite("lo", lo)?;
                finite("hi", hi)?;
                if lo < hi {
                    Ok(())
                } else {
                    Err(Error::InvalidDistributionParams(format!(
                        "uniform needs lo < hi, got {lo} >= {hi}"
                    )))
                }
            }
            DistributionSpec::ChiSquare { df } => {
                if df >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidDistributionParams("chi-square df must be >= 1".into()))
                }
            }
            DistributionSpec::FDist { d1, d2 } => {
                if d1 >= 1 && d2 >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidDistributionParams("F degrees of freedom must be >= 1".into()))
                }
            }
            DistributionSpec::Gamma { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)
            }
            DistributionSpec::Exponential { rate } => positive("rate", rate),
            DistributionSpec::Beta { a } => positive("a", a),
        }
    }

    /// Draw one value. Validates parameters first.
    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        self.validate()?;
        Ok(self.sample_unchecked(rng))
    }

    /// Draw one value from an already validated spec.
    pub fn sample_unchecked(&self, rng: &mut RngStream) -> f64 {
        match *self {
            DistributionSpec::LogNormal { mu, sigma } => (mu + sigma * rng.standard_normal()).exp(),
            DistributionSpec::AbsNormal { mu, sigma } => (mu + sigma * rng.standard_normal()).abs(),
            DistributionSpec::Uniform { lo, hi } => rng.uniform(lo, hi),
            DistributionSpec::ChiSquare { df } => chi_square(df, rng),
            DistributionSpec::FDist { d1, d2 } => {
                let num = chi_square(d1, rng) / f64::from(d1);
                let den = chi_square(d2, rng) / f64::from(d2);
                num / den
            }
            DistributionSpec::Gamma { shape, scale } => scale * standard_gamma(shape, rng),
            DistributionSpec::Exponential { rate } => -(1.0 - rng.next_f64()).ln() / rate,
            DistributionSpec::Beta { a } => loop {
                let x = standard_gamma(a, rng);
                let y = standard_gamma(a, rng);
                let v = x / (x + y);
                // Tiny shapes can underflow a gamma draw to zero; keep the
                // support open.
                if v > 0.0 && v < 1.0 {
                    break v;
                }
            },
        }
    }
}

fn chi_square(df: u32, rng: &mut RngStream) -> f64 {
    2.0 * standard_gamma(f64::from(df) / 2.0, rng)
}

/// Marsaglia-Tsang gamma variate with unit scale. Shapes below one use the
/// `G(a + 1) * U^(1/a)` boost, with the uniform drawn after the gamma.
fn standard_gamma(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let g = standard_gamma(shape + 1.0, rng);
        let u = rng.next_f64();
        return g * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = rng.standard_normal();
        let t = 1.0 + c * z;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = rng.next_f64();
        if u.ln() < 0.5 * z * z + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::LogNormal { mu, sigma } => write!(f, "lognormal:{mu}:{sigma}"),
            DistributionSpec::AbsNormal { mu, sigma } => write!(f, "absnormal:{mu}:{sigma}"),
            DistributionSpec::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            DistributionSpec::ChiSquare { df } => write!(f, "chisquare:{df}"),
            DistributionSpec::FDist { d1, d2 } => write!(f, "f:{d1}:{d2}"),
            DistributionSpec::Gamma { shape, scale } => write!(f, "gamma:{shape}:{scale}"),
            DistributionSpec::Exponential { rate } => write!(f, "exponential:{rate}"),
            DistributionSpec::Beta { a } => write!(f, "beta:{a}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidDistributionParams(format!("`{s}`: {msg}"));
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
        let args: Vec<&str> = parts.map(str::trim).collect();
        let real = |i: usize| -> Result<f64> {
            args.get(i)
                .ok_or_else(|| bad(format!("missing parameter {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| bad(e.to_string()))
        };
        let int = |i: usize| -> Result<u32> {
            args.get(i)
                .ok_or_else(|| bad(format!("missing parameter {}", i + 1)))?
                .parse::<u32>()
                .map_err(|e| bad(e.to_string()))
        };
        let arity = match kind.as_str() {
            "chisquare" | "exponential" | "beta" => 1,
            _ => 2,
        };
        if args.len() != arity {
            return Err(bad(format!("expected {arity} parameter(s), got {}", args.len())));
        }
        let spec = match kind.as_str() {
            "lognormal" => DistributionSpec::LogNormal {
                mu: real(0)?,
                sigma: real(1)?,
            },
            "absnormal" | "normal" => DistributionSpec::AbsNormal {
                mu: real(0)?,
                sigma: real(1)?,
            },
            "uniform" => DistributionSpec::Uniform {
                lo: real(0)?,
                hi: real(1)?,
            },
            "chisquare" => DistributionSpec::ChiSquare { df: int(0)? },
            "f" => DistributionSpec::FDist {
                d1: int(0)?,
                d2: int(1)?,
            },
            "gamma" => DistributionSpec::Gamma {
                shape: real(0)?,
                scale: real(1)?,
            },
            "exponential" => DistributionSpec::Exponential { rate: real(0)? },
            "beta" => DistributionSpec::Beta { a: real(0)? },
            other => return Err(bad(format!("unknown distribution `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_stays_in_range() {
        let spec: DistributionSpec = "uniform:1:1000".parse().unwrap();
        let mut rng = derive_stream(11, 0);
        for _ in 0..10_000 {
            let v = spec.sample(&mut rng).unwrap();
            assert!((1.0..=1000.0).contains(&v));
        }
    }

    #[test]
    fn narrow_uniform_collapses() {
        let mut rng = derive_stream(5, 5);
        for eps in [1e-3, 1e-6, 1e-9] {
            let spec = DistributionSpec::Uniform { lo: 5.0, hi: 5.0 + eps };
            let v = spec.sample(&mut rng).unwrap();
            assert!((v - 5.0).abs() <= eps);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let bad = [
            DistributionSpec::Uniform { lo: 2.0, hi: 2.0 },
            DistributionSpec::LogNormal { mu: 0.0, sigma: 0.0 },
            DistributionSpec::AbsNormal { mu: f64::NAN, sigma: 1.0 },
            DistributionSpec::ChiSquare { df: 0 },
            DistributionSpec::FDist { d1: 3, d2: 0 },
            DistributionSpec::Gamma { shape: -1.0, scale: 1.0 },
            DistributionSpec::Exponential { rate: 0.0 },
            DistributionSpec::Beta { a: -0.5 },
        ];
        let mut rng = derive_stream(0, 0);
        for spec in bad {
            assert!(matches!(
                spec.sample(&mut rng),
                Err(Error::InvalidDistributionParams(_))
            ));
        }
    }

    #[test]
    fn text_form_round_trips() {
        for text in [
            "uniform:1:1000",
            "lognormal:-0.5:2",
            "absnormal:0.25:3",
            "chisquare:7",
            "f:4:9",
            "gamma:0.5:2",
            "exponential:0.125",
            "beta:2",
        ] {
            let spec: DistributionSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("uniform:1".parse::<DistributionSpec>().is_err());
        assert!("cauchy:0:1".parse::<DistributionSpec>().is_err());
        assert!("chisquare:2.5".parse::<DistributionSpec>().is_err());
    }

    #[test]
    fn nonnegative_kinds() {
        let mut rng = derive_stream(9, 2);
        let specs = [
            DistributionSpec::LogNormal { mu: -1.0, sigma: 3.0 },
            DistributionSpec::AbsNormal { mu: -2.0, sigma: 1.0 },
            DistributionSpec::ChiSquare { df: 1 },
            DistributionSpec::FDist { d1: 1, d2: 1 },
            DistributionSpec::Gamma { shape: 0.05, scale: 0.05 },
            DistributionSpec::Exponential { rate: 20.0 },
        ];
        for spec in specs {
            for _ in 0..2000 {
                assert!(spec.sample(&mut rng).unwrap() >= 0.0, "{spec}");
            }
        }
        let beta = DistributionSpec::Beta { a: 0.01 };
        for _ in 0..2000 {
            let v = beta.sample(&mut rng).unwrap();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn randomized_hyperparameters_in_range() {
        let mut rng = derive_stream(4, 4);
        for _ in 0..200 {
            for kind in DistributionKind::ALL {
                let spec = kind.randomized(&mut rng);
                spec.validate().unwrap();
                assert_eq!(spec.kind(), Some(kind));
                match spec {
                    DistributionSpec::LogNormal { mu, sigma } | DistributionSpec::AbsNormal { mu, sigma } => {
                        assert!((-2.0..2.0).contains(&mu) && (0.1..10.0).contains(&sigma));
                    }
                    DistributionSpec::ChiSquare { df } => assert!((1..=50).contains(&df)),
                    DistributionSpec::FDist { d1, d2 } => {
                        assert!((1..=50).contains(&d1) && (1..=50).contains(&d2))
                    }
                    DistributionSpec::Exponential { rate } => {
                        assert!(rate > 1.0 / 20.0 - 1e-15 && rate <= 0.5)
                    }
                    _ => {}
                }
            }
            assert!(randomized_beta_shape(&mut rng) > 0.0);
        }
    }
}
