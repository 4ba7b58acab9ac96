//! Seedable generator of feasible, bounded linear programs
//! `max c^T x  s.t.  Ax <= b, x >= 0` whose optimal primal-dual pair,
//! condition number and rank are fixed in advance.
//!
//! The pipeline: draw a coding of the optimal point ([`coding`]), build
//! `A = U Sigma V^T` with the requested spectrum ([`matrixgen`]), then set
//! `b = Ax* + s*` and `c = A^T y* - r*` ([`instance`]). [`config::generate`]
//! runs all of it from a `(seed, index)` pair. Instances can be walked
//! through a neighborhood ([`neighborhood`]), solved with the built-in
//! revised simplex ([`solver`]) and written to disk ([`io`]).
//!
//! ```
//! use lpforge::{generate, verify_optimality, GeneratorConfig, SizeSpec};
//!
//! let config = GeneratorConfig {
//!     size: SizeSpec::Exact { m: 8, n: 12 },
//!     ..GeneratorConfig::default()
//! };
//! let g = generate(&config, 7, 0).unwrap();
//! assert!(verify_optimality(&g.instance, &g.point, 1e-8).unwrap().passed);
//! ```

pub mod cli;
pub mod coding;
pub mod config;
pub mod distributions;
pub mod error;
pub mod instance;
pub mod io;
pub mod linalg;
pub mod matrixgen;
pub mod neighborhood;
pub mod serde_exact;
pub mod solver;
pub mod search;
pub mod summary;

pub use coding::{decode, encode, encode_exact, AlphaRule, Coding, PrimalDualPoint, SizeBounds};
pub use config::{generate, generate_with, GeneratedInstance, GeneratorConfig, KappaSpec, RankSpec, SizeSpec};
pub use distributions::{derive_stream, DistributionKind, DistributionSpec, RngStream};
pub use error::{Error, Result};
pub use instance::{construct_instance, verify_optimality, LpInstance, OptimalityReport, DEFAULT_CERT_TOL};
pub use linalg::DenseMatrix;
pub use matrixgen::{generate_a, measured_cond, measured_rank, MatrixParams, SvdFactors};
pub use neighborhood::{morph, neighbor_step, replay, GeneratorState, MorphStep, Operator, OperatorParams};
pub use solver::{iteration_stats, solve, PivotRule, SolveResult, SolveStatus};
