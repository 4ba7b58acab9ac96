//! Command-line interface: `generate`, `mutate`, `verify`, `solve`, `stats`.
//!
//! Exit codes: 0 success, 1 verification failure (or a non-optimal solve),
//! 2 usage or parameter error, 3 I/O or input-file error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::config::{generate, GeneratorConfig, KappaSpec, RankSpec, SizeSpec};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::instance::{verify_optimality, DEFAULT_CERT_TOL};
use crate::io::bundle::{continue_chain, export_json, import_json, ChainEvent, ChainProvenance, InstanceBundle};
use crate::io::mps::export_mps;
use crate::io::stats::{stats_csv, summarize_batch};
use crate::io::trace::{write_trace_line, TraceRecord};
use crate::search::SearchSettings;
use crate::solver::{default_max_iter, solve, PivotRule, SolveStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Snapshot steps written by `mutate --snapshots`.
pub const CHECKPOINTS: [usize; 8] = [0, 10, 30, 50, 100, 300, 500, 1000];

/// Kappa used by `stats` unless one is given.
pub const STATS_KAPPA: f64 = 20.0;

#[derive(Parser, Debug)]
#[command(name = "lpforge", version, about = "Generate LP instances with a preset optimum, condition number and rank")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a batch of instance bundles.
    Generate(GenerateArgs),
    /// Walk a bundle through the neighborhood operators.
    Mutate(MutateArgs),
    /// Check the optimality certificate stored in a bundle.
    Verify(VerifyArgs),
    /// Solve a bundle with the built-in simplex and compare to the certificate.
    Solve(SolveArgs),
    /// Right-hand-side and objective statistics per coding distribution.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// Reference defaults (50x50, uniform coding, kappa ~ U(2, 70000)).
    #[value(name = "paper", alias = "reference")]
    Reference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Dantzig,
    Bland,
}

impl From<RuleArg> for PivotRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Dantzig => PivotRule::Dantzig,
            RuleArg::Bland => PivotRule::Bland,
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn parse_dist(s: &str) -> std::result::Result<DistributionSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weights(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected w1:w2:w3, got `{s}`"));
    }
    let mut w = [0.0; 3];
    for (slot, p) in w.iter_mut().zip(parts) {
        *slot = p.trim().parse::<f64>().map_err(|e| e.to_string())?;
    }
    Ok(w)
}

/// Generator settings. Flags override the `--config` file, which overrides
/// the defaults; `--preset paper` (alias `reference`) discards both and
/// restores the defaults.
#[derive(Args, Debug, Clone, Default)]
struct GenOptions {
    /// JSON file with a generator config (missing fields take defaults).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Number of constraints (with --n).
    #[arg(long, requires = "n")]
    m: Option<usize>,
    /// Number of variables (with --m).
    #[arg(long, requires = "m")]
    n: Option<usize>,
    /// Total coding length N = m + n (with --k).
    #[arg(long, requires = "k", conflicts_with_all = ["m", "size_bounds"])]
    n_total: Option<usize>,
    /// Number of primal basic entries, i.e. constraints (with --n-total).
    #[arg(long, requires = "n_total")]
    k: Option<usize>,
    /// Random size: N = ceil(U(a, b)), given as a:b.
    #[arg(long, value_parser = parse_pair, conflicts_with = "m")]
    size_bounds: Option<(f64, f64)>,
    /// Coding distribution, e.g. uniform:1:1000 or lognormal:0:1.
    #[arg(long, value_parser = parse_dist)]
    dist: Option<DistributionSpec>,
    /// Symmetric beta shape for fractional parts.
    #[arg(long)]
    beta_a: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    /// Fixed condition number.
    #[arg(long, conflicts_with = "kappa_range", allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Condition number drawn from U(lo, hi), given as lo:hi.
    #[arg(long, value_parser = parse_pair)]
    kappa_range: Option<(f64, f64)>,
    /// Fixed rank (default: uniform over 1..=min(m, n)).
    #[arg(long)]
    rank: Option<usize>,
    /// G = gap_factor * kappa.
    #[arg(long)]
    gap_factor: Option<f64>,
    #[arg(long)]
    a_kappa: Option<f64>,
    #[arg(long)]
    b_kappa: Option<f64>,
    /// Redraw coding hyperparameters per instance from the experiment ranges.
    #[arg(long)]
    randomize: bool,
    /// Operator selection weights w1:w2:w3.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<[f64; 3]>,
}

impl GenOptions {
    fn kappa_given(&self) -> bool {
        self.kappa.is_some() || self.kappa_range.is_some() || self.config.is_some() || self.preset.is_some()
    }

    fn build(&self) -> Result<GeneratorConfig> {
        if self.preset == Some(Preset::Reference) {
            return Ok(GeneratorConfig::default());
        }
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?
            }
            None => GeneratorConfig::default(),
        };
        if let (Some(m), Some(n)) = (self.m, self.n) {
            cfg.size = SizeSpec::Exact { m, n };
        }
        if let (Some(total), Some(k)) = (self.n_total, self.k) {
            if k == 0 || k >= total {
                return Err(Error::InvalidSizeBounds {
                    a: total as f64,
                    b: k as f64,
                });
            }
            cfg.size = SizeSpec::Exact { m: k, n: total - k };
        }
        if let Some((a, b)) = self.size_bounds {
            cfg.size = SizeSpec::Bounds { a, b };
        }
        if let Some(d) = self.dist {
            cfg.dist_x1 = d;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        set!(beta_a, lambda, xi, gap_factor, a_kappa, b_kappa);
        if let Some(k) = self.kappa {
            cfg.kappa = KappaSpec::Fixed(k);
        }
        if let Some((lo, hi)) = self.kappa_range {
            cfg.kappa = KappaSpec::Uniform { lo, hi };
        }
        if let Some(l) = self.rank {
            cfg.rank = RankSpec::Fixed(l);
        }
        if self.randomize {
            cfg.randomize_hyperparams = true;
        }
        if let Some(w) = self.weights {
            cfg.operator_weights = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenOptions,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Master seed; instance i uses the stream (seed, i).
    #[arg(long, env = "LPFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Output directory for instance_NNNNN.json files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write instance_NNNNN.mps.
    #[arg(long)]
    mps: bool,
}

#[derive(Args, Debug)]
struct MutateArgs {
    /// Input bundle.
    input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Chain seed.
    #[arg(long, env = "LPFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Chain stream index under the chain seed.
    #[arg(long, default_value_t = 0)]
    chain_index: u64,
    /// Operator selection weights w1:w2:w3 (default: the bundle's config).
    #[arg(long, value_parser = parse_weights)]
    weights: Option<[f64; 3]>,
    /// Keep a proposal only if the simplex needs at least as many iterations.
    #[arg(long)]
    search: bool,
    /// Record simplex iterations in the trace at the snapshot checkpoints.
    #[arg(long)]
    solve_checkpoints: bool,
    /// Write snapshot_NNNNN.json at the checkpoints 0, 10, 30, 50, 100, 300, 500, 1000.
    #[arg(long)]
    snapshots: bool,
    #[arg(long, value_enum, default_value = "dantzig")]
    rule: RuleArg,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory for trace.jsonl, final.json and snapshots.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    input: PathBuf,
    /// Relative tolerance.
    #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "dantzig")]
    rule: RuleArg,
    /// Iteration cap (default 500 (m + n)).
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[command(flatten)]
    gen: GenOptions,
    /// Instances per distribution.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, env = "LPFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Keep the coding hyperparameters fixed instead of redrawing them.
    #[arg(long)]
    fixed_hyperparams: bool,
    /// Output directory for rhs_stats.csv and objective_stats.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Mutate(a) => cmd_mutate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Stats(a) => cmd_stats(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn cmd_generate(args: &GenerateArgs) -> Result<i32> {
    let cfg = args.gen.build()?;
    ensure_dir(&args.out)?;
    let lines: Vec<(String, bool)> = (0..args.count)
        .into_par_iter()
        .map(|i| -> Result<(String, bool)> {
            let g = generate(&cfg, args.seed, i)?;
            let report = verify_optimality(&g.instance, &g.point, DEFAULT_CERT_TOL)?;
            let bundle = InstanceBundle::from_generated(&g, &cfg, args.seed, i);
            export_json(&bundle, &args.out.join(format!("instance_{i:05}.json")))?;
            if args.mps {
                export_mps(&g.instance, &args.out.join(format!("instance_{i:05}.mps")))?;
            }
            let meta = &g.instance.meta;
            let line = format!(
                "instance {i:05} m={} n={} rank={} cond={:.6e} certificate={}",
                g.instance.m(),
                g.instance.n(),
                meta.rank.unwrap_or(0),
                meta.achieved_cond.unwrap_or(f64::NAN),
                if report.passed { "pass" } else { "FAIL" }
            );
            Ok((line, report.passed))
        })
        .collect::<Result<_>>()?;
    let mut failed = 0;
    for (line, passed) in &lines {
        println!("{line}");
        failed += usize::from(!passed);
    }
    if failed > 0 {
        eprintln!("{failed} of {} certificates failed", lines.len());
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

fn cmd_mutate(args: &MutateArgs) -> Result<i32> {
    let source = import_json(&args.input)?;
    ensure_dir(&args.out)?;
    let max_iter = args.max_iter.unwrap_or_else(|| default_max_iter(&source.instance));
    let rule = PivotRule::from(args.rule);
    let chain = ChainProvenance {
        chain_seed: args.seed,
        chain_index: args.chain_index,
        steps: args.steps,
        weights: args.weights.unwrap_or(source.provenance.config.operator_weights),
        search: args.search.then_some(SearchSettings { rule, max_iter }),
    };
    if chain.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || chain.weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidFraction {
            name: "weights",
            value: chain.weights.iter().sum(),
            requirement: "weights must be nonnegative with a positive sum",
        });
    }

    let trace_path = args.out.join("trace.jsonl");
    let file = File::create(&trace_path).map_err(|e| Error::io(&trace_path, e))?;
    let mut trace = BufWriter::new(file);
    let snapshot = |bundle: &InstanceBundle, step: usize| -> Result<()> {
        export_json(bundle, &args.out.join(format!("snapshot_{step:05}.json")))
    };
    if args.snapshots {
        let start = crate::io::bundle::chained_bundle(
            &source,
            &source.state()?,
            None,
            ChainProvenance { steps: 0, ..chain.clone() },
        );
        snapshot(&start, 0)?;
    }

    let visit = |ev: &ChainEvent| -> Result<()> {
        let checkpoint = CHECKPOINTS.contains(&ev.step);
        let solver_iterations = match ev.iterations {
            Some(it) => Some(it),
            None if checkpoint && args.solve_checkpoints => Some(solve(ev.instance, rule, max_iter).iterations),
            None => None,
        };
        let record = TraceRecord {
            step: ev.step,
            operator: ev.operator,
            pos: ev.pos,
            achieved_cond: ev.state.factors().cond(),
            rank: ev.state.factors().rank(),
            solver_iterations,
            accepted: ev.accepted,
        };
        write_trace_line(&mut trace, &record).map_err(|e| Error::io(&trace_path, e))?;
        if checkpoint && args.snapshots {
            snapshot(&ev.bundle(&source, &chain), ev.step)?;
        }
        Ok(())
    };
    let last = continue_chain(&source, &chain, visit)?;
    trace.flush().map_err(|e| Error::io(&trace_path, e))?;
    drop(trace);

    // invariant breach here is a bug sentinel
    last.validate()?;
    let report = verify_optimality(&last.instance, &last.certificate, DEFAULT_CERT_TOL)?;
    export_json(&last, &args.out.join("final.json"))?;
    println!(
        "steps={} rank={} cond={:.6e} certificate={}",
        args.steps,
        last.instance.meta.rank.unwrap_or(0),
        last.instance.meta.achieved_cond.unwrap_or(f64::NAN),
        if report.passed { "pass" } else { "FAIL" }
    );
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let bundle = import_json(&args.input)?;
    let r = verify_optimality(&bundle.instance, &bundle.certificate, args.tol)?;
    println!("primal_residual   {:e}", r.primal_residual);
    println!("dual_residual     {:e}", r.dual_residual);
    println!("complementarity   {:e}", r.complementarity);
    println!("duality_gap       {:e}", r.duality_gap);
    println!("sign_violation    {:e}", r.sign_violation);
    println!("threshold         {:e}", r.threshold);
    println!("result            {}", if r.passed { "pass" } else { "FAIL" });
    Ok(if r.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let bundle = import_json(&args.input)?;
    let inst = &bundle.instance;
    let max_iter = args.max_iter.unwrap_or_else(|| default_max_iter(inst));
    let res = solve(inst, args.rule.into(), max_iter);
    let certificate: f64 = inst.c.iter().zip(&bundle.certificate.x).map(|(c, x)| c * x).sum();
    let diff = (res.objective - certificate).abs();
    let matches = diff <= 1e-6 * inst.scale();
    println!("form              max c^T x, Ax <= b, x >= 0 (slack-augmented)");
    println!("status            {:?}", res.status);
    println!("objective         {:e}", res.objective);
    println!("certificate       {certificate:e}");
    println!("abs_difference    {diff:e}");
    println!("iterations        {}", res.iterations);
    println!("pivot_rule        {:?}", res.pivot_rule);
    println!("switched_to_bland {}", res.switched_to_bland);
    Ok(if res.status == SolveStatus::Optimal && matches {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

fn cmd_stats(args: &StatsArgs) -> Result<i32> {
    let mut cfg = args.gen.build()?;
    if !args.gen.kappa_given() {
        cfg.kappa = KappaSpec::Fixed(STATS_KAPPA);
    }
    if !args.fixed_hyperparams && args.gen.preset.is_none() {
        cfg.randomize_hyperparams = true;
    }
    if args.count == 0 {
        return Err(Error::EmptyBatch);
    }
    ensure_dir(&args.out)?;
    let summary = summarize_batch(&cfg, args.count, args.seed)?;
    stats_csv(&summary, false, &args.out.join("rhs_stats.csv"))?;
    stats_csv(&summary, true, &args.out.join("objective_stats.csv"))?;
    println!("{:12} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}", "mean b", "Min", "Low", "Q1", "Median", "Q3", "High", "Max");
    for row in &summary.rows {
        print!("{:12}", row.distribution);
        for v in row.rhs.as_array() {
            print!(" {v:>11.3e}");
        }
        println!();
    }
    Ok(EXIT_OK)
}
