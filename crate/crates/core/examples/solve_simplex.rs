//! Solve generated instances with both pivot rules and compare against the
//! preset optimum; a rank-one batch shows how rank drives the pivot count.

use lpforge::solver::default_max_iter;
use lpforge::{generate, iteration_stats, solve, GeneratorConfig, PivotRule, RankSpec};

fn main() -> lpforge::Result<()> {
    let config = GeneratorConfig::default();
    let g = generate(&config, 11, 0)?;
    let preset: f64 = g.instance.c.iter().zip(&g.point.x).map(|(c, x)| c * x).sum();
    for rule in [PivotRule::Dantzig, PivotRule::Bland] {
        let r = solve(&g.instance, rule, default_max_iter(&g.instance));
        println!(
            "{rule:?}: {:?} objective {:.10e} (preset {preset:.10e}) in {} iterations",
            r.status, r.objective, r.iterations
        );
    }

    for (label, rank) in [("random rank", RankSpec::Uniform), ("rank 1", RankSpec::Fixed(1))] {
        let cfg = GeneratorConfig { rank, ..config.clone() };
        let batch: Vec<_> = (0..40).map(|i| generate(&cfg, 12, i).map(|g| g.instance)).collect::<Result<_, _>>()?;
        let stats = iteration_stats(&batch, PivotRule::Dantzig, 50_000)?;
        println!("{label:>11}: median {} (q1 {}, q3 {})", stats.median, stats.q1, stats.q3);
    }
    Ok(())
}
