//! Sweep the requested rank and condition number and compare them with an
//! SVD of the generated matrix.

use lpforge::{generate, measured_cond, measured_rank, GeneratorConfig, KappaSpec, RankSpec};

fn main() -> lpforge::Result<()> {
    println!("{:>6} {:>10} {:>14} {:>6}", "rank", "kappa", "measured cond", "rank'");
    for (rank, kappa) in [(1, 7.0), (2, 10.0), (17, 1000.0), (35, 25_000.0), (50, 70_000.0)] {
        let config = GeneratorConfig {
            rank: RankSpec::Fixed(rank),
            kappa: KappaSpec::Fixed(kappa),
            ..GeneratorConfig::default()
        };
        let a = generate(&config, 3, rank as u64)?.instance.a;
        println!(
            "{rank:>6} {kappa:>10} {:>14.6e} {:>6}",
            measured_cond(&a)?,
            measured_rank(&a)
        );
    }
    // rank 1 has a single nonzero singular value, so its condition number is 1
    Ok(())
}
