//! Mean right-hand side per coding distribution, summarized as min,
//! whiskers, quartiles and max.

use lpforge::io::stats::{stats_csv_string, summarize_batch};
use lpforge::{GeneratorConfig, KappaSpec};

fn main() -> lpforge::Result<()> {
    let config = GeneratorConfig {
        kappa: KappaSpec::Fixed(20.0),
        randomize_hyperparams: true,
        ..GeneratorConfig::default()
    };
    let summary = summarize_batch(&config, 50, 1)?;
    print!("{}", stats_csv_string(&summary, false));
    Ok(())
}
