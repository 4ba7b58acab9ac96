//! Keep only neighbor steps that make the instance at least as hard for the
//! built-in simplex, and watch the iteration count climb.

use lpforge::search::{hardening_search, SearchSettings, SearchState};
use lpforge::solver::default_max_iter;
use lpforge::{derive_stream, generate, GeneratorConfig, PivotRule, SizeSpec};

fn main() -> lpforge::Result<()> {
    let config = GeneratorConfig {
        size: SizeSpec::Exact { m: 30, n: 30 },
        ..GeneratorConfig::default()
    };
    let g = generate(&config, 1, 0)?;
    let settings = SearchSettings {
        rule: PivotRule::Dantzig,
        max_iter: default_max_iter(&g.instance),
    };
    let mut current = SearchState::new(g.state, &settings)?;
    println!("start: {} iterations", current.iterations);
    let mut accepted = 0;
    let mut rng = derive_stream(1, 1000);
    hardening_search(&mut current, &config.operator_params(), &settings, &mut rng, 300, |k, step, _| {
        accepted += usize::from(step.accepted);
        if [10, 30, 100, 300].contains(&k) {
            println!("step {k:>3}: {} iterations, {accepted} proposals kept", step.iterations);
        }
        Ok(())
    })
}
