//! Random walk through the neighborhood operators. Every visited instance
//! keeps a valid certificate.

use lpforge::neighborhood::run_chain;
use lpforge::{derive_stream, generate, verify_optimality, GeneratorConfig, SizeSpec};

fn main() -> lpforge::Result<()> {
    let config = GeneratorConfig {
        size: SizeSpec::Exact { m: 20, n: 30 },
        ..GeneratorConfig::default()
    };
    let mut state = generate(&config, 5, 0)?.state;
    let params = config.operator_params();
    let mut rng = derive_stream(5, 1000);
    run_chain(&mut state, &params, &mut rng, 200, |k, step| {
        let ok = verify_optimality(&step.instance, &step.point, 1e-8)?.passed;
        if k % 20 == 0 {
            println!(
                "step {k:>3} operator {} pos {:>4} rank {:>2} cond {:.3e} certified {ok}",
                step.operator.number(),
                step.pos.map_or("-".into(), |p| p.to_string()),
                step.instance.meta.rank.unwrap(),
                step.instance.meta.achieved_cond.unwrap(),
            );
        }
        Ok(())
    })
}
