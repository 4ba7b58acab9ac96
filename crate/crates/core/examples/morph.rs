//! Carry one instance onto another with a short deterministic sequence of
//! operator applications.

use lpforge::{generate, morph, replay, GeneratorConfig, MorphStep, SizeSpec};

fn main() -> lpforge::Result<()> {
    let config = GeneratorConfig {
        size: SizeSpec::Exact { m: 6, n: 6 },
        ..GeneratorConfig::default()
    };
    let source = generate(&config, 1, 0)?.state;
    let target = generate(&config, 1, 1)?.state;
    let steps = morph(&source, &target)?;
    for (k, step) in steps.iter().enumerate() {
        match step {
            MorphStep::ReplaceU(_) => println!("{k}: replace U"),
            MorphStep::ReplaceV(_) => println!("{k}: replace V"),
            MorphStep::Exchange {
                pos,
                sigma,
                assignments,
                corrections,
            } => println!(
                "{k}: exchange at {pos}, sigma {sigma:?}, {} coding entries, flag fixes {corrections:?}",
                assignments.len()
            ),
        }
    }
    let out = replay(&source, &steps)?;
    let (got, want) = (out.instance()?.0, target.instance()?.0);
    println!("reached target: A {} b {} c {}", got.a == want.a, got.b == want.b, got.c == want.c);
    Ok(())
}
