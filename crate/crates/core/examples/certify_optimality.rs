//! Check the complementary-slackness certificate of a generated instance,
//! then break it by moving one right-hand side.

use lpforge::{generate, verify_optimality, GeneratorConfig, DEFAULT_CERT_TOL};

fn main() -> lpforge::Result<()> {
    let g = generate(&GeneratorConfig::default(), 9, 0)?;
    let report = verify_optimality(&g.instance, &g.point, DEFAULT_CERT_TOL)?;
    println!("fresh instance: {report:#?}");

    let row = (0..g.instance.m()).find(|&j| g.point.y[j] > 0.0).expect("some dual is positive");
    let mut moved = g.instance.clone();
    moved.b[row] += 1.0;
    let report = verify_optimality(&moved, &g.point, DEFAULT_CERT_TOL)?;
    println!(
        "b[{row}] + 1: gap {:.6} (y[{row}] = {:.6}), passed = {}",
        report.duality_gap, g.point.y[row], report.passed
    );
    Ok(())
}
