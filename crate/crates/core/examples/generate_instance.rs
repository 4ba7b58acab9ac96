//! Generate one instance with the reference defaults and print its shape
//! and targets.

use lpforge::{generate, GeneratorConfig};

fn main() -> lpforge::Result<()> {
    let config = GeneratorConfig::default();
    let g = generate(&config, 42, 0)?;
    let meta = &g.instance.meta;
    println!("size          {} x {}", g.instance.m(), g.instance.n());
    println!("kappa target  {:.6e}", meta.kappa_target.unwrap());
    println!("measured cond {:.6e}", meta.achieved_cond.unwrap());
    println!("rank          {}", meta.rank.unwrap());
    println!("coding        {}", meta.dist_x1.as_deref().unwrap());
    let basic = g.point.x.iter().filter(|&&v| v > 0.0).count();
    println!("preset x has {basic} positive entries");
    Ok(())
}
