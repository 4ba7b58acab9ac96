//! Write a bundle (JSON) and an MPS file, read the bundle back and rebuild
//! it from its provenance.

use lpforge::io::bundle::{export_json, import_json, InstanceBundle};
use lpforge::io::mps::{export_mps, to_mps_string};
use lpforge::{generate, GeneratorConfig, SizeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = GeneratorConfig {
        size: SizeSpec::Exact { m: 2, n: 3 },
        ..GeneratorConfig::default()
    };
    let g = generate(&config, 8, 0)?;
    println!("{}", to_mps_string(&g.instance, "demo"));

    let dir = std::env::temp_dir().join("lpforge-export-demo");
    std::fs::create_dir_all(&dir)?;
    let bundle = InstanceBundle::from_generated(&g, &config, 8, 0);
    export_json(&bundle, &dir.join("demo.json"))?;
    export_mps(&g.instance, &dir.join("demo.mps"))?;

    let back = import_json(&dir.join("demo.json"))?;
    println!("bundle round trip exact: {}", back == bundle);
    println!("regenerated from provenance: {}", back.regenerate()? == bundle);
    println!("files in {}", dir.display());
    Ok(())
}
