//! Drives the experiment harness from Rust: load a config, sweep a
//! parameter, write the CSV to stdout.
//!
//! `cargo run --release --example harness_sweep`

use channelgeo::harness::{sweep, ExperimentConfig, Kind};

fn main() -> channelgeo::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/complexity_sweep_t.json");
    let cfg = ExperimentConfig::from_path(&path)?;
    let out = sweep(Kind::Complexity, &cfg, "t", &[0.5, 1.0, 1.5, 2.0])?;
    print!("{}", String::from_utf8_lossy(&out.csv));
    println!("all checks hold: {}", out.all_hold());
    Ok(())
}
