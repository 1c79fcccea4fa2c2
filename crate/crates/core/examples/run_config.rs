//! Drives the spectrum and verify commands from a TOML config, as the binary does.
use dilres::cli::{cmd_spectrum, cmd_verify, RunConfig};

fn main() -> dilres::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/two_level.toml").to_string());
    let cfg = RunConfig::load(std::path::Path::new(&path))?;
    let out = std::env::temp_dir().join("dilres_example");
    println!("spectrum: {:?}", cmd_spectrum(&cfg, &out)?.status);
    println!("verify: {:?}", cmd_verify(&cfg, &out)?.status);
    println!("outputs in {}", out.display());
    Ok(())
}
