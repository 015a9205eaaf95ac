//! Writes the built-in scenario corpus as `.scn` files.
//!
//! cargo run --example export_corpus -- scenarios

use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios".into()));
    std::fs::create_dir_all(&dir)?;
    for s in cri_core::sim::corpus::builtin() {
        let path = dir.join(format!("{}.scn", s.name));
        std::fs::write(&path, s.to_json())?;
        println!("{}", path.display());
    }
    Ok(())
}
