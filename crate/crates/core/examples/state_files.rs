//! Write a density matrix to a JSON state file, read it back and run the
//! propositions suite the command line uses.
//!
//! ```bash
//! cargo run --example state_files
//! ```

use tomodist::linalg::random_density;
use tomodist::statefile::StateFile;
use tomodist::verify::{propositions, PropositionsConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let rho = random_density(2, 2, 3)?;
    let file = StateFile::from_density(&rho);
    let path = std::env::temp_dir().join(format!("tomodist-example-{}.json", std::process::id()));
    file.save(&path)?;
    let loaded = StateFile::load_state(&path)?;
    std::fs::remove_file(&path)?;
    assert_eq!(loaded.state.rho.matrix(), rho.matrix());
    println!("{}", file.to_json());

    let report = propositions(&PropositionsConfig { dim: 2, trials: 5, seed: 7, ..Default::default() })?;
    println!("{}", report.to_text());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
