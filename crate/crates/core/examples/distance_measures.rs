//! Four distance measures between two random qutrit states, computed from
//! the density matrices and from the extremal tomographic functionals.
//!
//! ```bash
//! cargo run --example distance_measures
//! ```

use tomodist::distance::{oracle, tomographic, Measure};
use tomodist::linalg::random_density;

pub fn run() -> tomodist::Result<()> {
    let rho1 = random_density(3, 3, 1)?;
    let rho2 = random_density(3, 1, 2)?;

    println!("{:<9} {:>14} {:>14} {:>10}", "measure", "oracle", "tomographic", "gap");
    for m in Measure::ALL {
        let o = oracle(m, &rho1, &rho2)?.value;
        let t = tomographic(m, &rho1, &rho2)?;
        println!("{:<9} {:>14.10} {:>14.10} {:>10.1e}", m.name(), o, t.value, (o - t.value).abs());
        assert!((o - t.value).abs() < 1e-8);
    }

    // the three distances share one optimal measurement basis
    let u = tomographic(Measure::Hs, &rho1, &rho2)?.optimizer_u.unwrap();
    println!("optimal rotation:\n{:.4}", u.matrix());
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
