//! Fidelity three ways: the Uhlmann formula, the smallest Bhattacharyya
//! coefficient of the tomograms, and the largest summed modulus of the star
//! product of the square-root tomograms.
//!
//! ```bash
//! cargo run --example star_product_fidelity
//! ```

use tomodist::distance::{fidelity, fidelity_star_check};
use tomodist::linalg::random_density;
use tomodist::search::SearchConfig;

pub fn run() -> tomodist::Result<()> {
    for n in [2, 3] {
        let rho1 = random_density(n, n, 10)?;
        let rho2 = random_density(n, n, 11)?;
        let f = fidelity(&rho1, &rho2)?.value;
        let rep = fidelity_star_check(&rho1, &rho2, &SearchConfig { restarts: 8, ..Default::default() })?;
        println!(
            "N = {n}: uhlmann {f:.12}  bhattacharyya-min {:.12}  star-max {:.12}  gap {:.1e}",
            rep.lhs, rep.rhs, rep.gap
        );
        assert!(rep.gap < 1e-5);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
