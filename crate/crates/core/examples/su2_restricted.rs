//! Restricting rotations to the spin-j representation of SU(2): exact for a
//! qubit, generally short of the Hilbert-Schmidt distance for larger spins.
//!
//! ```bash
//! cargo run --example su2_restricted
//! ```

use tomodist::distance::{hs_distance, su2_restricted_hs, Su2SearchConfig};
use tomodist::linalg::random_density;
use tomodist::spin::SpinJ;

pub fn run() -> tomodist::Result<()> {
    for two_j in 1..=3 {
        let j = SpinJ::from_two_j(two_j);
        let rho1 = random_density(j.dim(), j.dim(), 20)?;
        let rho2 = random_density(j.dim(), 1, 21)?;
        let restricted = su2_restricted_hs(&rho1, &rho2, j, &Su2SearchConfig::default())?;
        let hs = hs_distance(&rho1, &rho2)?.value;
        println!(
            "j = {j}: restricted {:.8}  hilbert-schmidt {hs:.8}  shortfall {:.2e}  at {:?}",
            restricted.result.value,
            hs - restricted.result.value,
            restricted.angles
        );
        assert!(restricted.result.value <= hs + 1e-9);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
