//! Black-box maximization over U(N) agrees with the closed-form optimum.
//!
//! ```bash
//! cargo run --example unitary_search
//! ```

use tomodist::distance::{searched, tomographic, Measure};
use tomodist::linalg::random_density;
use tomodist::search::SearchConfig;

pub fn run() -> tomodist::Result<()> {
    let rho1 = random_density(3, 3, 5)?;
    let rho2 = random_density(3, 2, 6)?;
    let cfg = SearchConfig { restarts: 10, seed: 1, ..Default::default() };
    for m in [Measure::Hs, Measure::Trace, Measure::Opnorm] {
        let closed = tomographic(m, &rho1, &rho2)?.value;
        let found = searched(m, &rho1, &rho2, &cfg)?.value;
        println!("{:<7} closed form {closed:.10}  searched {found:.10}", m.name());
        assert!(found <= closed + 1e-7);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
