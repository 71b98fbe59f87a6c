//! Scan a coherent state against an even cat state over displacements and
//! compare each tomographic bound with the density-matrix measure.
//!
//! ```bash
//! cargo run --example photon_inequalities
//! ```

use tomodist::photon::{build_state, inequality_scan, CatParity, FockSpace, ScanGrid, StateSpec};

pub fn run() -> tomodist::Result<()> {
    let space = FockSpace::default();
    let coherent = build_state(&StateSpec::Coherent { re: 1.0, im: 0.0 }, &space)?;
    let cat = build_state(&StateSpec::Cat { re: 1.5, im: 0.0, parity: CatParity::Even }, &space)?;
    let grid = ScanGrid { n_radial: 16, n_angular: 16, ..Default::default() };

    let report = inequality_scan(&coherent, &cat, &space, &grid)?;
    println!("{} nodes within radius {:.3}", report.nodes.len(), report.r_eff);
    for b in &report.bounds {
        println!(
            "{:<9} bound {:.8}  oracle {:.8}  slack {:+.2e}  {}",
            b.measure.name(),
            b.bound,
            b.oracle,
            b.slack,
            if b.holds { "holds" } else { "VIOLATED" }
        );
    }
    assert!(report.all_hold());
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
