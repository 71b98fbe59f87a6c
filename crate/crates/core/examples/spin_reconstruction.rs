//! Rebuild a spin-1 state from its tomogram on the rotation-group quadrature.
//!
//! ```bash
//! cargo run --example spin_reconstruction
//! ```

use tomodist::linalg::{max_abs, random_density};
use tomodist::spin::{spin_tomogram, wigner_d_matrix, EulerAngles, SpinJ, SpinQuadrature};

pub fn run() -> tomodist::Result<()> {
    let j: SpinJ = "1".parse()?;
    let rho = random_density(j.dim(), 2, 42)?;

    let e = EulerAngles::new(0.3, 1.1, 5.9)?;
    let w = spin_tomogram(&rho, &wigner_d_matrix(j, &e))?;
    println!("w(m, u) at {e:?}:");
    for (k, p) in w.w.iter().enumerate() {
        println!("  m = {:+}: {p:.6}", j.m(k));
    }

    let quad = SpinQuadrature::new(j)?;
    let rebuilt = quad.reconstruct(|k, angles| {
        spin_tomogram(&rho, &wigner_d_matrix(j, angles)).unwrap().w[k]
    })?;
    let residual = max_abs(&(rebuilt.matrix() - rho.matrix()));
    println!("{} quadrature nodes, max residual {residual:.2e}", quad.nodes().len());
    assert!(residual < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
