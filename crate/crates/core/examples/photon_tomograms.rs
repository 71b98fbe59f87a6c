//! Photon-number tomograms of displaced states, displaced parity and the
//! parity quantizer.
//!
//! ```bash
//! cargo run --example photon_tomograms
//! ```

use num_complex::Complex64;
use tomodist::photon::{
    build_state, displaced_parity, photon_quantizer, photon_tomogram, Displacement, FockSpace,
    OrderingParam, StateSpec,
};

pub fn run() -> tomodist::Result<()> {
    let space = FockSpace::default();
    let beta = Complex64::new(0.8, 0.3);
    let coherent = build_state(&StateSpec::Coherent { re: beta.re, im: beta.im }, &space)?;

    let alpha = Displacement::from_re_im(-0.5, 0.4)?;
    let t = photon_tomogram(&coherent.rho, alpha, &space)?;
    let mean = (alpha.value() + beta).norm_sqr();
    println!("Poisson mean |alpha + beta|^2 = {mean:.6}");
    for n in 0..5 {
        println!("  w({n}) = {:.8}", t.w[n]);
    }

    let parity = displaced_parity(&coherent.rho, alpha, &space)?;
    println!("displaced parity {parity:.10}, exp(-2 mean) {:.10}", (-2.0 * mean).exp());

    let q = photon_quantizer(0, Displacement::zero(), OrderingParam::default(), &space)?;
    let diag: Vec<f64> = (0..6).map(|i| q.mat[(i, i)].re).collect();
    println!("parity quantizer diagonal {diag:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> tomodist::Result<()> {
    run()
}
