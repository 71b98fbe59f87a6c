//! One-dimensional quadrature rules used to integrate over SU(2).

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Exact for polynomials of degree `2n - 1`. Nodes come from Newton
/// iteration on `P_n` started at the Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n` equally spaced nodes on `[0, 2 pi)` with equal weights `2 pi / n`.
/// Exact for trigonometric polynomials of degree below `n`.
pub fn periodic_trapezoid(n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * PI / n as f64;
    ((0..n).map(|k| k as f64 * h).collect(), h)
}
