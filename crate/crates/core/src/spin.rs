//! Spin-`j` (qudit) tomography.
//!
//! Basis vectors `|j m>` are ordered with `m` descending, so basis index `k`
//! carries `m = j - k`. Rotations use the active z-y-z convention
//! `D(alpha, beta, gamma) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)`
//! and the tomogram of `rho` at rotation `u` is `w(m, u) = <m| u rho u^dag |m>`,
//! the expectation of the dequantizer `u^dag |m><m| u`.
//!
//! States are rebuilt from their tomograms by integrating `w(m, u) D(m, u)`
//! over SU(2) with the normalized Haar measure; see [`SpinQuadrature`].

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_same_dim, check_square_finite, conjugated_diagonal, hermitian_eig, hermitian_part,
    ComplexMatrix, DensityMatrix, UnitaryMatrix, ONE, ZERO,
};
use crate::quadrature::{gauss_legendre, periodic_trapezoid};

/// Spin quantum number stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinJ {
    two_j: u32,
}

impl SpinJ {
    pub const fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Spin whose Hilbert space has dimension `n = 2j + 1`.
    pub fn from_dim(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ParameterOutOfRange("dimension must be positive".into()));
        }
        Ok(Self {
            two_j: (n - 1) as u32,
        })
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.j() - k as f64
    }

    /// Basis index of `m = two_m / 2`.
    pub fn index_of(self, two_m: i32) -> Result<usize> {
        let two_j = self.two_j as i32;
        if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
            return Err(Error::IndexOutOfRange {
                index: two_m.unsigned_abs() as usize,
                dim: self.dim(),
            });
        }
        Ok(((two_j - two_m) / 2) as usize)
    }
}

impl fmt::Display for SpinJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

impl FromStr for SpinJ {
    type Err = Error;

    /// Accepts `"1"`, `"3/2"` or `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParameterOutOfRange(format!("not a spin value: {s:?}"));
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            if den.trim() != "2" || num.is_multiple_of(2) {
                return Err(bad());
            }
            return Ok(Self::from_two_j(num));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let two = 2.0 * x;
        if !two.is_finite() || two < 0.0 || two.fract() != 0.0 || two > u32::MAX as f64 {
            return Err(bad());
        }
        Ok(Self::from_two_j(two as u32))
    }
}

/// z-y-z Euler angles. Named `alpha`, `beta`, `gamma` here; unrelated to the
/// photon displacement amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    /// Requires `alpha, gamma` in `[0, 2 pi)` and `beta` in `[0, pi]`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let ok_periodic = |x: f64| (0.0..TAU).contains(&x);
        if !ok_periodic(alpha) || !ok_periodic(gamma) || !(0.0..=PI).contains(&beta) {
            return Err(Error::InvalidAngles(format!(
                "({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub const fn zero() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    /// Maps arbitrary real angles into the canonical ranges. The resulting
    /// rotation matrix equals the original up to a global phase.
    pub fn wrapped(alpha: f64, beta: f64, gamma: f64) -> Self {
        let mut a = alpha;
        let mut b = beta.rem_euclid(TAU);
        let mut g = gamma;
        if b > PI {
            b = TAU - b;
            a += PI;
            g -= PI;
        }
        a = a.rem_euclid(TAU);
        g = g.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU
        if a >= TAU {
            a = 0.0;
        }
        if g >= TAU {
            g = 0.0;
        }
        Self {
            alpha: a,
            beta: b,
            gamma: g,
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Wigner small-d matrix `d^j_{m' m}(beta)` with rows `m'` and columns `m`,
/// both in descending order.
pub fn small_d(j: SpinJ, beta: f64) -> DMatrix<f64> {
    let n = j.dim();
    let tj = j.two_j as i64;
    let lf: Vec<f64> = (0..=n).map(ln_factorial).collect();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    DMatrix::from_fn(n, n, |row, col| {
        let (kp, k) = (row as i64, col as i64);
        // j+m = 2j-k, j-m = k, j+m' = 2j-kp, j-m' = kp
        let norm = 0.5 * (lf[(tj - k) as usize] + lf[k as usize] + lf[(tj - kp) as usize] + lf[kp as usize]);
        let lo = 0.max(kp - k);
        let hi = (tj - k).min(kp);
        let mut acc = 0.0;
        for t in lo..=hi {
            let denom = lf[(tj - k - t) as usize]
                + lf[t as usize]
                + lf[(kp - t) as usize]
                + lf[(t + k - kp) as usize];
            let sign = if (t + k - kp).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let cos_pow = (tj - 2 * t + kp - k) as i32;
            let sin_pow = (2 * t + k - kp) as i32;
            acc += sign * (norm - denom).exp() * c.powi(cos_pow) * s.powi(sin_pow);
        }
        acc
    })
}

/// Rotation matrix without range checks on the angles.
pub(crate) fn rotation_matrix(j: SpinJ, alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let d = small_d(j, beta);
    let n = j.dim();
    ComplexMatrix::from_fn(n, n, |row, col| {
        let phase = -(j.m(row) * alpha + j.m(col) * gamma);
        Complex64::from_polar(d[(row, col)], phase)
    })
}

/// Spin-`j` representation matrix `D^j(alpha, beta, gamma)` in the `|j m>` basis.
pub fn wigner_d_matrix(j: SpinJ, e: &EulerAngles) -> UnitaryMatrix {
    UnitaryMatrix::from_trusted(rotation_matrix(j, e.alpha, e.beta, e.gamma))
}

/// Tomogram `w(m, u)` at fixed `u`, one entry per basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinTomogramVector {
    pub j: SpinJ,
    pub u: UnitaryMatrix,
    pub w: Vec<f64>,
}

fn check_index(k: usize, dim: usize) -> Result<()> {
    if k >= dim {
        return Err(Error::IndexOutOfRange { index: k, dim });
    }
    Ok(())
}

/// Dequantizer `u^dag |m><m| u` for basis index `k`.
pub fn spin_dequantizer(k: usize, u: &UnitaryMatrix) -> Result<ComplexMatrix> {
    let n = u.dim();
    check_index(k, n)?;
    let u = u.matrix();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| u[(k, a)].conj() * u[(k, b)]))
}

/// Probabilities `<m| u rho u^dag |m>`. Values within `N^2 eps` of zero are
/// round-off of an exact zero and are returned as `0.0`.
pub(crate) fn tomogram_values(rho: &ComplexMatrix, u: &ComplexMatrix) -> Vec<f64> {
    let n = rho.nrows();
    let floor = (n * n) as f64 * f64::EPSILON;
    conjugated_diagonal(u, rho)
        .into_iter()
        .map(|z| if z.re.abs() <= floor { 0.0 } else { z.re })
        .collect()
}

pub fn spin_tomogram(rho: &DensityMatrix, u: &UnitaryMatrix) -> Result<SpinTomogramVector> {
    check_same_dim(rho.dim(), u.dim())?;
    Ok(SpinTomogramVector {
        j: SpinJ::from_dim(rho.dim())?,
        u: u.clone(),
        w: tomogram_values(rho.matrix(), u.matrix()),
    })
}

/// Tomographic symbol of an arbitrary operator: `<m| u A u^dag |m>`.
pub fn operator_tomogram(a: &ComplexMatrix, u: &UnitaryMatrix) -> Result<Vec<Complex64>> {
    check_square_finite(a)?;
    check_same_dim(u.dim(), a.nrows())?;
    Ok(conjugated_diagonal(u.matrix(), a))
}

/// `M_kl = |(u u_A)_kl|^2`. Rows and columns sum to one.
pub fn bistochastic_matrix(u: &UnitaryMatrix, u_a: &UnitaryMatrix) -> Result<DMatrix<f64>> {
    check_same_dim(u.dim(), u_a.dim())?;
    Ok((u.matrix() * u_a.matrix()).map(|z| z.norm_sqr()))
}

/// Where a quantizer operator sits in its tomographic parameter space.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantizerLabel {
    Spin { index: usize, u: UnitaryMatrix },
    Photon { n: usize, alpha: Complex64, s: f64 },
}

/// Hermitian reconstruction kernel `D(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerOperator {
    pub mat: ComplexMatrix,
    pub label: QuantizerLabel,
}

/// Ladder conjugations `R+(u) = sum_m u^dag |m+1><m| u` and
/// `R-(u) = sum_m u^dag |m-1><m| u`.
pub fn ladder_pair(u: &UnitaryMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = u.dim();
    let mut raise = ComplexMatrix::zeros(n, n);
    let mut lower = ComplexMatrix::zeros(n, n);
    // |m+1> has index k-1 when |m> has index k
    for k in 1..n {
        raise[(k - 1, k)] = ONE;
        lower[(k, k - 1)] = ONE;
    }
    let um = u.matrix();
    let ud = um.adjoint();
    (&ud * raise * um, &ud * lower * um)
}

fn quantizer_matrix(
    k: usize,
    u: &UnitaryMatrix,
    ladders: &(ComplexMatrix, ComplexMatrix),
) -> Result<ComplexMatrix> {
    let n = u.dim();
    let proj = spin_dequantizer(k, u)?;
    let (raise, lower) = ladders;
    let half = Complex64::new(0.5, 0.0);
    let d = (&proj - raise * &proj * lower * half - lower * &proj * raise * half)
        * Complex64::new(n as f64, 0.0);
    Ok(hermitian_part(&d))
}

/// Quantizer `(2j+1) [U - R+ U R- / 2 - R- U R+ / 2]` at basis index `k`.
pub fn spin_quantizer(k: usize, u: &UnitaryMatrix) -> Result<QuantizerOperator> {
    let ladders = ladder_pair(u);
    Ok(QuantizerOperator {
        mat: quantizer_matrix(k, u, &ladders)?,
        label: QuantizerLabel::Spin {
            index: k,
            u: u.clone(),
        },
    })
}

/// Largest `2j` the quadrature accepts by default (`j = 8`).
pub const DEFAULT_MAX_TWO_J: u32 = 16;

#[derive(Debug, Clone, Copy)]
pub struct QuadratureNode {
    pub angles: EulerAngles,
    pub weight: f64,
}

/// Product rule for `(1 / 8 pi^2) int d alpha sin(beta) d beta d gamma` that is
/// exact for the tomogram-times-quantizer integrands at spin `j`.
///
/// `alpha` and `gamma` use `4j + 2` equally spaced nodes, `cos(beta)` uses
/// `2j + 2` Gauss-Legendre nodes. The integrand carries harmonics up to `4j`
/// in each angle and is a polynomial of degree at most `4j` in `cos(beta)`.
#[derive(Debug, Clone)]
pub struct SpinQuadrature {
    j: SpinJ,
    nodes: Vec<QuadratureNode>,
}

/// Tomographic symbol `(m index, angles) -> value`.
type SymbolFn<'a> = dyn Fn(usize, &EulerAngles) -> Complex64 + 'a;

impl SpinQuadrature {
    pub fn new(j: SpinJ) -> Result<Self> {
        Self::with_cap(j, DEFAULT_MAX_TWO_J)
    }

    pub fn with_cap(j: SpinJ, max_two_j: u32) -> Result<Self> {
        if j.two_j > max_two_j {
            return Err(Error::QuadratureOverflow {
                two_j: j.two_j,
                cap: max_two_j,
            });
        }
        let n_periodic = 2 * j.two_j as usize + 2;
        let (phis, h) = periodic_trapezoid(n_periodic);
        let (xs, ws) = gauss_legendre(j.two_j as usize + 2);
        let norm = h * h / (8.0 * PI * PI);
        let mut nodes = Vec::with_capacity(phis.len() * phis.len() * xs.len());
        for &alpha in &phis {
            for (&x, &wx) in xs.iter().zip(&ws) {
                for &gamma in &phis {
                    nodes.push(QuadratureNode {
                        angles: EulerAngles {
                            alpha,
                            beta: x.acos(),
                            gamma,
                        },
                        weight: wx * norm,
                    });
                }
            }
        }
        Ok(Self { j, nodes })
    }

    pub fn spin(&self) -> SpinJ {
        self.j
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    /// `sum_m int dx w(m, x) D(m, x)` for each symbol, in a single pass over
    /// the nodes (fixed summation order).
    fn reconstruct_many<const K: usize>(
        &self,
        symbols: [&SymbolFn; K],
    ) -> Result<[ComplexMatrix; K]> {
        let n = self.j.dim();
        let mut acc: [ComplexMatrix; K] = std::array::from_fn(|_| ComplexMatrix::zeros(n, n));
        for node in &self.nodes {
            let u = wigner_d_matrix(self.j, &node.angles);
            let ladders = ladder_pair(&u);
            for k in 0..n {
                let q = quantizer_matrix(k, &u, &ladders)?;
                for (sym, out) in symbols.iter().zip(acc.iter_mut()) {
                    let w = sym(k, &node.angles) * node.weight;
                    if w != ZERO {
                        *out += &q * w;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Operator whose tomographic symbol is `symbol`.
    pub fn reconstruct_operator(
        &self,
        symbol: impl Fn(usize, &EulerAngles) -> Complex64,
    ) -> Result<ComplexMatrix> {
        let [a] = self.reconstruct_many([&symbol])?;
        Ok(a)
    }

    /// Density matrix from a tomogram, validated at `1e-9`.
    pub fn reconstruct(&self, tomogram: impl Fn(usize, &EulerAngles) -> f64) -> Result<DensityMatrix> {
        let rho = self.reconstruct_operator(|k, e| Complex64::new(tomogram(k, e), 0.0))?;
        DensityMatrix::with_tolerance(rho, 1e-9)
    }

    /// Operator `A B` rebuilt from the symbols of `A` and `B`.
    pub fn star_product_operator(
        &self,
        wa: impl Fn(usize, &EulerAngles) -> Complex64,
        wb: impl Fn(usize, &EulerAngles) -> Complex64,
    ) -> Result<ComplexMatrix> {
        let [a, b] = self.reconstruct_many([&wa, &wb])?;
        Ok(a * b)
    }
}

/// Rebuilds the state of spin `j` from its tomogram with the default
/// node-count cap.
pub fn reconstruct_spin(
    tomogram: impl Fn(usize, &EulerAngles) -> f64,
    j: SpinJ,
) -> Result<DensityMatrix> {
    SpinQuadrature::new(j)?.reconstruct(tomogram)
}

/// Tomogram of `sqrt(rho)` from the spectral route: the eigenvalues are read
/// off the tomogram at `u_rho^dag`, then
/// `w_sqrt(m, u) = sum_m' sqrt(w(m', u_rho^dag)) |<m| u u_rho |m'>|^2`.
pub fn sqrt_tomogram(rho: &DensityMatrix, u: &UnitaryMatrix) -> Result<Vec<f64>> {
    check_same_dim(rho.dim(), u.dim())?;
    let u_rho = hermitian_eig(rho.matrix())?.vectors;
    let spectrum = tomogram_values(rho.matrix(), u_rho.adjoint().matrix());
    let m = bistochastic_matrix(u, &u_rho)?;
    let roots: Vec<f64> = spectrum.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok((0..m.nrows())
        .map(|k| (0..m.ncols()).map(|l| m[(k, l)] * roots[l]).sum())
        .collect())
}

/// Star product `(w_A * w_B)(m, u)`, realized by reconstructing both operators
/// on the quadrature, multiplying, and taking the symbol of the product.
pub fn star_product_symbol(
    wa: impl Fn(usize, &EulerAngles) -> Complex64,
    wb: impl Fn(usize, &EulerAngles) -> Complex64,
    j: SpinJ,
    u: &UnitaryMatrix,
) -> Result<Vec<Complex64>> {
    let product = SpinQuadrature::new(j)?.star_product_operator(wa, wb)?;
    operator_tomogram(&product, u)
}
