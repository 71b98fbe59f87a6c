//! Distance measures between states, computed two ways.
//!
//! The oracle forms work on density matrices directly. The tomographic forms
//! compare the probability vectors `w1(u)`, `w2(u)` and extremize a classical
//! distance over rotations `u`:
//!
//! | measure           | classical functional                | extremum |
//! |-------------------|-------------------------------------|----------|
//! | Hilbert-Schmidt   | `[1/2 sum (w1 - w2)^2]^(1/2)`       | max      |
//! | trace distance    | `1/2 sum |w1 - w2|` (Kolmogorov)    | max      |
//! | fidelity          | `sum sqrt(w1 w2)` (Bhattacharyya)   | min      |
//! | operator norm     | `max |w1 - w2|`                     | max      |
//!
//! The three max-type extrema are all attained at `u = V^dag`, with `V` the
//! eigenvector matrix of `rho1 - rho2`. The fidelity minimum is attained in
//! the eigenbasis of `G = rho2^(-1/2) (rho2^(1/2) rho1 rho2^(1/2))^(1/2) rho2^(-1/2)`.

use std::f64::consts::{PI, TAU};
use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_same_dim, conjugated_diagonal, hermitian_eig, hermitian_part, psd_sqrt,
    singular_values, ComplexMatrix, DensityMatrix, UnitaryMatrix,
};
use crate::search::{extremize, nelder_mead, refine_near, Mode, NelderMeadOptions, SearchConfig};
use crate::spin::{
    rotation_matrix, sqrt_tomogram, tomogram_values, wigner_d_matrix, EulerAngles, SpinJ,
    SpinQuadrature,
};

/// Probability vector; components may dip to `-1e-10` from round-off.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub const TOL: f64 = 1e-10;

    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&x| x.is_nan() || x < -Self::TOL) {
            return Err(Error::ParameterOutOfRange(
                "probability below -1e-10 or NaN".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > Self::TOL {
            return Err(Error::ParameterOutOfRange(format!(
                "probabilities sum to {sum}"
            )));
        }
        Ok(Self(p))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbabilityVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Hs,
    Trace,
    Fidelity,
    Opnorm,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Hs, Measure::Trace, Measure::Fidelity, Measure::Opnorm];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Hs => "hs",
            Measure::Trace => "trace",
            Measure::Fidelity => "fidelity",
            Measure::Opnorm => "opnorm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    ClosedFormTomographic,
    SearchedTomographic,
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub value: f64,
    pub optimizer_u: Option<UnitaryMatrix>,
    pub method: Method,
}

impl DistanceResult {
    fn oracle(value: f64) -> Self {
        Self {
            value,
            optimizer_u: None,
            method: Method::Oracle,
        }
    }
}

fn difference(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<ComplexMatrix> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    Ok(rho1.matrix() - rho2.matrix())
}

/// `[1/2 Tr (rho1 - rho2)^2]^(1/2)`
pub fn hs_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    let delta = difference(rho1, rho2)?;
    let tr_sq: f64 = delta.iter().map(|z| z.norm_sqr()).sum();
    Ok(DistanceResult::oracle((0.5 * tr_sq).sqrt()))
}

/// `1/2 Tr |rho1 - rho2|`
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    let eig = hermitian_eig(&difference(rho1, rho2)?)?;
    Ok(DistanceResult::oracle(
        0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>(),
    ))
}

/// Square-root fidelity `Tr [sqrt(rho1) rho2 sqrt(rho1)]^(1/2)`.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    let s = psd_sqrt(rho1.matrix())?;
    let inner = hermitian_part(&(&s * rho2.matrix() * &s));
    Ok(DistanceResult::oracle(psd_sqrt(&inner)?.trace().re))
}

/// Largest `|eigenvalue|` of `rho1 - rho2`.
pub fn operator_norm_distance(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<DistanceResult> {
    let eig = hermitian_eig(&difference(rho1, rho2)?)?;
    Ok(DistanceResult::oracle(
        eig.values.iter().fold(0.0, |m, x| m.max(x.abs())),
    ))
}

/// `Tr |sqrt(rho1) sqrt(rho2)|` from singular values; equals the fidelity.
pub fn fidelity_from_singular_values(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    let c = psd_sqrt(rho1.matrix())? * psd_sqrt(rho2.matrix())?;
    Ok(singular_values(&c)?.iter().sum())
}

fn check_lengths(w1: &[f64], w2: &[f64]) -> Result<()> {
    if w1.len() != w2.len() {
        return Err(Error::LengthMismatch {
            left: w1.len(),
            right: w2.len(),
        });
    }
    Ok(())
}

/// `[1/2 sum (w1 - w2)^2]^(1/2)`
pub fn euclidean_half_distance(w1: &[f64], w2: &[f64]) -> Result<f64> {
    check_lengths(w1, w2)?;
    let s: f64 = w1.iter().zip(w2).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((0.5 * s).sqrt())
}

/// `1/2 sum |w1 - w2|`
pub fn kolmogorov_distance(w1: &[f64], w2: &[f64]) -> Result<f64> {
    check_lengths(w1, w2)?;
    Ok(0.5 * w1.iter().zip(w2).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `sum sqrt(w1 w2)`; negative round-off components count as zero.
pub fn bhattacharyya(w1: &[f64], w2: &[f64]) -> Result<f64> {
    check_lengths(w1, w2)?;
    Ok(w1
        .iter()
        .zip(w2)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum())
}

/// `max |w1 - w2|`
pub fn max_abs_component(w1: &[f64], w2: &[f64]) -> Result<f64> {
    check_lengths(w1, w2)?;
    Ok(w1
        .iter()
        .zip(w2)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Classical functional of a tomogram pair.
pub(crate) fn functional(measure: Measure, w1: &[f64], w2: &[f64]) -> Result<f64> {
    match measure {
        Measure::Hs => euclidean_half_distance(w1, w2),
        Measure::Trace => kolmogorov_distance(w1, w2),
        Measure::Fidelity => bhattacharyya(w1, w2),
        Measure::Opnorm => max_abs_component(w1, w2),
    }
}

/// `measure`'s classical functional of the two tomograms at `u`.
pub fn functional_at(
    measure: Measure,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    u: &UnitaryMatrix,
) -> Result<f64> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    check_same_dim(rho1.dim(), u.dim())?;
    let w1 = tomogram_values(rho1.matrix(), u.matrix());
    let w2 = tomogram_values(rho2.matrix(), u.matrix());
    functional(measure, &w1, &w2)
}

/// `V^dag` for the eigenvector matrix `V` of `rho1 - rho2`.
pub fn difference_optimizer(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<UnitaryMatrix> {
    Ok(hermitian_eig(&difference(rho1, rho2)?)?.vectors.adjoint())
}

fn closed_form(measure: Measure, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    let u = difference_optimizer(rho1, rho2)?;
    Ok(DistanceResult {
        value: functional_at(measure, rho1, rho2, &u)?,
        optimizer_u: Some(u),
        method: Method::ClosedFormTomographic,
    })
}

/// Largest half-Euclidean distance between tomograms, attained at the
/// eigenbasis of `rho1 - rho2`.
pub fn tomographic_hs(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    closed_form(Measure::Hs, rho1, rho2)
}

/// Largest Kolmogorov distance between tomograms.
pub fn tomographic_trace(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    closed_form(Measure::Trace, rho1, rho2)
}

/// Largest single-component difference between tomograms.
pub fn tomographic_opnorm(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    closed_form(Measure::Opnorm, rho1, rho2)
}

/// Cutoff below which eigenvalues of `rho2` count as kernel in the
/// pseudo-inverse square root.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-12;

/// Rotation whose measurement basis is the eigenbasis of
/// `G = rho2^(-1/2) (rho2^(1/2) rho1 rho2^(1/2))^(1/2) rho2^(-1/2)`
/// (inverse taken on the support of `rho2`).
pub fn fidelity_candidate(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<UnitaryMatrix> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    let eig2 = hermitian_eig(rho2.matrix())?;
    let root = eig2.map_spectrum(|x| if x > 0.0 { x.sqrt() } else { 0.0 });
    let inv_root = eig2.map_spectrum(|x| {
        if x > PSEUDO_INVERSE_CUTOFF {
            1.0 / x.sqrt()
        } else {
            0.0
        }
    });
    let middle = psd_sqrt(&hermitian_part(&(&root * rho1.matrix() * &root)))?;
    let g = hermitian_part(&(&inv_root * middle * &inv_root));
    Ok(hermitian_eig(&g)?.vectors.adjoint())
}

/// Smallest Bhattacharyya coefficient between tomograms: evaluated at
/// [`fidelity_candidate`], then polished by a local simplex search.
///
/// Kernel components of a rank-deficient state are only resolved to about
/// `eps`, so a rotation by `delta ~ sqrt(eps)` off the kernel is invisible and
/// can fake a gain of order `1e-8`. The polish therefore scores unsnapped
/// tomograms and is kept only when it gains more than [`POLISH_MIN_GAIN`].
pub fn tomographic_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    let u0 = fidelity_candidate(rho1, rho2)?;
    let raw = |u: &UnitaryMatrix| {
        let w1: Vec<f64> = conjugated_diagonal(u.matrix(), rho1.matrix()).iter().map(|z| z.re).collect();
        let w2: Vec<f64> = conjugated_diagonal(u.matrix(), rho2.matrix()).iter().map(|z| z.re).collect();
        bhattacharyya(&w1, &w2).unwrap_or(f64::INFINITY)
    };
    let opts = NelderMeadOptions {
        max_iters: 200,
        initial_step: 1e-3,
        ..Default::default()
    };
    let start = raw(&u0);
    let (u1, polished) = refine_near(raw, &u0, Mode::Min, &opts)?;
    let (u, method) = if polished < start - POLISH_MIN_GAIN {
        (u1, Method::SearchedTomographic)
    } else {
        (u0, Method::ClosedFormTomographic)
    };
    Ok(DistanceResult {
        value: functional_at(Measure::Fidelity, rho1, rho2, &u)?,
        optimizer_u: Some(u),
        method,
    })
}

/// Improvement a polished rotation must show over the closed-form candidate.
pub const POLISH_MIN_GAIN: f64 = 1e-7;

/// Oracle value of `measure`.
pub fn oracle(measure: Measure, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistanceResult> {
    match measure {
        Measure::Hs => hs_distance(rho1, rho2),
        Measure::Trace => trace_distance(rho1, rho2),
        Measure::Fidelity => fidelity(rho1, rho2),
        Measure::Opnorm => operator_norm_distance(rho1, rho2),
    }
}

/// Tomographic (closed-form extremum) value of `measure`.
pub fn tomographic(
    measure: Measure,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<DistanceResult> {
    match measure {
        Measure::Hs => tomographic_hs(rho1, rho2),
        Measure::Trace => tomographic_trace(rho1, rho2),
        Measure::Fidelity => tomographic_fidelity(rho1, rho2),
        Measure::Opnorm => tomographic_opnorm(rho1, rho2),
    }
}

/// Black-box extremum of `measure`'s functional over U(N).
pub fn searched(
    measure: Measure,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    cfg: &SearchConfig,
) -> Result<DistanceResult> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    let n = rho1.dim();
    let report = if measure == Measure::Fidelity {
        extremize(
            |u| functional_at(measure, rho1, rho2, u).unwrap_or(f64::NAN),
            n,
            Mode::Min,
            cfg,
        )?
    } else {
        // the max-type functionals depend on rho1 - rho2 alone
        let delta = difference(rho1, rho2)?;
        let zeros = vec![0.0; n];
        extremize(
            |u| {
                let dw: Vec<f64> = conjugated_diagonal(u.matrix(), &delta)
                    .iter()
                    .map(|z| z.re)
                    .collect();
                functional(measure, &dw, &zeros).unwrap_or(f64::NAN)
            },
            n,
            Mode::Max,
            cfg,
        )?
    };
    Ok(DistanceResult {
        value: report.best_value,
        optimizer_u: Some(report.best_u),
        method: Method::SearchedTomographic,
    })
}

/// Search protocol for the SU(2)-restricted distance.
#[derive(Debug, Clone, Copy)]
pub struct Su2SearchConfig {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
    /// Number of best grid points refined by the simplex.
    pub refine_from: usize,
    pub max_iters: usize,
    pub tol: f64,
    /// Skip the first Euler angle, which only rephases `<m|` and cannot
    /// change any tomogram.
    pub fast_path: bool,
}

impl Default for Su2SearchConfig {
    fn default() -> Self {
        Self {
            n_alpha: 24,
            n_beta: 12,
            n_gamma: 24,
            refine_from: 5,
            max_iters: 200,
            tol: 1e-10,
            fast_path: true,
        }
    }
}

/// Outcome of [`su2_restricted_hs`] with the maximizing Euler angles.
#[derive(Debug, Clone)]
pub struct Su2Restricted {
    pub result: DistanceResult,
    pub angles: EulerAngles,
    pub evaluations: usize,
}

/// Largest half-Euclidean tomogram distance over spin-`j` rotations only.
/// Bounded above by the Hilbert-Schmidt distance; equal to it for `j = 1/2`.
pub fn su2_restricted_hs(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    j: SpinJ,
    cfg: &Su2SearchConfig,
) -> Result<Su2Restricted> {
    check_same_dim(j.dim(), rho1.dim())?;
    check_same_dim(j.dim(), rho2.dim())?;
    let mut evaluations = 0usize;
    let mut eval = |a: f64, b: f64, g: f64| -> f64 {
        evaluations += 1;
        let u = rotation_matrix(j, a, b, g);
        let w1 = tomogram_values(rho1.matrix(), &u);
        let w2 = tomogram_values(rho2.matrix(), &u);
        euclidean_half_distance(&w1, &w2).unwrap_or(f64::NAN)
    };

    let alphas: Vec<f64> = if cfg.fast_path {
        vec![0.0]
    } else {
        (0..cfg.n_alpha).map(|i| TAU * i as f64 / cfg.n_alpha as f64).collect()
    };
    let betas: Vec<f64> = (0..cfg.n_beta)
        .map(|i| PI * i as f64 / (cfg.n_beta.max(2) - 1) as f64)
        .collect();
    let gammas: Vec<f64> = (0..cfg.n_gamma).map(|i| TAU * i as f64 / cfg.n_gamma as f64).collect();

    let mut grid: Vec<(f64, [f64; 3])> = Vec::new();
    for &a in &alphas {
        for &b in &betas {
            for &g in &gammas {
                grid.push((eval(a, b, g), [a, b, g]));
            }
        }
    }
    // stable sort keeps node order among ties
    grid.sort_by(|x, y| y.0.total_cmp(&x.0));

    let opts = NelderMeadOptions {
        max_iters: cfg.max_iters,
        f_tol: cfg.tol,
        x_tol: cfg.tol,
        initial_step: 0.1,
    };
    let mut best = grid[0];
    for &(_, start) in grid.iter().take(cfg.refine_from.max(1)) {
        let (x0, res) = if cfg.fast_path {
            let x0 = vec![start[1], start[2]];
            let r = nelder_mead(|x| -eval(0.0, x[0], x[1]), &x0, &opts)?;
            (r.x.clone(), r)
        } else {
            let r = nelder_mead(|x| -eval(x[0], x[1], x[2]), &start, &opts)?;
            (r.x.clone(), r)
        };
        let value = -res.f;
        if value > best.0 {
            best = if cfg.fast_path {
                (value, [0.0, x0[0], x0[1]])
            } else {
                (value, [x0[0], x0[1], x0[2]])
            };
        }
    }
    let angles = EulerAngles::wrapped(best.1[0], best.1[1], best.1[2]);
    let u = wigner_d_matrix(j, &angles);
    Ok(Su2Restricted {
        result: DistanceResult {
            value: functional_at(Measure::Hs, rho1, rho2, &u)?,
            optimizer_u: Some(u),
            method: Method::SearchedTomographic,
        },
        angles,
        evaluations,
    })
}

/// Both sides of the star-product fidelity identity.
#[derive(Debug, Clone, Serialize)]
pub struct StarFidelityReport {
    /// Smallest Bhattacharyya coefficient of the state tomograms.
    pub lhs: f64,
    /// Searched maximum of `sum_m |(w_sqrt1 * w_sqrt2)(m, u)|`.
    pub rhs: f64,
    /// `Tr |sqrt(rho1) sqrt(rho2)|` from singular values.
    pub oracle: f64,
    /// `|lhs - rhs|`
    pub gap: f64,
    pub search_evaluations: usize,
}

/// Largest dimension accepted by [`fidelity_star_check`].
pub const STAR_CHECK_MAX_DIM: usize = 4;

/// Evaluates the star-product form of the fidelity: the symbols of
/// `sqrt(rho1)` and `sqrt(rho2)` come from [`sqrt_tomogram`], their star
/// product from the quadrature round trip, and the maximum over `u` from
/// [`extremize`].
pub fn fidelity_star_check(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    cfg: &SearchConfig,
) -> Result<StarFidelityReport> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    let n = rho1.dim();
    if n > STAR_CHECK_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: STAR_CHECK_MAX_DIM,
        });
    }
    let j = SpinJ::from_dim(n)?;
    let quad = SpinQuadrature::new(j)?;
    let symbol = |rho: &DensityMatrix| {
        let rho = rho.clone();
        move |k: usize, e: &EulerAngles| {
            let w = sqrt_tomogram(&rho, &wigner_d_matrix(j, e)).expect("matching dimensions");
            Complex64::new(w[k], 0.0)
        }
    };
    let product = quad.star_product_operator(symbol(rho1), symbol(rho2))?;
    let report = extremize(
        |u| {
            conjugated_diagonal(u.matrix(), &product)
                .iter()
                .map(|z| z.norm())
                .sum()
        },
        n,
        Mode::Max,
        cfg,
    )?;
    let lhs = tomographic_fidelity(rho1, rho2)?.value;
    let rhs = report.best_value;
    Ok(StarFidelityReport {
        lhs,
        rhs,
        oracle: fidelity_from_singular_values(rho1, rho2)?,
        gap: (lhs - rhs).abs(),
        search_evaluations: report.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, random_unitary, seeded_rng};
    use rand::Rng;

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::diagonal(p).unwrap()
    }

    #[test]
    fn oracle_anchors() {
        let a = diag(&[0.75, 0.25]);
        let b = diag(&[0.25, 0.75]);
        let zero = diag(&[1.0, 0.0]);
        let one = diag(&[0.0, 1.0]);

        assert_eq!(hs_distance(&a, &a).unwrap().value, 0.0);
        assert!((hs_distance(&zero, &one).unwrap().value - 1.0).abs() < 1e-15);
        assert!((hs_distance(&a, &b).unwrap().value - 0.5).abs() < 1e-15);

        assert!(trace_distance(&a, &a).unwrap().value.abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap().value - 1.0).abs() < 1e-15);
        assert!((trace_distance(&a, &b).unwrap().value - 0.5).abs() < 1e-15);

        assert!((fidelity(&a, &a).unwrap().value - 1.0).abs() < 1e-14);
        assert!(fidelity(&zero, &one).unwrap().value.abs() < 1e-15);
        assert!((fidelity(&a, &b).unwrap().value - 3f64.sqrt() / 2.0).abs() < 1e-14);

        assert!(operator_norm_distance(&a, &a).unwrap().value.abs() < 1e-15);
        assert!((operator_norm_distance(&zero, &one).unwrap().value - 1.0).abs() < 1e-15);
        assert!((operator_norm_distance(&a, &b).unwrap().value - 0.5).abs() < 1e-15);

        assert!(matches!(
            hs_distance(&a, &DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_is_symmetric() {
        for seed in 0..10 {
            let r1 = random_density(3, 3, seed).unwrap();
            let r2 = random_density(3, 1 + seed as usize % 3, seed + 50).unwrap();
            let f12 = fidelity(&r1, &r2).unwrap().value;
            let f21 = fidelity(&r2, &r1).unwrap().value;
            assert!((f12 - f21).abs() <= 1e-9);
            assert!((0.0..=1.0 + 1e-9).contains(&f12));
        }
    }

    #[test]
    fn classical_anchors() {
        let p = [1.0, 0.0];
        let q = [0.0, 1.0];
        assert_eq!(euclidean_half_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(euclidean_half_distance(&p, &q).unwrap(), 1.0);
        assert_eq!(kolmogorov_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(kolmogorov_distance(&p, &q).unwrap(), 1.0);
        assert_eq!(bhattacharyya(&p, &p).unwrap(), 1.0);
        assert_eq!(bhattacharyya(&p, &q).unwrap(), 0.0);
        assert_eq!(max_abs_component(&p, &p).unwrap(), 0.0);
        assert_eq!(max_abs_component(&p, &q).unwrap(), 1.0);
        assert!(matches!(
            kolmogorov_distance(&p, &[1.0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn classical_against_brute_force() {
        let mut rng = seeded_rng(12);
        for n in 2..7 {
            let mut draw = || {
                let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let s: f64 = v.iter().sum();
                ProbabilityVector::new(v.into_iter().map(|x| x / s).collect()).unwrap()
            };
            let (p, q) = (draw(), draw());
            let mut sq = 0.0;
            let mut l1 = 0.0;
            let mut bc = 0.0;
            let mut mx: f64 = 0.0;
            for i in 0..n {
                let d = p[i] - q[i];
                sq += d * d;
                l1 += d.abs();
                bc += (p[i] * q[i]).sqrt();
                mx = mx.max(d.abs());
            }
            assert!((euclidean_half_distance(&p, &q).unwrap() - (sq / 2.0).sqrt()).abs() < 1e-15);
            assert!((kolmogorov_distance(&p, &q).unwrap() - l1 / 2.0).abs() < 1e-15);
            assert!((bhattacharyya(&p, &q).unwrap() - bc).abs() < 1e-15);
            assert_eq!(max_abs_component(&p, &q).unwrap(), mx);
        }
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn closed_forms_match_oracles() {
        for n in [2usize, 5] {
            for seed in 0..5 {
                let r1 = random_density(n, n, seed).unwrap();
                let r2 = random_density(n, 1 + seed as usize % n, 100 + seed).unwrap();
                for m in [Measure::Hs, Measure::Trace, Measure::Opnorm] {
                    let t = tomographic(m, &r1, &r2).unwrap().value;
                    let o = oracle(m, &r1, &r2).unwrap().value;
                    assert!((t - o).abs() <= 1e-10, "{m:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn equal_states_give_zero() {
        let r = random_density(3, 2, 1).unwrap();
        for m in [Measure::Hs, Measure::Trace, Measure::Opnorm] {
            assert!(tomographic(m, &r, &r).unwrap().value.abs() < 1e-15);
        }
        let pure = random_density(3, 1, 2).unwrap();
        assert!((tomographic_fidelity(&pure, &pure).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_commuting_case() {
        let a = diag(&[0.75, 0.25]);
        let b = diag(&[0.25, 0.75]);
        let r = tomographic_fidelity(&a, &b).unwrap();
        assert!((r.value - 3f64.sqrt() / 2.0).abs() < 1e-14);
        // measurement basis is the computational one: u is diagonal up to order
        let u = r.optimizer_u.unwrap().into_inner();
        let m = u.map(|z| z.norm_sqr());
        assert!(m.iter().all(|&x| x < 1e-12 || (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn tomographic_fidelity_matches_oracle_with_rank_deficiency() {
        for seed in 0..30u64 {
            let n = 2 + seed as usize % 3;
            let rank = [n, 1, n - 1][seed as usize % 3];
            let r1 = random_density(n, n, seed).unwrap();
            let r2 = random_density(n, rank, seed + 1000).unwrap();
            let t = tomographic_fidelity(&r1, &r2).unwrap().value;
            let o = fidelity(&r1, &r2).unwrap().value;
            assert!((t - o).abs() <= 1e-8, "seed {seed}: {t} vs {o}");
        }
    }

    #[test]
    fn fuchs_van_de_graaf_sandwich() {
        for seed in 0..40u64 {
            let n = 2 + seed as usize % 4;
            let r1 = random_density(n, 1 + seed as usize % n, seed).unwrap();
            let r2 = random_density(n, n, seed + 7).unwrap();
            let f = fidelity(&r1, &r2).unwrap().value;
            let t = trace_distance(&r1, &r2).unwrap().value;
            assert!(1.0 - f <= t + 1e-9);
            assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
        }
    }

    #[test]
    fn same_optimizer_for_all_max_type_measures() {
        let r1 = random_density(4, 4, 3).unwrap();
        let r2 = random_density(4, 2, 4).unwrap();
        let u = difference_optimizer(&r1, &r2).unwrap();
        for m in [Measure::Hs, Measure::Trace, Measure::Opnorm] {
            let at_u = functional_at(m, &r1, &r2, &u).unwrap();
            assert!((at_u - oracle(m, &r1, &r2).unwrap().value).abs() <= 1e-10);
        }
    }

    #[test]
    fn random_rotations_never_beat_closed_forms() {
        let r1 = random_density(3, 3, 30).unwrap();
        let r2 = random_density(3, 3, 31).unwrap();
        for seed in 0..200 {
            let u = random_unitary(3, seed);
            for m in [Measure::Hs, Measure::Trace, Measure::Opnorm] {
                let v = functional_at(m, &r1, &r2, &u).unwrap();
                assert!(v <= oracle(m, &r1, &r2).unwrap().value + 1e-12);
            }
            let b = functional_at(Measure::Fidelity, &r1, &r2, &u).unwrap();
            assert!(b >= fidelity(&r1, &r2).unwrap().value - 1e-12);
        }
    }

    #[test]
    fn searched_qubit_hs_matches_closed_form() {
        let r1 = random_density(2, 2, 5).unwrap();
        let r2 = random_density(2, 2, 6).unwrap();
        let s = searched(Measure::Hs, &r1, &r2, &SearchConfig { restarts: 5, ..Default::default() }).unwrap();
        let c = hs_distance(&r1, &r2).unwrap().value;
        assert!((s.value - c).abs() <= 1e-7);
        assert!(s.value <= c + 1e-7);
    }

    #[test]
    fn su2_qubit_equals_hs() {
        let j = SpinJ::from_two_j(1);
        for seed in 0..5 {
            let r1 = random_density(2, 2, seed).unwrap();
            let r2 = random_density(2, 1, seed + 20).unwrap();
            let s = su2_restricted_hs(&r1, &r2, j, &Su2SearchConfig::default()).unwrap();
            let o = hs_distance(&r1, &r2).unwrap().value;
            assert!((s.result.value - o).abs() <= 1e-6, "{} vs {o}", s.result.value);
        }
    }

    #[test]
    fn su2_zero_for_equal_states_and_bounded() {
        let j = SpinJ::from_two_j(2);
        let r = random_density(3, 3, 2).unwrap();
        let s = su2_restricted_hs(&r, &r, j, &Su2SearchConfig::default()).unwrap();
        assert!(s.result.value.abs() < 1e-15);
        let r2 = random_density(3, 1, 3).unwrap();
        let s = su2_restricted_hs(&r, &r2, j, &Su2SearchConfig::default()).unwrap();
        assert!(s.result.value <= hs_distance(&r, &r2).unwrap().value + 1e-9);
        assert!(matches!(
            su2_restricted_hs(&r, &r2, SpinJ::from_two_j(1), &Su2SearchConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn su2_fast_path_agrees_with_full_search() {
        let j = SpinJ::from_two_j(2);
        for seed in 0..3 {
            let r1 = random_density(3, 3, 60 + seed).unwrap();
            let r2 = random_density(3, 2, 70 + seed).unwrap();
            let fast = su2_restricted_hs(&r1, &r2, j, &Su2SearchConfig::default()).unwrap();
            let full = su2_restricted_hs(
                &r1,
                &r2,
                j,
                &Su2SearchConfig {
                    fast_path: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!((fast.result.value - full.result.value).abs() < 1e-8);
            // the first angle really is irrelevant
            let e = fast.angles;
            let shifted = EulerAngles::wrapped(e.alpha + 1.234, e.beta, e.gamma);
            let a = functional_at(Measure::Hs, &r1, &r2, &wigner_d_matrix(j, &e)).unwrap();
            let b = functional_at(Measure::Hs, &r1, &r2, &wigner_d_matrix(j, &shifted)).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn star_check_rejects_large_dimension() {
        let r = DensityMatrix::maximally_mixed(5);
        assert!(matches!(
            fidelity_star_check(&r, &r, &SearchConfig::default()),
            Err(Error::DimensionTooLarge { dim: 5, max: 4 })
        ));
    }

    #[test]
    fn star_check_pure_equal_states() {
        let p = random_density(2, 1, 3).unwrap();
        let rep = fidelity_star_check(&p, &p, &SearchConfig { restarts: 4, ..Default::default() }).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-9);
        assert!((rep.rhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn star_check_random_qubits() {
        let r1 = random_density(2, 2, 8).unwrap();
        let r2 = random_density(2, 2, 9).unwrap();
        let rep = fidelity_star_check(&r1, &r2, &SearchConfig { restarts: 5, ..Default::default() }).unwrap();
        assert!((rep.lhs - rep.oracle).abs() <= 1e-8);
        assert!(rep.gap <= 1e-6, "{rep:?}");
    }
}
