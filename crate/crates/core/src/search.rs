//! Derivative-free extremization of real functionals over U(N).
//!
//! Unitaries are parametrized as an ordered product of two-level (Givens)
//! rotations, one mixing angle and one phase per plane, followed by a layer of
//! `N - 1` diagonal phases. The global phase is left out since every
//! functional here depends on `u` only through conjugation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, seeded_rng, ComplexMatrix, UnitaryMatrix};

/// Angles for [`compose_unitary`]: `(theta, phi)` for each plane `(i, j)`,
/// `i < j` in lexicographic order, then the diagonal phases `psi_1..psi_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParams {
    angles: Vec<f64>,
}

impl UnitaryParams {
    /// `N(N-1)` plane angles plus `N-1` phases.
    pub fn len_for(n: usize) -> usize {
        (n * n).saturating_sub(1)
    }

    pub fn new(angles: Vec<f64>, n: usize) -> Result<Self> {
        let expected = Self::len_for(n);
        if angles.len() != expected {
            return Err(Error::BadLength {
                expected,
                found: angles.len(),
            });
        }
        if angles.iter().any(|x| !x.is_finite()) {
            return Err(Error::ParameterOutOfRange("non-finite angle".into()));
        }
        Ok(Self { angles })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            angles: vec![0.0; Self::len_for(n)],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            angles: (0..Self::len_for(n)).map(|_| rng.random::<f64>() * TAU).collect(),
        }
    }

    /// Every component reduced into `[0, 2 pi)`.
    pub fn normalized(&self) -> Self {
        Self {
            angles: self.angles.iter().map(|x| x.rem_euclid(TAU)).collect(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }
}

fn compose_raw(x: &[f64], n: usize) -> ComplexMatrix {
    let n_planes = n * (n - 1) / 2;
    // column-major storage, element (r, c) at c * n + r
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    m[0] = Complex64::new(1.0, 0.0);
    for k in 1..n {
        m[k * n + k] = Complex64::from_polar(1.0, x[2 * n_planes + k - 1]);
    }
    // left-multiply by the plane rotations in reverse so that
    // U = G_(0,1) G_(0,2) ... G_(n-2,n-1) diag(1, e^{i psi})
    let mut idx = n_planes;
    for i in (0..n).rev() {
        for j in ((i + 1)..n).rev() {
            idx -= 1;
            let (theta, phi) = (x[2 * idx], x[2 * idx + 1]);
            let (s, c) = theta.sin_cos();
            let e = Complex64::from_polar(1.0, phi);
            let (es, ecs) = (e * s, e.conj() * s);
            for col in m.chunks_exact_mut(n) {
                let (ri, rj) = (col[i], col[j]);
                col[i] = ri * c - es * rj;
                col[j] = ecs * ri + rj * c;
            }
        }
    }
    ComplexMatrix::from_vec(n, n, m)
}

/// Unitary for the given parameters; all-zero parameters give the identity.
pub fn compose_unitary(p: &UnitaryParams, n: usize) -> Result<UnitaryMatrix> {
    let expected = UnitaryParams::len_for(n);
    if p.angles.len() != expected {
        return Err(Error::BadLength {
            expected,
            found: p.angles.len(),
        });
    }
    Ok(UnitaryMatrix::from_trusted(compose_raw(&p.angles, n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    fn sign(self) -> f64 {
        match self {
            Mode::Max => -1.0,
            Mode::Min => 1.0,
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Mode::Max => a > b,
            Mode::Min => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Iteration budget for the whole call, including stall restarts.
    pub max_iters: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            f_tol: 1e-12,
            x_tol: 1e-10,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Final simplex value spread below `f_tol`.
    pub converged: bool,
}

/// Minimizes `f` with the adaptive-coefficient Nelder-Mead simplex.
///
/// When a simplex collapses before the budget is spent it is rebuilt around
/// the best vertex; the run stops once a rebuilt simplex fails to improve on
/// the previous minimum by more than `f_tol`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> Result<NelderMeadResult> {
    let dim = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| -> Result<f64> {
        *evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective)
        }
    };
    if dim == 0 {
        let v = eval(x0, &mut evaluations)?;
        return Ok(NelderMeadResult {
            x: Vec::new(),
            f: v,
            iterations: 0,
            evaluations,
            converged: true,
        });
    }

    let d = dim as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / d, 0.75 - 0.5 / d, 1.0 - 1.0 / d);
    let (alpha, gamma, rho, sigma) = if dim <= 2 {
        (1.0, 2.0, 0.5, 0.5)
    } else {
        (alpha, gamma, rho, sigma)
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut evaluations)?;
    let mut iterations = 0;
    let mut converged = false;

    'outer: while iterations < opts.max_iters {
        let mut simplex: Vec<(f64, Vec<f64>)> = vec![(best_f, best_x.clone())];
        for i in 0..dim {
            let mut v = best_x.clone();
            v[i] += opts.initial_step;
            simplex.push((eval(&v, &mut evaluations)?, v));
        }
        let start_f = best_f;
        let mut centroid = vec![0.0; dim];

        loop {
            simplex.sort_by(|a, b| a.0.total_cmp(&b.0));

            let spread = simplex[dim].0 - simplex[0].0;
            converged = spread < opts.f_tol;
            let collapsed = converged
                && simplex[1..].iter().all(|(_, v)| {
                    v.iter()
                        .zip(&simplex[0].1)
                        .all(|(a, b)| (a - b).abs() <= opts.x_tol)
                });
            if collapsed || iterations >= opts.max_iters {
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (_, v) in &simplex[..dim] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= d);
            let worst = &simplex[dim].1;
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(alpha);
            let fr = eval(&xr, &mut evaluations)?;
            if fr < simplex[0].0 {
                let xe = along(alpha * gamma);
                let fe = eval(&xe, &mut evaluations)?;
                simplex[dim] = if fe < fr { (fe, xe) } else { (fr, xr) };
                continue;
            }
            if fr < simplex[dim - 1].0 {
                simplex[dim] = (fr, xr);
                continue;
            }
            let xc = if fr < simplex[dim].0 {
                along(alpha * rho)
            } else {
                along(-rho)
            };
            let fc = eval(&xc, &mut evaluations)?;
            if fc < simplex[dim].0.min(fr) {
                simplex[dim] = (fc, xc);
                continue;
            }
            let (head, tail) = simplex.split_at_mut(1);
            let x_best = &head[0].1;
            for (value, v) in tail.iter_mut() {
                for (vi, b) in v.iter_mut().zip(x_best) {
                    *vi = b + sigma * (*vi - b);
                }
                *value = eval(v, &mut evaluations)?;
            }
        }

        let (f_min, x_min) = simplex
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("non-empty simplex");
        let f_min = *f_min;
        let improved = start_f - f_min;
        if f_min < best_f {
            best_f = f_min;
            best_x = x_min.clone();
        }
        if improved <= opts.f_tol {
            break 'outer;
        }
    }

    Ok(NelderMeadResult {
        x: best_x,
        f: best_f,
        iterations,
        evaluations,
        converged,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 500,
            seed: 0,
            f_tol: 1e-12,
            x_tol: 1e-10,
            initial_step: 0.5,
        }
    }
}

impl SearchConfig {
    fn nelder_mead(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            max_iters: self.max_iters,
            f_tol: self.f_tol,
            x_tol: self.x_tol,
            initial_step: self.initial_step,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub best_value: f64,
    pub best_params: UnitaryParams,
    pub best_u: UnitaryMatrix,
    pub evaluations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Best of `cfg.restarts` simplex runs of `f` over U(`n`).
///
/// Restart `r` starts from parameters drawn with seed `cfg.seed + r`, so a
/// longer schedule only ever adds runs. Ties keep the lowest restart index.
pub fn extremize(
    f: impl Fn(&UnitaryMatrix) -> f64,
    n: usize,
    mode: Mode,
    cfg: &SearchConfig,
) -> Result<SearchReport> {
    let sign = mode.sign();
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut evaluations = 0;
    let restarts = cfg.restarts.max(1);
    for r in 0..restarts {
        let mut rng = seeded_rng(cfg.seed.wrapping_add(r as u64));
        let x0 = UnitaryParams::random(n, &mut rng);
        let res = nelder_mead(
            |x| sign * f(&UnitaryMatrix::from_trusted(compose_raw(x, n))),
            x0.as_slice(),
            &cfg.nelder_mead(),
        )?;
        evaluations += res.evaluations;
        let value = sign * res.f;
        let replace = match &best {
            None => true,
            Some((v, _, _)) => mode.better(value, *v),
        };
        if replace {
            best = Some((value, res.x, res.converged));
        }
    }
    let (_, x, converged) = best.expect("at least one restart");
    let best_params = UnitaryParams { angles: x }.normalized();
    let best_u = compose_unitary(&best_params, n)?;
    Ok(SearchReport {
        best_value: f(&best_u),
        best_params,
        best_u,
        evaluations,
        restarts_used: restarts,
        converged,
    })
}

/// `exp(i H(x)) u0` where `H(x)` is the Hermitian matrix with diagonal
/// `x[..n]` and off-diagonal real/imaginary parts from the rest of `x`.
fn local_chart(x: &[f64], u0: &ComplexMatrix) -> ComplexMatrix {
    let n = u0.nrows();
    let mut h = ComplexMatrix::zeros(n, n);
    let mut idx = n;
    for i in 0..n {
        h[(i, i)] = Complex64::new(x[i], 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(x[idx], x[idx + 1]);
            idx += 2;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let eig = hermitian_eig(&h).expect("Hermitian by construction");
    let v = eig.vectors.matrix();
    let mut scaled = v.clone();
    for (k, &lam) in eig.values.iter().enumerate() {
        let e = Complex64::from_polar(1.0, lam);
        for i in 0..n {
            scaled[(i, k)] *= e;
        }
    }
    scaled * v.adjoint() * u0
}

/// Local simplex polish of `f` around `u0` in the exponential chart.
/// Returns `u0` itself unless a strictly better point is found.
pub fn refine_near(
    f: impl Fn(&UnitaryMatrix) -> f64,
    u0: &UnitaryMatrix,
    mode: Mode,
    opts: &NelderMeadOptions,
) -> Result<(UnitaryMatrix, f64)> {
    let n = u0.dim();
    let sign = mode.sign();
    let base = u0.matrix().clone();
    let f0 = f(u0);
    let res = nelder_mead(
        |x| sign * f(&UnitaryMatrix::from_trusted(local_chart(x, &base))),
        &vec![0.0; n * n],
        opts,
    )?;
    let candidate = UnitaryMatrix::from_trusted(local_chart(&res.x, &base));
    let value = f(&candidate);
    if mode.better(value, f0) {
        Ok((candidate, value))
    } else {
        Ok((u0.clone(), f0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_defect};

    #[test]
    fn zero_params_give_identity() {
        for n in 1..=5 {
            let u = compose_unitary(&UnitaryParams::zeros(n), n).unwrap();
            assert_eq!(u.into_inner(), ComplexMatrix::identity(n, n));
        }
    }

    #[test]
    fn qubit_rotation() {
        let theta = 0.8;
        let u = compose_unitary(&UnitaryParams::new(vec![theta, 0.0, 0.0], 2).unwrap(), 2)
            .unwrap()
            .into_inner();
        let (s, c) = theta.sin_cos();
        let expect = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c.into(), (-s).into(), s.into(), c.into()],
        );
        assert!(max_abs(&(u - expect)) < 1e-15);
    }

    #[test]
    fn random_params_are_unitary() {
        let mut rng = seeded_rng(1);
        for n in 1..=6 {
            let p = UnitaryParams::random(n, &mut rng);
            assert!(unitarity_defect(compose_unitary(&p, n).unwrap().matrix()) <= 1e-12);
        }
    }

    #[test]
    fn bad_length_rejected() {
        assert!(matches!(
            UnitaryParams::new(vec![0.0; 4], 2),
            Err(Error::BadLength { expected: 3, found: 4 })
        ));
        let p = UnitaryParams::zeros(3);
        assert!(matches!(compose_unitary(&p, 2), Err(Error::BadLength { .. })));
    }

    #[test]
    fn normalization_reduces_mod_two_pi() {
        let p = UnitaryParams::new(vec![-1.0, 7.0, 13.0], 2).unwrap().normalized();
        assert!(p.as_slice().iter().all(|x| (0.0..TAU).contains(x)));
        let a = compose_unitary(&p, 2).unwrap();
        let b = compose_unitary(&UnitaryParams::new(vec![-1.0, 7.0, 13.0], 2).unwrap(), 2).unwrap();
        assert!(max_abs(&(a.into_inner() - b.into_inner())) < 1e-13);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let opts = NelderMeadOptions {
            max_iters: 5000,
            ..Default::default()
        };
        let res = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        )
        .unwrap();
        assert!(res.f < 1e-16, "{res:?}");
        assert!((res.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nelder_mead_rejects_nan() {
        let r = nelder_mead(|_| f64::NAN, &[0.0], &NelderMeadOptions::default());
        assert!(matches!(r, Err(Error::NonFiniteObjective)));
    }

    #[test]
    fn constant_objective_converges() {
        let rep = extremize(|_| 1.0, 3, Mode::Max, &SearchConfig { restarts: 2, ..Default::default() }).unwrap();
        assert_eq!(rep.best_value, 1.0);
        assert!(rep.converged);
    }

    #[test]
    fn search_is_reproducible_and_monotone() {
        let target = crate::linalg::random_density(3, 3, 4).unwrap();
        let f = |u: &UnitaryMatrix| {
            crate::linalg::conjugated_diagonal(u.matrix(), target.matrix())[0].re
        };
        let cfg = |restarts| SearchConfig { restarts, max_iters: 150, seed: 9, ..Default::default() };
        let a = extremize(f, 3, Mode::Max, &cfg(3)).unwrap();
        let b = extremize(f, 3, Mode::Max, &cfg(3)).unwrap();
        assert_eq!(a.best_value, b.best_value);
        assert_eq!(a.best_params, b.best_params);
        let mut last = f64::NEG_INFINITY;
        for r in 1..=5 {
            let v = extremize(f, 3, Mode::Max, &cfg(r)).unwrap().best_value;
            assert!(v >= last);
            last = v;
        }
        // largest eigenvalue bounds any diagonal entry
        let top = *crate::linalg::hermitian_eig(target.matrix()).unwrap().values.last().unwrap();
        assert!(last <= top + 1e-12);
        assert!(last > top - 1e-6);
    }

    #[test]
    fn report_value_matches_best_u() {
        let target = crate::linalg::random_density(2, 2, 1).unwrap();
        let f = |u: &UnitaryMatrix| crate::linalg::conjugated_diagonal(u.matrix(), target.matrix())[1].re;
        let rep = extremize(f, 2, Mode::Min, &SearchConfig { restarts: 3, ..Default::default() }).unwrap();
        assert!((rep.best_value - f(&rep.best_u)).abs() <= 1e-12);
        assert!(unitarity_defect(rep.best_u.matrix()) <= 1e-10);
    }

    #[test]
    fn refine_improves_from_nearby_start() {
        let target = crate::linalg::random_density(3, 3, 2).unwrap();
        let f = |u: &UnitaryMatrix| crate::linalg::conjugated_diagonal(u.matrix(), target.matrix())[0].re;
        let start = UnitaryMatrix::identity(3);
        let opts = NelderMeadOptions { max_iters: 3000, initial_step: 0.3, ..Default::default() };
        let (_, v) = refine_near(f, &start, Mode::Max, &opts).unwrap();
        let top = *crate::linalg::hermitian_eig(target.matrix()).unwrap().values.last().unwrap();
        assert!(v >= f(&start));
        assert!((v - top).abs() < 1e-8);
    }
}
