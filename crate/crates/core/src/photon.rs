//! Photon-number tomography in a truncated Fock space.
//!
//! Convention: `w(n, alpha) = <n| D(alpha) rho D(alpha)^dag |n>` with
//! `D(alpha) = exp(alpha a^dag - alpha^* a)`. Under this convention the
//! coherent state `|beta>` has a Poisson tomogram with mean `|alpha + beta|^2`.
//!
//! Operators are built in `d + margin` levels and cropped to `d`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::distance::{
    bhattacharyya, euclidean_half_distance, fidelity, hs_distance, kolmogorov_distance,
    max_abs_component, operator_norm_distance, trace_distance, Measure,
};
use crate::error::{Error, Result};
use crate::linalg::{
    check_same_dim, conjugated_diagonal, hermitian_part, unitarity_defect, ComplexMatrix,
    DensityMatrix, ZERO,
};
use crate::search::{nelder_mead, NelderMeadOptions};
use crate::spin::{QuantizerLabel, QuantizerOperator};

/// Truncation leakage tolerated for shipped states and parity evaluation.
pub const LEAKAGE_BUDGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockSpace {
    truncation: usize,
    margin: usize,
}

impl FockSpace {
    pub const DEFAULT_TRUNCATION: usize = 32;
    pub const DEFAULT_MARGIN: usize = 16;

    pub fn new(truncation: usize, margin: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::ParameterOutOfRange(format!(
                "truncation {truncation} < 2"
            )));
        }
        Ok(Self { truncation, margin })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn working_dim(&self) -> usize {
        self.truncation + self.margin
    }

    /// Largest admissible `|alpha|^2`, a quarter of the working dimension.
    pub fn alpha_sq_limit(&self) -> f64 {
        self.working_dim() as f64 / 4.0
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self {
            truncation: Self::DEFAULT_TRUNCATION,
            margin: Self::DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement(Complex64);

impl Displacement {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self(alpha))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn zero() -> Self {
        Self(ZERO)
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingParam(f64);

impl OrderingParam {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::BadOrderingParam(s));
        }
        Ok(Self(s))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `t = (s - 1) / (s + 1)`, in `[-1, 0)`.
    pub fn t(&self) -> f64 {
        (self.0 - 1.0) / (self.0 + 1.0)
    }
}

impl Default for OrderingParam {
    fn default() -> Self {
        Self(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonTomogramVector {
    pub space: FockSpace,
    pub alpha: Displacement,
    pub w: Vec<f64>,
    /// `1 - sum w`: probability displaced above the truncation.
    pub leakage: f64,
}

/// Truncated annihilation operator, `sqrt(n)` on the first superdiagonal.
pub fn annihilation_matrix(space: &FockSpace) -> ComplexMatrix {
    annihilation(space.truncation)
}

fn annihilation(d: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Exact matrix elements `<m|D(alpha)|n>` for `m, n < dim`.
///
/// For `m >= n`, `<m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2) L_n^(m-n)(|alpha|^2)`;
/// the upper triangle takes `-alpha^*` in place of `alpha`.
fn displacement_elements(alpha: Complex64, dim: usize) -> ComplexMatrix {
    let x = alpha.norm_sqr();
    let envelope = (-0.5 * x).exp();
    let lower_base = alpha;
    let upper_base = -alpha.conj();
    let mut d = ComplexMatrix::zeros(dim, dim);
    // lower_pow[k] = alpha^k, upper_pow[k] = (-alpha^*)^k
    let mut lower_pow = vec![Complex64::new(1.0, 0.0); dim];
    let mut upper_pow = vec![Complex64::new(1.0, 0.0); dim];
    for k in 1..dim {
        lower_pow[k] = lower_pow[k - 1] * lower_base;
        upper_pow[k] = upper_pow[k - 1] * upper_base;
    }
    for k in 0..dim {
        let kf = k as f64;
        // L_n^(k)(x) by upward recurrence in n; ratio = sqrt(n!/(n+k)!)
        let mut l_prev = 0.0;
        let mut l = 1.0;
        let mut ratio: f64 = (1..=k).map(|i| 1.0 / (i as f64).sqrt()).product();
        for n in 0..dim - k {
            let nf = n as f64;
            if n > 0 {
                let next = ((2.0 * nf - 1.0 + kf - x) * l - (nf - 1.0 + kf) * l_prev) / nf;
                l_prev = l;
                l = next;
                ratio *= (nf / (nf + kf)).sqrt();
            }
            let mag = ratio * envelope * l;
            d[(n + k, n)] = lower_pow[k] * mag;
            if k > 0 {
                d[(n, n + k)] = upper_pow[k] * mag;
            }
        }
    }
    d
}

fn check_alpha(alpha: Complex64, space: &FockSpace) -> Result<()> {
    let alpha_sq = alpha.norm_sqr();
    let limit = space.alpha_sq_limit();
    // slack so that points placed exactly on the limit circle pass
    if alpha_sq > limit * (1.0 + 1e-12) {
        return Err(Error::AlphaTooLargeForTruncation { alpha_sq, limit });
    }
    Ok(())
}

/// Cropped displacement operator. The crop is not exactly unitary; the
/// defect `max |D^dag D - I|` is reported alongside. Products should go
/// through [`DisplacementMatrix::product`], which multiplies in the working
/// dimension before cropping.
#[derive(Debug, Clone)]
pub struct DisplacementMatrix {
    pub mat: ComplexMatrix,
    pub unitarity_defect: f64,
    working: ComplexMatrix,
}

impl DisplacementMatrix {
    /// The `d + margin` block the crop was taken from.
    pub fn working(&self) -> &ComplexMatrix {
        &self.working
    }

    /// `self * other` computed in the working dimension, cropped to `d`.
    pub fn product(&self, other: &DisplacementMatrix) -> Result<ComplexMatrix> {
        check_same_dim(self.working.nrows(), other.working.nrows())?;
        let d = self.mat.nrows();
        Ok((&self.working * &other.working).view((0, 0), (d, d)).into_owned())
    }
}

/// `D(alpha)` built in the working dimension and cropped to `d`.
pub fn displacement_matrix(alpha: Displacement, space: &FockSpace) -> Result<DisplacementMatrix> {
    let working = working_displacement(alpha, space)?;
    let d = space.truncation;
    let mat = working.view((0, 0), (d, d)).into_owned();
    let unitarity_defect = unitarity_defect(&mat);
    Ok(DisplacementMatrix {
        mat,
        unitarity_defect,
        working,
    })
}

fn working_displacement(alpha: Displacement, space: &FockSpace) -> Result<ComplexMatrix> {
    check_alpha(alpha.0, space)?;
    Ok(displacement_elements(alpha.0, space.working_dim()))
}

/// Test state families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Fock { n: usize },
    Coherent { re: f64, im: f64 },
    Thermal { nbar: f64 },
    Cat { re: f64, im: f64, parity: CatParity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatParity {
    Even,
    Odd,
}

/// Truncated, renormalized state with the probability lost to truncation.
#[derive(Debug, Clone)]
pub struct PhotonState {
    pub rho: DensityMatrix,
    pub leakage: f64,
}

impl PhotonState {
    /// Wraps an explicit density matrix (no truncation leakage).
    pub fn exact(rho: DensityMatrix) -> Self {
        Self { rho, leakage: 0.0 }
    }
}

/// `e^(-|b|^2/2) b^n / sqrt(n!)` for `n < d`.
fn coherent_amplitudes(beta: Complex64, d: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(d);
    let mut z = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..d {
        if n > 0 {
            z = z * beta / (n as f64).sqrt();
        }
        c.push(z);
    }
    c
}

fn pure_from(mut c: Vec<Complex64>, full_norm_sq: f64) -> Result<PhotonState> {
    let kept: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let leakage = (1.0 - kept / full_norm_sq).max(0.0);
    let scale = kept.sqrt();
    for z in c.iter_mut() {
        *z /= scale;
    }
    Ok(PhotonState {
        rho: DensityMatrix::pure(&c)?,
        leakage,
    })
}

pub fn build_state(spec: &StateSpec, space: &FockSpace) -> Result<PhotonState> {
    let d = space.truncation;
    let check_beta = |beta: Complex64| -> Result<()> {
        if !beta.re.is_finite() || !beta.im.is_finite() {
            return Err(Error::ParameterOutOfRange("amplitude not finite".into()));
        }
        if beta.norm_sqr() > space.alpha_sq_limit() {
            return Err(Error::ParameterOutOfRange(format!(
                "|beta|^2 = {} exceeds the truncation limit {}",
                beta.norm_sqr(),
                space.alpha_sq_limit()
            )));
        }
        Ok(())
    };
    match *spec {
        StateSpec::Fock { n } => {
            if n >= d {
                return Err(Error::ParameterOutOfRange(format!(
                    "Fock level {n} not below truncation {d}"
                )));
            }
            let mut p = vec![0.0; d];
            p[n] = 1.0;
            Ok(PhotonState::exact(DensityMatrix::diagonal(&p)?))
        }
        StateSpec::Coherent { re, im } => {
            let beta = Complex64::new(re, im);
            check_beta(beta)?;
            pure_from(coherent_amplitudes(beta, d), 1.0)
        }
        StateSpec::Thermal { nbar } => {
            if !nbar.is_finite() || nbar < 0.0 {
                return Err(Error::ParameterOutOfRange(format!("nbar = {nbar}")));
            }
            let q = nbar / (nbar + 1.0);
            let mut p: Vec<f64> = (0..d).map(|n| q.powi(n as i32) / (nbar + 1.0)).collect();
            let kept: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= kept);
            Ok(PhotonState {
                rho: DensityMatrix::diagonal(&p)?,
                leakage: (1.0 - kept).max(0.0),
            })
        }
        StateSpec::Cat { re, im, parity } => {
            let beta = Complex64::new(re, im);
            check_beta(beta)?;
            let overlap = (-2.0 * beta.norm_sqr()).exp();
            let (keep_even, full) = match parity {
                CatParity::Even => (true, 2.0 * (1.0 + overlap)),
                CatParity::Odd => (false, 2.0 * (1.0 - overlap)),
            };
            if full <= 0.0 {
                return Err(Error::ParameterOutOfRange(
                    "odd cat state needs beta != 0".into(),
                ));
            }
            let c: Vec<Complex64> = coherent_amplitudes(beta, d)
                .into_iter()
                .enumerate()
                .map(|(n, z)| if (n % 2 == 0) == keep_even { z * 2.0 } else { ZERO })
                .collect();
            pure_from(c, full)
        }
    }
}

fn tomogram_from(rho: &ComplexMatrix, disp: &ComplexMatrix) -> (Vec<f64>, f64) {
    let w: Vec<f64> = conjugated_diagonal(disp, rho).iter().map(|z| z.re).collect();
    let leakage = 1.0 - w.iter().sum::<f64>();
    (w, leakage)
}

/// Photon-number distribution of the displaced state `D(alpha) rho D(alpha)^dag`.
pub fn photon_tomogram(
    rho: &DensityMatrix,
    alpha: Displacement,
    space: &FockSpace,
) -> Result<PhotonTomogramVector> {
    check_same_dim(space.truncation, rho.dim())?;
    let disp = displacement_matrix(alpha, space)?;
    let (w, leakage) = tomogram_from(rho.matrix(), &disp.mat);
    Ok(PhotonTomogramVector {
        space: *space,
        alpha,
        w,
        leakage,
    })
}

/// `4/(1-s^2) t^(-n) D(alpha)^dag t^(n_hat) D(alpha)` with `t = (s-1)/(s+1)`.
pub fn photon_quantizer(
    n: usize,
    alpha: Displacement,
    s: OrderingParam,
    space: &FockSpace,
) -> Result<QuantizerOperator> {
    let d = space.truncation;
    if n >= d {
        return Err(Error::IndexOutOfRange { index: n, dim: d });
    }
    let disp = working_displacement(alpha, space)?;
    let t = s.t();
    let mut weighted = disp.clone();
    let mut tk = 1.0;
    for k in 0..weighted.nrows() {
        if k > 0 {
            tk *= t;
        }
        weighted.row_mut(k).scale_mut(tk);
    }
    let full = disp.adjoint() * weighted;
    let prefactor = 4.0 / (1.0 - s.0 * s.0) * t.powi(-(n as i32));
    let mat = full.view((0, 0), (d, d)).into_owned() * Complex64::new(prefactor, 0.0);
    Ok(QuantizerOperator {
        mat: hermitian_part(&mat),
        label: QuantizerLabel::Photon {
            n,
            alpha: alpha.0,
            s: s.0,
        },
    })
}

/// `sum_n (-1)^n w(n, alpha)`, the expectation of the parity of the displaced state.
pub fn displaced_parity(rho: &DensityMatrix, alpha: Displacement, space: &FockSpace) -> Result<f64> {
    let tomo = photon_tomogram(rho, alpha, space)?;
    if tomo.leakage > LEAKAGE_BUDGET {
        return Err(Error::ExcessiveLeakage {
            leakage: tomo.leakage,
            budget: LEAKAGE_BUDGET,
        });
    }
    Ok(tomo
        .w
        .iter()
        .enumerate()
        .map(|(n, w)| if n % 2 == 0 { *w } else { -*w })
        .sum())
}

/// Polar grid over the displacement plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanGrid {
    pub r_max: f64,
    pub n_radial: usize,
    pub n_angular: usize,
    /// Simplex refinement from the best nodes of each measure.
    pub refine: bool,
    pub refine_from: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            r_max: 4.0,
            n_radial: 40,
            n_angular: 32,
            refine: true,
            refine_from: 3,
        }
    }
}

impl ScanGrid {
    /// Grid nodes in deterministic order: the origin, then ring by ring.
    pub fn nodes(&self, r_eff: f64) -> Vec<Complex64> {
        let mut out = vec![ZERO];
        let rings = self.n_radial.max(2) - 1;
        for i in 1..=rings {
            let r = r_eff * i as f64 / rings as f64;
            for k in 0..self.n_angular.max(1) {
                out.push(Complex64::from_polar(r, TAU * k as f64 / self.n_angular.max(1) as f64));
            }
        }
        out
    }
}

/// The four classical functionals at one displacement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanNode {
    pub re: f64,
    pub im: f64,
    pub hs: f64,
    pub kolmogorov: f64,
    /// Partial Bhattacharyya sum plus `sqrt(leak1 leak2)`, an upper estimate
    /// of the untruncated coefficient.
    pub bhattacharyya: f64,
    pub max_abs: f64,
    /// Mass displaced beyond the working levels.
    pub leakage1: f64,
    pub leakage2: f64,
}

impl ScanNode {
    pub fn value(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Hs => self.hs,
            Measure::Trace => self.kolmogorov,
            Measure::Fidelity => self.bhattacharyya,
            Measure::Opnorm => self.max_abs,
        }
    }
}

/// One displacement-extremized bound against its oracle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundRecord {
    pub measure: Measure,
    /// Max over the scanned disk for lower bounds, min for fidelity.
    pub bound: f64,
    pub at_re: f64,
    pub at_im: f64,
    pub oracle: f64,
    /// `oracle - bound` for lower bounds, `bound - oracle` for fidelity.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub bounds: Vec<BoundRecord>,
    pub nodes: Vec<ScanNode>,
    /// Radius actually scanned; `r_max` clipped to the truncation limit.
    pub r_eff: f64,
    pub tol: f64,
    pub max_leakage: f64,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.holds)
    }

    pub fn bound(&self, measure: Measure) -> &BoundRecord {
        self.bounds
            .iter()
            .find(|b| b.measure == measure)
            .expect("every measure is recorded")
    }
}

/// `rho` embedded in the top-left corner of the working dimension.
fn padded(rho: &ComplexMatrix, space: &FockSpace) -> ComplexMatrix {
    let w = space.working_dim();
    let mut out = ComplexMatrix::zeros(w, w);
    out.view_mut((0, 0), rho.shape()).copy_from(rho);
    out
}

/// Functionals over all `d + margin` working levels, whose displacement
/// elements are exact; only the mass beyond them needs the tail term.
fn scan_node(
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    alpha: Complex64,
    space: &FockSpace,
) -> Result<ScanNode> {
    let disp = working_displacement(Displacement::new(alpha)?, space)?;
    let (w1, l1) = tomogram_from(rho1, &disp);
    let (w2, l2) = tomogram_from(rho2, &disp);
    let (l1, l2) = (l1.max(0.0), l2.max(0.0));
    Ok(ScanNode {
        re: alpha.re,
        im: alpha.im,
        hs: euclidean_half_distance(&w1, &w2)?,
        kolmogorov: kolmogorov_distance(&w1, &w2)?,
        bhattacharyya: bhattacharyya(&w1, &w2)? + (l1 * l2).sqrt(),
        max_abs: max_abs_component(&w1, &w2)?,
        leakage1: l1,
        leakage2: l2,
    })
}

/// Extremizes each photon-tomogram functional over a disk of displacements
/// and compares it with the matching density-matrix measure.
///
/// Tomograms are summed over the `d + margin` working levels. Partial sums
/// can only lower the three distance functionals, so they remain valid lower
/// bounds; the fidelity side adds the Cauchy-Schwarz tail term
/// `sqrt(leak1 leak2)` for the mass beyond the working levels.
pub fn inequality_scan(
    state1: &PhotonState,
    state2: &PhotonState,
    space: &FockSpace,
    grid: &ScanGrid,
) -> Result<InequalityReport> {
    let d = space.truncation;
    check_same_dim(d, state1.rho.dim())?;
    check_same_dim(d, state2.rho.dim())?;
    for s in [state1, state2] {
        if s.leakage > LEAKAGE_BUDGET {
            return Err(Error::ExcessiveLeakage {
                leakage: s.leakage,
                budget: LEAKAGE_BUDGET,
            });
        }
    }
    if !grid.r_max.is_finite() || grid.r_max < 0.0 {
        return Err(Error::ParameterOutOfRange(format!("r_max = {}", grid.r_max)));
    }
    let (rho1, rho2) = (&padded(state1.rho.matrix(), space), &padded(state2.rho.matrix(), space));
    let r_eff = grid.r_max.min(space.alpha_sq_limit().sqrt());

    let mut nodes = Vec::new();
    for alpha in grid.nodes(r_eff) {
        nodes.push(scan_node(rho1, rho2, alpha, space)?);
    }

    let tol = 1e-7 + LEAKAGE_BUDGET;
    let step = r_eff / grid.n_radial.max(2) as f64;
    let mut bounds = Vec::with_capacity(4);
    for measure in Measure::ALL {
        let sign = if measure == Measure::Fidelity { 1.0 } else { -1.0 };
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| {
            (sign * nodes[a].value(measure)).total_cmp(&(sign * nodes[b].value(measure)))
        });
        let first = nodes[order[0]];
        let mut best = (first.value(measure), Complex64::new(first.re, first.im));
        if grid.refine && step > 0.0 {
            // evaluate outside points at their projection onto the disk
            let clamp = |x: &[f64]| {
                let z = Complex64::new(x[0], x[1]);
                let r = z.norm();
                if r > r_eff {
                    z * (r_eff / r)
                } else {
                    z
                }
            };
            let opts = NelderMeadOptions {
                max_iters: 200,
                f_tol: 1e-13,
                x_tol: 1e-10,
                initial_step: step,
            };
            for &idx in order.iter().take(grid.refine_from) {
                let start = [nodes[idx].re, nodes[idx].im];
                let res = nelder_mead(
                    |x| match scan_node(rho1, rho2, clamp(x), space) {
                        Ok(node) => sign * node.value(measure),
                        Err(_) => f64::NAN,
                    },
                    &start,
                    &opts,
                )?;
                let z = clamp(&res.x);
                let v = scan_node(rho1, rho2, z, space)?.value(measure);
                if sign * v < sign * best.0 {
                    best = (v, z);
                }
            }
        }
        let oracle = match measure {
            Measure::Hs => hs_distance(&state1.rho, &state2.rho)?,
            Measure::Trace => trace_distance(&state1.rho, &state2.rho)?,
            Measure::Fidelity => fidelity(&state1.rho, &state2.rho)?,
            Measure::Opnorm => operator_norm_distance(&state1.rho, &state2.rho)?,
        }
        .value;
        let slack = if measure == Measure::Fidelity {
            best.0 - oracle
        } else {
            oracle - best.0
        };
        bounds.push(BoundRecord {
            measure,
            bound: best.0,
            at_re: best.1.re,
            at_im: best.1.im,
            oracle,
            slack,
            holds: slack >= -tol,
        });
    }
    let max_leakage = nodes
        .iter()
        .fold(0.0f64, |m, n| m.max(n.leakage1).max(n.leakage2));
    Ok(InequalityReport {
        bounds,
        nodes,
        r_eff,
        tol,
        max_leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disp(re: f64, im: f64) -> Displacement {
        Displacement::from_re_im(re, im).unwrap()
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    fn expm(a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.nrows();
        let norm: f64 = a.iter().map(|z| z.norm()).sum();
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
        let mut term = ComplexMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &scaled / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn annihilation_examples() {
        let a2 = annihilation_matrix(&FockSpace::new(2, 0).unwrap());
        assert_eq!(a2[(0, 1)], c(1.0, 0.0));
        assert_eq!(a2[(0, 0)] + a2[(1, 0)] + a2[(1, 1)], ZERO);
        let a3 = annihilation_matrix(&FockSpace::new(3, 0).unwrap());
        assert_eq!(a3[(1, 2)].re, 2f64.sqrt());
        let d = 6;
        let a = annihilation_matrix(&FockSpace::new(d, 0).unwrap());
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for i in 0..d {
            let expected = if i == d - 1 { -((d - 1) as f64) } else { 1.0 };
            assert!((comm[(i, i)].re - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn space_and_params_validate() {
        assert!(FockSpace::new(1, 5).is_err());
        assert!(OrderingParam::new(1.0).is_err());
        assert!(OrderingParam::new(-0.1).is_err());
        assert_eq!(OrderingParam::new(0.0).unwrap().t(), -1.0);
        assert!(Displacement::from_re_im(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn displacement_at_zero_is_identity() {
        let d = displacement_matrix(Displacement::zero(), &FockSpace::default()).unwrap();
        assert_eq!(d.mat, ComplexMatrix::identity(32, 32));
    }

    #[test]
    fn first_column_is_coherent_state() {
        let space = FockSpace::default();
        let alpha = c(1.3, -0.7);
        let d = displacement_matrix(Displacement::new(alpha).unwrap(), &space).unwrap();
        let mut fact = 1.0;
        for n in 0..32 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32) / fact.sqrt();
            assert!((d.mat[(n, 0)] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_matrix_exponential() {
        let w = 60;
        let alpha = c(0.8, 0.5);
        let a = annihilation(w);
        let gen = a.adjoint() * alpha - &a * alpha.conj();
        let reference = expm(&gen);
        let ours = displacement_elements(alpha, w);
        // the exponential of the truncated generator is only accurate well inside the block
        let block = 20;
        let diff = (ours.view((0, 0), (block, block)) - reference.view((0, 0), (block, block)))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff < 1e-10, "{diff}");
    }

    // D(alpha)|n> spreads to roughly (sqrt(n) + |alpha|)^2 quanta, so with 48
    // working levels the group law is checked on the leading 16 levels.
    #[test]
    fn inverse_pair_and_composition() {
        let space = FockSpace::default();
        let lead = |m: ComplexMatrix| m.view((0, 0), (16, 16)).into_owned();
        for &(a, b) in &[(c(2.0, 0.0), c(0.0, 0.0)), (c(0.3, 1.1), c(-0.8, 0.2)), (c(-1.2, -1.4), c(0.5, 0.5))] {
            let da = displacement_matrix(Displacement::new(a).unwrap(), &space).unwrap();
            let dma = displacement_matrix(Displacement::new(-a).unwrap(), &space).unwrap();
            let inv = lead(da.product(&dma).unwrap()) - ComplexMatrix::identity(16, 16);
            assert!(max_abs(&inv) < 1e-8, "{}", max_abs(&inv));

            let db = displacement_matrix(Displacement::new(b).unwrap(), &space).unwrap();
            let dab = displacement_matrix(Displacement::new(a + b).unwrap(), &space).unwrap().mat;
            // D(a) D(b) = exp(i Im(a b^*)) D(a + b)
            let phase = Complex64::from_polar(1.0, (a * b.conj()).im);
            let diff = lead(da.product(&db).unwrap()) - lead(dab) * phase;
            assert!(max_abs(&diff) < 1e-7, "{}", max_abs(&diff));
        }
    }

    #[test]
    fn displacement_guard() {
        let space = FockSpace::default();
        assert!(matches!(
            displacement_matrix(disp(3.5, 0.0), &space),
            Err(Error::AlphaTooLargeForTruncation { .. })
        ));
        assert!(displacement_matrix(disp(3.4, 0.0), &space).is_ok());
    }

    #[test]
    fn state_builders() {
        let space = FockSpace::default();
        let vac = build_state(&StateSpec::Fock { n: 0 }, &space).unwrap();
        assert_eq!(vac.rho.matrix()[(0, 0)].re, 1.0);
        assert_eq!(vac.leakage, 0.0);
        assert!(build_state(&StateSpec::Fock { n: 32 }, &space).is_err());

        let nbar: f64 = 0.5;
        let th = build_state(&StateSpec::Thermal { nbar }, &space).unwrap();
        for n in 0..8 {
            let p = nbar.powi(n) / (nbar + 1.0).powi(n + 1);
            assert!((th.rho.matrix()[(n as usize, n as usize)].re - p).abs() < 1e-15);
        }
        assert!(build_state(&StateSpec::Thermal { nbar: -1.0 }, &space).is_err());

        let cat = build_state(
            &StateSpec::Cat { re: 1.5, im: 0.0, parity: CatParity::Even },
            &space,
        )
        .unwrap();
        let m = cat.rho.matrix();
        for i in 0..32 {
            for j in 0..32 {
                if i % 2 == 1 || j % 2 == 1 {
                    assert_eq!(m[(i, j)], ZERO);
                }
            }
        }
        assert!(cat.leakage < 1e-12);
        assert!(build_state(&StateSpec::Cat { re: 0.0, im: 0.0, parity: CatParity::Odd }, &space).is_err());
        assert!(build_state(&StateSpec::Coherent { re: 4.0, im: 0.0 }, &space).is_err());
    }

    #[test]
    fn coherent_leakage_is_poisson_tail() {
        let space = FockSpace::new(8, 8).unwrap();
        let s = build_state(&StateSpec::Coherent { re: 1.0, im: 0.0 }, &space).unwrap();
        let mut term = (-1.0f64).exp();
        let mut kept = 0.0;
        for n in 0..8 {
            if n > 0 {
                term /= n as f64;
            }
            kept += term;
        }
        assert!((s.leakage - (1.0 - kept)).abs() < 1e-15);
    }

    #[test]
    fn tomogram_examples() {
        let space = FockSpace::default();
        let vac = build_state(&StateSpec::Fock { n: 0 }, &space).unwrap();
        let t = photon_tomogram(&vac.rho, Displacement::zero(), &space).unwrap();
        assert_eq!(t.w[0], 1.0);
        assert!(t.w[1..].iter().all(|&x| x == 0.0));

        let th = build_state(&StateSpec::Thermal { nbar: 1.0 }, &space).unwrap();
        let t = photon_tomogram(&th.rho, Displacement::zero(), &space).unwrap();
        for n in 0..10 {
            // renormalized after losing 2^-32 to truncation
            assert!((t.w[n] - 0.5f64.powi(n as i32 + 1)).abs() < 1e-9);
        }

        let beta = c(0.4, -0.3);
        let coh = build_state(&StateSpec::Coherent { re: beta.re, im: beta.im }, &space).unwrap();
        let alpha = c(-1.0, 0.9);
        let t = photon_tomogram(&coh.rho, Displacement::new(alpha).unwrap(), &space).unwrap();
        let mean = (alpha + beta).norm_sqr();
        let mut p = (-mean).exp();
        for n in 0..32 {
            if n > 0 {
                p *= mean / n as f64;
            }
            assert!((t.w[n] - p).abs() < 1e-12);
        }

        let small = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            photon_tomogram(&small, Displacement::zero(), &space),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tomogram_equals_plain_matrix_algebra() {
        let space = FockSpace::new(12, 12).unwrap();
        let rho = crate::linalg::random_density(12, 4, 5).unwrap();
        let alpha = disp(0.6, -0.4);
        let t = photon_tomogram(&rho, alpha, &space).unwrap();
        let d = displacement_matrix(alpha, &space).unwrap().mat;
        let full = &d * rho.matrix() * d.adjoint();
        for n in 0..12 {
            assert!((t.w[n] - full[(n, n)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn quantizer_examples() {
        let space = FockSpace::default();
        let q = photon_quantizer(0, Displacement::zero(), OrderingParam::default(), &space).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let expected = if i != j {
                    0.0
                } else if i % 2 == 0 {
                    4.0
                } else {
                    -4.0
                };
                assert!((q.mat[(i, j)].re - expected).abs() < 1e-10);
                assert!(q.mat[(i, j)].im.abs() < 1e-10);
            }
        }
        assert!(photon_quantizer(32, Displacement::zero(), OrderingParam::default(), &space).is_err());
    }

    #[test]
    fn quantizer_is_diagonal_in_displaced_basis() {
        let space = FockSpace::default();
        let alpha = disp(0.7, 0.3);
        for (n, s) in [(0, 0.0), (1, 0.0), (2, 0.3)] {
            let q = photon_quantizer(n, alpha, OrderingParam::new(s).unwrap(), &space).unwrap();
            assert!(crate::linalg::hermitian_defect(&q.mat) < 1e-10);
            let d = displacement_matrix(alpha, &space).unwrap().mat;
            let conj = &d * &q.mat * d.adjoint();
            // off the cropped edge, conjugation stays exact
            for i in 0..16 {
                for j in 0..16 {
                    if i != j {
                        assert!(conj[(i, j)].norm() < 1e-8, "s={s} ({i},{j})");
                    }
                }
            }
            let t = OrderingParam::new(s).unwrap().t();
            let expected = 4.0 / (1.0 - s * s) * t.powi(2 - n as i32);
            assert!((conj[(2, 2)].re - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn parity_examples_and_quantizer_cross_check() {
        let space = FockSpace::default();
        let vac = build_state(&StateSpec::Fock { n: 0 }, &space).unwrap();
        assert_eq!(displaced_parity(&vac.rho, Displacement::zero(), &space).unwrap(), 1.0);
        let one = build_state(&StateSpec::Fock { n: 1 }, &space).unwrap();
        assert_eq!(displaced_parity(&one.rho, Displacement::zero(), &space).unwrap(), -1.0);

        let beta = c(0.5, 0.2);
        let coh = build_state(&StateSpec::Coherent { re: beta.re, im: beta.im }, &space).unwrap();
        for alpha in [c(0.0, 0.0), c(0.3, -0.6), c(-1.0, 0.4)] {
            let a = Displacement::new(alpha).unwrap();
            let p = displaced_parity(&coh.rho, a, &space).unwrap();
            assert!((p - (-2.0 * (alpha + beta).norm_sqr()).exp()).abs() < 1e-8);
            let q = photon_quantizer(0, a, OrderingParam::default(), &space).unwrap();
            let via_q = (coh.rho.matrix() * &q.mat).trace().re / 4.0;
            assert!((p - via_q).abs() < 1e-8);
        }

        let far = build_state(&StateSpec::Fock { n: 31 }, &space).unwrap();
        assert!(matches!(
            displaced_parity(&far.rho, disp(2.0, 0.0), &space),
            Err(Error::ExcessiveLeakage { .. })
        ));
    }

    fn coarse() -> ScanGrid {
        ScanGrid {
            r_max: 2.0,
            n_radial: 6,
            n_angular: 8,
            refine: true,
            refine_from: 2,
        }
    }

    #[test]
    fn scan_identical_states() {
        let space = FockSpace::new(16, 16).unwrap();
        let s = build_state(&StateSpec::Coherent { re: 0.5, im: 0.5 }, &space).unwrap();
        let rep = inequality_scan(&s, &s, &space, &coarse()).unwrap();
        assert!(rep.all_hold());
        for m in [Measure::Hs, Measure::Trace, Measure::Opnorm] {
            assert!(rep.bound(m).bound.abs() < 1e-12);
        }
        assert!((rep.bound(Measure::Fidelity).bound - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scan_orthogonal_fock_is_tight() {
        let space = FockSpace::new(16, 16).unwrap();
        let s0 = build_state(&StateSpec::Fock { n: 0 }, &space).unwrap();
        let s1 = build_state(&StateSpec::Fock { n: 1 }, &space).unwrap();
        let rep = inequality_scan(&s0, &s1, &space, &coarse()).unwrap();
        assert!(rep.all_hold());
        assert!((rep.bound(Measure::Trace).bound - 1.0).abs() < 1e-9);
        assert_eq!(rep.nodes[0].kolmogorov, 1.0);
    }

    #[test]
    fn scan_clips_radius_to_truncation() {
        let space = FockSpace::new(8, 0).unwrap();
        let s0 = build_state(&StateSpec::Fock { n: 0 }, &space).unwrap();
        let rep = inequality_scan(&s0, &s0, &space, &ScanGrid { refine: false, ..coarse() }).unwrap();
        assert!((rep.r_eff - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn refinement_never_loosens_bounds() {
        let space = FockSpace::new(16, 16).unwrap();
        let s1 = build_state(&StateSpec::Coherent { re: 1.0, im: 0.0 }, &space).unwrap();
        let s2 = build_state(&StateSpec::Fock { n: 2 }, &space).unwrap();
        let raw = inequality_scan(&s1, &s2, &space, &ScanGrid { refine: false, ..coarse() }).unwrap();
        let fine = inequality_scan(&s1, &s2, &space, &coarse()).unwrap();
        for m in Measure::ALL {
            let (a, b) = (raw.bound(m).bound, fine.bound(m).bound);
            if m == Measure::Fidelity {
                assert!(b <= a);
            } else {
                assert!(b >= a);
            }
        }
        assert!(fine.all_hold());
    }
}
