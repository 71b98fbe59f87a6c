//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything downstream works with `N x N` complex matrices with `N` rarely
//! above a few dozen, so the eigensolver is a plain cyclic Jacobi iteration
//! that favours accuracy over speed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};

/// Square complex matrix. Squareness and finiteness are checked at the API
/// boundaries that need them.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Tolerance for the density-matrix and unitary invariants.
pub const STATE_TOL: f64 = 1e-12;
/// Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_CLAMP` are treated as round-off and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn check_square_finite(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |m - m^dag|` over all entries.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^dag) / 2`
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `max |u^dag u - I|` over all entries.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    max_abs(&(g - ComplexMatrix::identity(n, n)))
}

/// Diagonal of `u a u^dag` without forming the product.
pub fn conjugated_diagonal(u: &ComplexMatrix, a: &ComplexMatrix) -> Vec<Complex64> {
    let n = u.nrows();
    let (us, as_) = (u.as_slice(), a.as_slice());
    (0..n)
        .map(|k| {
            let mut acc = ZERO;
            for (j, col) in as_.chunks_exact(n).enumerate() {
                let ukj = us[j * n + k].conj();
                if ukj == ZERO {
                    continue;
                }
                let mut row = ZERO;
                for (i, aij) in col.iter().enumerate() {
                    row += us[i * n + k] * aij;
                }
                acc += row * ukj;
            }
            acc
        })
        .collect()
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `mat` against the state invariants at [`STATE_TOL`].
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(mat, STATE_TOL)
    }

    /// Validates with a caller-chosen tolerance; the stored matrix is the
    /// Hermitian part of `mat`.
    pub fn with_tolerance(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        check_square_finite(&mat)?;
        let defect = hermitian_defect(&mat);
        if defect > tol {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:e} exceeds {tol:e}"
            )));
        }
        let mat = hermitian_part(&mat);
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eig(&mat)?;
        let lowest = eig.values.first().copied().unwrap_or(0.0);
        if lowest < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(Self(mat))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0))
    }

    /// `|psi><psi|` for the normalized `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let n = psi.len();
        let mat = ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Ok(Self(hermitian_part(&mat)))
    }

    /// Diagonal state with the given occupation probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        let mut mat = ComplexMatrix::zeros(n, n);
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = Complex64::new(p, 0.0);
        }
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// `Tr rho^2`
    pub fn purity(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Unitary matrix (global phase unconstrained).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        check_square_finite(&mat)?;
        let defect = unitarity_defect(&mat);
        if defect > STATE_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self(mat))
    }

    /// Wraps a matrix that is unitary by construction.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(unitarity_defect(&mat) < 1e-9);
        Self(mat)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &UnitaryMatrix) -> Self {
        Self(&self.0 * &other.0)
    }
}

/// Spectral decomposition `H = V diag(values) V^dag` with ascending values.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: UnitaryMatrix,
}

impl HermitianEigen {
    /// `V diag(f(values)) V^dag`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.matrix();
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let fk = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= fk;
            }
        }
        hermitian_part(&(scaled * v.adjoint()))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector column is rephased so
/// that its largest-magnitude component is real and positive (first such
/// component on ties). Degenerate eigenspaces get whatever basis the
/// rotations produce.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    check_square_finite(h)?;
    let deviation = hermitian_defect(h);
    if deviation > HERMITIAN_INPUT_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    let n = h.nrows();
    let mut a = hermitian_part(h);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n, n);

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * 1e-3 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let b_abs = b.norm();
                if b_abs <= threshold || b_abs == 0.0 {
                    continue;
                }
                jacobi_rotate(&mut a, &mut v, p, q, b, b_abs);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..n {
            let m = v[(i, src)].norm();
            if m > best {
                best = m;
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[(pivot, src)].conj() / best
        } else {
            ONE
        };
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)] * phase;
        }
        vectors[(pivot, dst)] = Complex64::new(vectors[(pivot, dst)].re, 0.0);
    }
    Ok(HermitianEigen {
        values,
        vectors: UnitaryMatrix::from_trusted(vectors),
    })
}

// Annihilates a[(p, q)] with G = diag-phase(1, e^{-i phi}) * real rotation,
// a <- G^dag a G, v <- v G.
fn jacobi_rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    b: Complex64,
    b_abs: f64,
) {
    let n = a.nrows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b_abs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = (b / b_abs).conj();

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase * s;
    let g_qq = phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Eigenvalues at or below this level are round-off of an exact zero.
fn noise_floor(values: &[f64]) -> f64 {
    let top = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    values.len() as f64 * f64::EPSILON * top
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-PSD_CLAMP, 0)` and those below the round-off floor
/// `N * eps * max|lambda|` are set to zero before the root is taken.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(p)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -PSD_CLAMP {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
    }
    let floor = noise_floor(&eig.values);
    Ok(eig.map_spectrum(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// `|A| = sqrt(A^dag A)` for Hermitian `A`, i.e. `A` with its eigenvalues
/// replaced by their moduli.
pub fn abs_operator(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(eig.map_spectrum(f64::abs))
}

/// Singular values of a general square matrix, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_square_finite(a)?;
    let gram = a.adjoint() * a;
    let eig = hermitian_eig(&hermitian_part(&gram))?;
    let floor = noise_floor(&eig.values);
    let mut sv: Vec<f64> = eig
        .values
        .iter()
        .map(|&x| if x > floor { x.sqrt() } else { 0.0 })
        .collect();
    sv.reverse();
    Ok(sv)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unitary from the Gram-Schmidt orthonormalization of a complex
/// Gaussian matrix (positive diagonal in the implied QR factor).
pub fn random_unitary_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let mut m = ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    for k in 0..n {
        // two passes of modified Gram-Schmidt keep the defect near eps
        for _ in 0..2 {
            for prev in 0..k {
                let mut proj = ZERO;
                for i in 0..n {
                    proj += m[(i, prev)].conj() * m[(i, k)];
                }
                for i in 0..n {
                    let sub = m[(i, prev)] * proj;
                    m[(i, k)] -= sub;
                }
            }
        }
        let norm = (0..n).map(|i| m[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            m[(i, k)] /= norm;
        }
    }
    UnitaryMatrix::from_trusted(m)
}

pub fn random_unitary(n: usize, seed: u64) -> UnitaryMatrix {
    random_unitary_from(n, &mut seeded_rng(seed))
}

/// Random state of exact rank `rank`: flat-simplex spectrum in a Haar basis.
pub fn random_density_from<R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::BadRank { rank, dim: n });
    }
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let u = random_unitary_from(n, rng);
    let u = u.matrix();

    let mut rho = ComplexMatrix::zeros(n, n);
    for (k, &lam) in weights.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] += u[(i, k)] * u[(j, k)].conj() * lam;
            }
        }
    }
    DensityMatrix::new(hermitian_part(&rho))
}

pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_from(n, rank, &mut seeded_rng(seed))
}

/// Random Hermitian matrix with Gaussian entries (GUE-like), for tests.
pub fn random_hermitian_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    hermitian_part(&g)
}
