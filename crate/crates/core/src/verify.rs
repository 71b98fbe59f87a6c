//! Seeded verification suites comparing tomographic quantities with their
//! density-matrix oracles.

use num_complex::Complex64;

use crate::distance::{
    fidelity_star_check, functional_at, oracle, searched, tomographic, Measure,
    STAR_CHECK_MAX_DIM,
};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, random_density_from, seeded_rng, DensityMatrix};
use crate::photon::{build_state, inequality_scan, CatParity, FockSpace, PhotonState, ScanGrid, StateSpec};
use crate::report::{CaseResult, RunReport};
use crate::search::SearchConfig;
use crate::spin::{spin_tomogram, wigner_d_matrix, SpinJ, SpinQuadrature};

/// Largest dimension the proposition suite accepts.
pub const PROPOSITIONS_MAX_DIM: usize = 12;
/// Largest spin the reconstruction suite accepts.
pub const RECONSTRUCTION_MAX_TWO_J: u32 = 8;

/// Rank of the second state in trial `t`: full, pure, then one short of full.
fn second_rank(n: usize, t: usize) -> usize {
    [n, 1, (n - 1).max(1)][t % 3]
}

/// Random state pairs drawn in trial order from one seeded stream.
pub fn random_pairs(n: usize, trials: usize, seed: u64) -> Result<Vec<(DensityMatrix, DensityMatrix)>> {
    let mut rng = seeded_rng(seed);
    (0..trials)
        .map(|t| {
            let r1 = random_density_from(n, n, &mut rng)?;
            let r2 = random_density_from(n, second_rank(n, t), &mut rng)?;
            Ok((r1, r2))
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct PropositionsConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Gap tolerance for the Hilbert-Schmidt, trace and operator-norm cases.
    pub tol: f64,
    pub fidelity_tol: f64,
    /// Black-box restarts per trial; zero skips the search cross-check.
    pub search_restarts: usize,
    /// How far a searched maximum may exceed the closed form.
    pub search_tol: f64,
}

impl Default for PropositionsConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            trials: 20,
            seed: 0,
            tol: 1e-10,
            fidelity_tol: 1e-8,
            search_restarts: 0,
            search_tol: 1e-7,
        }
    }
}

/// Closed-form tomographic extrema against oracles for all four measures.
///
/// Labels: `hs`, `trace`, `opnorm`, `fidelity`, plus `<measure>-search` when
/// the search cross-check is enabled.
pub fn propositions(cfg: &PropositionsConfig) -> Result<RunReport> {
    if !(2..=PROPOSITIONS_MAX_DIM).contains(&cfg.dim) {
        return Err(Error::DimensionTooLarge {
            dim: cfg.dim,
            max: PROPOSITIONS_MAX_DIM,
        });
    }
    let mut report = RunReport::new(Some(cfg.seed));
    report.tolerance("tol", cfg.tol);
    report.tolerance("fidelity_tol", cfg.fidelity_tol);
    if cfg.search_restarts > 0 {
        report.tolerance("search_tol", cfg.search_tol);
    }
    for (t, (r1, r2)) in random_pairs(cfg.dim, cfg.trials, cfg.seed)?.iter().enumerate() {
        for measure in [Measure::Hs, Measure::Trace, Measure::Opnorm, Measure::Fidelity] {
            let o = oracle(measure, r1, r2)?.value;
            let tomo = tomographic(measure, r1, r2)?;
            let tol = if measure == Measure::Fidelity {
                cfg.fidelity_tol
            } else {
                cfg.tol
            };
            report.push(
                CaseResult::gap_check(t, measure.name(), o, tomo.value, tol)
                    .with_method(tomo.method)
                    .with_diagnostic("rank2", second_rank(cfg.dim, t) as f64),
            );
            if cfg.search_restarts > 0 && measure != Measure::Fidelity {
                let search = SearchConfig {
                    restarts: cfg.search_restarts,
                    seed: cfg.seed.wrapping_mul(1_000_003).wrapping_add(t as u64),
                    ..Default::default()
                };
                let s = searched(measure, r1, r2, &search)?;
                let excess = s.value - tomo.value;
                let mut case = CaseResult::gap_check(
                    t,
                    &format!("{}-search", measure.name()),
                    tomo.value,
                    s.value,
                    f64::INFINITY,
                )
                .with_method(s.method)
                .with_diagnostic("excess", excess);
                case.tol = cfg.search_tol;
                case.passed = excess <= cfg.search_tol;
                report.push(case);
            }
        }
        // both max-type functionals peak at the same rotation
        let u = tomographic(Measure::Hs, r1, r2)?
            .optimizer_u
            .expect("closed forms carry their rotation");
        for measure in [Measure::Trace, Measure::Opnorm] {
            let at_u = functional_at(measure, r1, r2, &u)?;
            report.push(CaseResult::gap_check(
                t,
                &format!("{}-shared-u", measure.name()),
                oracle(measure, r1, r2)?.value,
                at_u,
                cfg.tol,
            ));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct ReconstructionConfig {
    pub j: SpinJ,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Tolerance for rebuilding the maximally mixed state.
    pub mixed_tol: f64,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            j: SpinJ::from_two_j(1),
            trials: 20,
            seed: 0,
            tol: 1e-9,
            mixed_tol: 1e-10,
        }
    }
}

/// Rebuilds random states from their spin tomograms. Each case records the
/// largest entry of `|rho - rho_rebuilt|` as its gap; trial 0 is `I/N`.
pub fn reconstruction(cfg: &ReconstructionConfig) -> Result<RunReport> {
    if cfg.j.two_j() > RECONSTRUCTION_MAX_TWO_J {
        return Err(Error::QuadratureOverflow {
            two_j: cfg.j.two_j(),
            cap: RECONSTRUCTION_MAX_TWO_J,
        });
    }
    let n = cfg.j.dim();
    let quad = SpinQuadrature::new(cfg.j)?;
    let mut report = RunReport::new(Some(cfg.seed));
    report.tolerance("tol", cfg.tol);
    report.tolerance("mixed_tol", cfg.mixed_tol);
    let mut rng = seeded_rng(cfg.seed);
    let mut check = |t: usize, label: &str, rho: &DensityMatrix, tol: f64| -> Result<()> {
        let rebuilt = quad.reconstruct_operator(|k, e| {
            let w = spin_tomogram(rho, &wigner_d_matrix(cfg.j, e)).expect("dimensions match");
            Complex64::new(w.w[k], 0.0)
        })?;
        let residual = max_abs(&(rebuilt - rho.matrix()));
        report.push(CaseResult::gap_check(t, label, 0.0, residual, tol));
        Ok(())
    };
    check(0, "maximally-mixed", &DensityMatrix::maximally_mixed(n), cfg.mixed_tol)?;
    for t in 1..=cfg.trials {
        let rank = 1 + (t - 1) % n;
        let rho = random_density_from(n, rank, &mut rng)?;
        check(t, "residual", &rho, cfg.tol)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct StarFidelityConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub fidelity_tol: f64,
    /// Tolerance on the searched star-product maximum.
    pub tol: f64,
    pub search: SearchConfig,
}

impl Default for StarFidelityConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            trials: 10,
            seed: 0,
            fidelity_tol: 1e-8,
            tol: 1e-5,
            search: SearchConfig::default(),
        }
    }
}

/// Both sides of the star-product fidelity identity against
/// `Tr |sqrt(rho1) sqrt(rho2)|`. Labels: `bhattacharyya-min`, `star-max`.
pub fn star_fidelity(cfg: &StarFidelityConfig) -> Result<RunReport> {
    if !(2..=STAR_CHECK_MAX_DIM).contains(&cfg.dim) {
        return Err(Error::DimensionTooLarge {
            dim: cfg.dim,
            max: STAR_CHECK_MAX_DIM,
        });
    }
    let mut report = RunReport::new(Some(cfg.seed));
    report.tolerance("fidelity_tol", cfg.fidelity_tol);
    report.tolerance("tol", cfg.tol);
    for (t, (r1, r2)) in random_pairs(cfg.dim, cfg.trials, cfg.seed)?.iter().enumerate() {
        let search = SearchConfig {
            seed: cfg.search.seed.wrapping_add(1000 * t as u64),
            ..cfg.search
        };
        let rep = fidelity_star_check(r1, r2, &search)?;
        report.push(CaseResult::gap_check(t, "bhattacharyya-min", rep.oracle, rep.lhs, cfg.fidelity_tol));
        report.push(
            CaseResult::gap_check(t, "star-max", rep.oracle, rep.rhs, cfg.tol)
                .with_diagnostic("evaluations", rep.search_evaluations as f64),
        );
    }
    Ok(report)
}

/// A named pair of photon states.
#[derive(Debug, Clone)]
pub struct PhotonPair {
    pub name: String,
    pub first: PhotonState,
    pub second: PhotonState,
}

/// The four reference pairs: vacuum and one photon, a coherent state against
/// two photons, a coherent state against an even cat, and a thermal state
/// against a coherent state.
pub fn standard_photon_pairs(space: &FockSpace) -> Result<Vec<PhotonPair>> {
    let b = |spec: StateSpec| build_state(&spec, space);
    let coh1 = StateSpec::Coherent { re: 1.0, im: 0.0 };
    Ok(vec![
        PhotonPair {
            name: "fock0-fock1".into(),
            first: b(StateSpec::Fock { n: 0 })?,
            second: b(StateSpec::Fock { n: 1 })?,
        },
        PhotonPair {
            name: "coherent1-fock2".into(),
            first: b(coh1)?,
            second: b(StateSpec::Fock { n: 2 })?,
        },
        PhotonPair {
            name: "coherent1-evencat1.5".into(),
            first: b(coh1)?,
            second: b(StateSpec::Cat { re: 1.5, im: 0.0, parity: CatParity::Even })?,
        },
        PhotonPair {
            name: "thermal0.5-coherent1".into(),
            first: b(StateSpec::Thermal { nbar: 0.5 })?,
            second: b(coh1)?,
        },
    ])
}

/// Displacement-extremized photon bounds against the oracles. Each case is
/// labelled `<pair>/<measure>`, with the bound as the tomographic value and
/// the signed slack as a diagnostic.
pub fn photon_inequalities(pairs: &[PhotonPair], space: &FockSpace, grid: &ScanGrid) -> Result<RunReport> {
    let mut report = RunReport::new(None);
    for (t, pair) in pairs.iter().enumerate() {
        let scan = inequality_scan(&pair.first, &pair.second, space, grid)?;
        report.tolerance("tol", scan.tol);
        for b in &scan.bounds {
            let mut case = CaseResult::gap_check(
                t,
                &format!("{}/{}", pair.name, b.measure.name()),
                b.oracle,
                b.bound,
                f64::INFINITY,
            )
            .with_diagnostic("slack", b.slack)
            .with_diagnostic("r_eff", scan.r_eff)
            .with_diagnostic("max_leakage", scan.max_leakage);
            case.tol = scan.tol;
            case.passed = b.holds;
            report.push(case);
        }
    }
    Ok(report)
}
