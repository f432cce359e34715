//! Eigenfunction chains, weight numbers and spectral-data serialization.
//!
//! At an eigenvalue `lambda_n` of multiplicity `m_n`, the eigen- and
//! associated functions of the boundary value problem are the chain members
//! `s_{n+nu} = phi_nu(., lambda_n)` for `nu < m_n`; the companion chain
//! `psi_{n+nu} = eta_nu(., lambda_n)` is built from the terminal-value
//! solution. The two chains are linked by the lower-triangular relation
//!
//! ```text
//! psi_{n+nu} = sum_{j=0}^{nu} beta_{n+nu-j} s_{n+j},
//! ```
//!
//! whose coefficients `beta_n` are the weight numbers. Together the pairs
//! `{lambda_n, beta_n}` - flattened so that an `m`-fold eigenvalue occupies
//! `m` consecutive global indices - form the spectral data of the problem.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

use crate::chareq::{find_eigenvalues_certified, Eigenvalue, SearchBox};
use crate::error::{Error, Result};
use crate::forward::{solve_eta, solve_phi};
use crate::grid::{fmt_f64, ComplexSamples};
use crate::problem::Problem;

/// Chains shorter than this in norm cannot anchor the triangular solve.
const CHAIN_NORM_FLOOR: f64 = 1e-12;
/// A per-level relative residual above this means the relation does not hold:
/// either the spectral point is not a true eigenvalue or its multiplicity was
/// misdetected. Plain discretization error stays orders of magnitude lower.
const RELATION_RESIDUAL_LIMIT: f64 = 1e-3;

/// Run of consecutive global indices sharing one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralRun {
    /// First global index of the run (1-based).
    pub start: usize,
    pub multiplicity: usize,
}

/// The flattened paired sequence `{lambda_n, beta_n}` with its run structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    entries: Vec<(Complex64, Complex64)>,
    runs: Vec<SpectralRun>,
}

impl SpectralData {
    /// Validates the run structure: runs tile `1..=entries.len()` in order,
    /// `lambda` is constant within a run and changes across run boundaries.
    pub fn new(entries: Vec<(Complex64, Complex64)>, runs: Vec<SpectralRun>) -> Result<Self> {
        let mut expected_start = 1;
        for run in &runs {
            if run.multiplicity == 0 {
                return Err(Error::InvalidRecovery(format!(
                    "run at index {} has multiplicity 0",
                    run.start
                )));
            }
            if run.start != expected_start {
                return Err(Error::InvalidRecovery(format!(
                    "run starts at index {} where {} was expected",
                    run.start, expected_start
                )));
            }
            expected_start += run.multiplicity;
        }
        if expected_start != entries.len() + 1 {
            return Err(Error::InvalidRecovery(format!(
                "runs cover {} entries but {} are present",
                expected_start - 1,
                entries.len()
            )));
        }
        for run in &runs {
            let base = run.start - 1;
            let lambda = entries[base].0;
            for k in 1..run.multiplicity {
                if entries[base + k].0 != lambda {
                    return Err(Error::InvalidRecovery(format!(
                        "lambda changes inside the run starting at {}",
                        run.start
                    )));
                }
            }
        }
        for pair in runs.windows(2) {
            let left = entries[pair[0].start - 1].0;
            let right = entries[pair[1].start - 1].0;
            if left == right {
                return Err(Error::InvalidRecovery(format!(
                    "consecutive runs at {} and {} share the same lambda",
                    pair[0].start, pair[1].start
                )));
            }
        }
        Ok(SpectralData { entries, runs })
    }

    pub fn empty() -> Self {
        SpectralData {
            entries: Vec::new(),
            runs: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Flattened `(lambda_n, beta_n)` pairs, global index order (0-based
    /// access to 1-based indices).
    pub fn entries(&self) -> &[(Complex64, Complex64)] {
        &self.entries
    }

    pub fn runs(&self) -> &[SpectralRun] {
        &self.runs
    }

    /// Multiplicity of the run containing 0-based entry `i`.
    fn run_multiplicity_at(&self, i: usize) -> usize {
        let n = i + 1;
        self.runs
            .iter()
            .find(|r| n >= r.start && n < r.start + r.multiplicity)
            .map(|r| r.multiplicity)
            .expect("validated runs tile the entries")
    }

    /// Writes the data as CSV with columns
    /// `n,re_lambda,im_lambda,multiplicity_run,re_beta,im_beta`
    /// at 17 significant digits (value round-trips are bit-exact).
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from("n,re_lambda,im_lambda,multiplicity_run,re_beta,im_beta\n");
        for (i, (lambda, beta)) in self.entries.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                i + 1,
                fmt_f64(lambda.re),
                fmt_f64(lambda.im),
                self.run_multiplicity_at(i),
                fmt_f64(beta.re),
                fmt_f64(beta.im),
            );
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Reads a file written by [`SpectralData::save_csv`], rejecting malformed
    /// rows with their line numbers.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path.as_ref())
            .map_err(|e| Error::Malformed {
                line: 0,
                message: e.to_string(),
            })?;
        let mut entries = Vec::new();
        let mut runs: Vec<SpectralRun> = Vec::new();
        let mut remaining_in_run = 0usize;
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let malformed = |message: String| Error::Malformed { line, message };
            let record = record.map_err(|e| malformed(e.to_string()))?;
            if record.len() != 6 {
                return Err(malformed(format!("expected 6 fields, got {}", record.len())));
            }
            let int = |s: &str, name: &str| -> Result<usize> {
                s.parse::<usize>()
                    .map_err(|_| malformed(format!("cannot parse {name} value {s:?}")))
            };
            let real = |s: &str, name: &str| -> Result<f64> {
                let v: f64 = s
                    .parse()
                    .map_err(|_| malformed(format!("cannot parse {name} value {s:?}")))?;
                if !v.is_finite() {
                    return Err(malformed(format!("non-finite {name} value {s:?}")));
                }
                Ok(v)
            };
            let n = int(&record[0], "n")?;
            if n != entries.len() + 1 {
                return Err(malformed(format!(
                    "index {n} out of order; expected {}",
                    entries.len() + 1
                )));
            }
            let lambda = Complex64::new(real(&record[1], "re_lambda")?, real(&record[2], "im_lambda")?);
            let mult = int(&record[3], "multiplicity_run")?;
            let beta = Complex64::new(real(&record[4], "re_beta")?, real(&record[5], "im_beta")?);
            if remaining_in_run == 0 {
                if mult == 0 {
                    return Err(malformed("multiplicity_run must be positive".into()));
                }
                runs.push(SpectralRun {
                    start: n,
                    multiplicity: mult,
                });
                remaining_in_run = mult;
            } else if mult != runs.last().expect("run open").multiplicity {
                return Err(malformed(format!(
                    "multiplicity_run {mult} disagrees with the open run"
                )));
            }
            remaining_in_run -= 1;
            entries.push((lambda, beta));
        }
        if remaining_in_run != 0 {
            return Err(Error::Malformed {
                line: entries.len() + 1,
                message: "file ends inside a multiplicity run".into(),
            });
        }
        SpectralData::new(entries, runs)
    }
}

/// Solution chain attached to one spectral point.
#[derive(Debug, Clone)]
pub struct FunctionChain {
    pub at_lambda: Complex64,
    /// `members[nu]` is the chain member of order `nu`; the length equals the
    /// multiplicity of the eigenvalue.
    pub members: Vec<ComplexSamples>,
}

/// Global index bookkeeping produced by [`flatten_index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    /// Global 1-based index `n + nu`.
    pub n: usize,
    pub eigenvalue: Eigenvalue,
    /// Position inside the run: `0..multiplicity`.
    pub nu: usize,
}

/// Flattens a sorted eigenvalue list into global 1-based indices.
///
/// Returns the set `S` of run-start indices and one assignment per global
/// index. An `m`-fold eigenvalue occupies `m` consecutive indices.
pub fn flatten_index(eigs: &[Eigenvalue]) -> (Vec<usize>, Vec<Assignment>) {
    let mut s = Vec::with_capacity(eigs.len());
    let mut assignments = Vec::new();
    let mut next = 1usize;
    for e in eigs {
        s.push(next);
        for nu in 0..e.multiplicity {
            assignments.push(Assignment {
                n: next + nu,
                eigenvalue: *e,
                nu,
            });
        }
        next += e.multiplicity;
    }
    (s, assignments)
}

/// Builds the eigen/associated chain `s` and the companion chain `psi` at one
/// eigenvalue, each with as many members as the multiplicity.
pub fn chains(p: &Problem, e: &Eigenvalue) -> Result<(FunctionChain, FunctionChain)> {
    let order = e.multiplicity - 1;
    let phi = solve_phi(p, e.lambda, order)?;
    let eta = solve_eta(p, e.lambda, order)?;
    let s = FunctionChain {
        at_lambda: e.lambda,
        members: (0..=order).map(|nu| phi.phi(nu).clone()).collect(),
    };
    let psi = FunctionChain {
        at_lambda: e.lambda,
        members: (0..=order).map(|nu| eta.eta(nu).clone()).collect(),
    };
    Ok((s, psi))
}

/// Weight numbers together with the per-level relation residuals.
#[derive(Debug, Clone)]
pub struct WeightReport {
    pub betas: Vec<Complex64>,
    /// `||psi_nu - sum_j beta_{nu-j} s_j|| / ||psi_nu||` for each level.
    pub level_residuals: Vec<f64>,
}

/// Extracts the weight numbers from one chain pair by solving the triangular
/// relation level by level, each level in least squares against the leading
/// chain member over the whole grid.
pub fn weights_with_residuals(s: &FunctionChain, psi: &FunctionChain) -> Result<WeightReport> {
    if s.members.len() != psi.members.len() {
        return Err(Error::ChainLengthMismatch {
            left: s.members.len(),
            right: psi.members.len(),
        });
    }
    if s.at_lambda != psi.at_lambda {
        return Err(Error::ChainLambdaMismatch {
            left: s.at_lambda,
            right: psi.at_lambda,
        });
    }
    let m = s.members.len();
    let s0 = &s.members[0];
    let gram = s0.inner(s0)?.re;
    if gram.sqrt() < CHAIN_NORM_FLOOR {
        return Err(Error::DegenerateChain {
            floor: CHAIN_NORM_FLOOR,
        });
    }
    let mut betas: Vec<Complex64> = Vec::with_capacity(m);
    let mut level_residuals = Vec::with_capacity(m);
    for nu in 0..m {
        // subtract the terms with already-known coefficients:
        // psi_nu = beta_nu s_0 + sum_{j=1..nu} beta_{nu-j} s_j
        let mut reduced = psi.members[nu].clone();
        for j in 1..=nu {
            let coeff = betas[nu - j];
            reduced = reduced.zip_with(&s.members[j], |r, sj| r - coeff * sj)?;
        }
        let beta = s0.inner(&reduced)? / gram;
        let defect = reduced.zip_with(s0, |r, s0v| r - beta * s0v)?;
        let psi_norm = psi.members[nu].norm();
        let residual = if psi_norm == 0.0 {
            if defect.norm() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            defect.norm() / psi_norm
        };
        if residual > RELATION_RESIDUAL_LIMIT {
            return Err(Error::RelationViolated {
                level: nu,
                residual,
            });
        }
        betas.push(beta);
        level_residuals.push(residual);
    }
    Ok(WeightReport {
        betas,
        level_residuals,
    })
}

/// Weight numbers of one chain pair (see [`weights_with_residuals`]).
pub fn weights(s: &FunctionChain, psi: &FunctionChain) -> Result<Vec<Complex64>> {
    Ok(weights_with_residuals(s, psi)?.betas)
}

/// Full spectral data of a problem: certified eigenvalue search, chain
/// construction (parallel across eigenvalues) and weight extraction.
pub fn spectral_data(p: &Problem, region: &SearchBox, tol: f64) -> Result<SpectralData> {
    let cert = find_eigenvalues_certified(p, region, tol)?;
    spectral_data_for_eigenvalues(p, &cert.eigenvalues)
}

/// Spectral data for an already-located eigenvalue list.
pub fn spectral_data_for_eigenvalues(p: &Problem, eigs: &[Eigenvalue]) -> Result<SpectralData> {
    let chain_pairs: Vec<(FunctionChain, FunctionChain)> = eigs
        .par_iter()
        .map(|e| chains(p, e))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    let mut runs = Vec::new();
    let mut next = 1usize;
    for (e, (s, psi)) in eigs.iter().zip(&chain_pairs) {
        let betas = weights(s, psi)?;
        for beta in betas {
            entries.push((e.lambda, beta));
        }
        runs.push(SpectralRun {
            start: next,
            multiplicity: e.multiplicity,
        });
        next += e.multiplicity;
    }
    SpectralData::new(entries, runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chareq::delta;
    use crate::forward::eta_initial_state;
    use crate::grid::Grid;
    use crate::presets;
    use crate::zmath::I;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eig(re: f64, im: f64, m: usize) -> Eigenvalue {
        Eigenvalue {
            lambda: c(re, im),
            multiplicity: m,
            newton_residual: 0.0,
        }
    }

    /// Fast single-eigenvalue fixture: the smooth-1 root near 3.31 - 0.42i.
    fn smooth1_first_root(n: usize) -> (Problem, Eigenvalue) {
        let p = presets::smooth1(n).unwrap();
        let b = SearchBox::new(3.0, 3.6, -0.7, -0.2).unwrap();
        let eigs = crate::chareq::find_eigenvalues(&p, &b, 1e-10).unwrap();
        assert_eq!(eigs.len(), 1);
        (p, eigs[0])
    }

    #[test]
    fn flatten_matches_the_run_convention() {
        let eigs: Vec<Eigenvalue> = [(0.0, 2), (1.0, 1), (2.0, 3), (3.0, 1), (4.0, 1)]
            .iter()
            .map(|&(re, m)| eig(re, 0.0, m))
            .collect();
        let (s, assignments) = flatten_index(&eigs);
        assert_eq!(s, vec![1, 3, 4, 7, 8]);
        assert_eq!(assignments.len(), 8);
        assert_eq!(assignments[0].n, 1);
        assert_eq!(assignments[0].nu, 0);
        assert_eq!(assignments[1].n, 2);
        assert_eq!(assignments[1].nu, 1);
        assert_eq!(assignments[3].nu, 0);
        assert_eq!(assignments[7].n, 8);
    }

    #[test]
    fn flatten_of_simple_spectrum_is_the_identity() {
        let eigs: Vec<Eigenvalue> = (0..4).map(|k| eig(k as f64, 0.0, 1)).collect();
        let (s, assignments) = flatten_index(&eigs);
        assert_eq!(s, vec![1, 2, 3, 4]);
        assert!(assignments.iter().all(|a| a.nu == 0));
    }

    #[test]
    fn flatten_of_one_triple_eigenvalue() {
        let (s, assignments) = flatten_index(&[eig(1.0, -1.0, 3)]);
        assert_eq!(s, vec![1]);
        let nus: Vec<usize> = assignments.iter().map(|a| a.nu).collect();
        assert_eq!(nus, vec![0, 1, 2]);
    }

    #[test]
    fn chains_at_a_true_eigenvalue_satisfy_both_boundary_conditions() {
        let (p, e) = smooth1_first_root(2000);
        let (s, psi) = chains(&p, &e).unwrap();
        assert_eq!(s.members.len(), 1);
        assert_eq!(psi.members.len(), 1);
        let n = p.grid().subintervals();
        // eigenfunction boundary condition at pi
        assert!(s.members[0].value(n).norm() < 1e-8);
        // terminal condition is exact by construction
        assert_eq!(psi.members[0].value(n), Complex64::ZERO);
        // normalization at zero
        assert_eq!(s.members[0].value(0), Complex64::ONE);
    }

    #[test]
    fn simple_weight_matches_the_pointwise_ratio_and_the_initial_value() {
        let (p, e) = smooth1_first_root(2000);
        let (s, psi) = chains(&p, &e).unwrap();
        let report = weights_with_residuals(&s, &psi).unwrap();
        assert_eq!(report.betas.len(), 1);
        let beta = report.betas[0];
        assert!(report.level_residuals[0] < 1e-6);

        // pointwise ratio at the node where |s| is largest
        let s0 = &s.members[0];
        let k_star = (0..p.grid().len())
            .max_by(|&a, &b| s0.value(a).norm().total_cmp(&s0.value(b).norm()))
            .unwrap();
        let ratio = psi.members[0].value(k_star) / s0.value(k_star);
        assert!(
            (ratio - beta).norm() < 1e-6 * beta.norm(),
            "ratio {ratio}, beta {beta}"
        );

        // the chain relation pins beta to the companion solution at x = 0
        let eta0 = eta_initial_state(&p, e.lambda, 0).unwrap()[0];
        assert!(
            (eta0 - beta).norm() < 1e-8 * (1.0 + beta.norm()),
            "eta(0) {eta0}, beta {beta}"
        );
    }

    #[test]
    fn zero_companion_chain_gives_zero_weights() {
        let grid = Grid::new(64).unwrap();
        let member = ComplexSamples::from_fn(grid, |x| (I * x).exp()).unwrap();
        let zero = ComplexSamples::constant(grid, Complex64::ZERO);
        let s = FunctionChain {
            at_lambda: c(1.0, 0.0),
            members: vec![member],
        };
        let psi = FunctionChain {
            at_lambda: c(1.0, 0.0),
            members: vec![zero],
        };
        let report = weights_with_residuals(&s, &psi).unwrap();
        assert_eq!(report.betas, vec![Complex64::ZERO]);
        assert_eq!(report.level_residuals, vec![0.0]);
    }

    #[test]
    fn prescribed_weights_are_recovered_from_a_constructed_chain() {
        let grid = Grid::new(200).unwrap();
        let s0 = ComplexSamples::from_fn(grid, |x| (I * x).exp()).unwrap();
        let s1 = ComplexSamples::from_fn(grid, |x| x * (I * x).exp()).unwrap();
        let b0 = c(2.0, 0.0);
        let b1 = c(0.0, 3.0);
        let psi0 = s0.map(|v| b0 * v);
        let psi1 = s0.zip_with(&s1, |a, b| b1 * a + b0 * b).unwrap();
        let s = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![s0, s1],
        };
        let psi = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![psi0, psi1],
        };
        let betas = weights(&s, &psi).unwrap();
        assert!((betas[0] - b0).norm() < 1e-10);
        assert!((betas[1] - b1).norm() < 1e-10);
    }

    #[test]
    fn mismatched_chains_are_rejected() {
        let grid = Grid::new(16).unwrap();
        let member = ComplexSamples::constant(grid, Complex64::ONE);
        let s = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![member.clone(), member.clone()],
        };
        let psi_short = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![member.clone()],
        };
        assert!(matches!(
            weights(&s, &psi_short),
            Err(Error::ChainLengthMismatch { left: 2, right: 1 })
        ));
        let psi_other = FunctionChain {
            at_lambda: Complex64::ONE,
            members: vec![member.clone(), member],
        };
        assert!(matches!(
            weights(&s, &psi_other),
            Err(Error::ChainLambdaMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_leading_member_is_rejected() {
        let grid = Grid::new(16).unwrap();
        let zero = ComplexSamples::constant(grid, Complex64::ZERO);
        let s = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![zero.clone()],
        };
        let psi = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![zero],
        };
        assert!(matches!(
            weights(&s, &psi),
            Err(Error::DegenerateChain { .. })
        ));
    }

    #[test]
    fn relation_violation_is_a_hard_error() {
        // psi unrelated to s: the level-0 residual is O(1)
        let grid = Grid::new(128).unwrap();
        let s0 = ComplexSamples::from_fn(grid, |x| (I * x).exp()).unwrap();
        let psi0 = ComplexSamples::from_fn(grid, |x| c((3.0 * x).cos(), x)).unwrap();
        let s = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![s0],
        };
        let psi = FunctionChain {
            at_lambda: Complex64::ZERO,
            members: vec![psi0],
        };
        match weights(&s, &psi) {
            Err(Error::RelationViolated { level: 0, residual }) => assert!(residual > 1e-3),
            other => panic!("expected relation violation, got {other:?}"),
        }
    }

    #[test]
    fn trivial_kernel_yields_empty_spectral_data() {
        let p = presets::zero_kernel(600).unwrap();
        let sd = spectral_data(&p, &SearchBox::default(), 1e-10).unwrap();
        assert!(sd.is_empty());
        assert!(sd.runs().is_empty());
    }

    #[test]
    fn rescaling_the_kernel_factors_moves_only_the_weights() {
        // (R, V) -> (2R, V/2) leaves the kernel R(x)V(t), hence Delta and all
        // eigenvalues, unchanged; the companion equation's forcing scales by 2,
        // so every weight doubles.
        let n = 2000;
        let grid = Grid::new(n).unwrap();
        let p = presets::smooth1(n).unwrap();
        let doubled = Problem::new(
            p.r().map(|v| 2.0 * v),
            ComplexSamples::from_fn(grid, |x| c(0.5 - 0.1 * (2.0 * x).cos(), 0.0)).unwrap(),
        )
        .unwrap();
        let b = SearchBox::new(3.0, 3.6, -0.7, -0.2).unwrap();
        let sd1 = spectral_data(&p, &b, 1e-10).unwrap();
        let sd2 = spectral_data(&doubled, &b, 1e-10).unwrap();
        assert_eq!(sd1.len(), 1);
        assert_eq!(sd2.len(), 1);
        let (l1, b1) = sd1.entries()[0];
        let (l2, b2) = sd2.entries()[0];
        assert!((l1 - l2).norm() < 1e-8, "lambda moved: {l1} vs {l2}");
        assert!(
            (b2 - 2.0 * b1).norm() < 1e-6 * b1.norm(),
            "beta not doubled: {b1} vs {b2}"
        );
    }

    #[test]
    fn weights_agree_with_the_characteristic_derivative_scale() {
        // at a simple root, beta = eta(0) and Delta' stays well away from zero
        let (p, e) = smooth1_first_root(2000);
        let dprime = delta(&p, e.lambda, 1).unwrap()[1];
        assert!(dprime.norm() > 1e-3);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let entries = vec![
            (c(0.5, -0.25), c(1.0 / 3.0, 2.0)),
            (c(0.5, -0.25), c(-7.125e-3, 0.1)),
            (c(2.0, 1.0), c(0.0, -1.0)),
        ];
        let runs = vec![
            SpectralRun {
                start: 1,
                multiplicity: 2,
            },
            SpectralRun {
                start: 3,
                multiplicity: 1,
            },
        ];
        let sd = SpectralData::new(entries, runs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sd.csv");
        sd.save_csv(&path).unwrap();
        let loaded = SpectralData::load_csv(&path).unwrap();
        assert_eq!(sd, loaded);
    }

    #[test]
    fn empty_data_saves_as_a_header_only_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        SpectralData::empty().save_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "n,re_lambda,im_lambda,multiplicity_run,re_beta,im_beta\n");
        assert!(SpectralData::load_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn hand_written_rows_parse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hand.csv");
        std::fs::write(
            &path,
            "n,re_lambda,im_lambda,multiplicity_run,re_beta,im_beta\n\
             1,1.5,-0.5,1,2.0,0.0\n\
             2,3.0,0.25,1,0.0,1.0\n",
        )
        .unwrap();
        let sd = SpectralData::load_csv(&path).unwrap();
        assert_eq!(sd.len(), 2);
        assert_eq!(sd.entries()[0].0, c(1.5, -0.5));
        assert_eq!(sd.entries()[1].1, c(0.0, 1.0));
    }

    #[test]
    fn malformed_rows_are_rejected_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let header = "n,re_lambda,im_lambda,multiplicity_run,re_beta,im_beta\n";
        let cases = [
            ("1,1.0,0.0,1,abc,0.0\n", 2),
            ("1,1.0,0.0,0,1.0,0.0\n", 2),
            ("1,1.0,0.0,1,1.0,0.0\n5,2.0,0.0,1,1.0,0.0\n", 3),
        ];
        for (i, (body, want_line)) in cases.iter().enumerate() {
            let path = dir.path().join(format!("bad{i}.csv"));
            std::fs::write(&path, format!("{header}{body}")).unwrap();
            match SpectralData::load_csv(&path) {
                Err(Error::Malformed { line, .. }) => assert_eq!(line, *want_line, "case {i}"),
                other => panic!("case {i}: expected malformed, got {other:?}"),
            }
        }
    }

    #[test]
    fn truncated_run_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.csv");
        std::fs::write(
            &path,
            "n,re_lambda,im_lambda,multiplicity_run,re_beta,im_beta\n\
             1,1.0,0.0,2,1.0,0.0\n",
        )
        .unwrap();
        assert!(matches!(
            SpectralData::load_csv(&path),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn run_structure_is_validated() {
        let entries = vec![(c(1.0, 0.0), Complex64::ZERO), (c(2.0, 0.0), Complex64::ZERO)];
        // run claims multiplicity 2 but lambda changes inside
        let runs = vec![SpectralRun {
            start: 1,
            multiplicity: 2,
        }];
        assert!(SpectralData::new(entries, runs).is_err());
    }
}
