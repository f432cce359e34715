//! Inverse spectral problem: recovering the coefficient factors from
//! truncated spectral data.
//!
//! The data map sends a coefficient pair `(R, V)` to its paired spectrum
//! `{lambda_n, beta_n}`. This module parameterizes candidate pairs by
//! truncated cosine series, assembles a weighted residual against target
//! data, and minimizes it with damped least squares. Two probes document
//! the geometry of the data map itself:
//!
//! * [`uniqueness_probe`] compares the spectral data of two problems
//!   entrywise and reports the first index where they differ - when `R`
//!   vanishes nowhere, distinct coefficients separate.
//! * [`example2_check`] certifies the opposite regime: when `R` vanishes
//!   identically beyond a cut point `a`, the data is provably blind to `V`
//!   past the cut, so two different problems share every eigenvalue and
//!   every weight number. Recovery there is ill-posed no matter the solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::chareq::{delta, refine_root, Eigenvalue, SearchBox};
use crate::error::{Error, Result};
use crate::grid::{ComplexSamples, Grid};
use crate::problem::Problem;
use crate::specdata::{spectral_data, spectral_data_for_eigenvalues, SpectralData};

/// A synthesized `R` must stay away from zero at the right endpoint; the
/// boundary-value problem degenerates when `R(pi)` vanishes.
const MIN_R_AT_PI: f64 = 1e-6;
/// Tracked candidate roots closer than this multiple of the eigenvalue
/// tolerance are treated as a collision (two seeds drained into one root).
const COLLISION_FACTOR: f64 = 10.0;
/// Costs below this are indistinguishable from residual-assembly noise.
const COST_FLOOR: f64 = 1e-18;
/// Damping beyond this means no descent direction exists at working precision.
const DAMPING_LIMIT: f64 = 1e12;
/// Entrywise spectral-data agreement threshold for [`uniqueness_probe`].
const PROBE_THRESHOLD: f64 = 1e-6;
/// Zones declared dead or matching must be flat to this level.
const ZONE_ZERO_TOL: f64 = 1e-12;
/// Zones declared live must rise above this level.
const ZONE_LIVE_TOL: f64 = 1e-6;

/// Truncated cosine-series description of a coefficient pair.
///
/// Both factors use the basis `{cos(k x)}` for `k = 0..K-1` with complex
/// coefficients, so a candidate has `4K` real degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisParams {
    r_coef: Vec<Complex64>,
    v_coef: Vec<Complex64>,
}

impl BasisParams {
    pub fn new(r_coef: Vec<Complex64>, v_coef: Vec<Complex64>) -> Result<Self> {
        if r_coef.is_empty() || r_coef.len() != v_coef.len() {
            return Err(Error::InvalidRecovery(format!(
                "coefficient blocks must have equal positive length, got {} and {}",
                r_coef.len(),
                v_coef.len()
            )));
        }
        Ok(BasisParams { r_coef, v_coef })
    }

    /// Real coefficients promoted to complex ones.
    pub fn from_real(r_coef: &[f64], v_coef: &[f64]) -> Result<Self> {
        BasisParams::new(
            r_coef.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            v_coef.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    /// Basis size `K` per coefficient function.
    pub fn basis_size(&self) -> usize {
        self.r_coef.len()
    }

    pub fn r_coef(&self) -> &[Complex64] {
        &self.r_coef
    }

    pub fn v_coef(&self) -> &[Complex64] {
        &self.v_coef
    }

    /// Flattens to `4K` reals: `re, im` per coefficient, `R` block then `V`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.basis_size());
        for c in self.r_coef.iter().chain(&self.v_coef) {
            out.push(c.re);
            out.push(c.im);
        }
        out
    }

    /// Inverse of [`BasisParams::to_vec`]; the length must be a positive
    /// multiple of 4.
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.is_empty() || x.len() % 4 != 0 {
            return Err(Error::InvalidRecovery(format!(
                "flat parameter vector must have length 4K, got {}",
                x.len()
            )));
        }
        let k = x.len() / 4;
        let complexify = |chunk: &[f64]| -> Vec<Complex64> {
            chunk
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect()
        };
        BasisParams::new(complexify(&x[..2 * k]), complexify(&x[2 * k..]))
    }

    /// Largest coefficient difference against another parameter set.
    pub fn max_coef_distance(&self, other: &BasisParams) -> f64 {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn eval_cosine(coef: &[Complex64], x: f64) -> Complex64 {
    coef.iter()
        .enumerate()
        .fold(Complex64::ZERO, |acc, (k, c)| acc + c * (k as f64 * x).cos())
}

/// Samples the cosine series of both factors on `grid`, enforcing the
/// endpoint invariant `|R(pi)| > 1e-6`.
pub fn synth(bp: &BasisParams, grid: Grid) -> Result<(ComplexSamples, ComplexSamples)> {
    let r_pi = eval_cosine(&bp.r_coef, PI);
    if r_pi.norm() <= MIN_R_AT_PI {
        return Err(Error::InvalidRecovery(format!(
            "synthesized R vanishes at pi (|R(pi)| = {:.3e} <= {MIN_R_AT_PI:.0e})",
            r_pi.norm()
        )));
    }
    let r = ComplexSamples::from_fn(grid, |x| eval_cosine(&bp.r_coef, x))?;
    let v = ComplexSamples::from_fn(grid, |x| eval_cosine(&bp.v_coef, x))?;
    Ok((r, v))
}

/// [`synth`] packaged as a [`Problem`].
pub fn synth_problem(bp: &BasisParams, grid: Grid) -> Result<Problem> {
    let (r, v) = synth(bp, grid)?;
    Problem::new(r, v)
}

/// Least-squares projection of sampled values onto the first `k` cosine
/// basis functions; inverts [`synth`] on its range.
pub fn project_cosine(f: &ComplexSamples, k: usize) -> Result<Vec<Complex64>> {
    let nodes = f.grid().nodes();
    if k == 0 || k > nodes.len() {
        return Err(Error::InvalidRecovery(format!(
            "cannot project {} samples onto {k} cosine modes",
            nodes.len()
        )));
    }
    let a = DMatrix::from_fn(nodes.len(), k, |i, j| (j as f64 * nodes[i]).cos());
    let gram = a.transpose() * &a;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidRecovery("cosine Gram matrix is singular".into()))?;
    let part = |pick: fn(&Complex64) -> f64| {
        let b = DVector::from_iterator(nodes.len(), f.values().iter().map(pick));
        chol.solve(&(a.transpose() * b))
    };
    let re = part(|z| z.re);
    let im = part(|z| z.im);
    Ok((0..k).map(|j| Complex64::new(re[j], im[j])).collect())
}

/// How the candidate's eigenvalues are located during residual assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Full argument-principle search over the fit box with a completeness
    /// certificate. Robust but costly; intended for one-shot residuals.
    Certified,
    /// Newton tracking seeded at the target eigenvalues, inheriting the
    /// target's multiplicity structure. The fast path for optimization,
    /// where the candidate stays close to the target.
    Tracked,
}

/// Configuration of the data-misfit residual.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Grid resolution for candidate forward solves.
    pub grid_n: usize,
    /// Search region (used by [`SearchStrategy::Certified`]).
    pub search: SearchBox,
    /// Number of leading spectral-data entries fitted.
    pub m: usize,
    pub w_lambda: f64,
    pub w_beta: f64,
    /// Eigenvalue tolerance for the candidate solves.
    pub tol: f64,
    pub strategy: SearchStrategy,
}

impl FitOptions {
    pub fn new(grid_n: usize, search: SearchBox, m: usize) -> Self {
        FitOptions {
            grid_n,
            search,
            m,
            w_lambda: 1.0,
            w_beta: 1.0,
            tol: 1e-10,
            strategy: SearchStrategy::Tracked,
        }
    }
}

/// Spectral data of the candidate parameters, located per the fit strategy.
fn candidate_data(bp: &BasisParams, target: &SpectralData, opts: &FitOptions) -> Result<SpectralData> {
    let p = synth_problem(bp, Grid::new(opts.grid_n)?)?;
    match opts.strategy {
        SearchStrategy::Certified => spectral_data(&p, &opts.search, opts.tol),
        SearchStrategy::Tracked => {
            let mut eigs: Vec<Eigenvalue> = Vec::new();
            for run in target.runs() {
                if run.start > opts.m {
                    break;
                }
                let seed = target.entries()[run.start - 1].0;
                let (lambda, newton_residual) = refine_root(&p, seed, opts.tol)?;
                for prior in &eigs {
                    if (prior.lambda - lambda).norm() < COLLISION_FACTOR * opts.tol {
                        return Err(Error::RootCollision { lambda });
                    }
                }
                eigs.push(Eigenvalue {
                    lambda,
                    multiplicity: run.multiplicity,
                    newton_residual,
                });
            }
            spectral_data_for_eigenvalues(&p, &eigs)
        }
    }
}

/// Greedy nearest-lambda assignment of pool entries to the first `m` target
/// entries; ties break toward the smaller pool index.
fn match_nearest(
    target: &[(Complex64, Complex64)],
    pool: &[(Complex64, Complex64)],
    m: usize,
) -> Result<Vec<usize>> {
    if pool.len() < m {
        return Err(Error::CountMismatch {
            available: pool.len(),
            needed: m,
        });
    }
    let mut used = vec![false; pool.len()];
    let mut picks = Vec::with_capacity(m);
    for (lambda, _) in &target[..m] {
        let best = (0..pool.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (pool[a].0 - lambda)
                    .norm()
                    .total_cmp(&(pool[b].0 - lambda).norm())
                    .then(a.cmp(&b))
            })
            .expect("pool larger than picks");
        used[best] = true;
        picks.push(best);
    }
    Ok(picks)
}

/// Weighted data-misfit residual of length `4 m`: for each of the first `m`
/// target entries, the real and imaginary parts of the eigenvalue mismatch
/// scaled by `w_lambda`, then of the weight-number mismatch scaled by
/// `w_beta`. Candidate entries are matched to targets by nearest eigenvalue.
pub fn residual(bp: &BasisParams, target: &SpectralData, opts: &FitOptions) -> Result<Vec<f64>> {
    if target.len() < opts.m {
        return Err(Error::CountMismatch {
            available: target.len(),
            needed: opts.m,
        });
    }
    let candidate = candidate_data(bp, target, opts)?;
    let picks = match_nearest(target.entries(), candidate.entries(), opts.m)?;
    let mut out = Vec::with_capacity(4 * opts.m);
    for (n, &j) in picks.iter().enumerate() {
        let (lambda, beta) = target.entries()[n];
        let (lambda_hat, beta_hat) = candidate.entries()[j];
        let dl = lambda_hat - lambda;
        let db = beta_hat - beta;
        out.push(opts.w_lambda * dl.re);
        out.push(opts.w_lambda * dl.im);
        out.push(opts.w_beta * db.re);
        out.push(opts.w_beta * db.im);
    }
    Ok(out)
}

/// Configuration of [`recover`].
#[derive(Debug, Clone)]
pub struct RecoverOptions {
    pub fit: FitOptions,
    /// Tikhonov weight on `||x - x_init||^2`; zero disables regularization.
    pub mu: f64,
    pub damping_init: f64,
    pub max_iter: usize,
    /// Forward-difference step per real coordinate.
    pub fd_step: f64,
    pub rel_cost_tol: f64,
    pub step_tol: f64,
    /// Ground truth for sup-error reporting, when known.
    pub truth: Option<BasisParams>,
}

impl RecoverOptions {
    pub fn new(fit: FitOptions) -> Self {
        RecoverOptions {
            fit,
            mu: 0.0,
            damping_init: 1e-3,
            max_iter: 100,
            fd_step: 1e-6,
            rel_cost_tol: 1e-10,
            step_tol: 1e-10,
            truth: None,
        }
    }
}

/// Outcome of a damped least-squares recovery.
///
/// `converged` is set only when the run stopped at a convergence test
/// (cost at the assembly-noise floor, relative cost change below
/// `rel_cost_tol`, or step norm below `step_tol`) - an exhausted iteration
/// budget or a failed descent reports `converged = false` with the reason.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub params: BasisParams,
    pub iterations: usize,
    pub final_cost: f64,
    /// Cost after the initial evaluation and after each accepted step.
    pub cost_history: Vec<f64>,
    pub converged: bool,
    pub stop_reason: String,
    /// Gradient norm at the last point where a Jacobian was available.
    pub grad_norm: f64,
    /// Sup-norm coefficient-function errors against `truth`, when provided.
    pub sup_error_r: Option<f64>,
    pub sup_error_v: Option<f64>,
}

struct Objective<'a> {
    target: &'a SpectralData,
    opts: &'a RecoverOptions,
    x_init: DVector<f64>,
}

impl Objective<'_> {
    /// Data residual, extended with Tikhonov rows when `mu > 0`.
    fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let bp = BasisParams::from_slice(x.as_slice())?;
        let mut rows = residual(&bp, self.target, &self.opts.fit)?;
        if self.opts.mu > 0.0 {
            let w = self.opts.mu.sqrt();
            rows.extend((x - &self.x_init).iter().map(|d| w * d));
        }
        Ok(DVector::from_vec(rows))
    }

    /// Forward-difference Jacobian, columns evaluated concurrently.
    fn jacobian(&self, x: &DVector<f64>, r0: &DVector<f64>) -> Result<DMatrix<f64>> {
        let h = self.opts.fd_step;
        let columns: Vec<DVector<f64>> = (0..x.len())
            .into_par_iter()
            .map(|j| {
                let mut xj = x.clone();
                xj[j] += h;
                Ok((self.eval(&xj)? - r0) / h)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_columns(&columns))
    }
}

/// Recovers cosine coefficients from target spectral data by
/// Levenberg-Marquardt on the weighted data misfit.
///
/// The damping factor multiplies by 10 on every rejected trial (cost
/// increase or residual-assembly failure such as a root collision) and
/// divides by 10 on acceptance, so accepted steps never increase the cost.
/// Optimization failures are reported, not raised: the only `Err` returns
/// are structural (bad sizes, an unevaluable starting point).
pub fn recover(
    target: &SpectralData,
    init: &BasisParams,
    opts: &RecoverOptions,
) -> Result<RecoveryReport> {
    let k = init.basis_size();
    if opts.fit.m < 2 * k {
        return Err(Error::InvalidRecovery(format!(
            "need m >= 2K data entries to determine 4K reals, got m = {} for K = {k}",
            opts.fit.m
        )));
    }
    let objective = Objective {
        target,
        opts,
        x_init: DVector::from_vec(init.to_vec()),
    };
    let mut x = objective.x_init.clone();
    let mut r = objective.eval(&x)?;
    let mut cost = r.norm_squared();
    let mut history = vec![cost];
    let mut damping = opts.damping_init;
    let mut grad_norm = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;
    let mut stop_reason = format!("iteration limit ({}) reached", opts.max_iter);

    if cost < COST_FLOOR {
        converged = true;
        stop_reason = "initial cost already at the assembly-noise floor".into();
    } else {
        'outer: for iter in 1..=opts.max_iter {
            iterations = iter;
            let jac = match objective.jacobian(&x, &r) {
                Ok(j) => j,
                Err(e) => {
                    stop_reason = format!("jacobian assembly failed: {e}");
                    break 'outer;
                }
            };
            let gram = jac.transpose() * &jac;
            let grad = jac.transpose() * &r;
            grad_norm = grad.norm();
            loop {
                let mut damped = gram.clone();
                for d in 0..damped.nrows() {
                    damped[(d, d)] += damping;
                }
                let step = damped.cholesky().map(|c| c.solve(&(-&grad)));
                let accepted = step.and_then(|s| {
                    let trial = &x + &s;
                    match objective.eval(&trial) {
                        Ok(rt) if rt.norm_squared() <= cost => Some((s, trial, rt)),
                        _ => None,
                    }
                });
                match accepted {
                    Some((step, trial, r_trial)) => {
                        let cost_trial = r_trial.norm_squared();
                        let rel_drop = (cost - cost_trial) / cost.max(f64::MIN_POSITIVE);
                        let step_norm = step.norm();
                        x = trial;
                        r = r_trial;
                        cost = cost_trial;
                        history.push(cost);
                        damping = (damping / 10.0).max(1e-15);
                        if cost < COST_FLOOR {
                            converged = true;
                            stop_reason = "cost reached the assembly-noise floor".into();
                            break 'outer;
                        }
                        if rel_drop < opts.rel_cost_tol {
                            converged = true;
                            stop_reason =
                                format!("relative cost change {rel_drop:.3e} below tolerance");
                            break 'outer;
                        }
                        if step_norm < opts.step_tol {
                            converged = true;
                            stop_reason = format!("step norm {step_norm:.3e} below tolerance");
                            break 'outer;
                        }
                        break;
                    }
                    None => {
                        damping *= 10.0;
                        if damping > DAMPING_LIMIT {
                            stop_reason = "damping limit reached without a descent step".into();
                            break 'outer;
                        }
                    }
                }
            }
        }
    }

    let params = BasisParams::from_slice(x.as_slice())?;
    let (sup_error_r, sup_error_v) = match &opts.truth {
        Some(truth) => {
            let grid = Grid::new(opts.fit.grid_n)?;
            let (r_rec, v_rec) = synth(&params, grid)?;
            let (r_true, v_true) = synth(truth, grid)?;
            let sup = |a: &ComplexSamples, b: &ComplexSamples| -> Result<f64> {
                Ok(a.zip_with(b, |x, y| x - y)?.max_abs())
            };
            (Some(sup(&r_rec, &r_true)?), Some(sup(&v_rec, &v_true)?))
        }
        None => (None, None),
    };
    Ok(RecoveryReport {
        params,
        iterations,
        final_cost: cost,
        cost_history: history,
        converged,
        stop_reason,
        grad_norm,
        sup_error_r,
        sup_error_v,
    })
}

/// Discrepancy maxima between the spectral data of two problems sharing `R`.
#[derive(Debug, Clone, Copy)]
pub struct Example2Report {
    pub max_lambda_diff: f64,
    pub max_beta_diff: f64,
    /// Max of `|Delta - Delta_tilde|` over a fixed lattice on the box.
    pub max_delta_diff: f64,
    /// Entries per problem found in the box.
    pub entries: usize,
}

/// Certifies the blind-spot geometry: `R` vanishes identically on `[a, pi]`
/// and the two `V` variants agree on `[0, a]`, differing only where `R` is
/// dead. The spectral data of the two problems then coincides exactly, and
/// the report's maxima sit at discretization level.
///
/// Preconditions checked: `a` interior to `(0, pi)`; `max |R| < 1e-12` on
/// `[a, pi]` while `max |R| > 1e-6` on `[0, a)`; `|V - V_tilde| < 1e-12`
/// on `[0, a]`. The variants may also agree past the cut (the comparison
/// is then trivially exact).
pub fn example2_check(
    a: f64,
    r: &ComplexSamples,
    v: &ComplexSamples,
    v_tilde: &ComplexSamples,
    region: &SearchBox,
) -> Result<Example2Report> {
    if !(a > 0.0 && a < PI) {
        return Err(Error::GeometryViolation(format!(
            "cut point a = {a} must lie strictly inside (0, pi)"
        )));
    }
    let grid = r.grid();
    let nodes = grid.nodes();
    let zone_max = |f: &ComplexSamples, pred: &dyn Fn(f64) -> bool| -> f64 {
        nodes
            .iter()
            .enumerate()
            .filter(|(_, &x)| pred(x))
            .map(|(k, _)| f.value(k).norm())
            .fold(0.0, f64::max)
    };
    let dead_r = zone_max(r, &|x| x >= a);
    if dead_r >= ZONE_ZERO_TOL {
        return Err(Error::GeometryViolation(format!(
            "R must vanish on [a, pi]; found |R| up to {dead_r:.3e} there"
        )));
    }
    let live_r = zone_max(r, &|x| x < a);
    if live_r <= ZONE_LIVE_TOL {
        return Err(Error::GeometryViolation(format!(
            "R must be active on [0, a); found |R| at most {live_r:.3e} there"
        )));
    }
    let v_diff = v.zip_with(v_tilde, |p, q| p - q)?;
    let live_diff = zone_max(&v_diff, &|x| x <= a);
    if live_diff >= ZONE_ZERO_TOL {
        return Err(Error::GeometryViolation(format!(
            "V and V_tilde must agree on [0, a]; they differ by up to {live_diff:.3e} there"
        )));
    }

    let tol = 1e-10;
    let p = Problem::new(r.clone(), v.clone())?;
    let p_tilde = Problem::new(r.clone(), v_tilde.clone())?;
    let sd = spectral_data(&p, region, tol)?;
    let sd_tilde = spectral_data(&p_tilde, region, tol)?;
    if sd.len() != sd_tilde.len() {
        return Err(Error::CountMismatch {
            available: sd_tilde.len(),
            needed: sd.len(),
        });
    }
    let mut max_lambda_diff: f64 = 0.0;
    let mut max_beta_diff: f64 = 0.0;
    for ((l, b), (lt, bt)) in sd.entries().iter().zip(sd_tilde.entries()) {
        max_lambda_diff = max_lambda_diff.max((l - lt).norm());
        max_beta_diff = max_beta_diff.max((b - bt).norm());
    }

    let (nx, ny) = (40, 16);
    let mut max_delta_diff: f64 = 0.0;
    for j in 0..=ny {
        for i in 0..=nx {
            let lambda = Complex64::new(
                region.re_min() + region.width() * i as f64 / nx as f64,
                region.im_min() + region.height() * j as f64 / ny as f64,
            );
            let d = delta(&p, lambda, 0)?[0];
            let dt = delta(&p_tilde, lambda, 0)?[0];
            max_delta_diff = max_delta_diff.max((d - dt).norm());
        }
    }
    Ok(Example2Report {
        max_lambda_diff,
        max_beta_diff,
        max_delta_diff,
        entries: sd.len(),
    })
}

/// Outcome of an entrywise spectral-data comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeOutcome {
    /// Every compared entry agrees within `1e-6`.
    Indistinguishable,
    /// Smallest global index whose entry pair differs, with
    /// `|lambda - lambda_tilde| + |beta - beta_tilde|` there.
    FirstDifference { index: usize, magnitude: f64 },
}

/// Compares the spectral data of two problems over one search box,
/// nearest-eigenvalue aligned. A count mismatch counts as a difference at
/// the first index past the shorter data set.
pub fn uniqueness_probe(
    p: &Problem,
    p_tilde: &Problem,
    region: &SearchBox,
) -> Result<ProbeOutcome> {
    let tol = 1e-10;
    let sd = spectral_data(p, region, tol)?;
    let sd_tilde = spectral_data(p_tilde, region, tol)?;
    let shared = sd.len().min(sd_tilde.len());
    if shared > 0 {
        let picks = match_nearest(sd.entries(), sd_tilde.entries(), shared)?;
        for (n, &j) in picks.iter().enumerate() {
            let (l, b) = sd.entries()[n];
            let (lt, bt) = sd_tilde.entries()[j];
            let magnitude = (l - lt).norm() + (b - bt).norm();
            if magnitude > PROBE_THRESHOLD {
                return Ok(ProbeOutcome::FirstDifference {
                    index: n + 1,
                    magnitude,
                });
            }
        }
    }
    if sd.len() != sd_tilde.len() {
        return Ok(ProbeOutcome::FirstDifference {
            index: shared + 1,
            magnitude: f64::INFINITY,
        });
    }
    Ok(ProbeOutcome::Indistinguishable)
}
