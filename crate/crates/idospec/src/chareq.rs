//! The characteristic equation: evaluation, cross-checks and root finding.
//!
//! The eigenvalues of the boundary value problem are the zeros, with
//! multiplicity, of the entire function `Delta(lambda) = phi_0(pi, lambda)`.
//! A second characteristic function built from the terminal-value solution,
//! `Delta_0(lambda) = 1 - integral_0^pi V eta_0 dt`, satisfies the exact
//! identity `Delta = Delta_0 * e^{-i lambda pi}`; because the two sides come
//! from independent sweeps (forward vs backward), the identity residual is a
//! sharp measure of discretization error and the flagship self-check of the
//! whole solver stack.
//!
//! Zeros are located by the argument principle: adaptive phase tracking along
//! rectangle boundaries gives exact winding numbers, recursive quadrisection
//! isolates roots, Newton iteration with the exact variational derivative
//! polishes them, and a small-circle winding plus a derivative-magnitude test
//! certifies each multiplicity. The sum of multiplicities is required to equal
//! the outer winding, so no zero inside the search region can be lost
//! silently.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
#[cfg(test)]
use crate::forward::eta_initial_state;
use crate::forward::{phi_endpoint, solve_eta};
use crate::grid::fmt_f64;
use crate::problem::Problem;
use crate::zmath::{scaled_by_exp, I};

/// Root position tolerance used when none is supplied explicitly.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// Boundary samples with `|Delta|` at or below this are treated as suspected
/// boundary zeros.
const BOUNDARY_FLOOR: f64 = 1e-8;
/// Hard cap on adaptive boundary samples for a single winding computation.
const MAX_CONTOUR_SAMPLES: usize = 1_000_000;
/// Quadrisection leaves are polished once they are at most this wide.
const LEAF_DIAMETER: f64 = 0.2;
/// ... and carry at most this much winding.
const MAX_LEAF_WINDING: i64 = 4;
/// Subdivision below this box dimension is hopeless; report stagnation.
const MIN_BOX_DIM: f64 = 1e-5;
/// Roots closer than this multiple of the tolerance are merged.
const DEDUP_FACTOR: f64 = 10.0;
/// Multiplicity circles never shrink below this radius.
const MULT_RADIUS_FLOOR: f64 = 1e-6;
/// Relative magnitude below which a lower-order derivative counts as zero.
const DERIV_CHECK_THRESHOLD: f64 = 1e-4;
const NEWTON_MAX_ITERS: usize = 100;
const MAX_INFLATE_RETRIES: usize = 5;
/// Per-segment phase jumps are accepted only below this (safely under the
/// quarter-turn limit, so jumps aliased by +-2 pi land in the bisection zone
/// instead of being accepted by floating-point luck).
const PHASE_ACCEPT: f64 = 0.4 * PI;
/// Opening angle margin of the admissible lower sector.
pub const SECTOR_MARGIN: f64 = 0.3;

/// Closed axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite =
            re_min.is_finite() && re_max.is_finite() && im_min.is_finite() && im_max.is_finite();
        if !all_finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::InvalidBox(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(SearchBox {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn re_min(&self) -> f64 {
        self.re_min
    }

    pub fn re_max(&self) -> f64 {
        self.re_max
    }

    pub fn im_min(&self) -> f64 {
        self.im_min
    }

    pub fn im_max(&self) -> f64 {
        self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, lambda: Complex64, margin: f64) -> bool {
        lambda.re >= self.re_min - margin
            && lambda.re <= self.re_max + margin
            && lambda.im >= self.im_min - margin
            && lambda.im <= self.im_max + margin
    }

    /// Grows both half-widths by `factor` about the center.
    fn inflated(&self, factor: f64) -> SearchBox {
        let c = self.center();
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        SearchBox {
            re_min: c.re - hw,
            re_max: c.re + hw,
            im_min: c.im - hh,
            im_max: c.im + hh,
        }
    }

    /// Splits into four children tiling `self`, cut at the given fractions.
    fn quadrisect(&self, fx: f64, fy: f64) -> [SearchBox; 4] {
        let xm = self.re_min + fx * self.width();
        let ym = self.im_min + fy * self.height();
        let b = |re_min, re_max, im_min, im_max| SearchBox {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        [
            b(self.re_min, xm, self.im_min, ym),
            b(xm, self.re_max, self.im_min, ym),
            b(self.re_min, xm, ym, self.im_max),
            b(xm, self.re_max, ym, self.im_max),
        ]
    }

    /// Counterclockwise boundary samples. The initial density grows with edge
    /// length so that a function of bounded exponential type cannot rotate by
    /// anywhere near a full turn between neighbouring samples; the adaptive
    /// bisection then only has to clean up, not to discover whole windings.
    fn boundary_points(&self) -> Vec<Complex64> {
        let corners = [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ];
        let mut pts = Vec::new();
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            let per_edge = ((4.0 * (b - a).norm()).ceil() as usize).max(16);
            for i in 0..per_edge {
                let t = i as f64 / per_edge as f64;
                pts.push(a + t * (b - a));
            }
        }
        pts
    }
}

impl Default for SearchBox {
    /// Strip around the real axis where all zeros of practical interest live:
    /// zeros stay out of the upper half plane at large height and decay
    /// estimates push them toward the real axis at large `|Re|`.
    fn default() -> Self {
        SearchBox {
            re_min: -20.0,
            re_max: 20.0,
            im_min: -6.0,
            im_max: 2.0,
        }
    }
}

/// A located zero of the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub lambda: Complex64,
    pub multiplicity: usize,
    /// `|Delta(lambda)|` at the polished root.
    pub newton_residual: f64,
}

/// Root list together with the completeness evidence backing it.
#[derive(Debug, Clone)]
pub struct EigensearchCertificate {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Winding of the (possibly inflated) outer box.
    pub outer_winding: usize,
    /// The box the certificate actually refers to after boundary-zero
    /// inflation; completeness is certified only inside it.
    pub effective_box: SearchBox,
}

impl EigensearchCertificate {
    pub fn multiplicity_sum(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }
}

/// Normalized derivative chain of the characteristic function:
/// `[Delta, Delta', Delta''/2!, ...]`, entries `nu = 0..=nu_max`.
pub fn delta(p: &Problem, lambda: Complex64, nu_max: usize) -> Result<Vec<Complex64>> {
    phi_endpoint(p, lambda, nu_max)
}

/// Normalized derivative chain of the companion characteristic function
/// `Delta_0(lambda) = 1 - integral_0^pi V eta_0 dt`, computed by Simpson
/// quadrature over the recorded terminal-value trace.
pub fn delta0(p: &Problem, lambda: Complex64, nu_max: usize) -> Result<Vec<Complex64>> {
    let trace = solve_eta(p, lambda, nu_max)?;
    let mut out = Vec::with_capacity(nu_max + 1);
    for nu in 0..=nu_max {
        let integral = p.v().zip_with(trace.eta(nu), |v, e| v * e)?.integrate();
        let base = if nu == 0 { Complex64::ONE } else { Complex64::ZERO };
        out.push(base - integral);
    }
    Ok(out)
}

/// `Delta_0` chain read directly off the backward auxiliary state at `x = 0`,
/// bypassing the quadrature. Used as an independent cross-check route.
#[cfg(test)]
pub(crate) fn delta0_via_state(
    p: &Problem,
    lambda: Complex64,
    nu_max: usize,
) -> Result<Vec<Complex64>> {
    let state = eta_initial_state(p, lambda, nu_max)?;
    let m = nu_max + 1;
    let mut out = Vec::with_capacity(m);
    for nu in 0..m {
        let base = if nu == 0 { Complex64::ONE } else { Complex64::ZERO };
        out.push(base - state[m + nu]);
    }
    Ok(out)
}

/// Relative defect of the exact two-solver identity
/// `Delta(lambda) = Delta_0(lambda) e^{-i lambda pi}`:
/// `|Delta - Delta_0 e^{-i lambda pi}| / (1 + |Delta|)`.
///
/// Both sides are exact in the continuum for any continuous coefficients, so
/// the residual measures nothing but discretization error.
pub fn identity_residual(p: &Problem, lambda: Complex64) -> Result<f64> {
    if lambda.im > 20.0 {
        return Err(Error::OverflowGuard {
            im: lambda.im,
            limit: 20.0,
        });
    }
    let d = delta(p, lambda, 0)?[0];
    let d0 = delta0(p, lambda, 0)?[0];
    let rhs = d0 * (-I * lambda * PI).exp();
    Ok((d - rhs).norm() / (1.0 + d.norm()))
}

/// [`identity_residual`] on a uniform lattice over `region`, row-major order.
pub fn identity_residual_grid(
    p: &Problem,
    region: &SearchBox,
    nx: usize,
    ny: usize,
) -> Result<Vec<(Complex64, f64)>> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidBox("lattice needs nx >= 1 and ny >= 1".into()));
    }
    let points: Vec<Complex64> = (0..=ny)
        .flat_map(|j| {
            (0..=nx).map(move |i| {
                Complex64::new(
                    region.re_min() + region.width() * i as f64 / nx as f64,
                    region.im_min() + region.height() * j as f64 / ny as f64,
                )
            })
        })
        .collect();
    points
        .into_par_iter()
        .map(|lambda| identity_residual(p, lambda).map(|r| (lambda, r)))
        .collect()
}

/// Defect of the terminal-value solution in its rewritten forward form
/// `i eta' + R (Delta_0 + integral_0^x V eta dt) = lambda eta`, maximized over
/// interior nodes with a finite-difference derivative. An independent check
/// that the backward sweep solved the right equation.
///
/// The derivative uses the five-point fourth-order stencil so the
/// differentiation error matches the order of the solver; a second-order
/// stencil would bury the solution error under its own `h^2 |eta'''|` term,
/// which at `|lambda| ~ 10` exceeds the solution error by several orders of
/// magnitude.
pub fn eta_forward_form_residual(p: &Problem, lambda: Complex64) -> Result<f64> {
    let trace = solve_eta(p, lambda, 0)?;
    let eta = trace.eta(0);
    let v_eta = p.v().zip_with(eta, |v, e| v * e)?;
    let d0 = Complex64::ONE - v_eta.integrate();
    let cumulative = v_eta.cumulative_integral();
    let grid = p.grid();
    let h = grid.step();
    let mut worst: f64 = 0.0;
    for k in 2..grid.subintervals() - 1 {
        let deriv = (eta.value(k - 2) - 8.0 * eta.value(k - 1) + 8.0 * eta.value(k + 1)
            - eta.value(k + 2))
            / (12.0 * h);
        let defect = I * deriv + p.r().value(k) * (d0 + cumulative.value(k)) - lambda * eta.value(k);
        worst = worst.max(defect.norm());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Argument-principle machinery.
//
// The engine below is written against an abstract derivative-chain oracle
// `chain(lambda, nu_max) -> [f, f', f''/2!, ...]` so the search logic can be
// exercised on exactly-evaluable functions (polynomials) in tests; production
// use plugs in the characteristic function.
// ---------------------------------------------------------------------------

type ChainFn<'a> = dyn FnMut(Complex64, usize) -> Result<Vec<Complex64>> + 'a;

/// Normalization against which the boundary-zero floor is measured.
///
/// The characteristic function has exponential type pi: its natural magnitude
/// at height `Im lambda` is `e^{pi Im lambda}`, and measuring the floor
/// against that scale makes "suspiciously close to a zero" mean the same thing
/// on every edge of a tall box. An absolute floor would misclassify the
/// zero-free trivial kernel, whose `|Delta|` honestly dips below 1e-8 near the
/// bottom of the default box.
#[derive(Debug, Clone, Copy)]
enum FloorScale {
    /// Plain absolute magnitudes (test functions without exponential growth).
    Unit,
    /// `e^{pi Im z}` — the intrinsic scale of the characteristic function.
    ExpIm,
}

impl FloorScale {
    fn value(self, z: Complex64) -> f64 {
        match self {
            FloorScale::Unit => 1.0,
            FloorScale::ExpIm => (PI * z.im).exp(),
        }
    }
}

enum WalkOutcome {
    /// Total accumulated phase along the closed path.
    Total(f64),
    /// Some sample fell at or below the magnitude floor.
    FloorHit,
}

struct Walker<'a, 'b> {
    chain: &'a mut ChainFn<'b>,
    samples_used: usize,
    floor: f64,
    scale: FloorScale,
}

impl Walker<'_, '_> {
    fn eval(&mut self, z: Complex64) -> Result<Complex64> {
        self.samples_used += 1;
        if self.samples_used > MAX_CONTOUR_SAMPLES {
            return Err(Error::PhaseResolutionExceeded {
                max: MAX_CONTOUR_SAMPLES,
            });
        }
        Ok((self.chain)(z, 0)?[0])
    }

    fn below_floor(&self, z: Complex64, f: Complex64) -> bool {
        !(f.norm() > self.floor * self.scale.value(z))
    }

    /// Phase increment along one segment, bisecting until each piece turns by
    /// less than a quarter turn. `None` signals a floor hit.
    fn segment(
        &mut self,
        a: Complex64,
        b: Complex64,
        fa: Complex64,
        fb: Complex64,
    ) -> Result<Option<f64>> {
        let jump = (fb / fa).arg();
        if jump.abs() < PHASE_ACCEPT {
            return Ok(Some(jump));
        }
        if (b - a).norm() < 1e-12 * (1.0 + a.norm()) {
            // a quarter-turn across a vanishing segment: a zero is (numerically)
            // on the path
            return Ok(None);
        }
        let mid = 0.5 * (a + b);
        let fm = self.eval(mid)?;
        if self.below_floor(mid, fm) {
            return Ok(None);
        }
        let Some(left) = self.segment(a, mid, fa, fm)? else {
            return Ok(None);
        };
        let Some(right) = self.segment(mid, b, fm, fb)? else {
            return Ok(None);
        };
        Ok(Some(left + right))
    }

    /// Walks a closed polyline (last point connects back to the first) whose
    /// sample values were evaluated up front.
    fn walk_segments(
        &mut self,
        points: &[Complex64],
        values: &[Complex64],
    ) -> Result<WalkOutcome> {
        for (&z, &f) in points.iter().zip(values) {
            if self.below_floor(z, f) {
                return Ok(WalkOutcome::FloorHit);
            }
        }
        let mut total = 0.0;
        for i in 0..points.len() {
            let j = (i + 1) % points.len();
            match self.segment(points[i], points[j], values[i], values[j])? {
                Some(jump) => total += jump,
                None => return Ok(WalkOutcome::FloorHit),
            }
        }
        Ok(WalkOutcome::Total(total))
    }

    fn eval_all(&mut self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        points.iter().map(|&z| self.eval(z)).collect()
    }
}

fn round_winding(total_phase: f64) -> Result<i64> {
    let turns = total_phase / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(Error::PhaseSumInconsistent { total: turns });
    }
    Ok(rounded as i64)
}

/// Winding of the chain's value function around `b`, without any retry.
/// `Ok(None)` means a boundary sample hit the magnitude floor.
fn winding_rect_once(
    chain: &mut ChainFn<'_>,
    b: &SearchBox,
    scale: FloorScale,
) -> Result<Option<i64>> {
    let mut walker = Walker {
        chain,
        samples_used: 0,
        floor: BOUNDARY_FLOOR,
        scale,
    };
    let points = b.boundary_points();
    let values = walker.eval_all(&points)?;
    match walker.walk_segments(&points, &values)? {
        WalkOutcome::Total(t) => Ok(Some(round_winding(t)?)),
        WalkOutcome::FloorHit => Ok(None),
    }
}

/// Winding with boundary-zero handling: inflate by 1% and retry, at most
/// [`MAX_INFLATE_RETRIES`] times. Returns the winding together with the box it
/// actually refers to.
fn winding_rect_inflating(
    chain: &mut ChainFn<'_>,
    b: &SearchBox,
    scale: FloorScale,
) -> Result<(i64, SearchBox)> {
    let mut current = *b;
    for _ in 0..=MAX_INFLATE_RETRIES {
        if let Some(w) = winding_rect_once(chain, &current, scale)? {
            return Ok((w, current));
        }
        current = current.inflated(1.01);
    }
    Err(Error::BoundaryZeroSuspected {
        floor: BOUNDARY_FLOOR,
        retries: MAX_INFLATE_RETRIES,
    })
}

/// Circle winding for multiplicity certification. Magnitudes on a tiny circle
/// around an m-fold zero scale like radius^m, so the floor here is relative to
/// the largest sample on the circle itself: it fires only when a *different*
/// zero sits essentially on the circle.
fn winding_circle_once(
    chain: &mut ChainFn<'_>,
    center: Complex64,
    radius: f64,
) -> Result<Option<i64>> {
    let points: Vec<Complex64> = (0..64)
        .map(|k| center + radius * Complex64::new(0.0, TAU * k as f64 / 64.0).exp())
        .collect();
    let mut walker = Walker {
        chain,
        samples_used: 0,
        floor: 0.0,
        scale: FloorScale::Unit,
    };
    let values = walker.eval_all(&points)?;
    let max_mag = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Ok(None);
    }
    walker.floor = 1e-9 * max_mag;
    match walker.walk_segments(&points, &values)? {
        WalkOutcome::Total(t) => Ok(Some(round_winding(t)?)),
        WalkOutcome::FloorHit => Ok(None),
    }
}

/// Number of complete counterclockwise turns of `Delta` along the boundary of
/// `region`; by the argument principle, the number of enclosed zeros counted
/// with multiplicity. The box inflates by 1% (up to 5 times) if a boundary
/// sample is suspiciously close to a zero, so the count refers to the inflated
/// box in that case.
pub fn winding(p: &Problem, region: &SearchBox) -> Result<i64> {
    let mut chain = |lambda, nu_max| delta(p, lambda, nu_max);
    let (w, _) = winding_rect_inflating(&mut chain, region, FloorScale::ExpIm)?;
    Ok(w)
}

struct SearchEngine<'a, 'b> {
    chain: &'a mut ChainFn<'b>,
    tol: f64,
    scale: FloorScale,
}

impl SearchEngine<'_, '_> {
    /// Newton iteration from `start` using the exact derivative. Returns the
    /// polished root, or `None` when the iteration fails to settle (the caller
    /// subdivides further in that case).
    fn newton(&mut self, start: Complex64) -> Result<Option<(Complex64, f64)>> {
        let mut lambda = start;
        let step_tol = self.tol;
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let ch = (self.chain)(lambda, 1)?;
            let (d, dp) = (ch[0], ch[1]);
            if dp.norm() == 0.0 || !dp.is_finite() || !d.is_finite() {
                return Ok(None);
            }
            let step = d / dp;
            lambda -= step;
            if !lambda.is_finite() || lambda.norm() > 1e6 {
                return Ok(None);
            }
            if step.norm() <= step_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(None);
        }
        // polish to the numerical floor while the residual still improves;
        // keeps multiple roots accurate enough for the tiny certification circle
        let mut best = lambda;
        let mut best_res = (self.chain)(lambda, 0)?[0].norm();
        for _ in 0..30 {
            let ch = (self.chain)(best, 1)?;
            let (d, dp) = (ch[0], ch[1]);
            if dp.norm() == 0.0 {
                break;
            }
            let next = best - d / dp;
            let next_res = (self.chain)(next, 0)?[0].norm();
            if !next.is_finite() || next_res >= best_res {
                break;
            }
            best = next;
            best_res = next_res;
        }
        Ok(Some((best, best_res)))
    }

    /// Circle winding plus derivative-magnitude certification of the
    /// multiplicity of a polished root.
    fn multiplicity(&mut self, root: Complex64) -> Result<usize> {
        let mut radius = (DEDUP_FACTOR * self.tol).max(MULT_RADIUS_FLOOR);
        let mut circle = None;
        for _ in 0..=MAX_INFLATE_RETRIES {
            if let Some(w) = winding_circle_once(self.chain, root, radius)? {
                circle = Some((w, radius));
                break;
            }
            radius *= 1.3;
        }
        let Some((w, radius)) = circle else {
            return Err(Error::BoundaryZeroSuspected {
                floor: BOUNDARY_FLOOR,
                retries: MAX_INFLATE_RETRIES,
            });
        };
        if w < 1 {
            return Err(Error::MultiplicityAmbiguous {
                lambda: root,
                winding: 0,
                magnitudes: vec![],
            });
        }
        let m = w as usize;
        if m == 1 {
            // a converged Newton root with unit circle winding needs no
            // derivative corroboration
            return Ok(1);
        }
        // Taylor-term test at the certification radius: the m-th normalized
        // derivative term must dominate every lower one (the 0-th term is the
        // converged Newton residual and certified separately).
        let ch = (self.chain)(root, m)?;
        let terms: Vec<f64> = (1..=m).map(|k| ch[k].norm() * radius.powi(k as i32)).collect();
        let top = terms[m - 1];
        let dominated = terms[..m - 1].iter().all(|t| *t < DERIV_CHECK_THRESHOLD * top);
        if top == 0.0 || !dominated {
            return Err(Error::MultiplicityAmbiguous {
                lambda: root,
                winding: m,
                magnitudes: terms,
            });
        }
        Ok(m)
    }

    /// Attempts to close out a leaf box whose winding is `w`: one Newton run
    /// from the center must land inside the box and carry exactly winding `w`
    /// on its certification circle. Returns `true` when the leaf is resolved.
    fn try_leaf(
        &mut self,
        b: &SearchBox,
        w: i64,
        roots: &mut Vec<(Complex64, f64, usize)>,
    ) -> Result<bool> {
        let Some((root, residual)) = self.newton(b.center())? else {
            return Ok(false);
        };
        if !b.contains(root, 1e-12 * (1.0 + root.norm())) {
            return Ok(false);
        }
        let m = self.multiplicity(root)?;
        if m as i64 != w {
            return Ok(false);
        }
        roots.push((root, residual, m));
        Ok(true)
    }

    /// Recursive quadrisection. Children tile the parent exactly; when a zero
    /// sits on a cut line the split fractions are nudged instead of inflating,
    /// so no area is counted twice.
    fn collect(
        &mut self,
        b: &SearchBox,
        w: i64,
        roots: &mut Vec<(Complex64, f64, usize)>,
    ) -> Result<()> {
        if w == 0 {
            return Ok(());
        }
        if w <= MAX_LEAF_WINDING && b.diameter() < LEAF_DIAMETER && self.try_leaf(b, w, roots)? {
            return Ok(());
        }
        if b.width().min(b.height()) < MIN_BOX_DIM {
            return Err(Error::NewtonStagnation {
                lambda: b.center(),
                iters: NEWTON_MAX_ITERS,
            });
        }
        const FRACTIONS: [(f64, f64); 5] =
            [(0.5, 0.5), (0.47, 0.53), (0.55, 0.45), (0.42, 0.58), (0.62, 0.38)];
        'fractions: for (fx, fy) in FRACTIONS {
            let children = b.quadrisect(fx, fy);
            let mut windings = [0i64; 4];
            for (i, child) in children.iter().enumerate() {
                match winding_rect_once(self.chain, child, self.scale)? {
                    Some(wc) => windings[i] = wc,
                    None => continue 'fractions,
                }
            }
            let total: i64 = windings.iter().sum();
            if total != w {
                return Err(Error::PhaseSumInconsistent {
                    total: total as f64,
                });
            }
            for (child, wc) in children.iter().zip(windings) {
                self.collect(child, wc, roots)?;
            }
            return Ok(());
        }
        Err(Error::BoundaryZeroSuspected {
            floor: BOUNDARY_FLOOR,
            retries: MAX_INFLATE_RETRIES,
        })
    }
}

fn search_with_chain(
    chain: &mut ChainFn<'_>,
    region: &SearchBox,
    tol: f64,
    scale: FloorScale,
) -> Result<EigensearchCertificate> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::InvalidBox(format!(
            "root tolerance must lie in (0, 1e-2], got {tol}"
        )));
    }
    let (outer, effective_box) = winding_rect_inflating(chain, region, scale)?;
    if outer < 0 {
        return Err(Error::PhaseSumInconsistent {
            total: outer as f64,
        });
    }
    let mut engine = SearchEngine { chain, tol, scale };
    let mut raw: Vec<(Complex64, f64, usize)> = Vec::new();
    engine.collect(&effective_box, outer, &mut raw)?;

    // merge near-coincident finds, keeping the smaller residual
    let merge_dist = DEDUP_FACTOR * tol;
    let mut merged: Vec<(Complex64, f64, usize)> = Vec::new();
    for cand in raw {
        match merged.iter_mut().find(|r| (r.0 - cand.0).norm() <= merge_dist) {
            Some(existing) => {
                if cand.1 < existing.1 {
                    *existing = cand;
                }
            }
            None => merged.push(cand),
        }
    }
    merged.sort_by(|a, b| {
        a.0.re
            .total_cmp(&b.0.re)
            .then_with(|| a.0.im.total_cmp(&b.0.im))
    });

    let eigenvalues: Vec<Eigenvalue> = merged
        .into_iter()
        .map(|(lambda, newton_residual, multiplicity)| Eigenvalue {
            lambda,
            multiplicity,
            newton_residual,
        })
        .collect();
    let certificate = EigensearchCertificate {
        eigenvalues,
        outer_winding: outer as usize,
        effective_box,
    };
    if certificate.multiplicity_sum() != certificate.outer_winding {
        return Err(Error::CompletenessMismatch {
            found: certificate.multiplicity_sum(),
            expected: certificate.outer_winding,
        });
    }
    Ok(certificate)
}

/// Locates every zero of `Delta` in `region` with multiplicities, and returns
/// the completeness evidence alongside the list.
pub fn find_eigenvalues_certified(
    p: &Problem,
    region: &SearchBox,
    tol: f64,
) -> Result<EigensearchCertificate> {
    let mut chain = |lambda, nu_max| delta(p, lambda, nu_max);
    search_with_chain(&mut chain, region, tol, FloorScale::ExpIm)
}

/// Locates every zero of `Delta` in `region`, sorted by `(Re, Im)`.
pub fn find_eigenvalues(p: &Problem, region: &SearchBox, tol: f64) -> Result<Vec<Eigenvalue>> {
    Ok(find_eigenvalues_certified(p, region, tol)?.eigenvalues)
}

/// Newton-polishes a single root of `Delta` from `start`; returns the root and
/// its residual. Fails with stagnation if the iteration does not settle.
pub fn refine_root(p: &Problem, start: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let mut chain = |lambda, nu_max| delta(p, lambda, nu_max);
    let mut engine = SearchEngine {
        chain: &mut chain,
        tol,
        scale: FloorScale::ExpIm,
    };
    match engine.newton(start)? {
        Some(hit) => Ok(hit),
        None => Err(Error::NewtonStagnation {
            lambda: start,
            iters: NEWTON_MAX_ITERS,
        }),
    }
}

/// `|Delta|` on a uniform lattice over `region`: returns every interior strict
/// local minimum (8-neighborhood) whose value is below `threshold`, as
/// `(lattice point, |Delta|)`. Brute-force cross-check for the root search.
pub fn delta_magnitude_minima(
    p: &Problem,
    region: &SearchBox,
    nx: usize,
    ny: usize,
    threshold: f64,
) -> Result<Vec<(Complex64, f64)>> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidBox("lattice needs nx >= 2 and ny >= 2".into()));
    }
    let point = |i: usize, j: usize| {
        Complex64::new(
            region.re_min() + region.width() * i as f64 / nx as f64,
            region.im_min() + region.height() * j as f64 / ny as f64,
        )
    };
    let rows: Vec<Vec<f64>> = (0..=ny)
        .into_par_iter()
        .map(|j| {
            (0..=nx)
                .map(|i| delta(p, point(i, j), 0).map(|ch| ch[0].norm()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut minima = Vec::new();
    for j in 1..ny {
        for i in 1..nx {
            let v = rows[j][i];
            if v >= threshold {
                continue;
            }
            let mut is_min = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let u = rows[(j as i64 + dj) as usize][(i as i64 + di) as usize];
                    if u < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                minima.push((point(i, j), v));
            }
        }
    }
    Ok(minima)
}

/// `|Delta(iT) e^{-T pi} - 1|`, evaluated in the log domain: how far the
/// characteristic function is from its dominant exponential high on the
/// imaginary axis.
pub fn delta_upper_axis_deviation(p: &Problem, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 50.0) {
        return Err(Error::OverflowGuard { im: t, limit: 50.0 });
    }
    let lambda = Complex64::new(0.0, t);
    let d = delta(p, lambda, 0)?[0];
    let scaled = scaled_by_exp(d, Complex64::new(-t * PI, 0.0));
    Ok((scaled - 1.0).norm())
}

/// `|Delta(lambda) lambda^{gamma+1}|` along a ray in the lower sector
/// `arg lambda` in `[pi + margin, 2 pi - margin]`; the decay exponent
/// `gamma = alpha + beta + 1` comes from the problem's endpoint data, so the
/// problem must carry endpoint information.
pub fn delta_lower_sector_scale(p: &Problem, radius: f64, arg: f64) -> Result<f64> {
    let endpoints = p.endpoints().ok_or(Error::MissingEndpoints)?;
    if !(PI + SECTOR_MARGIN..=TAU - SECTOR_MARGIN).contains(&arg) {
        return Err(Error::InvalidBox(format!(
            "ray argument {arg} outside the admissible lower sector"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidBox(format!("ray radius {radius} invalid")));
    }
    let lambda = radius * Complex64::new(arg.cos(), arg.sin());
    let d = delta(p, lambda, 0)?[0];
    let power = endpoints.gamma() + 1.0;
    Ok(d.norm() * lambda.norm().powf(power))
}

/// Writes an eigenvalue list as CSV with columns
/// `index,re_lambda,im_lambda,multiplicity,residual`.
pub fn write_eigenvalues_csv(
    path: impl AsRef<std::path::Path>,
    eigenvalues: &[Eigenvalue],
) -> Result<()> {
    use std::fmt::Write as _;
    let mut out = String::from("index,re_lambda,im_lambda,multiplicity,residual\n");
    for (i, e) in eigenvalues.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i,
            fmt_f64(e.lambda.re),
            fmt_f64(e.lambda.im),
            e.multiplicity,
            fmt_f64(e.newton_residual)
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}
