//! Forward integration of the two characteristic value problems.
//!
//! The operator `l y = i y'(x) + R(x) * integral_0^x V(t) y(t) dt` reduces
//! exactly to a coupled ODE system by carrying the running integral as a second
//! state variable. With `z(x) = integral_0^x V y dt`, the normalized solution
//! `phi` (`phi(0) = 1`) satisfies
//!
//! ```text
//! phi' = -i (lambda*phi - R*z),    z' = V*phi,    phi(0) = 1, z(0) = 0.
//! ```
//!
//! The companion function `eta` solves the terminal-value problem driven by `R`,
//! with `w(x) = integral_x^pi V eta dt` as its auxiliary state:
//!
//! ```text
//! eta' = -i (lambda*eta + R*w - R),    w' = -V*eta,    eta(pi) = w(pi) = 0.
//! ```
//!
//! Normalized lambda-derivatives `f_nu = (1/nu!) d^nu f / d lambda^nu` obey the
//! same systems with the previous chain member as an extra forcing term, so one
//! fixed-step RK4 sweep integrates the whole chain simultaneously. Half-step
//! coefficient values come from the cubic interpolant of the stored samples.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ComplexSamples;
use crate::problem::Problem;
use crate::zmath::{scaled_by_exp, I};

/// Largest supported order of the lambda-derivative chain.
pub const MAX_CHAIN_ORDER: usize = 8;

/// Any state component beyond this magnitude aborts the sweep.
const OVERFLOW_LIMIT: f64 = 1e300;

#[derive(Clone, Copy)]
enum System {
    Phi,
    Eta,
}

/// Chain derivative. State layout: `y[0..m]` holds the chain members, and
/// `y[m..2m]` the auxiliary running integrals (`z` forward, `w` backward).
#[inline]
fn derivative(
    kind: System,
    lambda: Complex64,
    r: Complex64,
    v: Complex64,
    y: &[Complex64],
    out: &mut [Complex64],
) {
    let m = y.len() / 2;
    match kind {
        System::Phi => {
            for nu in 0..m {
                let cascade = if nu == 0 { Complex64::ZERO } else { y[nu - 1] };
                out[nu] = -I * (lambda * y[nu] + cascade - r * y[m + nu]);
                out[m + nu] = v * y[nu];
            }
        }
        System::Eta => {
            for nu in 0..m {
                // the inhomogeneous +R term is lambda-free, so it appears only
                // at chain level zero; higher levels inherit the cascade
                let forcing = if nu == 0 { -r } else { y[nu - 1] };
                out[nu] = -I * (lambda * y[nu] + forcing + r * y[m + nu]);
                out[m + nu] = -v * y[nu];
            }
        }
    }
}

struct Scratch {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch {
            k1: vec![Complex64::ZERO; dim],
            k2: vec![Complex64::ZERO; dim],
            k3: vec![Complex64::ZERO; dim],
            k4: vec![Complex64::ZERO; dim],
            tmp: vec![Complex64::ZERO; dim],
        }
    }
}

/// One classical RK4 step of width `h` (possibly negative). The coefficient
/// pairs `(R, V)` are supplied at the step start, midpoint and end.
#[inline]
fn rk4_step(
    kind: System,
    lambda: Complex64,
    h: f64,
    y: &mut [Complex64],
    start: (Complex64, Complex64),
    mid: (Complex64, Complex64),
    end: (Complex64, Complex64),
    s: &mut Scratch,
) {
    let dim = y.len();
    derivative(kind, lambda, start.0, start.1, y, &mut s.k1);
    for i in 0..dim {
        s.tmp[i] = y[i] + 0.5 * h * s.k1[i];
    }
    derivative(kind, lambda, mid.0, mid.1, &s.tmp, &mut s.k2);
    for i in 0..dim {
        s.tmp[i] = y[i] + 0.5 * h * s.k2[i];
    }
    derivative(kind, lambda, mid.0, mid.1, &s.tmp, &mut s.k3);
    for i in 0..dim {
        s.tmp[i] = y[i] + h * s.k3[i];
    }
    derivative(kind, lambda, end.0, end.1, &s.tmp, &mut s.k4);
    for i in 0..dim {
        y[i] += (h / 6.0) * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    }
}

fn check_magnitude(y: &[Complex64], lambda: Complex64) -> Result<()> {
    for c in y {
        if !c.re.is_finite() || !c.im.is_finite() || c.re.abs() > OVERFLOW_LIMIT || c.im.abs() > OVERFLOW_LIMIT {
            return Err(Error::MagnitudeOverflow { lambda });
        }
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_CHAIN_ORDER {
        return Err(Error::ChainOrderTooLarge {
            got: order,
            max: MAX_CHAIN_ORDER,
        });
    }
    Ok(())
}

/// Sweeps the `phi` system from 0 to pi, invoking `on_node(k, state)` at every
/// node (including the initial one). Returns the final state.
fn run_phi(
    p: &Problem,
    lambda: Complex64,
    order: usize,
    mut on_node: impl FnMut(usize, &[Complex64]),
) -> Result<Vec<Complex64>> {
    let n = p.grid().subintervals();
    let h = p.grid().step();
    let m = order + 1;
    let mut y = vec![Complex64::ZERO; 2 * m];
    y[0] = Complex64::ONE;
    let mut s = Scratch::new(2 * m);
    on_node(0, &y);
    for k in 0..n {
        rk4_step(
            System::Phi,
            lambda,
            h,
            &mut y,
            (p.r_node(k), p.v_node(k)),
            (p.r_mid(k), p.v_mid(k)),
            (p.r_node(k + 1), p.v_node(k + 1)),
            &mut s,
        );
        check_magnitude(&y, lambda)?;
        on_node(k + 1, &y);
    }
    Ok(y)
}

/// Sweeps the `eta` system backward from pi to 0.
fn run_eta(
    p: &Problem,
    lambda: Complex64,
    order: usize,
    mut on_node: impl FnMut(usize, &[Complex64]),
) -> Result<Vec<Complex64>> {
    let n = p.grid().subintervals();
    let h = p.grid().step();
    let m = order + 1;
    let mut y = vec![Complex64::ZERO; 2 * m];
    let mut s = Scratch::new(2 * m);
    on_node(n, &y);
    for k in (0..n).rev() {
        rk4_step(
            System::Eta,
            lambda,
            -h,
            &mut y,
            (p.r_node(k + 1), p.v_node(k + 1)),
            (p.r_mid(k), p.v_mid(k)),
            (p.r_node(k), p.v_node(k)),
            &mut s,
        );
        check_magnitude(&y, lambda)?;
        on_node(k, &y);
    }
    Ok(y)
}

/// Chain members at `x = pi`: `[phi_0(pi), ..., phi_order(pi)]`, without
/// recording the trace. This is the hot path of the root search.
pub(crate) fn phi_endpoint(p: &Problem, lambda: Complex64, order: usize) -> Result<Vec<Complex64>> {
    check_order(order)?;
    let y = run_phi(p, lambda, order, |_, _| {})?;
    Ok(y[..order + 1].to_vec())
}

/// Final backward state at `x = 0`: `[eta_nu(0).., w_nu(0)..]`.
#[cfg(test)]
pub(crate) fn eta_initial_state(
    p: &Problem,
    lambda: Complex64,
    order: usize,
) -> Result<Vec<Complex64>> {
    check_order(order)?;
    run_eta(p, lambda, order, |_, _| {})
}

fn collect_storage(dim: usize, len: usize) -> Vec<Vec<Complex64>> {
    vec![vec![Complex64::ZERO; len]; dim]
}

fn samples_from_storage(
    p: &Problem,
    storage: Vec<Vec<Complex64>>,
    m: usize,
) -> (Vec<ComplexSamples>, Vec<ComplexSamples>) {
    let mut main = Vec::with_capacity(m);
    let mut aux = Vec::with_capacity(m);
    for (i, column) in storage.into_iter().enumerate() {
        let samples = ComplexSamples::new(p.grid(), column).expect("solver output is finite");
        if i < m {
            main.push(samples);
        } else {
            aux.push(samples);
        }
    }
    (main, aux)
}

/// Solution chain of the initial-value problem, recorded on the full grid.
#[derive(Debug, Clone)]
pub struct PhiTrace {
    lambda: Complex64,
    phi: Vec<ComplexSamples>,
    aux: Vec<ComplexSamples>,
}

impl PhiTrace {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// Highest chain order carried by the trace.
    pub fn order(&self) -> usize {
        self.phi.len() - 1
    }

    /// Chain member `phi_nu`.
    pub fn phi(&self, nu: usize) -> &ComplexSamples {
        &self.phi[nu]
    }

    /// Auxiliary state `z_nu(x) = integral_0^x V phi_nu dt`.
    pub fn aux(&self, nu: usize) -> &ComplexSamples {
        &self.aux[nu]
    }

    pub fn members(&self) -> &[ComplexSamples] {
        &self.phi
    }

    /// Writes the chain as CSV: `x, re_0, im_0, re_1, im_1, ...`.
    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        write_trace_csv(path, &self.phi)
    }
}

/// Solution chain of the terminal-value problem, recorded on the full grid.
#[derive(Debug, Clone)]
pub struct EtaTrace {
    lambda: Complex64,
    eta: Vec<ComplexSamples>,
    aux: Vec<ComplexSamples>,
}

impl EtaTrace {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.eta.len() - 1
    }

    /// Chain member `eta_nu`.
    pub fn eta(&self, nu: usize) -> &ComplexSamples {
        &self.eta[nu]
    }

    /// Auxiliary state `w_nu(x) = integral_x^pi V eta_nu dt`.
    pub fn aux(&self, nu: usize) -> &ComplexSamples {
        &self.aux[nu]
    }

    pub fn members(&self) -> &[ComplexSamples] {
        &self.eta
    }

    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        write_trace_csv(path, &self.eta)
    }
}

fn write_trace_csv(path: impl AsRef<std::path::Path>, members: &[ComplexSamples]) -> Result<()> {
    use std::fmt::Write as _;
    let grid = members[0].grid();
    let mut out = String::from("x");
    for nu in 0..members.len() {
        let _ = write!(out, ",re_{nu},im_{nu}");
    }
    out.push('\n');
    for k in 0..grid.len() {
        let _ = write!(out, "{}", crate::grid::fmt_f64(grid.node(k)));
        for member in members {
            let v = member.value(k);
            let _ = write!(out, ",{},{}", crate::grid::fmt_f64(v.re), crate::grid::fmt_f64(v.im));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Integrates the initial-value chain up to order `nu_max` and records it.
///
/// `phi_0(0) = 1` exactly; higher members and all auxiliaries start at zero.
pub fn solve_phi(p: &Problem, lambda: Complex64, nu_max: usize) -> Result<PhiTrace> {
    check_order(nu_max)?;
    let m = nu_max + 1;
    let mut storage = collect_storage(2 * m, p.grid().len());
    run_phi(p, lambda, nu_max, |k, y| {
        for (i, column) in storage.iter_mut().enumerate() {
            column[k] = y[i];
        }
    })?;
    let (phi, aux) = samples_from_storage(p, storage, m);
    Ok(PhiTrace { lambda, phi, aux })
}

/// Integrates the terminal-value chain backward and records it.
///
/// `eta_nu(pi) = 0` and `w_nu(pi) = 0` exactly for every `nu`.
pub fn solve_eta(p: &Problem, lambda: Complex64, nu_max: usize) -> Result<EtaTrace> {
    check_order(nu_max)?;
    let m = nu_max + 1;
    let mut storage = collect_storage(2 * m, p.grid().len());
    run_eta(p, lambda, nu_max, |k, y| {
        for (i, column) in storage.iter_mut().enumerate() {
            column[k] = y[i];
        }
    })?;
    let (eta, aux) = samples_from_storage(p, storage, m);
    Ok(EtaTrace { lambda, eta, aux })
}

/// Reflection `theta(x) = eta(pi - x)` of the leading chain member, node for node.
pub fn reflect_theta(trace: &EtaTrace) -> ComplexSamples {
    trace.eta(0).reversed()
}

/// One row of the large-`|lambda|` behaviour report along the positive
/// imaginary axis.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticsRow {
    pub t: f64,
    /// `max_x |phi_0(x, iT) e^{i lambda x} - 1|`, evaluated in log scale.
    pub phi_deviation: f64,
    /// `max_x |eta_0(x, iT)|`.
    pub eta_magnitude: f64,
}

/// Decay report for the normalized solutions along `lambda = iT`.
#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    pub rows: Vec<AsymptoticsRow>,
    pub phi_monotone_decreasing: bool,
    pub eta_monotone_decreasing: bool,
}

/// Probes how fast `phi` approaches its dominant exponential and how fast
/// `eta` fades, along `lambda = iT` for each `T` in `ts`.
///
/// `ts` must be positive, strictly increasing and bounded by 50 so the raw
/// sweep stays far below the overflow guard; the normalization itself is
/// applied through logarithms.
pub fn phi_asymptotic_report(p: &Problem, ts: &[f64]) -> Result<AsymptoticsReport> {
    if ts.is_empty() {
        return Err(Error::InvalidBox("empty list of T values".into()));
    }
    for pair in ts.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidBox(format!(
                "T values must be strictly increasing, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    if ts[0] <= 0.0 || ts[ts.len() - 1] > 50.0 {
        return Err(Error::OverflowGuard {
            im: ts[ts.len() - 1],
            limit: 50.0,
        });
    }
    let grid = p.grid();
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let lambda = Complex64::new(0.0, t);
        let mut phi_deviation: f64 = 0.0;
        run_phi(p, lambda, 0, |k, y| {
            let x = grid.node(k);
            let scaled = scaled_by_exp(y[0], I * lambda * x);
            phi_deviation = phi_deviation.max((scaled - 1.0).norm());
        })?;
        let mut eta_magnitude: f64 = 0.0;
        run_eta(p, lambda, 0, |_, y| {
            eta_magnitude = eta_magnitude.max(y[0].norm());
        })?;
        rows.push(AsymptoticsRow {
            t,
            phi_deviation,
            eta_magnitude,
        });
    }
    let phi_monotone_decreasing = rows.windows(2).all(|w| w[1].phi_deviation < w[0].phi_deviation);
    let eta_monotone_decreasing = rows.windows(2).all(|w| w[1].eta_magnitude < w[0].eta_magnitude);
    Ok(AsymptoticsReport {
        rows,
        phi_monotone_decreasing,
        eta_monotone_decreasing,
    })
}

/// Largest node error of `f` against a closed form; convenience for tests and
/// examples.
pub fn max_node_error(f: &ComplexSamples, exact: impl Fn(f64) -> Complex64) -> f64 {
    let grid = f.grid();
    (0..grid.len())
        .map(|k| (f.value(k) - exact(grid.node(k))).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::presets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_kernel(n: usize) -> Problem {
        presets::zero_kernel(n).unwrap()
    }

    #[test]
    fn zero_kernel_initial_value_solution_is_a_plane_wave() {
        let p = zero_kernel(2000);
        let lambda = c(1.0, 0.5);
        let tr = solve_phi(&p, lambda, 0).unwrap();
        let err = max_node_error(tr.phi(0), |x| (-I * lambda * x).exp());
        assert!(err < 1e-8, "max error {err:e}");
        assert_eq!(tr.phi(0).value(0), Complex64::ONE);
        assert_eq!(tr.aux(0).value(0), Complex64::ZERO);
    }

    #[test]
    fn zero_kernel_first_chain_member_matches_the_lambda_derivative() {
        let p = zero_kernel(2000);
        let lambda = c(1.0, 0.5);
        let tr = solve_phi(&p, lambda, 1).unwrap();
        let err = max_node_error(tr.phi(1), |x| -I * x * (-I * lambda * x).exp());
        assert!(err < 1e-8, "max error {err:e}");
        assert_eq!(tr.phi(1).value(0), Complex64::ZERO);
    }

    #[test]
    fn refinement_drops_the_initial_value_error_sixteen_fold() {
        let lambda = c(2.0, -0.3);
        let err = |n: usize| {
            let p = zero_kernel(n);
            let tr = solve_phi(&p, lambda, 0).unwrap();
            max_node_error(tr.phi(0), |x| (-I * lambda * x).exp())
        };
        let ratio = err(100) / err(200);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn zero_kernel_terminal_value_solution_vanishes() {
        let p = zero_kernel(400);
        let tr = solve_eta(&p, c(3.0, -1.0), 1).unwrap();
        for nu in 0..=1 {
            assert_eq!(tr.eta(nu).max_abs(), 0.0);
            assert_eq!(tr.aux(nu).max_abs(), 0.0);
        }
    }

    #[test]
    fn pure_forcing_terminal_problem_matches_the_integrating_factor_formula() {
        // V = 0 decouples eta: eta' = -i lambda eta + i R, eta(pi) = 0, so
        // eta(x) = -i e^{-i lambda x} * integral_x^pi R(t) e^{i lambda t} dt.
        let grid = Grid::new(2000).unwrap();
        let p = Problem::from_fns(grid, |x| c((1.3 * x).cos(), 0.2 * x.sin()), |_| Complex64::ZERO, None)
            .unwrap();
        let lambda = c(1.7, 0.4);
        let tr = solve_eta(&p, lambda, 0).unwrap();

        let integrand =
            ComplexSamples::from_fn(grid, |x| c((1.3 * x).cos(), 0.2 * x.sin()) * (I * lambda * x).exp())
                .unwrap();
        let total = integrand.integrate();
        let cumulative = integrand.cumulative_integral();
        let mut worst: f64 = 0.0;
        for k in 0..grid.len() {
            let x = grid.node(k);
            let tail = total - cumulative.value(k);
            let exact = -I * (-I * lambda * x).exp() * tail;
            worst = worst.max((tr.eta(0).value(k) - exact).norm());
        }
        assert!(worst < 1e-7, "max error {worst:e}");
        assert_eq!(tr.eta(0).value(grid.subintervals()), Complex64::ZERO);
    }

    #[test]
    fn reflection_reverses_the_leading_member() {
        let p = presets::smooth1(200).unwrap();
        let tr = solve_eta(&p, c(2.0, -0.5), 0).unwrap();
        let theta = reflect_theta(&tr);
        let n = p.grid().subintervals();
        for k in 0..=n {
            assert_eq!(theta.value(k), tr.eta(0).value(n - k));
        }
        assert_eq!(theta.value(0), Complex64::ZERO);
    }

    #[test]
    fn chain_order_is_capped() {
        let p = zero_kernel(10);
        assert!(matches!(
            solve_phi(&p, Complex64::ONE, MAX_CHAIN_ORDER + 1),
            Err(Error::ChainOrderTooLarge { .. })
        ));
    }

    #[test]
    fn overflow_guard_names_the_offending_lambda() {
        let p = zero_kernel(200);
        // Im(lambda) = 300 drives |phi| ~ e^{300 x} past 1e300 before x = pi
        let lambda = c(0.0, 300.0);
        match solve_phi(&p, lambda, 0) {
            Err(Error::MagnitudeOverflow { lambda: l }) => assert_eq!(l, lambda),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn asymptotic_report_flags_monotone_decay_for_a_smooth_problem() {
        let p = presets::smooth1(800).unwrap();
        let report = phi_asymptotic_report(&p, &[5.0, 10.0, 20.0]).unwrap();
        assert!(report.phi_monotone_decreasing, "{:?}", report.rows);
        assert!(report.eta_monotone_decreasing, "{:?}", report.rows);
    }

    #[test]
    fn asymptotic_report_for_the_trivial_kernel_is_discretization_noise() {
        // phi is exactly the dominant exponential here, so the reported
        // deviation is nothing but RK4 error
        let p = zero_kernel(800);
        let report = phi_asymptotic_report(&p, &[5.0, 10.0]).unwrap();
        for row in &report.rows {
            assert!(row.phi_deviation < 1e-5, "{:?}", row);
            assert_eq!(row.eta_magnitude, 0.0);
        }
    }

    #[test]
    fn asymptotic_report_validates_its_input() {
        let p = zero_kernel(100);
        assert!(phi_asymptotic_report(&p, &[]).is_err());
        assert!(phi_asymptotic_report(&p, &[5.0, 5.0]).is_err());
        assert!(phi_asymptotic_report(&p, &[5.0, 100.0]).is_err());
    }
}
