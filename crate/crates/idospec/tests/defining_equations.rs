//! Independent finite-difference oracles for the solver.
//!
//! Every check here recomputes derivatives and integrals directly from the
//! stored traces — nothing is shared with the Runge-Kutta stepping — so a
//! sign error, a misplaced term, or a wrong terminal condition in the solver
//! cannot cancel against itself.

use idospec::chareq::delta;
use idospec::forward::{solve_eta, solve_phi};
use idospec::{presets, ComplexSamples, Problem};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fourth-order central derivative at interior node `k`.
fn five_point_derivative(f: &ComplexSamples, k: usize) -> Complex64 {
    let h = f.grid().step();
    (f.value(k - 2) - 8.0 * f.value(k - 1) + 8.0 * f.value(k + 1) - f.value(k + 2)) / (12.0 * h)
}

/// `max_k |i phi' + R z - lambda phi|` over stencil-covered interior nodes,
/// with `z(x) = int_0^x V phi dt` rebuilt by cumulative Simpson.
fn phi_equation_defect(p: &Problem, lambda: Complex64) -> f64 {
    let trace = solve_phi(p, lambda, 0).unwrap();
    let phi = trace.phi(0);
    let z = p
        .v()
        .zip_with(phi, |v, y| v * y)
        .unwrap()
        .cumulative_integral();
    let n = p.grid().subintervals();
    (2..n - 1)
        .map(|k| {
            (I * five_point_derivative(phi, k) + p.r().value(k) * z.value(k)
                - lambda * phi.value(k))
            .norm()
        })
        .fold(0.0, f64::max)
}

/// `max_k |i eta' - lambda eta - R (w - 1)|` over stencil-covered interior
/// nodes, with `w(x) = int_x^pi V eta dt` rebuilt by Simpson.
fn eta_equation_defect(p: &Problem, lambda: Complex64) -> f64 {
    let trace = solve_eta(p, lambda, 0).unwrap();
    let eta = trace.eta(0);
    let v_eta = p.v().zip_with(eta, |v, y| v * y).unwrap();
    let total = v_eta.integrate();
    let cum = v_eta.cumulative_integral();
    let n = p.grid().subintervals();
    (2..n - 1)
        .map(|k| {
            let w = total - cum.value(k);
            (I * five_point_derivative(eta, k)
                - lambda * eta.value(k)
                - p.r().value(k) * (w - Complex64::ONE))
            .norm()
        })
        .fold(0.0, f64::max)
}

const LAMBDAS: [Complex64; 3] = [
    Complex64::new(2.0, 0.3),
    Complex64::new(-1.0, -0.5),
    Complex64::new(0.0, 0.7),
];

#[test]
fn phi_trace_satisfies_the_defining_equation() {
    let p = presets::smooth1(2000).unwrap();
    for lambda in LAMBDAS {
        let defect = phi_equation_defect(&p, lambda);
        assert!(defect < 1e-6, "lambda {lambda}: defect {defect:e}");
    }
}

#[test]
fn eta_trace_satisfies_the_defining_equation() {
    let p = presets::smooth1(2000).unwrap();
    for lambda in LAMBDAS {
        let defect = eta_equation_defect(&p, lambda);
        assert!(defect < 1e-6, "lambda {lambda}: defect {defect:e}");
    }
}

#[test]
fn trivial_kernel_forces_an_identically_zero_backward_solution() {
    let p = presets::zero_kernel(800).unwrap();
    for lambda in LAMBDAS {
        let trace = solve_eta(&p, lambda, 1).unwrap();
        assert_eq!(trace.eta(0).max_abs(), 0.0);
        assert_eq!(trace.eta(1).max_abs(), 0.0);
        let defect = phi_equation_defect(&p, lambda);
        assert!(defect < 1e-8, "lambda {lambda}: defect {defect:e}");
    }
}

#[test]
fn first_chain_member_tracks_the_lambda_derivative_of_the_endpoint() {
    let p = presets::smooth1(1000).unwrap();
    let lambda = Complex64::new(1.3, -0.4);
    let h = 1e-4;
    let n = p.grid().subintervals();

    let endpoint = |l: Complex64| solve_phi(&p, l, 0).unwrap().phi(0).value(n);
    let fd = (endpoint(lambda + h) - endpoint(lambda - h)) / (2.0 * h);
    let chain = solve_phi(&p, lambda, 1).unwrap().phi(1).value(n);
    assert!(
        (fd - chain).norm() < 1e-5 * chain.norm(),
        "phi: fd {fd} vs chain {chain}"
    );

    let start = |l: Complex64| solve_eta(&p, l, 0).unwrap().eta(0).value(0);
    let fd = (start(lambda + h) - start(lambda - h)) / (2.0 * h);
    let chain = solve_eta(&p, lambda, 1).unwrap().eta(1).value(0);
    assert!(
        (fd - chain).norm() < 1e-5 * chain.norm(),
        "eta: fd {fd} vs chain {chain}"
    );
}

#[test]
fn characteristic_function_is_holomorphic() {
    let p = presets::smooth1(1000).unwrap();
    let h = 1e-4;
    for i in 0..3 {
        for j in 0..3 {
            let lambda = Complex64::new(-5.0 + 5.0 * i as f64, -0.5 + 0.5 * j as f64);
            let at = |l: Complex64| delta(&p, l, 0).unwrap()[0];
            let d_re = (at(lambda + h) - at(lambda - h)) / (2.0 * h);
            let d_im = (at(lambda + I * h) - at(lambda - I * h)) / (2.0 * I * h);
            assert!(
                (d_re - d_im).norm() < 1e-6 * (1.0 + d_re.norm()),
                "lambda {lambda}: {d_re} vs {d_im}"
            );
        }
    }
}

#[test]
fn derivative_chain_of_the_characteristic_function_matches_differences() {
    let p = presets::smooth1(1000).unwrap();
    let lambda = Complex64::new(0.8, -0.3);
    let chain = delta(&p, lambda, 2).unwrap();
    let at = |l: Complex64| delta(&p, l, 0).unwrap()[0];

    let h = 1e-4;
    let first = (at(lambda + h) - at(lambda - h)) / (2.0 * h);
    assert!(
        (first - chain[1]).norm() < 1e-5 * chain[1].norm(),
        "first derivative: {first} vs {}",
        chain[1]
    );

    let h = 1e-3;
    let second = (at(lambda + h) - 2.0 * chain[0] + at(lambda - h)) / (h * h);
    assert!(
        (second - 2.0 * chain[2]).norm() < 1e-4 * second.norm(),
        "second derivative: {second} vs {}",
        2.0 * chain[2]
    );
}
