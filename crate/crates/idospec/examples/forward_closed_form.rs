//! Forward solves against a closed form.
//!
//! With the kernel factor `R` identically zero the operator degenerates to
//! `i y'`, so the normalized initial-value solution is the plane wave
//! `phi(x, lambda) = exp(-i lambda x)` and the terminal-value companion
//! vanishes identically. Sweeping the grid resolution shows the classical
//! fourth-order convergence of the integrator: each doubling of `n` cuts
//! the error by about 16x.

use idospec::forward::solve_phi;
use idospec::presets;
use num_complex::Complex64;

fn main() -> Result<(), idospec::Error> {
    let lambda = Complex64::new(1.0, 0.5);
    println!("plane-wave check at lambda = {lambda}");
    println!("{:>6}  {:>12}  {:>8}", "n", "max error", "ratio");
    let mut previous: Option<f64> = None;
    for n in [100, 200, 400, 800] {
        let p = presets::zero_kernel(n)?;
        let trace = solve_phi(&p, lambda, 0)?;
        let grid = p.grid();
        let error = (0..grid.len())
            .map(|k| {
                let exact = (-Complex64::i() * lambda * grid.node(k)).exp();
                (trace.phi(0).value(k) - exact).norm()
            })
            .fold(0.0, f64::max);
        match previous {
            Some(prev) => println!("{n:>6}  {error:>12.3e}  {:>8.1}", prev / error),
            None => println!("{n:>6}  {error:>12.3e}  {:>8}", "-"),
        }
        previous = Some(error);
    }

    let p = presets::zero_kernel(400)?;
    let eta = idospec::forward::solve_eta(&p, lambda, 0)?;
    let eta_max = eta.eta(0).max_abs();
    println!("terminal-value solution with R = 0: max |eta| = {eta_max:.3e} (exactly zero)");
    Ok(())
}
