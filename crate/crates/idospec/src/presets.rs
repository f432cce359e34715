//! Named coefficient fixtures used by the test suite, the examples and the CLI.
//!
//! Three families are provided:
//!
//! * `zero-kernel` — `R = 0`, `V = 1`: every quantity has a closed form.
//! * `smooth-1` — gently varying real-analytic coefficients with nonzero
//!   endpoint values; the workhorse for eigenvalue and recovery tests.
//! * `example2` — a kernel that vanishes identically on the right half of the
//!   interval. Because the terminal-value solution is pinned to zero wherever
//!   `R` vanishes, changing `V` inside that dead zone provably does not move a
//!   single eigenvalue or weight number; the fixture packages a perturbed
//!   variant (`tilde`, dead-zone change) and a control variant (live-zone
//!   change) to demonstrate both sides of that statement.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::chareq::SearchBox;
use crate::error::Result;
use crate::grid::Grid;
use crate::problem::{Endpoints, Problem};

/// Trivial kernel: `R = 0`, `V = 1`. The initial-value solution is the plane
/// wave `e^{-i lambda x}` and the characteristic function never vanishes.
pub fn zero_kernel(n: usize) -> Result<Problem> {
    let grid = Grid::new(n)?;
    Problem::from_fns(grid, |_| Complex64::ZERO, |_| Complex64::ONE, None)
}

/// Smooth analytic coefficients `R = 1 + 0.3 cos x`, `V = 1 - 0.2 cos 2x`,
/// bounded away from zero at both relevant endpoints.
pub fn smooth1(n: usize) -> Result<Problem> {
    let grid = Grid::new(n)?;
    let endpoints = Endpoints {
        alpha: 0.0,
        beta: 0.0,
        c_alpha: Complex64::new(0.7, 0.0),
        d_beta: Complex64::new(0.8, 0.0),
    };
    Problem::from_fns(
        grid,
        |x| Complex64::new(1.0 + 0.3 * x.cos(), 0.0),
        |x| Complex64::new(1.0 - 0.2 * (2.0 * x).cos(), 0.0),
        Some(endpoints),
    )
}

/// Smooth compactly supported bump on `(lo, hi)`, normalized to peak value 1
/// at the midpoint and vanishing with all derivatives at both ends.
pub fn bump(t: f64, lo: f64, hi: f64) -> f64 {
    if t <= lo || t >= hi {
        return 0.0;
    }
    let s = 2.0 * (t - lo) / (hi - lo) - 1.0;
    (1.0 - 1.0 / (1.0 - s * s)).exp()
}

/// Peak height of the kernel factor bump in [`example2`].
pub const EXAMPLE2_R_AMPLITUDE: f64 = 2.0;

/// Peak height of the `V` perturbations in [`example2`].
pub const EXAMPLE2_PERTURBATION: f64 = 0.6;

/// The dead-zone fixture: a base problem together with a perturbation that
/// cannot be seen in the spectral data and one that can.
#[derive(Debug, Clone)]
pub struct Example2Fixture {
    /// `R` is a bump supported on `(0, cut)` and identically zero on
    /// `[cut, pi]`; `V` is smooth and nonvanishing.
    pub base: Problem,
    /// Same `R`; `V` perturbed by a bump supported inside the dead zone
    /// `(cut, pi)`. Shares all spectral data with `base` exactly.
    pub tilde: Problem,
    /// Same `R`; `V` perturbed by a bump supported inside the live zone
    /// `(0, cut)`. Produces visibly different spectral data.
    pub control: Problem,
    /// Right edge of the support of `R`.
    pub cut: f64,
    /// Search region that contains a healthy number of eigenvalues of `base`.
    pub search: SearchBox,
}

fn example2_r(x: f64, cut: f64) -> Complex64 {
    Complex64::new(EXAMPLE2_R_AMPLITUDE * bump(x, 0.0, cut), 0.0)
}

fn example2_v(x: f64) -> Complex64 {
    Complex64::new(1.0 + 0.15 * x.sin(), 0.0)
}

/// Builds the canonical dead-zone fixture with the cut at `pi/2`.
pub fn example2(n: usize) -> Result<Example2Fixture> {
    let grid = Grid::new(n)?;
    let cut = PI / 2.0;
    let base = Problem::from_fns(grid, |x| example2_r(x, cut), example2_v, None)?;
    let tilde = Problem::from_fns(
        grid,
        |x| example2_r(x, cut),
        |x| example2_v(x) + EXAMPLE2_PERTURBATION * bump(x, cut, PI),
        None,
    )?;
    let control = Problem::from_fns(
        grid,
        |x| example2_r(x, cut),
        |x| example2_v(x) + EXAMPLE2_PERTURBATION * bump(x, 0.0, cut),
        None,
    )?;
    Ok(Example2Fixture {
        base,
        tilde,
        control,
        cut,
        search: example2_search_box(),
    })
}

/// Default eigenvalue search region for the dead-zone fixture.
pub fn example2_search_box() -> SearchBox {
    SearchBox::new(-20.0, 20.0, -8.0, 1.0).expect("static box is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_normalized_and_compactly_supported() {
        assert_eq!(bump(0.0, 0.0, 1.0), 0.0);
        assert_eq!(bump(1.0, 0.0, 1.0), 0.0);
        assert_eq!(bump(-0.3, 0.0, 1.0), 0.0);
        assert_eq!(bump(0.5, 0.0, 1.0), 1.0);
        assert!(bump(0.25, 0.0, 1.0) > 0.0);
        assert!(bump(0.9999, 0.0, 1.0) < 1e-6);
    }

    #[test]
    fn smooth1_has_the_advertised_endpoint_data() {
        let p = smooth1(100).unwrap();
        let ep = p.endpoints().unwrap();
        assert_eq!(ep.alpha, 0.0);
        assert_eq!(ep.beta, 0.0);
        assert!((ep.c_alpha - Complex64::new(0.7, 0.0)).norm() < 1e-15);
        assert!((ep.d_beta - Complex64::new(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn example2_kernel_factor_dies_at_the_cut() {
        let fx = example2(200).unwrap();
        let grid = fx.base.grid();
        for k in 0..grid.len() {
            let x = grid.node(k);
            if x >= fx.cut {
                assert_eq!(fx.base.r().value(k), Complex64::ZERO, "x = {x}");
            }
        }
        // live zone actually carries the kernel
        let max_r = fx.base.r().max_abs();
        assert!((max_r - EXAMPLE2_R_AMPLITUDE).abs() < 1e-2, "max {max_r}");
    }

    #[test]
    fn example2_variants_differ_only_in_their_zones() {
        let fx = example2(400).unwrap();
        let grid = fx.base.grid();
        let mut tilde_diff_left: f64 = 0.0;
        let mut tilde_diff_right: f64 = 0.0;
        let mut control_diff_left: f64 = 0.0;
        let mut control_diff_right: f64 = 0.0;
        for k in 0..grid.len() {
            let x = grid.node(k);
            let dt = (fx.tilde.v().value(k) - fx.base.v().value(k)).norm();
            let dc = (fx.control.v().value(k) - fx.base.v().value(k)).norm();
            if x <= fx.cut {
                tilde_diff_left = tilde_diff_left.max(dt);
                control_diff_left = control_diff_left.max(dc);
            } else {
                tilde_diff_right = tilde_diff_right.max(dt);
                control_diff_right = control_diff_right.max(dc);
            }
        }
        assert_eq!(tilde_diff_left, 0.0);
        assert!(tilde_diff_right > 0.5);
        assert!(control_diff_left > 0.5);
        assert_eq!(control_diff_right, 0.0);
    }
}
