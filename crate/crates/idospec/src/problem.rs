//! Problem data: the kernel factors `R` and `V` on a shared grid, plus optional
//! endpoint decay metadata used by the asymptotic diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexSamples, Grid};

/// Power-law behaviour of the kernel factors at the interval ends:
/// `R(pi - x) ~ c_alpha * x^alpha` and `V(x) ~ d_beta * x^beta` as `x -> 0+`.
///
/// Only needed by diagnostics that probe the decay rate of the characteristic
/// function in the lower half-plane; everything else ignores it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoints {
    pub alpha: f64,
    pub beta: f64,
    pub c_alpha: Complex64,
    pub d_beta: Complex64,
}

impl Endpoints {
    /// Exponent `gamma = alpha + beta + 1` governing the algebraic decay of the
    /// scaled characteristic function in the lower sector.
    pub fn gamma(&self) -> f64 {
        self.alpha + self.beta + 1.0
    }
}

/// A fully specified forward problem: kernel factors sampled on one grid.
///
/// Half-step values of `R` and `V` are interpolated once at construction so the
/// fixed-step integrator never re-interpolates in its inner loop.
#[derive(Debug, Clone)]
pub struct Problem {
    grid: Grid,
    r: ComplexSamples,
    v: ComplexSamples,
    endpoints: Option<Endpoints>,
    r_half: Vec<Complex64>,
    v_half: Vec<Complex64>,
}

impl Problem {
    /// Builds a problem from kernel factor samples on a shared grid.
    pub fn new(r: ComplexSamples, v: ComplexSamples) -> Result<Self> {
        Self::build(r, v, None)
    }

    /// Builds a problem carrying endpoint decay metadata.
    ///
    /// When `alpha == 0` the coefficient must equal `R(pi)` and be nonzero;
    /// when `beta == 0` it must equal `V(0)` and be nonzero. The product
    /// `c_alpha * d_beta` must never vanish.
    pub fn with_endpoints(r: ComplexSamples, v: ComplexSamples, endpoints: Endpoints) -> Result<Self> {
        Self::build(r, v, Some(endpoints))
    }

    /// Samples closed-form kernel factors on `grid` and builds the problem.
    pub fn from_fns(
        grid: Grid,
        r: impl Fn(f64) -> Complex64,
        v: impl Fn(f64) -> Complex64,
        endpoints: Option<Endpoints>,
    ) -> Result<Self> {
        let r = ComplexSamples::from_fn(grid, r)?;
        let v = ComplexSamples::from_fn(grid, v)?;
        Self::build(r, v, endpoints)
    }

    fn build(r: ComplexSamples, v: ComplexSamples, endpoints: Option<Endpoints>) -> Result<Self> {
        if r.grid() != v.grid() {
            return Err(Error::GridMismatch {
                left: r.grid().subintervals(),
                right: v.grid().subintervals(),
            });
        }
        let grid = r.grid();
        if let Some(ep) = &endpoints {
            validate_endpoints(ep, &r, &v)?;
        }
        let n = grid.subintervals();
        let h = grid.step();
        let mut r_half = Vec::with_capacity(n);
        let mut v_half = Vec::with_capacity(n);
        for k in 0..n {
            let x = grid.node(k) + 0.5 * h;
            r_half.push(r.value_at(x)?);
            v_half.push(v.value_at(x)?);
        }
        Ok(Problem {
            grid,
            r,
            v,
            endpoints,
            r_half,
            v_half,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn r(&self) -> &ComplexSamples {
        &self.r
    }

    pub fn v(&self) -> &ComplexSamples {
        &self.v
    }

    pub fn endpoints(&self) -> Option<&Endpoints> {
        self.endpoints.as_ref()
    }

    /// Same kernel factors resampled on a grid with `n` subintervals.
    ///
    /// Node values are interpolated from the stored samples, so this is only as
    /// accurate as the original resolution; prefer [`Problem::from_fns`] on the
    /// target grid when a closed form is available.
    pub fn resampled(&self, n: usize) -> Result<Problem> {
        let grid = Grid::new(n)?;
        let r = ComplexSamples::from_fn(grid, |x| self.r.value_at(x).expect("in domain"))?;
        let v = ComplexSamples::from_fn(grid, |x| self.v.value_at(x).expect("in domain"))?;
        Self::build(r, v, self.endpoints)
    }

    #[inline]
    pub(crate) fn r_node(&self, k: usize) -> Complex64 {
        self.r.value(k)
    }

    #[inline]
    pub(crate) fn v_node(&self, k: usize) -> Complex64 {
        self.v.value(k)
    }

    /// Interpolated value of `R` at the midpoint of subinterval `k`.
    #[inline]
    pub(crate) fn r_mid(&self, k: usize) -> Complex64 {
        self.r_half[k]
    }

    /// Interpolated value of `V` at the midpoint of subinterval `k`.
    #[inline]
    pub(crate) fn v_mid(&self, k: usize) -> Complex64 {
        self.v_half[k]
    }
}

fn validate_endpoints(ep: &Endpoints, r: &ComplexSamples, v: &ComplexSamples) -> Result<()> {
    if !ep.alpha.is_finite() || ep.alpha < 0.0 {
        return Err(Error::InvalidEndpoints(format!(
            "alpha must be finite and nonnegative, got {}",
            ep.alpha
        )));
    }
    if !ep.beta.is_finite() || ep.beta < 0.0 {
        return Err(Error::InvalidEndpoints(format!(
            "beta must be finite and nonnegative, got {}",
            ep.beta
        )));
    }
    if ep.c_alpha.norm() == 0.0 || ep.d_beta.norm() == 0.0 {
        return Err(Error::InvalidEndpoints(
            "the endpoint coefficients must both be nonzero".into(),
        ));
    }
    let n = r.grid().subintervals();
    if ep.alpha == 0.0 {
        let r_end = r.value(n);
        if r_end.norm() == 0.0 {
            return Err(Error::InvalidEndpoints(
                "alpha = 0 requires R(pi) != 0".into(),
            ));
        }
        if (ep.c_alpha - r_end).norm() > 1e-12 * (1.0 + r_end.norm()) {
            return Err(Error::InvalidEndpoints(format!(
                "alpha = 0 requires c_alpha = R(pi) = {r_end}, got {}",
                ep.c_alpha
            )));
        }
    }
    if ep.beta == 0.0 {
        let v_start = v.value(0);
        if v_start.norm() == 0.0 {
            return Err(Error::InvalidEndpoints(
                "beta = 0 requires V(0) != 0".into(),
            ));
        }
        if (ep.d_beta - v_start).norm() > 1e-12 * (1.0 + v_start.norm()) {
            return Err(Error::InvalidEndpoints(format!(
                "beta = 0 requires d_beta = V(0) = {v_start}, got {}",
                ep.d_beta
            )));
        }
    }
    Ok(())
}
