//! Large-parameter behavior of the solutions and of `Delta`.
//!
//! Along the upper imaginary axis `lambda = iT` the normalized solution
//! `phi e^{i lambda x}` flattens to 1 and the terminal-value solution dies
//! out, both monotonically in `T`. In the lower half-plane the
//! characteristic function instead decays at an algebraic rate set by the
//! endpoint behavior of the coefficients: `|Delta| |lambda|^{gamma + 1}`
//! approaches a constant along a lower-sector ray. Both regimes are probed
//! numerically here.

use idospec::chareq::{delta_lower_sector_scale, delta_upper_axis_deviation};
use idospec::forward::phi_asymptotic_report;
use idospec::presets;

fn main() -> Result<(), idospec::Error> {
    let p = presets::smooth1(1000)?;
    let ts = [5.0, 10.0, 20.0];
    let report = phi_asymptotic_report(&p, &ts)?;
    println!("upper axis lambda = iT:");
    println!(
        "{:>6}  {:>22}  {:>14}  {:>18}",
        "T", "max |phi e^{i l x} - 1|", "max |eta|", "|D(iT)e^{-T pi}-1|"
    );
    for row in &report.rows {
        let delta_dev = delta_upper_axis_deviation(&p, row.t)?;
        println!(
            "{:>6}  {:>22.3e}  {:>14.3e}  {:>18.3e}",
            row.t, row.phi_deviation, row.eta_magnitude, delta_dev
        );
    }
    println!(
        "monotone decay: phi {} / eta {}",
        report.phi_monotone_decreasing, report.eta_monotone_decreasing
    );

    println!();
    println!("lower sector ray arg(lambda) = 3 pi / 2:");
    println!("{:>8}  {:>26}", "radius", "|Delta| |lambda|^(gamma+1)");
    let arg = 1.5 * std::f64::consts::PI;
    for radius in [5.0, 10.0, 20.0, 40.0] {
        let scale = delta_lower_sector_scale(&p, radius, arg)?;
        println!("{radius:>8}  {scale:>26.6e}");
    }
    println!("the scaled magnitude levels off: Delta decays algebraically there");
    Ok(())
}
