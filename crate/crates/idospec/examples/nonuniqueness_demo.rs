//! The dead-zone blind spot: spectral data does not always determine `V`.
//!
//! When the kernel factor `R` vanishes identically on `[a, pi]`, the data
//! map cannot see the other factor `V` anywhere past the cut: the
//! characteristic function reduces to the value at the cut times an explicit
//! exponential, and the companion solution vanishes on the dead zone. Two
//! problems differing only there share every eigenvalue and every weight
//! number - exactly, not approximately. A control perturbation of the same
//! size inside the live zone separates the data immediately, so the blind
//! spot is a property of the geometry, not of the solver's resolution.

use idospec::inverse::{example2_check, uniqueness_probe, ProbeOutcome};
use idospec::presets;

fn main() -> Result<(), idospec::Error> {
    let fx = presets::example2(2000)?;
    println!(
        "R is a bump supported on (0, {:.6}) and identically zero beyond it",
        fx.cut
    );

    let blind = example2_check(fx.cut, fx.base.r(), fx.base.v(), fx.tilde.v(), &fx.search)?;
    println!("dead-zone perturbation of V ({} entries in the box):", blind.entries);
    println!("  max |lambda - lambda~| = {:.3e}", blind.max_lambda_diff);
    println!("  max |beta - beta~|     = {:.3e}", blind.max_beta_diff);
    println!("  max |Delta - Delta~|   = {:.3e}", blind.max_delta_diff);

    match uniqueness_probe(&fx.base, &fx.control, &fx.search)? {
        ProbeOutcome::FirstDifference { index, magnitude } => println!(
            "live-zone control perturbation: entry {index} differs by {magnitude:.3e}"
        ),
        ProbeOutcome::Indistinguishable => {
            println!("live-zone control perturbation: unexpectedly indistinguishable")
        }
    }
    println!("same perturbation size; only its support decides visibility");
    Ok(())
}
