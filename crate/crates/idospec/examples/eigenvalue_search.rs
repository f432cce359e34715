//! Certified eigenvalue search on a smooth problem.
//!
//! The search walks the boundary of the requested box to count zeros by the
//! argument principle, quadrisects until each piece isolates a cluster,
//! Newton-polishes a root in every leaf, and certifies each multiplicity by
//! a small winding circle. The final completeness check compares the sum of
//! multiplicities against the outer boundary count, so no zero inside the
//! box can be silently missed.

use idospec::chareq::{find_eigenvalues_certified, SearchBox};
use idospec::presets;

fn main() -> Result<(), idospec::Error> {
    let p = presets::smooth1(2000)?;
    let region = SearchBox::default();
    let cert = find_eigenvalues_certified(&p, &region, 1e-10)?;
    println!(
        "search box re in [{}, {}], im in [{}, {}]",
        region.re_min(),
        region.re_max(),
        region.im_min(),
        region.im_max()
    );
    println!("boundary winding: {}", cert.outer_winding);
    println!(
        "{:>4}  {:>24}  {:>4}  {:>12}",
        "#", "lambda", "mult", "|Delta|"
    );
    for (i, e) in cert.eigenvalues.iter().enumerate() {
        println!(
            "{:>4}  {:>11.6} {:+.6}i  {:>4}  {:>12.3e}",
            i + 1,
            e.lambda.re,
            e.lambda.im,
            e.multiplicity,
            e.newton_residual
        );
    }
    println!(
        "multiplicity sum {} equals the boundary count: the list is complete for this box",
        cert.multiplicity_sum()
    );
    Ok(())
}
