//! Weight numbers made concrete at a single eigenvalue.
//!
//! At a simple eigenvalue the eigenfunction `s(x)` (the initial-value
//! solution, normalized to 1 at zero) and the companion terminal-value
//! solution `psi(x)` both solve the same boundary value problem, so they are
//! proportional: `psi = beta s`. That constant is the weight number. This
//! example extracts `beta` by least squares over the whole grid and then
//! shows the pointwise ratio `psi(x) / s(x)` sitting on the same value at
//! arbitrary nodes.

use idospec::chareq::{find_eigenvalues, SearchBox};
use idospec::presets;
use idospec::specdata::{chains, weights_with_residuals};

fn main() -> Result<(), idospec::Error> {
    let p = presets::smooth1(2000)?;
    let region = SearchBox::new(3.0, 3.6, -0.7, -0.2)?;
    let eigs = find_eigenvalues(&p, &region, 1e-10)?;
    let e = eigs[0];
    println!(
        "eigenvalue {:.9} {:+.9}i, multiplicity {}",
        e.lambda.re, e.lambda.im, e.multiplicity
    );

    let (s, psi) = chains(&p, &e)?;
    let report = weights_with_residuals(&s, &psi)?;
    let beta = report.betas[0];
    println!(
        "weight number beta = {:.9} {:+.9}i  (relation residual {:.3e})",
        beta.re, beta.im, report.level_residuals[0]
    );

    println!("{:>10}  {:>24}", "x", "psi(x) / s(x)");
    let grid = p.grid();
    for k in [200, 700, 1200, 1700] {
        let ratio = psi.members[0].value(k) / s.members[0].value(k);
        println!(
            "{:>10.6}  {:>11.9} {:+.9}i",
            grid.node(k),
            ratio.re,
            ratio.im
        );
    }
    println!("the ratio is flat across the interval: psi is beta times s");
    Ok(())
}
