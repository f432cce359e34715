//! Spectral data: eigenvalues paired with weight numbers, exported as CSV.
//!
//! The spectral data of the problem is the flattened paired sequence
//! `{lambda_n, beta_n}`, where an `m`-fold eigenvalue occupies `m`
//! consecutive indices. The CSV serialization stores every float with 17
//! significant digits, so a load after a save reproduces the data bit for
//! bit - the export is safe to use as an exchange format between runs.

use idospec::chareq::SearchBox;
use idospec::presets;
use idospec::specdata::{spectral_data, SpectralData};

fn main() -> Result<(), idospec::Error> {
    let p = presets::smooth1(2000)?;
    let region = SearchBox::new(-8.0, 8.0, -6.0, 2.0)?;
    let sd = spectral_data(&p, &region, 1e-10)?;
    println!("{} entries in {} runs", sd.len(), sd.runs().len());
    println!("{:>4}  {:>24}  {:>24}", "n", "lambda", "beta");
    for (i, (lambda, beta)) in sd.entries().iter().enumerate() {
        println!(
            "{:>4}  {:>11.6} {:+.6}i  {:>11.6} {:+.6}i",
            i + 1,
            lambda.re,
            lambda.im,
            beta.re,
            beta.im
        );
    }

    let path = std::env::temp_dir().join("idospec_spectral_data_demo.csv");
    sd.save_csv(&path)?;
    let loaded = SpectralData::load_csv(&path)?;
    println!(
        "round trip through {} is bit-exact: {}",
        path.display(),
        loaded == sd
    );
    Ok(())
}
