//! End-to-end checks of the spectral-data pipeline on real spectra: search,
//! weight extraction, serialization, and exact covariance under rescaling of
//! the two kernel factors.

use idospec::chareq::{find_eigenvalues_certified, SearchBox};
use idospec::specdata::{flatten_index, spectral_data, SpectralData};
use idospec::{presets, Problem};

#[test]
fn spectral_data_survives_the_csv_round_trip_bit_for_bit() {
    let p = presets::smooth1(1000).unwrap();
    let region = SearchBox::new(-8.0, 8.0, -6.0, 2.0).unwrap();
    let data = spectral_data(&p, &region, 1e-10).unwrap();
    assert!(data.len() >= 5, "unexpectedly sparse box: {}", data.len());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectral_data.csv");
    data.save_csv(&path).unwrap();
    let reloaded = SpectralData::load_csv(&path).unwrap();

    assert_eq!(data.entries(), reloaded.entries());
    assert_eq!(data.runs(), reloaded.runs());
}

#[test]
fn nested_boxes_agree_on_shared_roots() {
    let p = presets::smooth1(1000).unwrap();
    let inner = SearchBox::new(0.0, 8.0, -2.0, 0.0).unwrap();
    let outer = SearchBox::new(-8.0, 8.0, -6.0, 2.0).unwrap();
    let small = spectral_data(&p, &inner, 1e-10).unwrap();
    let large = spectral_data(&p, &outer, 1e-10).unwrap();
    for &(lambda, _) in small.entries() {
        let nearest = large
            .entries()
            .iter()
            .map(|&(l, _)| (l - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-8, "root {lambda} missing from the outer box");
    }
}

#[test]
fn rescaling_the_kernel_factors_preserves_roots_and_scales_weights() {
    let base = presets::smooth1(1000).unwrap();
    let scaled = Problem::new(base.r().map(|z| 2.0 * z), base.v().map(|z| 0.5 * z)).unwrap();
    let region = SearchBox::new(-8.0, 8.0, -6.0, 2.0).unwrap();

    let data = spectral_data(&base, &region, 1e-10).unwrap();
    let data_scaled = spectral_data(&scaled, &region, 1e-10).unwrap();
    assert_eq!(data.len(), data_scaled.len());

    for (&(l, b), &(ls, bs)) in data.entries().iter().zip(data_scaled.entries()) {
        assert!((l - ls).norm() < 1e-8, "root moved: {l} vs {ls}");
        assert!(
            (bs - 2.0 * b).norm() < 1e-6 * b.norm(),
            "weight at {l} did not double: {b} vs {bs}"
        );
    }
}

#[test]
fn simple_spectra_produce_singleton_runs_and_a_contiguous_index() {
    let p = presets::smooth1(1000).unwrap();
    let region = SearchBox::new(-8.0, 8.0, -6.0, 2.0).unwrap();
    let cert = find_eigenvalues_certified(&p, &region, 1e-10).unwrap();
    let data = spectral_data(&p, &region, 1e-10).unwrap();

    assert_eq!(data.runs().len(), data.len());
    for (i, run) in data.runs().iter().enumerate() {
        assert_eq!(run.start, i + 1);
        assert_eq!(run.multiplicity, 1);
    }

    let (index, assignments) = flatten_index(&cert.eigenvalues);
    let expected: Vec<usize> = (1..=cert.eigenvalues.len()).collect();
    assert_eq!(index, expected);
    for a in &assignments {
        assert_eq!(a.nu, 0);
    }
}
