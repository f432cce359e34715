//! Subcommand drivers: resolve a configuration, run one pipeline stage,
//! write its artifacts, and map failures to stable exit codes.

use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::chareq::{
    find_eigenvalues_certified, identity_residual_grid, write_eigenvalues_csv, SearchBox,
};
use crate::cli::config::RunConfig;
use crate::error::{Error, Result};
use crate::forward::{solve_eta, solve_phi};
use crate::grid::{fmt_f64, ComplexSamples, Grid};
use crate::inverse::{
    example2_check, project_cosine, recover, uniqueness_probe, BasisParams, FitOptions,
    ProbeOutcome, RecoverOptions,
};
use crate::presets;
use crate::problem::Problem;
use crate::specdata::{spectral_data, SpectralData};

pub const EXIT_OK: i32 = 0;
/// A demonstration ran to completion but its verdict is FAIL.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Configuration, flag or input-file shape errors.
pub const EXIT_CONFIG: i32 = 2;
/// Forward-solver or root-finding failures.
pub const EXIT_SOLVER: i32 = 3;
/// The eigenvalue count could not be certified complete.
pub const EXIT_COMPLETENESS: i32 = 4;
/// Spectral-data chain relations failed to hold.
pub const EXIT_RELATION: i32 = 5;
/// Recovery finished without meeting a convergence test.
pub const EXIT_NOT_CONVERGED: i32 = 6;

/// Stable exit-code classification of library errors.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Malformed { .. }
        | Error::InvalidBox(_)
        | Error::InvalidGridSize(_)
        | Error::InvalidRecovery(_)
        | Error::GeometryViolation(_) => EXIT_CONFIG,
        Error::CompletenessMismatch { .. }
        | Error::BoundaryZeroSuspected { .. }
        | Error::PhaseSumInconsistent { .. } => EXIT_COMPLETENESS,
        Error::RelationViolated { .. }
        | Error::DegenerateChain { .. }
        | Error::ChainLengthMismatch { .. }
        | Error::ChainLambdaMismatch { .. } => EXIT_RELATION,
        _ => EXIT_SOLVER,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "idospec",
    version,
    about = "Forward and inverse spectral computations for a first-order integro-differential operator on [0, pi]"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the initial- and terminal-value problems; write solution traces
    Forward(CommonArgs),
    /// Run the certified eigenvalue search with an identity cross-check report
    Eigs(CommonArgs),
    /// Export eigenvalues with weight numbers as spectral-data CSV
    Specdata(CommonArgs),
    /// Recover cosine coefficients from target spectral data
    Invert(CommonArgs),
    /// Demonstrate the dead-zone blind spot of the spectral data
    Example2(CommonArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Path to a `key = value` configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the grid resolution (even, at least 2)
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Override the search box
    #[arg(long = "box", num_args = 4, value_names = ["RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"], allow_negative_numbers = true)]
    pub box_bounds: Option<Vec<f64>>,
    /// Override the eigenvalue tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory for artifacts
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Defaults, overlaid by the config file, overlaid by flags.
pub fn resolve_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    if let Some(n) = args.grid_n {
        cfg.grid_n = n;
    }
    if let Some(b) = &args.box_bounds {
        cfg.search = Some(SearchBox::new(b[0], b[1], b[2], b[3])?);
    }
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Builds the configured problem; coefficient files take precedence over
/// the preset name.
pub fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    if let (Some(r_path), Some(v_path)) = (&cfg.r_file, &cfg.v_file) {
        let grid = Grid::new(cfg.grid_n)?;
        let r = ComplexSamples::read_csv(r_path, grid)?;
        let v = ComplexSamples::read_csv(v_path, grid)?;
        return Problem::new(r, v);
    }
    match cfg.preset.as_str() {
        "zero-kernel" => presets::zero_kernel(cfg.grid_n),
        "smooth-1" => presets::smooth1(cfg.grid_n),
        "example2" => Ok(presets::example2(cfg.grid_n)?.base),
        other => Err(Error::Config(format!(
            "unknown preset `{other}` (expected zero-kernel, smooth-1 or example2)"
        ))),
    }
}

fn search_region(cfg: &RunConfig) -> SearchBox {
    cfg.search.unwrap_or_else(|| {
        if cfg.preset == "example2" && cfg.r_file.is_none() {
            presets::example2_search_box()
        } else {
            SearchBox::default()
        }
    })
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    Ok(())
}

fn fmt_complex(z: num_complex::Complex64) -> String {
    format!("({}, {})", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn cmd_forward(cfg: &RunConfig) -> Result<i32> {
    let p = build_problem(cfg)?;
    ensure_out_dir(cfg)?;
    for (i, &lambda) in cfg.lambdas.iter().enumerate() {
        let phi_path = cfg.out.join(format!("phi_{i}.csv"));
        let eta_path = cfg.out.join(format!("eta_{i}.csv"));
        solve_phi(&p, lambda, cfg.order)?.write_csv(&phi_path)?;
        solve_eta(&p, lambda, cfg.order)?.write_csv(&eta_path)?;
        println!(
            "{}, {}: lambda = {}, order {}",
            phi_path.display(),
            eta_path.display(),
            fmt_complex(lambda),
            cfg.order
        );
    }
    Ok(EXIT_OK)
}

pub fn cmd_eigs(cfg: &RunConfig) -> Result<i32> {
    let p = build_problem(cfg)?;
    let region = search_region(cfg);
    let cert = find_eigenvalues_certified(&p, &region, cfg.tol)?;
    ensure_out_dir(cfg)?;
    write_eigenvalues_csv(cfg.out.join("eigenvalues.csv"), &cert.eigenvalues)?;

    let samples = identity_residual_grid(&p, &region, cfg.identity_nx, cfg.identity_ny)?;
    let mut report = String::from("re_lambda,im_lambda,residual\n");
    let mut max_residual: f64 = 0.0;
    for (lambda, residual) in &samples {
        let _ = writeln!(
            report,
            "{},{},{}",
            fmt_f64(lambda.re),
            fmt_f64(lambda.im),
            fmt_f64(*residual)
        );
        max_residual = max_residual.max(*residual);
    }
    std::fs::write(cfg.out.join("identity_report.csv"), report)?;

    let boxed = |b: &SearchBox| {
        format!(
            "re in [{}, {}], im in [{}, {}]",
            fmt_f64(b.re_min()),
            fmt_f64(b.re_max()),
            fmt_f64(b.im_min()),
            fmt_f64(b.im_max())
        )
    };
    let mut certificate = String::new();
    let _ = writeln!(certificate, "requested box: {}", boxed(&region));
    let _ = writeln!(certificate, "effective box: {}", boxed(&cert.effective_box));
    let _ = writeln!(certificate, "boundary winding: {}", cert.outer_winding);
    let _ = writeln!(
        certificate,
        "eigenvalues: {} distinct, multiplicity sum {}",
        cert.eigenvalues.len(),
        cert.multiplicity_sum()
    );
    let _ = writeln!(
        certificate,
        "max identity residual on a {}x{} lattice: {}",
        cfg.identity_nx,
        cfg.identity_ny,
        fmt_f64(max_residual)
    );
    let _ = writeln!(
        certificate,
        "scope: the count is certified for the effective box only; nothing is claimed outside it"
    );
    std::fs::write(cfg.out.join("certificate.txt"), &certificate)?;
    print!("{certificate}");
    Ok(EXIT_OK)
}

pub fn cmd_specdata(cfg: &RunConfig) -> Result<i32> {
    let p = build_problem(cfg)?;
    let region = search_region(cfg);
    let sd = spectral_data(&p, &region, cfg.tol)?;
    ensure_out_dir(cfg)?;
    sd.save_csv(cfg.out.join("spectral_data.csv"))?;
    println!(
        "wrote {} spectral-data entries in {} runs",
        sd.len(),
        sd.runs().len()
    );
    Ok(EXIT_OK)
}

pub fn cmd_invert(cfg: &RunConfig) -> Result<i32> {
    let target_path = cfg.target_file.as_ref().ok_or_else(|| {
        Error::Config("invert needs target_file pointing at spectral-data CSV".into())
    })?;
    let target = SpectralData::load_csv(target_path)?;
    let p = build_problem(cfg)?;
    let init = BasisParams::new(
        project_cosine(p.r(), cfg.basis_k)?,
        project_cosine(p.v(), cfg.basis_k)?,
    )?;
    let mut fit = FitOptions::new(cfg.grid_n, search_region(cfg), cfg.fit_m);
    fit.w_lambda = cfg.w_lambda;
    fit.w_beta = cfg.w_beta;
    fit.tol = cfg.tol;
    fit.strategy = cfg.strategy;
    let mut opts = RecoverOptions::new(fit);
    opts.mu = cfg.mu;
    opts.damping_init = cfg.damping;
    opts.max_iter = cfg.max_iter;
    opts.fd_step = cfg.fd_step;
    let report = recover(&target, &init, &opts)?;

    ensure_out_dir(cfg)?;
    let mut coefficients = String::from("k,re_r,im_r,re_v,im_v\n");
    for k in 0..report.params.basis_size() {
        let r = report.params.r_coef()[k];
        let v = report.params.v_coef()[k];
        let _ = writeln!(
            coefficients,
            "{k},{},{},{},{}",
            fmt_f64(r.re),
            fmt_f64(r.im),
            fmt_f64(v.re),
            fmt_f64(v.im)
        );
    }
    std::fs::write(cfg.out.join("coefficients.csv"), coefficients)?;
    let mut log = String::from("iteration,cost\n");
    for (i, cost) in report.cost_history.iter().enumerate() {
        let _ = writeln!(log, "{i},{}", fmt_f64(*cost));
    }
    std::fs::write(cfg.out.join("cost_log.csv"), log)?;

    println!(
        "iterations: {}, final cost: {}, converged: {}",
        report.iterations,
        fmt_f64(report.final_cost),
        report.converged
    );
    println!("stop reason: {}", report.stop_reason);
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// Dead-zone data agreement must reach this level for a PASS verdict.
const BLIND_TOL: f64 = 1e-7;
/// The live-zone control perturbation must separate by at least this much.
const CONTROL_MIN: f64 = 1e-4;

pub fn cmd_example2(cfg: &RunConfig) -> Result<i32> {
    let fx = presets::example2(cfg.grid_n)?;
    let region = cfg.search.unwrap_or(fx.search);
    let blind = example2_check(fx.cut, fx.base.r(), fx.base.v(), fx.tilde.v(), &region)?;
    let control = uniqueness_probe(&fx.base, &fx.control, &region)?;
    let (control_index, control_magnitude) = match control {
        ProbeOutcome::Indistinguishable => (0, 0.0),
        ProbeOutcome::FirstDifference { index, magnitude } => (index, magnitude),
    };
    let pass = blind.max_lambda_diff < BLIND_TOL
        && blind.max_beta_diff < BLIND_TOL
        && blind.max_delta_diff < BLIND_TOL
        && control_magnitude > CONTROL_MIN;

    let mut report = String::new();
    let _ = writeln!(
        report,
        "dead-zone pair over {} entries:",
        blind.entries
    );
    let _ = writeln!(
        report,
        "  max |lambda - lambda~|: {}",
        fmt_f64(blind.max_lambda_diff)
    );
    let _ = writeln!(
        report,
        "  max |beta - beta~|:     {}",
        fmt_f64(blind.max_beta_diff)
    );
    let _ = writeln!(
        report,
        "  max |Delta - Delta~|:   {}",
        fmt_f64(blind.max_delta_diff)
    );
    let _ = writeln!(
        report,
        "live-zone control: first differing entry {control_index}, magnitude {}",
        fmt_f64(control_magnitude)
    );
    let _ = writeln!(
        report,
        "verdict: {} (dead-zone agreement < {BLIND_TOL:e}, control separation > {CONTROL_MIN:e})",
        if pass { "PASS" } else { "FAIL" }
    );
    ensure_out_dir(cfg)?;
    std::fs::write(cfg.out.join("example2_report.txt"), &report)?;
    print!("{report}");
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Runs one parsed command line; `Err` is for the caller to classify.
pub fn dispatch(cli: &Cli) -> Result<i32> {
    let (args, runner): (&CommonArgs, fn(&RunConfig) -> Result<i32>) = match &cli.command {
        Command::Forward(a) => (a, cmd_forward),
        Command::Eigs(a) => (a, cmd_eigs),
        Command::Specdata(a) => (a, cmd_specdata),
        Command::Invert(a) => (a, cmd_invert),
        Command::Example2(a) => (a, cmd_example2),
    };
    let cfg = resolve_config(args)?;
    runner(&cfg)
}

/// Entry point for the binary: parse, run, classify failures.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn test_config(out: &std::path::Path) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.preset = "zero-kernel".into();
        cfg.grid_n = 64;
        cfg.out = out.to_path_buf();
        cfg
    }

    #[test]
    fn exit_codes_classify_error_kinds() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(
            exit_code(&Error::Malformed {
                line: 3,
                message: "x".into()
            }),
            EXIT_CONFIG
        );
        assert_eq!(
            exit_code(&Error::CompletenessMismatch {
                found: 1,
                expected: 2
            }),
            EXIT_COMPLETENESS
        );
        assert_eq!(
            exit_code(&Error::RelationViolated {
                level: 0,
                residual: 1.0
            }),
            EXIT_RELATION
        );
        assert_eq!(
            exit_code(&Error::NewtonStagnation {
                lambda: Complex64::ZERO,
                iters: 100
            }),
            EXIT_SOLVER
        );
    }

    #[test]
    fn flags_override_file_which_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "grid_n = 400\ntol = 1e-8\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            grid_n: Some(200),
            box_bounds: None,
            tol: None,
            out: None,
        };
        let cfg = resolve_config(&args).unwrap();
        assert_eq!(cfg.grid_n, 200, "flag beats file");
        assert_eq!(cfg.tol, 1e-8, "file beats default");
        assert_eq!(cfg.max_iter, 100, "untouched default survives");
    }

    #[test]
    fn unknown_preset_is_a_config_error() {
        let mut cfg = RunConfig::default();
        cfg.preset = "smoooth-1".into();
        match build_problem(&cfg) {
            Err(e @ Error::Config(_)) => assert_eq!(exit_code(&e), EXIT_CONFIG),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn coefficient_files_override_the_preset() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(32).unwrap();
        let r = ComplexSamples::constant(grid, Complex64::new(0.5, 0.0));
        let v = ComplexSamples::constant(grid, Complex64::ONE);
        let r_path = dir.path().join("r.csv");
        let v_path = dir.path().join("v.csv");
        r.write_csv(&r_path).unwrap();
        v.write_csv(&v_path).unwrap();
        let mut cfg = RunConfig::default();
        cfg.grid_n = 32;
        cfg.r_file = Some(r_path);
        cfg.v_file = Some(v_path);
        let p = build_problem(&cfg).unwrap();
        assert_eq!(p.r().value(7), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn forward_writes_one_trace_pair_per_lambda() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = test_config(dir.path());
        cfg.lambdas = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, -0.5)];
        assert_eq!(cmd_forward(&cfg).unwrap(), EXIT_OK);
        for name in ["phi_0.csv", "eta_0.csv", "phi_1.csv", "eta_1.csv"] {
            let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
            assert_eq!(text.lines().count(), 66, "{name} should have header + 65 rows");
        }
    }

    #[test]
    fn forward_trace_of_the_trivial_kernel_is_a_plane_wave() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = test_config(dir.path());
        cfg.grid_n = 400;
        cmd_forward(&cfg).unwrap();
        let grid = Grid::new(400).unwrap();
        let phi = ComplexSamples::read_csv(dir.path().join("phi_0.csv"), grid).unwrap();
        let exact = ComplexSamples::from_fn(grid, |x| Complex64::new(0.0, -x).exp()).unwrap();
        let err = phi.zip_with(&exact, |a, b| a - b).unwrap().max_abs();
        assert!(err < 1e-8, "plane-wave deviation {err:.3e}");
    }

    #[test]
    fn eigs_on_the_trivial_kernel_certifies_an_empty_spectrum() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = test_config(dir.path());
        cfg.grid_n = 400;
        cfg.search = Some(SearchBox::new(-3.0, 3.0, -2.0, 1.0).unwrap());
        assert_eq!(cmd_eigs(&cfg).unwrap(), EXIT_OK);
        let eigen = std::fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
        assert_eq!(eigen, "index,re_lambda,im_lambda,multiplicity,residual\n");
        let cert = std::fs::read_to_string(dir.path().join("certificate.txt")).unwrap();
        assert!(cert.contains("boundary winding: 0"), "{cert}");
        assert!(dir.path().join("identity_report.csv").exists());
    }

    #[test]
    fn specdata_row_count_matches_the_multiplicity_sum() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::default();
        cfg.grid_n = 800;
        cfg.out = dir.path().to_path_buf();
        cfg.search = Some(SearchBox::new(2.8, 3.8, -0.9, -0.1).unwrap());
        assert_eq!(cmd_specdata(&cfg).unwrap(), EXIT_OK);
        let sd = SpectralData::load_csv(dir.path().join("spectral_data.csv")).unwrap();
        assert_eq!(sd.len(), 1);
        assert_eq!(sd.runs().len(), 1);
    }

    #[test]
    fn invert_without_a_target_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = test_config(dir.path());
        match cmd_invert(&cfg) {
            Err(e) => assert_eq!(exit_code(&e), EXIT_CONFIG),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
