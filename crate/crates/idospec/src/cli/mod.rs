//! Command-line front end: every pipeline stage behind a stable surface of
//! subcommands, flags, flat config files and deterministic CSV artifacts.
//!
//! Subcommands: `forward`, `eigs`, `specdata`, `invert`, `example2`. Each
//! accepts `--config <path>` (a `key = value` file with `#` comments),
//! plus `--grid-n`, `--box re_min re_max im_min im_max`, `--tol` and
//! `--out <dir>` overrides. Exit codes: 0 success, 1 failed demonstration
//! verdict, 2 configuration error, 3 solver error, 4 completeness not
//! certified, 5 chain relation violated, 6 recovery not converged.

mod config;
mod run;

pub use config::RunConfig;
pub use run::{
    build_problem, cmd_eigs, cmd_example2, cmd_forward, cmd_invert, cmd_specdata, dispatch,
    exit_code, main_entry, resolve_config, Cli, Command, CommonArgs, EXIT_CHECK_FAILED,
    EXIT_COMPLETENESS, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_RELATION, EXIT_SOLVER,
};
