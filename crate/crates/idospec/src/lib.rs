//! Forward and inverse spectral problems for first-order integro-differential
//! operators with separable Volterra kernels.
//!
//! The operator under study acts on `[0, pi]` as
//!
//! ```text
//! (l y)(x) = i y'(x) + integral_0^x R(x) V(t) y(t) dt,
//! ```
//!
//! with complex-valued continuous coefficient factors `R` and `V`. Its
//! spectral theory runs through an entire characteristic function
//! `Delta(lambda)` whose zeros are the eigenvalues of the boundary value
//! problem `l y = lambda y`, `y(pi) = 0`; each eigenvalue carries weight
//! numbers built from a companion terminal-value solution. The crate covers:
//!
//! * **Forward solves** ([`forward`]): the initial- and terminal-value
//!   problems, their lambda-derivative chains, and large-`|lambda|` decay
//!   diagnostics.
//! * **Characteristic equation** ([`chareq`]): `Delta` and its companion
//!   `Delta_0`, the exact cross-solver identity between them, and a certified
//!   eigenvalue search combining the argument principle with Newton polish.
//! * **Spectral data** ([`specdata`]): weight numbers for simple and multiple
//!   eigenvalues and serialization of the paired spectrum.
//! * **Inverse problem** ([`inverse`]): least-squares recovery of coefficient
//!   factors from spectral data, including a reproducible demonstration that
//!   the data cannot see `V` wherever `R` vanishes.
//!
//! Everything is deterministic: identical inputs produce identical bytes in
//! every exported artifact.

pub mod chareq;
pub mod cli;
pub mod error;
pub mod forward;
pub mod grid;
pub mod inverse;
pub mod presets;
pub mod problem;
pub mod specdata;
mod zmath;

pub use error::{Error, Result};
pub use grid::{ComplexSamples, Grid};
pub use problem::{Endpoints, Problem};
