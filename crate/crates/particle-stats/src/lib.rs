//! Occupancy statistics for systems of energy levels: closed forms, exact
//! enumeration, and seeded sampling, each cross-checked against the others.
//!
//! The crate covers three families of distributions over occupation
//! vectors (n_1, ..., n_k):
//!
//! - independent per-level laws with geometric, Bernoulli, or capped
//!   (truncated-geometric) marginals, plus their fixed-total conditionals
//!   and partition sums ([`ensembles`]);
//! - a correlated family with one global coupling weight omega that tilts
//!   the vacuum against everything else ([`correlated`]);
//! - empirical versions of both via inverse-transform sampling and a
//!   birth/death Markov chain ([`sampling`]).
//!
//! [`thermo`] maps inverse temperature and chemical potentials to the
//! per-level activity q = e^{beta (mu - eps)} and carries the entropy and
//! grand-potential bookkeeping. [`oracle`] re-derives everything by
//! brute-force enumeration with certified truncation tails and exposes
//! [`oracle::run_verification_suite`], which compares every closed form in
//! the crate against those sums.
//!
//! Start with the `examples/` directory: each file is a runnable tour of
//! one capability (`cargo run --example occupancy_curves`, etc.). The same
//! functionality is scriptable through the thin `particle-stats` binary;
//! see [`cli`] or run `particle-stats --help`.

pub mod cli;
mod compositions;
pub mod correlated;
pub mod ensembles;
mod error;
mod numeric;
pub mod oracle;
pub mod sampling;
pub mod thermo;
pub mod types;

pub use compositions::{composition_count, compositions, Compositions};
pub use error::{Error, Result};
