//! Median rank-1 lattice approximation of periodic functions in weighted
//! Korobov spaces.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`korobov`]: product weights, the weight function `r_{2α,γ}` and exact
//!   spectral test functions.
//! - [`index_set`]: hyperbolic cross enumeration and cardinality bounds.
//! - [`lattice`]: rank-1 lattice nodes, seeded generating vectors and shifts,
//!   and the shifted lattice coefficient estimator.
//! - [`median_approx`]: the repetition loop, componentwise complex median
//!   and the resulting approximation, plus Monte-Carlo verification hooks.
//! - [`params`]: primes, budget-driven choice of `N`, `R` and `τ`, bound
//!   evaluation and condition reports.
//! - [`convergence`]: exact squared L2 error via Parseval and log-log rate fits.
//!
//! Everything is deterministic given a master seed. Repetitions are exposed
//! individually ([`median_approx::Plan::run_repetition`]) so that callers with a
//! thread pool can map them in parallel and reduce with
//! [`median_approx::Plan::aggregate`].
#![no_std]
#![warn(missing_docs)]
// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod convergence;
pub mod index_set;
pub mod korobov;
pub mod lattice;
pub mod math;
pub mod median_approx;
pub mod params;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;
