//! polyloc-core: exact simulation of quantum polygon networks with
//! independent two-qubit sources and fixed four-outcome joint measurements,
//! plus evaluation, scanning, and search of the associated nonlinear
//! n-locality witnesses sqrt|I1| + sqrt|I2| <= 1.
//!
//! Modules:
//! - [`linalg`]: dense complex linear algebra helpers (Kronecker products,
//!   qubit permutation, partial trace, Bloch/correlation decomposition).
//! - [`states`]: two-qubit source states (Bell, Schmidt, separable, noisy
//!   gate, depolarized, Bell-diagonal).
//! - [`povm`]: four-outcome joint measurement bases.
//! - [`network`]: ring wiring and exact joint outcome distributions.
//! - [`signs`]: sign functions, witness evaluation, exhaustive sign search.
//! - [`lhv`]: classical n-local hidden-variable models and sampling.
//! - [`scan`]: grid sweeps, threshold bisection, derivative-free maximization.
//! - [`detect`]: entanglement detection and the linear-chain comparison.
//! - [`report`]: fitted-scale comparison against transcribed closed forms.
//! - [`par`]: rayon-backed data parallelism with a sequential fallback.

pub mod detect;
pub mod error;
pub mod lhv;
pub mod linalg;
pub mod network;
pub mod par;
pub mod povm;
pub mod report;
pub mod scan;
pub mod signs;
pub mod states;

pub use error::{Error, Result};
