//! Discrete Hilbert transform toolkit.
//!
//! This crate implements the discrete Hilbert transform `H`, its shifted
//! variant `H_d`, the one-parameter family `T_t` that extends translation to
//! real time, the Kak transform `K` and its complement `Ktilde`, and the
//! rotation family `U_t = cos(t) I + sin(t) K`, all acting on finitely
//! supported bi-infinite complex sequences.
//!
//! Layout:
//! - [`seq`]: sequences, index windows, CSV interchange.
//! - [`kernels`]: closed-form cotangent/cosecant sums, their partial-sum
//!   evaluators, and convolution kernel sampling.
//! - [`ops`]: exact direct-summation operator appliers plus analytic
//!   diagnostics (adjoint pairing, exact norms of `T_t a`, trajectories).
//! - [`fastconv`]: FFT fast paths for the convolution operators and a small
//!   benchmark harness.
//! - [`spectral`]: truncated matrices, l2/lp operator-norm estimation,
//!   resolvent solves.
//! - [`rng`]: seeded test-vector generation shared by the CLI and tests.
//!
//! All numerics are deterministic: summation orders are fixed, random
//! draws go through [`rng::substream`], and nothing is parallelized.

pub mod error;
pub mod fastconv;
pub mod kernels;
pub mod ops;
pub mod rng;
pub mod seq;
pub mod spectral;
mod sum;

pub use error::{Error, Result};
pub use ops::OperatorSpec;
pub use seq::{Parity, Sequence, Window};
