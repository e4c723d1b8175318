//! Weighted Bergman kernels and `L^p` boundedness probes on the punctured
//! disc and Hartogs-triangle-type domains.
//!
//! The library is organized around the contrast between polynomially and
//! exponentially vanishing radial weights:
//!
//! * [`numerics`] — signed log-space scalars ([`LogReal`]), log-gamma, the
//!   upper incomplete gamma for arbitrary real parameter, and two tiers of
//!   quadrature.
//! * [`moments`] — the moment transform `M(alpha) = int r^alpha nu(r) dr`
//!   of the weight family `nu(r) = r^t exp(-c/r)`, its integration-by-parts
//!   recurrence, and both asymptotic regimes.
//! * [`kernels`] — weighted Bergman kernels: the Laurent-mode series on the
//!   punctured disc with certified truncation tails, closed forms for
//!   polynomial weights, transport to the Hartogs triangle, and the
//!   fiberwise kernel of the exponential Hartogs domain.
//! * [`lp_probe`] — the one-mode test family whose projection norm ratio
//!   admits a closed moment formula: divergence verdicts, predicted
//!   exponential rates, and the classical boundedness intervals for
//!   polynomial weights.
//! * [`geometry`] — domain membership, the biholomorphism onto the product
//!   model, cone ray scans of kernel growth, and an independent 2-D
//!   quadrature oracle.
//! * [`cli`] — deterministic parameter sweeps with CSV/JSON emission,
//!   backing the `bergman` binary.
//!
//! Every capability has a runnable demonstration under `examples/`.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod lp_probe;
pub mod moments;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::LogReal;
