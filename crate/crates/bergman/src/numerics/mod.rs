//! Log-space scalar arithmetic and the special functions every other module
//! leans on: signed log-space reals, log-gamma, the upper incomplete gamma
//! for arbitrary real parameter, and two tiers of numerical integration.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! and freely shared across threads.

mod gamma;
mod log_real;
mod quad;

pub use gamma::{log_gamma, upper_incomplete_gamma_log};
pub(crate) use gamma::regularized_lower_ln;
pub use log_real::{log_sum_exp, LogReal};
pub use quad::{
    quad_adaptive, quad_adaptive_with_budget, quad_oracle, QuadResult, DEFAULT_BUDGET, DEFAULT_TOL,
};
