//! Moment transform of radial weights on the unit interval.
//!
//! A [`RadialWeight`] is the two-parameter family `nu(r) = r^t exp(-c/r)`
//! on `(0, 1)`. Its moment transform
//!
//! ```text
//! M_nu(alpha) = int_0^1 r^alpha nu(r) dr
//! ```
//!
//! carries the whole library: kernel coefficients are reciprocal moments,
//! monomial p-norms are moments at index `np + 1`, and the test-family ratio
//! that witnesses L^p unboundedness is a product of four of them.
//!
//! For `c > 0` the exact identity
//! `M = c^{alpha+t+1} G(-alpha-t-1, c)` evaluates the transform through the
//! upper incomplete gamma entirely in log space, so indices of order
//! thousands — where the values dwarf `f64` range — cost the same as small
//! ones. For `c = 0` the transform is `1/(alpha+t+1)`, finite exactly when
//! `alpha + t > -1`; negative-index monomials fall out of the space, which
//! is the structural contrast the exponential weights exist to break.
//!
//! The area normalization is genuine Lebesgue measure: `dA` carries its
//! `2 pi` angular factor explicitly, so reproducing identities hold with
//! constant 1 rather than "up to absolute constants".

use crate::error::{Error, Result};
use crate::numerics::{
    log_sum_exp, regularized_lower_ln, upper_incomplete_gamma_log, LogReal,
};

/// The radial weight `nu(r) = r^t exp(-c/r)` on `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RadialWeight {
    t: f64,
    c: f64,
}

impl RadialWeight {
    /// Requires `c >= 0`.
    pub fn new(t: f64, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!(
                "radial weight requires finite t and c >= 0, got t = {t}, c = {c}"
            )));
        }
        Ok(RadialWeight { t, c })
    }

    /// The exponentially vanishing weight `exp(-1/r)`.
    pub fn exponential() -> Self {
        RadialWeight { t: 0.0, c: 1.0 }
    }

    /// The index-shifted exponential weight `r^2 exp(-1/r)`.
    pub fn exponential_shifted() -> Self {
        RadialWeight { t: 2.0, c: 1.0 }
    }

    /// Pure polynomial vanishing `r^t`.
    pub fn polynomial(t: f64) -> Result<Self> {
        RadialWeight::new(t, 0.0)
    }

    /// The unweighted case.
    pub fn unweighted() -> Self {
        RadialWeight { t: 0.0, c: 0.0 }
    }

    /// Fiber weight `exp(-(2m+2)/r)` arising from the `m`-th monomial fiber
    /// of the exponential Hartogs domain.
    pub fn hinf_fiber(m: u32) -> Self {
        RadialWeight {
            t: 0.0,
            c: 2.0 * m as f64 + 2.0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Pointwise value `r^t exp(-c/r)` in log space.
    pub fn eval_log(&self, r: f64) -> LogReal {
        assert!(r > 0.0, "radial weight evaluated at r <= 0");
        LogReal::from_ln(self.t * r.ln() - self.c / r)
    }

    /// Whether `M(alpha)` is finite for this weight.
    pub fn admits_moment(&self, alpha: f64) -> bool {
        self.c > 0.0 || alpha + self.t > -1.0
    }
}

/// A single moment evaluation request.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentQuery {
    pub weight: RadialWeight,
    pub alpha: f64,
}

/// `M_nu(alpha) = int_0^1 r^alpha nu(r) dr` as a positive `LogReal`.
pub fn moment(q: MomentQuery) -> Result<LogReal> {
    moment_of(&q.weight, q.alpha)
}

pub fn moment_of(weight: &RadialWeight, alpha: f64) -> Result<LogReal> {
    let beta = alpha + weight.t;
    if weight.c == 0.0 {
        if beta <= -1.0 {
            return Err(Error::DivergentMoment {
                alpha,
                t: weight.t,
                c: weight.c,
            });
        }
        return Ok(LogReal::from_ln(-(beta + 1.0).ln()));
    }
    // substitution x = c/r: M = c^{beta+1} G(-beta-1, c)
    let g = upper_incomplete_gamma_log(-beta - 1.0, weight.c)?;
    Ok(LogReal::from_ln((beta + 1.0) * weight.c.ln() + g.logmag()))
}

/// Integration-by-parts defect `(alpha+1) I(alpha) + I(alpha-1) - e^{-1}`
/// for the exponential weight; vanishes identically in exact arithmetic.
///
/// For `alpha <= -3` the two moments are factorially large and the defect
/// is recovered from the factored form
/// `G(s+1) [P(s, 1) - P(s+1, 1)] - e^{-1}` with `s = -alpha - 1`, which
/// cancels the common gamma scale symbolically instead of subtracting two
/// astronomically large values.
///
/// Panics if `alpha == -1`.
pub fn recurrence_defect(alpha: f64) -> f64 {
    assert!(alpha != -1.0, "recurrence defect undefined at alpha = -1");
    let e_inv = (-1.0f64).exp();
    if alpha >= -2.0 {
        // magnitudes stay on the f64 scale; direct signed log-space sum
        let w = RadialWeight::exponential();
        let i_a = moment_of(&w, alpha).expect("finite moment");
        let i_am1 = moment_of(&w, alpha - 1.0).expect("finite moment");
        let sum = log_sum_exp(&[
            i_a * LogReal::from_real(alpha + 1.0),
            i_am1,
            LogReal::from_real(-e_inv),
        ]);
        sum.to_real()
    } else {
        let s = -alpha - 1.0; // s >= 2
        let ln_p_s = regularized_lower_ln(s, 1.0);
        let ln_p_s1 = regularized_lower_ln(s + 1.0, 1.0);
        // ln(P(s) - P(s+1)) without leaving log scale
        let ln_dp = ln_p_s + (-(ln_p_s1 - ln_p_s).exp()).ln_1p();
        let ln_g = crate::numerics::log_gamma(s + 1.0).expect("s + 1 > 0");
        e_inv * (ln_g + ln_dp + 1.0).exp_m1()
    }
}

/// `(alpha+1) I(alpha)` for the exponential weight; converges to `e^{-1}`
/// as `alpha` grows, with residual exactly `I(alpha-1)`.
pub fn asymptotic_pos_probe(alpha: f64) -> f64 {
    assert!(alpha > 0.0, "positive-side probe requires alpha > 0");
    let i_a = moment_of(&RadialWeight::exponential(), alpha).expect("finite moment");
    (alpha + 1.0) * i_a.to_real()
}

/// `I(-alpha) / G(alpha - 1)` for the exponential weight, evaluated fully in
/// log space; converges to 1 as `alpha` grows.
pub fn asymptotic_neg_probe(alpha: f64) -> f64 {
    assert!(alpha > 2.0, "negative-side probe requires alpha > 2");
    asymptotic_neg_log_ratio(alpha).exp()
}

/// `ln` of the ratio above. The deviation from 1 shrinks below every f64
/// epsilon long before alpha reaches 50, so tolerance checks must work with
/// this logarithm (or [`asymptotic_neg_defect`]) rather than the ratio.
pub fn asymptotic_neg_log_ratio(alpha: f64) -> f64 {
    assert!(alpha > 2.0);
    let i_neg = moment_of(&RadialWeight::exponential(), -alpha).expect("finite moment");
    let lg = crate::numerics::log_gamma(alpha - 1.0).expect("alpha > 2");
    i_neg.logmag() - lg
}

/// `I(-alpha) / G(alpha - 1) - 1`, exact at sub-epsilon scales.
///
/// The deviation equals `-P(alpha-1, 1)` (regularized lower incomplete
/// gamma), so it is recovered from the series for `P` directly rather than
/// from a log difference, which would absorb anything below one ulp of the
/// log magnitude.
pub fn asymptotic_neg_defect(alpha: f64) -> f64 {
    assert!(alpha > 2.0);
    -regularized_lower_ln(alpha - 1.0, 1.0).exp()
}

/// `p`-th power of the `L^p` norm of the monomial `z^n` on the punctured
/// disc against the weight: `2 pi M_nu(np + 1)`.
pub fn monomial_p_norm(weight: &RadialWeight, n: i64, p: f64) -> Result<LogReal> {
    assert!(p > 0.0, "monomial_p_norm requires p > 0");
    let m = moment_of(weight, n as f64 * p + 1.0)?;
    Ok(m * LogReal::from_real(2.0 * std::f64::consts::PI))
}
