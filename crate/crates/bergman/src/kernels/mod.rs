//! Weighted Bergman kernels: the Laurent-mode series on the punctured disc,
//! closed forms for polynomial weights, the diagonal comparator for the
//! exponential weight, transport to the Hartogs triangle through the
//! product model, and the fiberwise kernel of the exponential Hartogs
//! domain.
//!
//! All kernels carry true Lebesgue normalization: the unweighted disc
//! kernel is `1/(pi (1 - eta conj(xi))^2)` and every angular factor keeps
//! its `2 pi`, so reproducing identities hold with constant exactly 1.

mod coeff_table;
mod hinf;

pub use coeff_table::{KernelCoeffTable, TAIL_REL_TARGET};
pub use hinf::{hinf_kernel_diag, hinf_monomial_norm};

use crate::error::{Error, Result};
use crate::geometry::{in_hartogs, Point2};
use crate::moments::RadialWeight;
use crate::numerics::{log_sum_exp, LogReal};
use num_complex::Complex64;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Unweighted Bergman kernel of the unit disc, `1/(pi (1 - eta conj(xi))^2)`.
pub fn disc_kernel(eta: Complex64, xi: Complex64) -> Result<Complex64> {
    if eta.norm() >= 1.0 || xi.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "disc kernel arguments must lie in the open disc, got |eta| = {}, |xi| = {}",
            eta.norm(),
            xi.norm()
        )));
    }
    let d = Complex64::new(1.0, 0.0) - eta * xi.conj();
    Ok(Complex64::new(1.0 / std::f64::consts::PI, 0.0) / (d * d))
}

/// Builds the coefficient table for modes `n_min..=n_max`; see
/// [`KernelCoeffTable::build`].
pub fn build_coeff_table(weight: RadialWeight, n_min: i64, n_max: i64) -> Result<KernelCoeffTable> {
    KernelCoeffTable::build(weight, n_min, n_max)
}

/// Truncated kernel series at `(z, zeta)` plus certified tail; see
/// [`KernelCoeffTable::evaluate`].
pub fn punctured_kernel_eval(
    table: &KernelCoeffTable,
    z: Complex64,
    zeta: Complex64,
) -> Result<(Complex64, f64)> {
    table.evaluate(z, zeta)
}

/// Unique decomposition `t = s + 2k` with `s` in `(0, 2]` and `k` integer.
pub fn poly_decomposition(t: f64) -> (f64, i64) {
    let k = (t / 2.0 - 1.0).ceil();
    (t - 2.0 * k, k as i64)
}

/// Closed-form punctured-disc kernel for the weight `|z|^t`, `t > 0`, as a
/// function of `w = z conj(zeta)`:
///
/// ```text
/// (1 / 2 pi) [ s w^{-k-1} + (2 - s) w^{-k} ] / (1 - w)^2
/// ```
///
/// The surviving modes start at `n = -k - 1`; summing the explicit
/// coefficients `(2n + t + 2)/(2 pi)` from there gives exactly this form.
pub fn poly_weight_kernel_closed(t: f64, w: Complex64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "polynomial-weight closed form requires t > 0, got {t}"
        )));
    }
    let r = w.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!(
            "closed form requires 0 < |w| < 1, got |w| = {r}"
        )));
    }
    let (s, k) = poly_decomposition(t);
    let one = Complex64::new(1.0, 0.0);
    let denom = (one - w) * (one - w);
    let lead = w.powi(-(k as i32) - 1) * s;
    let sub = if s == 2.0 {
        Complex64::new(0.0, 0.0)
    } else {
        w.powi(-(k as i32)) * (2.0 - s)
    };
    Ok((lead + sub) / (denom * TWO_PI))
}

/// Diagonal comparison between the mode series for the exponential weight
/// and its closed-form shape `r^{-3} sinh(1/r) + (1 - r^2)^{-2}`.
#[derive(Clone, Debug)]
pub struct DiagonalComparator {
    pub r: f64,
    /// `2 pi B(r, r)` from the coefficient table (certified tail below
    /// [`TAIL_REL_TARGET`]).
    pub series_value: LogReal,
    /// `r^{-3} sinh(1/r) + (1 - r^2)^{-2}`.
    pub closed_form_value: LogReal,
}

impl DiagonalComparator {
    /// `series / closed`, meaningful whenever the comparator exists.
    pub fn ratio(&self) -> f64 {
        (self.series_value.ln() - self.closed_form_value.ln()).exp()
    }
}

/// `ln sinh(u)` without overflow: `u + ln(1 - e^{-2u}) - ln 2`.
fn ln_sinh(u: f64) -> f64 {
    debug_assert!(u > 0.0);
    u + (-(-2.0 * u).exp()).ln_1p() - std::f64::consts::LN_2
}

/// Builds the diagonal comparator at radius `r` in `(0, 1)`.
pub fn exp_diagonal_comparator(r: f64) -> Result<DiagonalComparator> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("comparator radius {r} outside (0, 1)")));
    }
    let table = KernelCoeffTable::sized_for(RadialWeight::exponential(), &[r])?;
    let (diag, _rel) = table.diagonal_log(r)?;
    let series_value = LogReal::from_ln(TWO_PI.ln() + diag.ln());
    let closed_form_value = log_sum_exp(&[
        LogReal::from_ln(-3.0 * r.ln() + ln_sinh(1.0 / r)),
        LogReal::from_ln(-2.0 * (-r * r).ln_1p()),
    ]);
    Ok(DiagonalComparator {
        r,
        series_value,
        closed_form_value,
    })
}

/// Log-space evaluator for the punctured-disc kernel diagonal of `weight`,
/// valid at every radius in `radii` (and any radius between the extremes).
/// Polynomial weights route to the closed form; exponential weights get a
/// coefficient table sized for the requested radii.
pub fn punctured_diagonal_evaluator(
    weight: &RadialWeight,
    radii: &[f64],
) -> Result<Box<dyn Fn(f64) -> Result<LogReal> + Send + Sync>> {
    if weight.c() == 0.0 {
        let t = weight.t();
        if t < 0.0 {
            return Err(Error::Domain(format!(
                "diagonal evaluator requires t >= 0 for pure-power weights, got {t}"
            )));
        }
        let (s, k) = poly_decomposition(t);
        Ok(Box::new(move |r: f64| {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Domain(format!("radius {r} outside (0, 1)")));
            }
            let ln_q = 2.0 * r.ln();
            let mut terms = vec![LogReal::from_ln(s.ln() - (k + 1) as f64 * ln_q)];
            if s != 2.0 {
                terms.push(LogReal::from_ln((2.0 - s).ln() - k as f64 * ln_q));
            }
            let numer = log_sum_exp(&terms);
            Ok(LogReal::from_ln(
                numer.ln() - TWO_PI.ln() - 2.0 * (-r * r).ln_1p(),
            ))
        }))
    } else {
        let table = KernelCoeffTable::sized_for(*weight, radii)?;
        Ok(Box::new(move |r: f64| {
            let (value, _rel) = table.diagonal_log(r)?;
            Ok(value)
        }))
    }
}

/// Weighted Bergman kernel of the Hartogs triangle for a weight that
/// depends on `|z_1|` only, through the product model:
///
/// ```text
/// B_H(z, zeta) = (z_1 conj(zeta_1))^{-1}
///              * B_*(z_1, zeta_1)            (weighted punctured disc)
///              * B_D(z_2/z_1, zeta_2/zeta_1) (unweighted disc)
/// ```
pub fn hartogs_kernel(weight: &RadialWeight, z: &Point2, zeta: &Point2) -> Result<Complex64> {
    for (name, pt) in [("z", z), ("zeta", zeta)] {
        if !in_hartogs(pt) {
            return Err(Error::Domain(format!(
                "{name} = ({}, {}) lies outside the Hartogs triangle",
                pt.z1, pt.z2
            )));
        }
    }
    let punctured = if weight.c() == 0.0 {
        let w1 = z.z1 * zeta.z1.conj();
        if weight.t() > 0.0 {
            poly_weight_kernel_closed(weight.t(), w1)?
        } else {
            // unweighted: the puncture is removable and the disc kernel applies
            let d = Complex64::new(1.0, 0.0) - w1;
            Complex64::new(1.0 / std::f64::consts::PI, 0.0) / (d * d)
        }
    } else {
        let table = KernelCoeffTable::sized_for(*weight, &[z.z1.norm(), zeta.z1.norm()])?;
        table.evaluate(z.z1, zeta.z1)?.0
    };
    let jac = Complex64::new(1.0, 0.0) / (z.z1 * zeta.z1.conj());
    let disc = disc_kernel(z.z2 / z.z1, zeta.z2 / zeta.z1)?;
    Ok(jac * punctured * disc)
}
