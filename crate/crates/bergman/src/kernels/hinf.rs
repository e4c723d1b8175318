//! Fiberwise kernel machinery for the exponential Hartogs domain
//! `{ |z_2| < exp(-1/|z_1|) }`.
//!
//! Monomials `z_1^n z_2^m` (`n` any integer, `m >= 0`) form a complete
//! orthogonal system. Integrating the fiber first,
//!
//! ```text
//! || z_1^n z_2^m ||_p^p = (2 pi)^2 / (mp + 2) * M_{(0, mp+2)}(np + 1),
//! ```
//!
//! so the `m`-th fiber contributes a punctured-disc problem with the
//! exponential weight at scale `c = 2m + 2`. Exponential fiber shrinkage
//! beats any pole in `z_1`: the norm is finite for every `n`, in contrast
//! with the product domain, where negative powers fall out of the space.
//!
//! The kernel diagonal decomposes over fibers as
//! `B(z, z) = sum_m |z_2|^{2m} K_m(|z_1|)` with
//! `K_m = (2m+2)/(2 pi) * B_*^{(c=2m+2)}` on the diagonal. Truncation in
//! `m` is certified through a plurisubharmonic mean-value bound
//! `B_*^{(c)}(r, r) <= e^2 c^2 e^{c/r} / (pi r^4)`, which turns the tail
//! into an explicit geometric series in `rho = |z_2|^2 e^{2/|z_1|}`; inside
//! the domain `rho < 1` always holds.

use crate::error::{Error, Result};
use crate::geometry::{in_hartogs_inf, Point2};
use crate::kernels::KernelCoeffTable;
use crate::moments::{moment_of, RadialWeight};
use crate::numerics::LogReal;

const TWO_PI: f64 = std::f64::consts::TAU;

/// `int |z_1^n z_2^m|^p dV` over the exponential Hartogs domain, as a
/// positive `LogReal`. Always finite.
pub fn hinf_monomial_norm(n: i64, m: u32, p: f64) -> LogReal {
    assert!(p > 0.0, "monomial norm requires p > 0");
    let c = m as f64 * p + 2.0;
    let weight = RadialWeight::new(0.0, c).expect("c > 0");
    let moment = moment_of(&weight, n as f64 * p + 1.0)
        .expect("exponential fiber weight admits every moment");
    LogReal::from_ln(2.0 * TWO_PI.ln() - c.ln() + moment.ln())
}

/// Smallest fiber order from which the mean-value tail bound is valid at
/// radius `r`: the bound needs its probe disc of radius `r^2/(2m+2)` to fit
/// inside the annulus, i.e. `2m + 2 >= 2 r^2 / (1 - r)`.
fn tail_valid_from(r: f64) -> u32 {
    let m = r * r / (1.0 - r) - 1.0;
    if m <= 0.0 {
        0
    } else {
        m.ceil() as u32
    }
}

/// Kernel diagonal of the exponential Hartogs domain at `z`, truncated at
/// fiber order `m_max`, with a certified bound on the omitted fiber mass.
///
/// Values are returned on the `f64` scale; very small `|z_1|` pushes the
/// diagonal past `f64` range, in which case the per-fiber log-space pieces
/// in [`KernelCoeffTable`] are the right tool instead.
pub fn hinf_kernel_diag(z: &Point2, m_max: u32) -> Result<(f64, f64)> {
    if !in_hartogs_inf(z) {
        return Err(Error::Domain(format!(
            "point ({}, {}) lies outside the exponential Hartogs domain",
            z.z1, z.z2
        )));
    }
    let r = z.z1.norm();
    let y = z.z2.norm();

    let fiber_diag = |m: u32| -> Result<f64> {
        let weight = RadialWeight::hinf_fiber(m);
        let table = KernelCoeffTable::sized_for(weight, &[r])?;
        let (diag, _rel) = table.diagonal_log(r)?;
        let c = 2.0 * m as f64 + 2.0;
        Ok((diag.ln() + c.ln() - TWO_PI.ln()).exp())
    };

    if y == 0.0 {
        // every fiber above m = 0 carries the factor |z_2|^{2m} = 0
        return Ok((fiber_diag(0)?, 0.0));
    }

    let needed = tail_valid_from(r);
    if m_max < needed {
        return Err(Error::Truncation(format!(
            "m_max = {m_max} too small to certify the fiber tail at |z_1| = {r}; need at least {needed}"
        )));
    }

    let ln_y2 = 2.0 * y.ln();
    let mut value = 0.0f64;
    for m in 0..=m_max {
        let k_m = fiber_diag(m)?;
        value += (m as f64 * ln_y2).exp() * k_m;
    }

    // tail over m > m_max: sum (2m+2)^3 e^2 e^{(2m+2)/r} / (2 pi^2 r^4) y^{2m}
    let ln_rho = ln_y2 + 2.0 / r; // < 0 inside the domain
    debug_assert!(ln_rho < 0.0);
    let rho = ln_rho.exp();
    let m1 = m_max as f64 + 1.0;
    let s3 = (1.0 + 4.0 * rho + rho * rho) / (1.0 - rho).powi(4);
    let ln_tail = 2.0 + 2.0 / r - (2.0 * std::f64::consts::PI * std::f64::consts::PI).ln()
        - 4.0 * r.ln()
        + 8.0f64.ln()
        + 3.0 * (m1 + 1.0).ln()
        + m1 * ln_rho
        + s3.ln();
    Ok((value, ln_tail.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_formula_structure() {
        // raising m by one multiplies the fiber scale c by (mp+2+p)/(mp+2)
        let a = hinf_monomial_norm(2, 1, 2.0);
        let weight = RadialWeight::new(0.0, 4.0).unwrap();
        let expected = 2.0 * TWO_PI.ln() - 4.0f64.ln() + moment_of(&weight, 5.0).unwrap().ln();
        assert!((a.ln() - expected).abs() < 1e-14);
    }

    #[test]
    fn negative_powers_have_finite_norm() {
        let v = hinf_monomial_norm(-5, 0, 2.0);
        assert!(v.is_positive());
        assert!(v.logmag().is_finite());
        let v = hinf_monomial_norm(-40, 3, 2.5);
        assert!(v.logmag().is_finite());
    }

    #[test]
    fn diag_z2_zero_is_single_fiber() {
        let z = Point2::from_re(0.5, 0.0);
        let (v, tail) = hinf_kernel_diag(&z, 7).unwrap();
        assert_eq!(tail, 0.0);
        // equals the m = 0 fiber regardless of m_max
        let (v2, _) = hinf_kernel_diag(&z, 0).unwrap();
        assert_eq!(v, v2);
        assert!(v > 0.0);
    }

    #[test]
    fn diag_tail_decreases_geometrically() {
        // |z_2| = 0.9 e^{-2} at r = 0.5: fiber ratio rho = 0.81. The bound
        // carries a cubic prefactor, so the geometric decay dominates once
        // m_max passes ~3/ln(1/rho); probe that regime.
        let y = 0.9 * (-2.0f64).exp();
        let z = Point2::from_re(0.5, y);
        let mut tails = Vec::new();
        for m_max in [20, 28, 36] {
            let (v, tail) = hinf_kernel_diag(&z, m_max).unwrap();
            assert!(v.is_finite() && v > 0.0);
            tails.push(tail);
        }
        // eight extra fibers shrink the bound by ~ rho^8 (times the cubic)
        for w in tails.windows(2) {
            let factor = w[1] / w[0];
            assert!(factor < 0.8, "tail shrink factor {factor}");
        }
    }

    #[test]
    fn diag_value_stabilizes_within_tail() {
        let y = 0.5 * (-2.0f64).exp();
        let z = Point2::from_re(0.5, y);
        let (v1, t1) = hinf_kernel_diag(&z, 10).unwrap();
        let (v2, _) = hinf_kernel_diag(&z, 20).unwrap();
        assert!((v2 - v1).abs() <= t1, "increment {} tail {t1}", v2 - v1);
    }

    #[test]
    fn diag_rejects_outside_point() {
        let z = Point2::from_re(0.5, 0.2); // above the exponential bound
        assert!(hinf_kernel_diag(&z, 5).is_err());
    }

    #[test]
    fn gram_consistency_term_by_term() {
        // each fiber term of the diagonal equals the monomial-norm route:
        // sum_n r^{2n} y^{2m} / ||z_1^n z_2^m||_2^2 per fiber m
        let r: f64 = 0.5;
        let y: f64 = 0.4 * (-2.0f64).exp();
        let z = Point2::from_re(r, y);
        assert!(in_hartogs_inf(&z));
        for m in 0..3u32 {
            let weight = RadialWeight::hinf_fiber(m);
            let table = KernelCoeffTable::sized_for(weight, &[r]).unwrap();
            let (diag, _) = table.diagonal_log(r).unwrap();
            let c = 2.0 * m as f64 + 2.0;
            let fiber_term = (diag.ln() + c.ln() - TWO_PI.ln() + 2.0 * m as f64 * y.ln()).exp();
            // norm route over the same mode window
            let mut sum = 0.0;
            for n in table.n_min()..=table.n_max() {
                let norm = hinf_monomial_norm(n, m, 2.0);
                sum += (2.0 * n as f64 * r.ln() + 2.0 * m as f64 * y.ln() - norm.ln()).exp();
            }
            assert!(
                (fiber_term - sum).abs() <= 1e-10 * fiber_term,
                "m = {m}: {fiber_term} vs {sum}"
            );
        }
    }
}
