//! Domain geometry: the Hartogs triangle, its power and exponential
//! generalizations, cones of approach to the singular point, the
//! biholomorphism onto the punctured-disc product model, ray-scan drivers
//! for kernel growth, and an independent 2-D quadrature oracle for monomial
//! norms.
//!
//! The distance function throughout is the distance to the singular point,
//! `delta(z) = |z_1|`.

use crate::error::{Error, Result};
use crate::kernels;
use crate::moments::RadialWeight;
use crate::numerics::{quad_adaptive, LogReal};
use num_complex::Complex64;

/// A point of C^2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl Point2 {
    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        Point2 { z1, z2 }
    }

    pub fn from_re(x1: f64, x2: f64) -> Self {
        Point2 {
            z1: Complex64::new(x1, 0.0),
            z2: Complex64::new(x2, 0.0),
        }
    }
}

/// The cone `V_gamma = { gamma |z_2| < |z_1| }`, `gamma > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSpec {
    gamma: f64,
}

impl ConeSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Domain(format!(
                "cone aperture requires gamma > 1, got {gamma}"
            )));
        }
        Ok(ConeSpec { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn contains(&self, z: &Point2) -> bool {
        self.gamma * z.z2.norm() < z.z1.norm()
    }
}

/// Hartogs triangle membership: `|z_2| < |z_1| < 1`, strict.
pub fn in_hartogs(z: &Point2) -> bool {
    let r1 = z.z1.norm();
    z.z2.norm() < r1 && r1 < 1.0
}

/// Power generalization: `|z_2| < |z_1|^k < 1`, strict, `k > 0`.
pub fn in_hartogs_k(z: &Point2, k: f64) -> bool {
    assert!(k > 0.0, "in_hartogs_k requires k > 0");
    let r1k = z.z1.norm().powf(k);
    z.z2.norm() < r1k && r1k < 1.0
}

/// Exponential limit domain: `|z_2| < exp(-1/|z_1|)`, `0 < |z_1| < 1`.
pub fn in_hartogs_inf(z: &Point2) -> bool {
    let r1 = z.z1.norm();
    if !(r1 > 0.0 && r1 < 1.0) {
        return false;
    }
    // compare in log space so tiny |z_1| cannot underflow the bound
    let y = z.z2.norm();
    y == 0.0 || y.ln() < -1.0 / r1
}

/// The biholomorphism onto the product model: `(z_1, z_2) -> (z_1, z_2/z_1)`.
pub fn phi(z: &Point2) -> Result<Point2> {
    if z.z1.norm() == 0.0 {
        return Err(Error::Domain("phi undefined at z_1 = 0".into()));
    }
    Ok(Point2::new(z.z1, z.z2 / z.z1))
}

pub fn phi_inverse(w: &Point2) -> Result<Point2> {
    if w.z1.norm() == 0.0 {
        return Err(Error::Domain("phi_inverse undefined at w_1 = 0".into()));
    }
    Ok(Point2::new(w.z1, w.z2 * w.z1))
}

/// Complex Jacobian determinant of `phi` at `z`: `1/z_1`.
pub fn phi_jacobian_det(z: &Point2) -> Result<Complex64> {
    if z.z1.norm() == 0.0 {
        return Err(Error::Domain("Jacobian undefined at z_1 = 0".into()));
    }
    Ok(Complex64::new(1.0, 0.0) / z.z1)
}

/// A ray scan toward the singular point: points `z(r) = (r u_1, r rho u_2)`
/// over a decreasing radius grid, with the diagnostic exponent `tau` and an
/// optional weight correction factor.
///
/// `direction.z1` must be unimodular; `|direction.z2| = rho < 1` is the
/// fixed slope of the ray, so the whole scan shares one cone margin.
#[derive(Clone, Debug)]
pub struct RayScan {
    pub direction: Point2,
    pub r_grid: Vec<f64>,
    pub tau: f64,
    pub mu_correction: bool,
}

impl RayScan {
    /// Representative ray inside `cone`, slope `rho = 1/(2 gamma)`, on a
    /// geometric grid from `r_hi` down to `r_lo`.
    pub fn along_cone(
        cone: &ConeSpec,
        tau: f64,
        mu_correction: bool,
        r_hi: f64,
        r_lo: f64,
        points: usize,
    ) -> Result<RayScan> {
        if !(0.0 < r_lo && r_lo < r_hi && r_hi < 1.0) {
            return Err(Error::Geometry(format!(
                "ray scan radii must satisfy 0 < r_lo < r_hi < 1, got [{r_lo}, {r_hi}]"
            )));
        }
        if points < 2 {
            return Err(Error::Geometry("ray scan needs at least 2 points".into()));
        }
        let rho = 1.0 / (2.0 * cone.gamma());
        let ratio = (r_lo / r_hi).powf(1.0 / (points as f64 - 1.0));
        let r_grid: Vec<f64> = (0..points).map(|i| r_hi * ratio.powi(i as i32)).collect();
        Ok(RayScan {
            direction: Point2::from_re(1.0, rho),
            r_grid,
            tau,
            mu_correction,
        })
    }

    pub fn point_at(&self, r: f64) -> Point2 {
        Point2::new(self.direction.z1 * r, self.direction.z2 * r)
    }

    fn validate(&self) -> Result<()> {
        if (self.direction.z1.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Geometry(format!(
                "direction.z1 must be unimodular, got |z1| = {}",
                self.direction.z1.norm()
            )));
        }
        if self.r_grid.is_empty() {
            return Err(Error::Geometry("empty radius grid".into()));
        }
        let mut prev = f64::INFINITY;
        for &r in &self.r_grid {
            if !(r < prev) {
                return Err(Error::Geometry(format!(
                    "radius grid must be strictly decreasing, offending point r = {r}"
                )));
            }
            prev = r;
            let z = self.point_at(r);
            if !in_hartogs(&z) {
                return Err(Error::Geometry(format!(
                    "scan leaves the domain at r = {r} (point ({}, {}))",
                    z.z1, z.z2
                )));
            }
        }
        Ok(())
    }
}

/// Scans `delta(z)^tau B(z, z)` (optionally times the weight itself) along
/// the ray, entirely in log space.
///
/// On the diagonal the kernel factors as
/// `B(z,z) = B_*(r, r) * r^{-2} * (1/pi) (1 - rho^2)^{-2}` with `r = |z_1|`
/// and `rho` the ray slope; the punctured-disc diagonal factor comes from
/// the coefficient table (exponential weights) or the closed form
/// (polynomial weights).
pub fn cone_ray_scan(scan: &RayScan, weight: &RadialWeight) -> Result<Vec<(f64, LogReal)>> {
    scan.validate()?;
    let rho = scan.direction.z2.norm();
    let ln_disc_factor = -std::f64::consts::PI.ln() - 2.0 * (-rho * rho).ln_1p();

    let diag = kernels::punctured_diagonal_evaluator(weight, &scan.r_grid)?;
    let mut out = Vec::with_capacity(scan.r_grid.len());
    for &r in &scan.r_grid {
        let b_punct = diag(r)?;
        let mut ln_value = scan.tau * r.ln() + b_punct.ln() - 2.0 * r.ln() + ln_disc_factor;
        if scan.mu_correction {
            ln_value += weight.eval_log(r).ln();
        }
        out.push((r, LogReal::from_ln(ln_value)));
    }
    Ok(out)
}

/// Domain selector for the 2-D monomial-norm oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Domain2 {
    /// `|z_2| < |z_1| < 1`
    Hartogs,
    /// `|z_2| < exp(-1/|z_1|)`
    HartogsInf,
}

/// Direct iterated quadrature of `int |z_1^n z_2^m|^p w(|z_1|) dV` over the
/// chosen domain. The angular factors integrate exactly to `2 pi` each; the
/// radial double integral runs the 1-D engine twice (the inner monomial
/// integral per outer node).
///
/// This is the independent oracle against the moment-formula route, so it
/// never consults the incomplete-gamma machinery. Divergence near the
/// singular point is detected by shrinking the inner cutoff and watching
/// the partial integrals grow without settling.
pub fn quad2d_norm_oracle(
    domain: Domain2,
    weight: &RadialWeight,
    n: i64,
    m: i64,
    p: f64,
) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("oracle requires p > 0, got {p}")));
    }
    let inner_exp = m as f64 * p + 1.0;
    if inner_exp <= -1.0 {
        return Err(Error::DivergentIntegral {
            detail: format!("fiber integral of r^{inner_exp} diverges at 0 (m = {m}, p = {p})"),
        });
    }
    let bound = move |r1: f64| -> f64 {
        match domain {
            Domain2::Hartogs => r1,
            Domain2::HartogsInf => (-1.0 / r1).exp(),
        }
    };
    let outer_ln_prefactor = {
        let np1 = n as f64 * p + 1.0;
        let t = weight.t();
        let c = weight.c();
        move |r1: f64| (np1 + t) * r1.ln() - c / r1
    };
    let g = move |r1: f64| -> f64 {
        let b = bound(r1);
        if b <= 0.0 {
            return 0.0;
        }
        let inner = quad_adaptive(|r2: f64| r2.powf(inner_exp), 0.0, b, 1e-12)
            .map(|q| q.value)
            .unwrap_or(0.0);
        if inner <= 0.0 {
            return 0.0;
        }
        let ln_g = outer_ln_prefactor(r1) + inner.ln();
        ln_g.exp()
    };

    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    if weight.c() > 0.0 || domain == Domain2::HartogsInf {
        // essential decay at 0: the engine's substitution path applies
        let q = quad_adaptive(g, 0.0, 1.0, 1e-11)?;
        return Ok(four_pi_sq * q.value);
    }

    // Pure power behavior near 0: shrink the cutoff and extrapolate the
    // geometric tail, declaring divergence if the increments stop decaying.
    let mut eps = 1e-2;
    let mut prev = quad_adaptive(&g, eps, 1.0, 1e-12)?.value;
    let mut prev_delta = f64::INFINITY;
    let mut growth_streak = 0;
    for step in 0..40 {
        eps *= 0.25;
        let cur = quad_adaptive(&g, eps, 1.0, 1e-12)?.value;
        let delta = cur - prev;
        if delta.abs() <= 1e-12 * cur.abs() {
            return Ok(four_pi_sq * cur);
        }
        if step >= 2 && delta.abs() >= 0.999 * prev_delta.abs() {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(Error::DivergentIntegral {
                    detail: format!(
                        "partial integrals grow without settling near 0 (n = {n}, m = {m}, p = {p})"
                    ),
                });
            }
        } else {
            growth_streak = 0;
        }
        if prev_delta.is_finite() {
            let ratio = delta.abs() / prev_delta.abs();
            if ratio < 0.9 && delta.abs() / cur.abs() < 1e-9 {
                // geometric extrapolation of the remaining mass
                let tail = delta * ratio / (1.0 - ratio);
                return Ok(four_pi_sq * (cur + tail));
            }
        }
        prev = cur;
        prev_delta = delta;
    }
    Err(Error::Convergence {
        best: crate::numerics::QuadResult {
            value: four_pi_sq * prev,
            abs_error_estimate: prev_delta.abs() * four_pi_sq,
            evaluations: 0,
        },
        detail: "cutoff ladder did not settle".into(),
    })
}

/// Radius below which the exponential domain is nested inside the power
/// domain of exponent `k`: the solution of `exp(-1/r) = r^k`.
pub fn nesting_radius(k: f64) -> f64 {
    assert!(k > 0.0);
    // solve 1/r = k ln(1/r), i.e. u = k ln u for u = 1/r > 1
    let mut u = (2.0 * k).max(2.0);
    for _ in 0..200 {
        let next = (k * u.ln()).max(1.0 + 1e-12);
        if (next - u).abs() < 1e-14 * u {
            u = next;
            break;
        }
        u = next;
    }
    1.0 / u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hartogs_membership() {
        assert!(in_hartogs(&Point2::from_re(0.5, 0.2)));
        assert!(!in_hartogs(&Point2::from_re(0.5, 0.5)));
        assert!(!in_hartogs(&Point2::from_re(0.0, 0.0)));
        assert!(!in_hartogs(&Point2::from_re(1.0, 0.2)));
    }

    #[test]
    fn hartogs_k_membership() {
        assert!(in_hartogs_k(&Point2::from_re(0.5, 0.2), 2.0));
        assert!(!in_hartogs_k(&Point2::from_re(0.5, 0.3), 2.0));
        // k = 1 reduces to the triangle
        let z = Point2::from_re(0.7, 0.4);
        assert_eq!(in_hartogs_k(&z, 1.0), in_hartogs(&z));
    }

    #[test]
    fn hartogs_inf_membership() {
        let e2 = (-2.0f64).exp();
        assert!(in_hartogs_inf(&Point2::from_re(0.5, e2 * 0.9)));
        assert!(!in_hartogs_inf(&Point2::from_re(0.5, e2)));
        assert!(!in_hartogs_inf(&Point2::from_re(0.0, 0.0)));
        // far inside even when the bound underflows f64
        assert!(in_hartogs_inf(&Point2::from_re(1e-4, 0.0)));
    }

    #[test]
    fn nesting_of_domains() {
        // below the crossover radius, membership in the exponential domain
        // implies membership in every power domain
        for &k in &[1.0, 2.0, 5.0] {
            let r_star = nesting_radius(k);
            assert!((-1.0 / r_star).exp() <= r_star.powf(k) * (1.0 + 1e-10));
            let r = 0.9 * r_star;
            let y = (-1.0 / r).exp() * 0.99;
            let z = Point2::from_re(r, y);
            assert!(in_hartogs_inf(&z));
            assert!(in_hartogs_k(&z, k), "k = {k}, r = {r}");
        }
    }

    #[test]
    fn phi_round_trip() {
        let z = Point2::from_re(0.5, 0.25);
        let w = phi(&z).unwrap();
        assert!((w.z1 - z.z1).norm() < 1e-15);
        assert!((w.z2 - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        // random-ish points in the triangle
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let r1 = 0.05 + 0.9 * next();
            let th1 = next() * std::f64::consts::TAU;
            let r2 = r1 * next() * 0.99;
            let th2 = next() * std::f64::consts::TAU;
            let z = Point2::new(
                Complex64::from_polar(r1, th1),
                Complex64::from_polar(r2, th2),
            );
            assert!(in_hartogs(&z));
            let w = phi(&z).unwrap();
            // image lands in the punctured disc times the disc
            assert!(w.z1.norm() > 0.0 && w.z1.norm() < 1.0 && w.z2.norm() < 1.0);
            let back = phi_inverse(&w).unwrap();
            assert!((back.z1 - z.z1).norm() <= 1e-15);
            assert!((back.z2 - z.z2).norm() <= 1e-15 * z.z2.norm().max(1.0));
        }
        assert!(phi(&Point2::from_re(0.0, 0.0)).is_err());
    }

    #[test]
    fn jacobian_change_of_variables() {
        // int_H f dV = int_{D* x D} (f o phi^{-1}) |w1|^2 dV for separable f
        let tau = std::f64::consts::TAU;
        let cases: [(fn(f64) -> f64, fn(f64) -> f64); 5] = [
            (|r| r, |u| u),
            (|r| r * r, |u| 1.0 - u),
            (|_| 1.0, |u| u * u),
            (|r| (1.0 - r).sqrt(), |_| 1.0),
            (|r| r.powf(0.5), |u| u.powf(1.5)),
        ];
        for (gi, hi) in cases {
            // LHS: int over the triangle of g(|z1|) h(|z2|/|z1|)
            let lhs = {
                let outer = quad_adaptive(
                    |r1: f64| {
                        let inner =
                            quad_adaptive(|r2: f64| hi(r2 / r1) * r2, 0.0, r1, 1e-12).unwrap();
                        gi(r1) * r1 * inner.value
                    },
                    0.0,
                    1.0,
                    1e-11,
                )
                .unwrap();
                tau * tau * outer.value
            };
            // RHS: product integral with the |w1|^2 Jacobian factor
            let rhs = {
                let a = quad_adaptive(|u: f64| gi(u) * u * u * u, 0.0, 1.0, 1e-12).unwrap();
                let b = quad_adaptive(|v: f64| hi(v) * v, 0.0, 1.0, 1e-12).unwrap();
                tau * tau * a.value * b.value
            };
            assert!(
                (lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1e-8),
                "lhs {lhs} rhs {rhs}"
            );
        }
    }

    #[test]
    fn scan_validation_reports_offender() {
        let cone = ConeSpec::new(2.0).unwrap();
        let mut scan = RayScan::along_cone(&cone, 5.0, true, 0.5, 0.01, 10).unwrap();
        scan.r_grid[3] = 0.9; // break monotonicity
        match cone_ray_scan(&scan, &RadialWeight::exponential()) {
            Err(Error::Geometry(msg)) => assert!(msg.contains("0.9"), "msg: {msg}"),
            other => panic!("expected geometry error, got {other:?}"),
        }
        assert!(ConeSpec::new(1.0).is_err());
    }

    #[test]
    fn oracle_volume_of_triangle() {
        // unweighted volume of the Hartogs triangle is pi^2 / 2
        let v =
            quad2d_norm_oracle(Domain2::Hartogs, &RadialWeight::unweighted(), 0, 0, 2.0).unwrap();
        let expected = std::f64::consts::PI * std::f64::consts::PI / 2.0;
        assert!((v - expected).abs() < 1e-8 * expected, "volume {v}");
    }

    #[test]
    fn oracle_detects_structural_divergence() {
        // |z1|^{-10} is not integrable on the triangle
        let r = quad2d_norm_oracle(Domain2::Hartogs, &RadialWeight::unweighted(), -5, 0, 2.0);
        assert!(
            matches!(r, Err(Error::DivergentIntegral { .. })),
            "got {r:?}"
        );
    }

    #[test]
    fn oracle_negative_power_finite_on_exponential_domain() {
        // the same monomial has finite mass once the fibers shrink
        // exponentially
        let v = quad2d_norm_oracle(Domain2::HartogsInf, &RadialWeight::unweighted(), -5, 0, 2.0)
            .unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
