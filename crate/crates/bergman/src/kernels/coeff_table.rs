//! Per-mode kernel coefficient tables with certified truncation tails.
//!
//! On the punctured disc with a radial weight, the monomials `z^n` (all
//! integers `n` when the weight vanishes exponentially at the puncture,
//! `n` above a cutoff for pure powers) are orthogonal, so the kernel is the
//! Laurent-mode series `B(z, zeta) = sum_n c_n (z conj(zeta))^n` with
//! `c_n = (2 pi M(2n+1))^{-1}` — reciprocal monomial square-norms.
//!
//! A [`KernelCoeffTable`] stores a window of modes together with enough
//! structure to *certify* an upper bound on everything it omits:
//!
//! * positive side: `M(2n+1) >= e^{-c-2} / (2n+t+c+2)` (a boundary-layer
//!   window at `r = 1`), so the omitted terms are dominated by an explicit
//!   arithmetico-geometric series in `q = |z| |zeta|`;
//! * negative side: the integration-by-parts inequality
//!   `M(beta) <= (c / |beta+1|) M(beta-1)` for `beta <= -1` gives the
//!   certified term-ratio `rho(m) = c^2 / (q (2m-2-t)(2m-1-t))`, and the
//!   first omitted coefficient is computed exactly, so the omitted mass is
//!   at most `first_term / (1 - rho)`.
//!
//! Tables sized with [`KernelCoeffTable::sized_for`] keep the certified
//! tail below `1e-10` of the diagonal partial sum at every requested
//! radius. Construction refuses radius pairs with `|z||zeta| >= 1 - 1e-6`.

use crate::error::{Error, Result};
use crate::moments::{moment_of, RadialWeight};
use crate::numerics::{log_sum_exp, LogReal};
use num_complex::Complex64;

const TWO_PI: f64 = std::f64::consts::TAU;
/// Relative tail target used by [`KernelCoeffTable::sized_for`].
pub const TAIL_REL_TARGET: f64 = 1e-10;

/// A window of kernel coefficients `c_n` for one radial weight.
#[derive(Clone, Debug)]
pub struct KernelCoeffTable {
    weight: RadialWeight,
    n_min: i64,
    n_max: i64,
    coeffs: Vec<LogReal>,
    /// `c_{n_min - 1}`, the first omitted low mode (exponential weights).
    edge_low: Option<LogReal>,
    /// Modes requested but excluded because they fall out of the space
    /// (pure-power weights only): `(requested_n_min, first_surviving)`.
    excluded_low: Option<(i64, i64)>,
}

/// Lowest mode `n` with `2n + t + 2 > 0`.
pub(crate) fn lowest_surviving_mode(t: f64) -> i64 {
    // smallest integer strictly above -(t + 2) / 2
    let bound = -(t + 2.0) / 2.0;
    let mut n = bound.floor() as i64 + 1;
    while 2.0 * n as f64 + t + 2.0 <= 0.0 {
        n += 1;
    }
    n
}

impl KernelCoeffTable {
    /// Builds the table for modes `n_min..=n_max`.
    ///
    /// For pure-power weights, modes whose square-norm diverges are dropped
    /// and reported through [`KernelCoeffTable::excluded_modes`] rather than
    /// failing.
    pub fn build(weight: RadialWeight, n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::Domain(format!(
                "mode window requires n_min <= n_max, got [{n_min}, {n_max}]"
            )));
        }
        let (eff_min, excluded_low) = if weight.c() == 0.0 {
            let first = lowest_surviving_mode(weight.t());
            if n_min < first {
                (first, Some((n_min, first)))
            } else {
                (n_min, None)
            }
        } else {
            (n_min, None)
        };
        if eff_min > n_max {
            return Err(Error::Domain(format!(
                "no surviving modes in [{n_min}, {n_max}] for weight (t = {}, c = 0)",
                weight.t()
            )));
        }
        let mut coeffs = Vec::with_capacity((n_max - eff_min + 1) as usize);
        for n in eff_min..=n_max {
            let m = moment_of(&weight, 2.0 * n as f64 + 1.0)?;
            coeffs.push(m.recip() * LogReal::from_real(1.0 / TWO_PI));
        }
        let edge_low = if weight.c() > 0.0 {
            let m = moment_of(&weight, 2.0 * (eff_min - 1) as f64 + 1.0)?;
            Some(m.recip() * LogReal::from_real(1.0 / TWO_PI))
        } else {
            None
        };
        Ok(KernelCoeffTable {
            weight,
            n_min: eff_min,
            n_max,
            coeffs,
            edge_low,
            excluded_low,
        })
    }

    /// Builds a table whose certified tail stays below
    /// `TAIL_REL_TARGET` of the diagonal partial sum at every radius in
    /// `radii`, growing the window as needed.
    pub fn sized_for(weight: RadialWeight, radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Domain("sized_for requires at least one radius".into()));
        }
        for &r in radii {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Domain(format!("radius {r} outside (0, 1)")));
            }
            if r * r >= 1.0 - 1e-6 {
                return Err(Error::Truncation(format!(
                    "evaluation radius {r} too close to the boundary to certify a tail"
                )));
            }
        }
        let r_max = radii.iter().cloned().fold(0.0f64, f64::max);
        let r_min = radii.iter().cloned().fold(1.0f64, f64::min);
        let q_max = r_max * r_max;
        let q_min = r_min * r_min;
        let t = weight.t();
        let c = weight.c();

        // positive modes: decay sets in once n ln(1/q_max) beats c + 2
        let mut n_max = (((c + 2.0 + 40.0) / (1.0 - q_max.min(0.999)).max(0.05)) as i64).max(16);
        // negative modes: certified ratio needs (2m)^2 q_min > 2 c^2, plus
        // margin for the pre-decay hump of the series
        let mut n_min = if c > 0.0 {
            let m0 = (c * (2.0 / q_min).sqrt() / 2.0 + t.abs() + 8.0).ceil() as i64;
            -(m0.max(8))
        } else {
            lowest_surviving_mode(t)
        };

        for _round in 0..48 {
            let table = Self::build(weight, n_min, n_max)?;
            let mut worst_pos = 0.0f64;
            let mut worst_neg = 0.0f64;
            let mut ok = true;
            for &r in radii {
                match table.tail_split_log(r, r) {
                    Ok((pos, neg)) => {
                        let (diag, _) = table.diagonal_partial_log(r);
                        let rel_pos = (pos.logmag() - diag.logmag()).exp();
                        let rel_neg = (neg.logmag() - diag.logmag()).exp();
                        worst_pos = worst_pos.max(rel_pos);
                        worst_neg = worst_neg.max(rel_neg);
                        if rel_pos > TAIL_REL_TARGET || rel_neg > TAIL_REL_TARGET {
                            ok = false;
                        }
                    }
                    Err(_) => {
                        // ratio not yet certifiable: extend the window
                        ok = false;
                        worst_neg = f64::INFINITY;
                    }
                }
            }
            if ok {
                return Ok(table);
            }
            if worst_pos > TAIL_REL_TARGET {
                n_max += (n_max / 2).max(16);
            }
            if c > 0.0 && worst_neg > TAIL_REL_TARGET {
                n_min -= ((-n_min) / 2).max(16);
            }
        }
        Err(Error::Truncation(format!(
            "failed to certify a {TAIL_REL_TARGET:.0e} relative tail for weight (t = {t}, c = {c}) at radii {radii:?}"
        )))
    }

    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    /// Coefficient `c_n`, if stored.
    pub fn coeff(&self, n: i64) -> Option<LogReal> {
        if n < self.n_min || n > self.n_max {
            None
        } else {
            Some(self.coeffs[(n - self.n_min) as usize])
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, LogReal)> + '_ {
        (self.n_min..=self.n_max).map(move |n| (n, self.coeffs[(n - self.n_min) as usize]))
    }

    /// Modes that were requested but dropped because the weight does not
    /// square-integrate them (pure-power weights only).
    pub fn excluded_modes(&self) -> Vec<i64> {
        match self.excluded_low {
            None => Vec::new(),
            Some((req, first)) => (req..first).collect(),
        }
    }

    /// Certified bound on the omitted series mass at the radius pair, in
    /// log space. Errors if `|z||zeta| >= 1 - 1e-6` or if the negative-side
    /// ratio cannot be certified at this window.
    pub fn tail_bound_log(&self, r_z: f64, r_zeta: f64) -> Result<LogReal> {
        let (pos, neg) = self.tail_split_log(r_z, r_zeta)?;
        Ok(log_sum_exp(&[pos, neg]))
    }

    /// Same bound as an `f64` (saturates on overflow).
    pub fn tail_bound(&self, r_z: f64, r_zeta: f64) -> Result<f64> {
        Ok(self.tail_bound_log(r_z, r_zeta)?.to_real())
    }

    fn tail_split_log(&self, r_z: f64, r_zeta: f64) -> Result<(LogReal, LogReal)> {
        if !(r_z > 0.0 && r_z < 1.0 && r_zeta > 0.0 && r_zeta < 1.0) {
            return Err(Error::Domain(format!(
                "tail bound requires radii in (0, 1), got ({r_z}, {r_zeta})"
            )));
        }
        let q = r_z * r_zeta;
        if q >= 1.0 - 1e-6 {
            return Err(Error::Truncation(format!(
                "|z||zeta| = {q} >= 1 - 1e-6: tail not certifiable"
            )));
        }
        let t = self.weight.t();
        let c = self.weight.c();

        // positive side: sum_{n > N} c_n q^n <= (e^{c+2} / (2 pi))
        //   * q^{N+1} [ (2(N+1)+t+c+2)/(1-q) + 2 q/(1-q)^2 ]
        let n1 = (self.n_max + 1) as f64;
        let bracket = (2.0 * n1 + t + c + 2.0) / (1.0 - q) + 2.0 * q / ((1.0 - q) * (1.0 - q));
        let ln_pos = c + 2.0 - TWO_PI.ln() + n1 * q.ln() + bracket.ln();
        let pos = LogReal::from_ln(ln_pos);

        // negative side
        let neg = if c == 0.0 {
            // no omitted low modes unless the window was clipped above the
            // first surviving mode; those finitely many terms are summed
            // exactly
            let first = lowest_surviving_mode(t);
            if self.n_min > first {
                let terms: Vec<LogReal> = (first..self.n_min)
                    .map(|n| {
                        let cn = (2.0 * n as f64 + t + 2.0) / TWO_PI;
                        LogReal::from_ln(cn.ln() + n as f64 * q.ln())
                    })
                    .collect();
                log_sum_exp(&terms)
            } else {
                LogReal::zero()
            }
        } else {
            let m1 = (1 - self.n_min) as f64; // first omitted |mode|
            let d1 = 2.0 * m1 - 2.0 - t;
            let d2 = 2.0 * m1 - 1.0 - t;
            if d1 <= 0.0 || d2 <= 0.0 {
                return Err(Error::Truncation(format!(
                    "negative window too small to certify (n_min = {})",
                    self.n_min
                )));
            }
            let rho = c * c / (q * d1 * d2);
            if rho >= 1.0 {
                return Err(Error::Truncation(format!(
                    "negative tail ratio {rho:.3} >= 1 at n_min = {}; extend the window",
                    self.n_min
                )));
            }
            let edge = self.edge_low.expect("exponential table stores edge")
                * LogReal::from_ln((self.n_min - 1) as f64 * q.ln());
            edge * LogReal::from_real(1.0 / (1.0 - rho))
        };
        Ok((pos, neg))
    }

    /// Diagonal partial sum `sum_n c_n r^{2n}` in log space, plus the number
    /// of modes. All terms are positive.
    pub fn diagonal_partial_log(&self, r: f64) -> (LogReal, usize) {
        let ln_q = 2.0 * r.ln();
        let terms: Vec<LogReal> = self
            .modes()
            .map(|(n, cn)| LogReal::from_ln(cn.ln() + n as f64 * ln_q))
            .collect();
        (log_sum_exp(&terms), self.coeffs.len())
    }

    /// Diagonal value with its certified relative truncation error.
    pub fn diagonal_log(&self, r: f64) -> Result<(LogReal, f64)> {
        let (value, _) = self.diagonal_partial_log(r);
        let tail = self.tail_bound_log(r, r)?;
        let rel = (tail.logmag() - value.logmag()).exp();
        Ok((value, rel))
    }

    /// Truncated kernel value at `(z, zeta)` plus the certified bound on the
    /// omitted mass. Each term is assembled as
    /// `exp(ln c_n + n ln|w|) * e^{i n arg w}`, so coefficients and powers
    /// far outside `f64` range combine without overflow as long as the
    /// result itself is representable.
    pub fn evaluate(&self, z: Complex64, zeta: Complex64) -> Result<(Complex64, f64)> {
        for (name, v) in [("z", z), ("zeta", zeta)] {
            let r = v.norm();
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Domain(format!(
                    "kernel argument {name} must lie in the punctured disc, got |{name}| = {r}"
                )));
            }
        }
        let w = z * zeta.conj();
        let ln_q = w.norm().ln();
        let theta = w.arg();
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (n, cn) in self.modes() {
            let mag = (cn.ln() + n as f64 * ln_q).exp();
            let phase = n as f64 * theta;
            re += mag * phase.cos();
            im += mag * phase.sin();
        }
        let tail = self.tail_bound(z.norm(), zeta.norm())?;
        Ok((Complex64::new(re, im), tail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unweighted_coefficients_are_disc_coefficients() {
        // c_n = (n + 1) / pi for n >= 0, nothing below
        let table = KernelCoeffTable::build(RadialWeight::unweighted(), -5, 6).unwrap();
        assert_eq!(table.n_min(), 0);
        assert_eq!(table.excluded_modes(), vec![-5, -4, -3, -2, -1]);
        for (n, cn) in table.modes() {
            let expected = (n as f64 + 1.0) / std::f64::consts::PI;
            assert!(
                (cn.to_real() - expected).abs() < 1e-13 * expected,
                "c_{n} = {}",
                cn.to_real()
            );
        }
    }

    #[test]
    fn exponential_coefficient_matches_moment() {
        // c_{-3} = (2 pi I(-5))^{-1}
        let table = KernelCoeffTable::build(RadialWeight::exponential(), -4, 2).unwrap();
        let i5 = moment_of(&RadialWeight::exponential(), -5.0).unwrap();
        let expected = 1.0 / (TWO_PI * i5.to_real());
        let got = table.coeff(-3).unwrap().to_real();
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn lowest_surviving_mode_for_power_weights() {
        // weight r^{s + 2k}: first surviving mode is -k-1
        for (t, expected) in [(0.5, -1), (2.0, -1), (7.0, -4), (4.0, -2), (0.0, 0)] {
            assert_eq!(lowest_surviving_mode(t), expected, "t = {t}");
        }
        // brute force over a grid of decompositions
        for k in 0..6i64 {
            for s_i in 1..=20 {
                let s = s_i as f64 * 0.1;
                let t = s + 2.0 * k as f64;
                let first = lowest_surviving_mode(t);
                assert!(2.0 * first as f64 + t + 2.0 > 0.0);
                assert!(2.0 * (first - 1) as f64 + t + 2.0 <= 0.0);
                assert_eq!(first, -k - 1, "t = {t}");
            }
        }
    }

    #[test]
    fn per_mode_reproducing_identity() {
        let table = KernelCoeffTable::sized_for(RadialWeight::exponential(), &[0.3]).unwrap();
        for (n, cn) in table.modes() {
            let m = moment_of(&RadialWeight::exponential(), 2.0 * n as f64 + 1.0).unwrap();
            let product = cn * m * LogReal::from_real(TWO_PI);
            assert!(
                (product.ln()).abs() < 1e-12,
                "mode {n}: c_n 2pi M = exp({})",
                product.ln()
            );
        }
    }

    #[test]
    fn sized_table_certifies_diagonal_tail() {
        for &r in &[0.05, 0.3, 0.5, 0.9] {
            let table = KernelCoeffTable::sized_for(RadialWeight::exponential(), &[r]).unwrap();
            let (_, rel) = table.diagonal_log(r).unwrap();
            assert!(rel <= TAIL_REL_TARGET, "r = {r}: rel tail {rel}");
        }
    }

    #[test]
    fn unweighted_table_reproduces_disc_kernel() {
        let table = KernelCoeffTable::sized_for(RadialWeight::unweighted(), &[0.5]).unwrap();
        let z = Complex64::new(0.5, 0.0);
        let (value, tail) = table.evaluate(z, z).unwrap();
        let closed = 1.0 / (std::f64::consts::PI * (1.0 - 0.25f64).powi(2));
        assert!((value.re - closed).abs() <= tail + 1e-12 * closed);
        assert!(value.im.abs() < 1e-14);
    }

    #[test]
    fn hermitian_symmetry_is_exact() {
        let table = KernelCoeffTable::sized_for(RadialWeight::exponential(), &[0.6, 0.4]).unwrap();
        let z = Complex64::from_polar(0.6, 0.7);
        let zeta = Complex64::from_polar(0.4, -1.9);
        let (a, _) = table.evaluate(z, zeta).unwrap();
        let (b, _) = table.evaluate(zeta, z).unwrap();
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, -b.im);
    }

    #[test]
    fn boundary_radius_fails_loudly() {
        let table = KernelCoeffTable::build(RadialWeight::exponential(), -8, 8).unwrap();
        assert!(table.tail_bound(0.9999999, 0.9999999).is_err());
        let z = Complex64::new(1.2, 0.0);
        assert!(table.evaluate(z, z).is_err());
    }

    #[test]
    fn phase_independent_diagonal_dominance() {
        // |B(z, zeta)| <= B(|z|, |z|) + tail slack when |zeta| = |z|
        let table = KernelCoeffTable::sized_for(RadialWeight::exponential(), &[0.3]).unwrap();
        let z = Complex64::new(0.3, 0.0);
        let (diag, tail) = table.evaluate(z, z).unwrap();
        for &theta in &[0.3, 1.0, 2.5, 3.1] {
            let zeta = Complex64::from_polar(0.3, theta);
            let (off, _) = table.evaluate(z, zeta).unwrap();
            assert!(off.norm() <= diag.re + 2.0 * tail + 1e-12);
        }
    }
}
