//! Special functions used by the closed-form asymptotics.
//!
//! Only real arguments in the ranges that actually occur are supported:
//! polylogarithms of order 2 and 3 on `[0, 1]` (the arguments are products of
//! zero-frequency reflection coefficients) and the exponential integral on the
//! negative real axis.

use thiserror::Error;

use crate::constants::{ZETA2, ZETA3};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this magnitude `Ei` uses its power series, above it the continued
/// fraction for `E1`.
const EI_SERIES_LIMIT: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("argument {arg} outside the supported domain of {function}")]
    Domain { function: &'static str, arg: f64 },
    #[error("unsupported polylogarithm order {0} (only 2 and 3)")]
    UnsupportedOrder(u32),
    #[error("{function}({arg}) did not reach rel_tol within {max_terms} terms")]
    NoConvergence {
        function: &'static str,
        arg: f64,
        max_terms: usize,
    },
    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),
}

/// Accuracy requested from series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    rel_tol: f64,
    max_terms: usize,
}

impl PrecisionPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self, SpecFunError> {
        if !(rel_tol > 0.0 && rel_tol < 1e-3) {
            return Err(SpecFunError::InvalidPolicy(format!(
                "rel_tol must lie in (0, 1e-3), got {rel_tol}"
            )));
        }
        if max_terms < 50 {
            return Err(SpecFunError::InvalidPolicy(format!(
                "max_terms must be at least 50, got {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    /// `rel_tol = 1e−15`, for differences such as `ζ(3) − Li₃(z)`.
    pub const fn tight() -> Self {
        Self {
            rel_tol: 1e-15,
            max_terms: 10_000_000,
        }
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

/// Riemann ζ(3).
pub fn zeta3() -> f64 {
    ZETA3
}

/// `Li_n(z)` for `n ∈ {2, 3}` and `z ∈ [0, 1]` with the default policy.
pub fn polylog(n: u32, z: f64) -> Result<f64, SpecFunError> {
    polylog_with(n, z, &PrecisionPolicy::default())
}

/// `Li_n(z) = Σ_{k≥1} z^k / k^n` by direct summation.
///
/// The series is stopped once the remaining tail is provably below
/// `rel_tol · |partial sum|`, using the smaller of the geometric bound
/// `z^{K+1} / ((K+1)^n (1 − z))` and the ζ-tail bound `1 / ((n − 1) K^{n−1})`.
pub fn polylog_with(n: u32, z: f64, policy: &PrecisionPolicy) -> Result<f64, SpecFunError> {
    if n != 2 && n != 3 {
        return Err(SpecFunError::UnsupportedOrder(n));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(SpecFunError::Domain {
            function: "polylog",
            arg: z,
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(if n == 2 { ZETA2 } else { ZETA3 });
    }

    let order = n as i32;
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..=policy.max_terms {
        power *= z;
        let kf = k as f64;
        sum += power / kf.powi(order);

        let next = kf + 1.0;
        let geometric = power * z / (next.powi(order) * (1.0 - z));
        let zeta_tail = 1.0 / ((order - 1) as f64 * kf.powi(order - 1));
        if geometric.min(zeta_tail) <= policy.rel_tol * sum {
            return Ok(sum);
        }
        if power == 0.0 {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NoConvergence {
        function: "polylog",
        arg: z,
        max_terms: policy.max_terms,
    })
}

/// Exponential integral `Ei(x)` for `x < 0` with the default policy.
pub fn exp_integral_ei(x: f64) -> Result<f64, SpecFunError> {
    exp_integral_ei_with(x, &PrecisionPolicy::default())
}

/// `Ei(x) = −E1(−x)` for negative `x`.
pub fn exp_integral_ei_with(x: f64, policy: &PrecisionPolicy) -> Result<f64, SpecFunError> {
    if !(x < 0.0) {
        return Err(SpecFunError::Domain {
            function: "exp_integral_ei",
            arg: x,
        });
    }
    let t = -x;
    if t <= EI_SERIES_LIMIT {
        ei_series(x, policy)
    } else {
        Ok(-e1_continued_fraction(t, policy)?)
    }
}

/// `Ei(x) = γ + ln|x| + Σ x^k / (k · k!)`.
pub(crate) fn ei_series(x: f64, policy: &PrecisionPolicy) -> Result<f64, SpecFunError> {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=policy.max_terms {
        let kf = k as f64;
        term *= x / kf;
        let contribution = term / kf;
        sum += contribution;
        if contribution.abs() <= 0.1 * policy.rel_tol * sum.abs().max(f64::MIN_POSITIVE)
            && kf > x.abs()
        {
            return Ok(EULER_GAMMA + x.abs().ln() + sum);
        }
    }
    Err(SpecFunError::NoConvergence {
        function: "exp_integral_ei",
        arg: x,
        max_terms: policy.max_terms,
    })
}

/// `E1(t)` for `t > 0` from its continued fraction, evaluated with the
/// modified Lentz algorithm.
pub(crate) fn e1_continued_fraction(t: f64, policy: &PrecisionPolicy) -> Result<f64, SpecFunError> {
    const TINY: f64 = 1e-300;
    let mut b = t + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=policy.max_terms {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() <= 0.1 * policy.rel_tol {
            return Ok(h * (-t).exp());
        }
    }
    Err(SpecFunError::NoConvergence {
        function: "exp_integral_ei",
        arg: -t,
        max_terms: policy.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn polylog_golden_values() {
        assert_eq!(polylog(3, 0.0).unwrap(), 0.0);
        assert!(rel(polylog(3, 1.0).unwrap(), 1.202_056_903_159_594_3) < 1e-15);
        // π²/12 − (ln 2)²/2
        let closed = std::f64::consts::PI.powi(2) / 12.0 - 2f64.ln().powi(2) / 2.0;
        assert!(rel(polylog(2, 0.5).unwrap(), closed) < 1e-12);
        assert!(rel(polylog(2, 0.5).unwrap(), 0.582_240_526_5) < 1e-10);
    }

    #[test]
    fn polylog_against_extended_precision() {
        let cases = [
            (2, 0.1, 0.102_617_791_099_391_13),
            (2, 0.7, 0.889_377_624_286_038_7),
            (2, 0.95, 1.440_633_796_970_039_5),
            (2, 0.999, 1.637_022_605_276_117_7),
            (3, 0.1, 0.101_288_684_479_222_99),
            (3, 0.7, 0.780_063_934_257_661_6),
            (3, 0.95, 1.123_574_584_279_198_8),
            (3, 0.999, 1.200_415_353_995_464_3),
            (3, 0.709_211_238_599_404_8, 0.791_794_605_658_445_7),
        ];
        for (n, z, expected) in cases {
            let got = polylog(n, z).unwrap();
            assert!(rel(got, expected) < 1e-11, "Li{n}({z}) = {got}, want {expected}");
        }
    }

    #[test]
    fn polylog_domain_errors() {
        assert!(matches!(polylog(3, -0.1), Err(SpecFunError::Domain { .. })));
        assert!(matches!(polylog(3, 1.5), Err(SpecFunError::Domain { .. })));
        assert!(matches!(polylog(4, 0.5), Err(SpecFunError::UnsupportedOrder(4))));
        assert!(polylog(2, f64::NAN).is_err());
    }

    #[test]
    fn polylog_respects_term_cap() {
        let tight = PrecisionPolicy::new(1e-12, 50).unwrap();
        assert!(matches!(
            polylog_with(2, 0.999, &tight),
            Err(SpecFunError::NoConvergence { .. })
        ));
    }

    #[test]
    fn zeta3_identities() {
        assert_eq!(zeta3(), polylog(3, 1.0).unwrap());
        assert!(rel(2.0 * zeta3() - polylog(3, 1.0).unwrap(), 1.202_056_903_2) < 1e-10);
    }

    #[test]
    fn zeta3_matches_accelerated_series() {
        // Apéry: ζ(3) = 5/2 Σ (−1)^{k+1} / (k³ C(2k, k)).
        let mut sum = 0.0;
        let mut binom = 1.0;
        for k in 1..=30u32 {
            let kf = k as f64;
            binom *= (2.0 * kf - 1.0) * (2.0 * kf) / (kf * kf);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign / (kf.powi(3) * binom);
        }
        assert!(rel(2.5 * sum, zeta3()) < 1e-15);
    }

    #[test]
    fn ei_golden_values() {
        assert!(rel(exp_integral_ei(-1.0).unwrap(), -0.219_383_934_395_520_27) < 1e-12);
        assert!(rel(exp_integral_ei(-10.0).unwrap(), -4.156_968_929_685_324e-6) < 1e-12);
        assert!(rel(exp_integral_ei(-5.0).unwrap(), -1.148_295_591_275_325_8e-3) < 1e-12);
        assert!(rel(exp_integral_ei(-0.01).unwrap(), -4.037_929_576_538_114) < 1e-12);
        assert!(rel(exp_integral_ei(-30.0).unwrap(), -3.021_552_010_688_812_5e-15) < 1e-12);
    }

    #[test]
    fn ei_branches_agree_at_switch_point() {
        let policy = PrecisionPolicy::default();
        for x in [-0.8, -1.0, -1.5, -2.0] {
            let series = ei_series(x, &policy).unwrap();
            let cf = -e1_continued_fraction(-x, &policy).unwrap();
            assert!(rel(series, cf) < 1e-12, "x = {x}: {series} vs {cf}");
        }
    }

    #[test]
    fn ei_tail_vanishes_monotonically() {
        let mut prev = exp_integral_ei(-1.0).unwrap();
        for k in 2..80 {
            let v = exp_integral_ei(-(k as f64)).unwrap();
            assert!(v < 0.0 && v > prev);
            prev = v;
        }
    }

    #[test]
    fn ei_rejects_nonnegative() {
        assert!(exp_integral_ei(0.0).is_err());
        assert!(exp_integral_ei(1.0).is_err());
    }

    #[test]
    fn policy_invariants() {
        assert!(PrecisionPolicy::new(0.0, 100).is_err());
        assert!(PrecisionPolicy::new(1e-3, 100).is_err());
        assert!(PrecisionPolicy::new(1e-8, 49).is_err());
        assert!(PrecisionPolicy::new(1e-8, 50).is_ok());
    }
}
