//! Scalar kernels used by the distance estimators.
//!
//! The exponential model works through `g(d) = (d+1)e^{-d}` (the
//! distance-dependent part of the common-neighbor density) and
//! `h(x) = e^{-x} + e^{x-n}` (the endpoint correction visible in a vertex
//! degree). The linear model works through `h_lin(d) = log(d+1)(2/d + 2/(d+2))`
//! and the two-point logarithmic mean `g_log`. Both `g` functions are strictly
//! decreasing on the ranges the estimators invert, so inversion is a clamped
//! bisection.

use crate::error::{Error, Result};

/// Absolute tolerance on the function value at which bisection stops.
pub const BISECTION_VALUE_TOL: f64 = 1e-12;
/// Hard cap on bisection iterations; 2.2/2^200 is far below any tolerance.
pub const BISECTION_MAX_ITERS: u32 = 200;

/// A finite closed inversion range `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "interval [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Inversion range for the exponential-model kernel `g_exp`.
pub fn exp_inversion_range() -> Interval {
    Interval { lo: 0.3, hi: 2.5 }
}

/// Inversion range for the linear-model kernel `h_lin`.
pub fn lin_inversion_range() -> Interval {
    Interval { lo: 0.3, hi: 2.0 }
}

fn check_domain(func: &'static str, value: f64, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain { func, value })
    }
}

/// `g(d) = (d+1)e^{-d}`; strictly decreasing for `d > 0`, `g(0) = 1`.
pub fn g_exp(d: f64) -> Result<f64> {
    check_domain("g_exp", d, d.is_finite() && d >= 0.0)?;
    Ok(g_exp_raw(d))
}

#[inline]
pub(crate) fn g_exp_raw(d: f64) -> f64 {
    (d + 1.0) * (-d).exp()
}

/// `h(x) = e^{-x} + e^{x-n}` for `x` on the segment `[0, n]`.
///
/// Symmetric under `x -> n - x`.
pub fn h_exp(x: f64, n: f64) -> Result<f64> {
    check_domain("h_exp", x, x.is_finite() && n.is_finite() && (0.0..=n).contains(&x))?;
    Ok(h_exp_raw(x, n))
}

#[inline]
pub(crate) fn h_exp_raw(x: f64, n: f64) -> f64 {
    (-x).exp() + (x - n).exp()
}

/// `h(d) = log(d+1) * (2/d + 2/(d+2))`, extended by continuity to `h(0) = 2`.
///
/// Strictly decreasing for `d > 0`.
pub fn h_lin(d: f64) -> Result<f64> {
    check_domain("h_lin", d, d.is_finite() && d >= 0.0)?;
    Ok(h_lin_raw(d))
}

#[inline]
pub(crate) fn h_lin_raw(d: f64) -> f64 {
    if d == 0.0 {
        return 2.0;
    }
    // ln_1p keeps log(d+1)/d accurate as d -> 0.
    let l = d.ln_1p();
    2.0 * l / d + 2.0 * l / (d + 2.0)
}

/// Two-point mean of `1/x` over `[min(a,b), max(a,b)]`:
/// `|log a - log b| / |a - b|`, extended by continuity to `1/a` at `a = b`.
///
/// Symmetric in its arguments and always within `[1/max(a,b), 1/min(a,b)]`.
pub fn g_log(a: f64, b: f64) -> Result<f64> {
    check_domain("g_log", if a <= 0.0 || !a.is_finite() { a } else { b },
        a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0)?;
    Ok(g_log_raw(a, b))
}

#[inline]
pub(crate) fn g_log_raw(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0 / a;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    ((gap / lo).ln_1p()) / gap
}

/// Numerically stable `log(1 - e^{-d})` for `d > 0`.
///
/// Uses `log(-expm1(-d))` below `ln 2` and `log1p(-exp(-d))` above, giving
/// relative error at the few-ulp level across `[1e-12, 700]`.
pub fn log1m_exp_neg(d: f64) -> Result<f64> {
    check_domain("log1m_exp_neg", d, d.is_finite() && d > 0.0)?;
    Ok(log1m_exp_neg_raw(d))
}

#[inline]
pub(crate) fn log1m_exp_neg_raw(d: f64) -> f64 {
    if d < std::f64::consts::LN_2 {
        (-(-d).exp_m1()).ln()
    } else {
        (-(-d).exp()).ln_1p()
    }
}

/// Invert a strictly decreasing function on `range` by bisection, clamping
/// out-of-window values to the nearest endpoint.
///
/// Returns `range.lo` if `y >= f(range.lo)`, `range.hi` if `y <= f(range.hi)`,
/// otherwise the `d` with `|f(d) - y| <= BISECTION_VALUE_TOL`.
fn invert_decreasing(f: impl Fn(f64) -> f64, y: f64, range: Interval) -> f64 {
    if y >= f(range.lo) {
        return range.lo;
    }
    if y <= f(range.hi) {
        return range.hi;
    }
    let (mut lo, mut hi) = (range.lo, range.hi);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..BISECTION_MAX_ITERS {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - y).abs() <= BISECTION_VALUE_TOL {
            break;
        }
        if v > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Clamped inversion of [`g_exp`] on `range`.
pub fn invert_g_exp(y: f64, range: Interval) -> Result<f64> {
    check_domain("invert_g_exp", y, y.is_finite())?;
    if range.lo <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inversion range must lie in (0, inf), got lo = {}",
            range.lo
        )));
    }
    Ok(invert_decreasing(g_exp_raw, y, range))
}

/// Clamped inversion of [`h_lin`] on `range`.
pub fn invert_h_lin(y: f64, range: Interval) -> Result<f64> {
    check_domain("invert_h_lin", y, y.is_finite())?;
    if range.lo <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inversion range must lie in (0, inf), got lo = {}",
            range.lo
        )));
    }
    Ok(invert_decreasing(h_lin_raw, y, range))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn g_exp_known_values() {
        assert_eq!(g_exp(0.0).unwrap(), 1.0);
        assert!((g_exp(1.0).unwrap() - 2.0 / E).abs() < 1e-15);
        assert!((g_exp(2.5).unwrap() - 3.5 * (-2.5f64).exp()).abs() < 1e-15);
        assert!((g_exp(2.5).unwrap() - 0.2872974952).abs() < 1e-9);
    }

    #[test]
    fn g_exp_rejects_bad_input() {
        assert!(g_exp(-0.1).is_err());
        assert!(g_exp(f64::NAN).is_err());
        assert!(g_exp(f64::INFINITY).is_err());
    }

    #[test]
    fn invert_g_exp_round_trip_and_clamps() {
        let range = exp_inversion_range();
        let d = invert_g_exp(2.0 / E, range).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        // y above g(0.3) clamps low, y below g(2.5) clamps high.
        assert_eq!(invert_g_exp(1.0, range).unwrap(), 0.3);
        assert_eq!(invert_g_exp(0.0, range).unwrap(), 2.5);
        assert!(invert_g_exp(f64::NAN, range).is_err());
    }

    #[test]
    fn h_exp_symmetry_and_values() {
        let n = 25.0;
        assert!((h_exp(0.0, n).unwrap() - (1.0 + (-25.0f64).exp())).abs() < 1e-15);
        assert!((h_exp(n / 2.0, n).unwrap() - 2.0 * (-12.5f64).exp()).abs() < 1e-18);
        assert!((h_exp(n, n).unwrap() - h_exp(0.0, n).unwrap()).abs() < 1e-15);
        for k in 0..50 {
            let x = n * k as f64 / 50.0;
            let a = h_exp(x, n).unwrap();
            let b = h_exp(n - x, n).unwrap();
            assert!((a - b).abs() <= 1e-15 * a.max(1.0));
        }
        assert!(h_exp(-0.1, n).is_err());
        assert!(h_exp(25.1, n).is_err());
    }

    #[test]
    fn h_lin_known_values() {
        assert_eq!(h_lin(0.0).unwrap(), 2.0);
        // continuity: value at 1e-8 is within 1e-8 of the limit
        assert!((h_lin(1e-8).unwrap() - 2.0).abs() < 1e-8);
        let expected_1 = 2f64.ln() * (2.0 + 2.0 / 3.0);
        assert!((h_lin(1.0).unwrap() - expected_1).abs() < 1e-12);
        assert!((h_lin(1.0).unwrap() - 1.848392).abs() < 1e-6);
        let expected_2 = 3f64.ln() * 1.5;
        assert!((h_lin(2.0).unwrap() - expected_2).abs() < 1e-12);
        assert!((h_lin(2.0).unwrap() - 1.647918).abs() < 1e-6);
        assert!(h_lin(-1e-9).is_err());
    }

    #[test]
    fn invert_h_lin_round_trip_and_clamps() {
        let range = lin_inversion_range();
        let d = invert_h_lin(h_lin(1.0).unwrap(), range).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        assert_eq!(invert_h_lin(3.0, range).unwrap(), 0.3);
        assert_eq!(invert_h_lin(0.0, range).unwrap(), 2.0);
    }

    #[test]
    fn g_log_known_values_and_symmetry() {
        assert_eq!(g_log(4.0, 4.0).unwrap(), 0.25);
        let v = g_log(1.0, E).unwrap();
        assert!((v - 1.0 / (E - 1.0)).abs() < 1e-15);
        assert!((v - 0.581976).abs() < 1e-6);
        assert_eq!(g_log(2.0, 5.0).unwrap(), g_log(5.0, 2.0).unwrap());
        assert!(g_log(0.0, 1.0).is_err());
        assert!(g_log(1.0, -2.0).is_err());
    }

    #[test]
    fn g_log_is_mean_of_reciprocal() {
        for &(a, b) in &[(0.5, 9.0), (3.0, 3.0000001), (10.0, 400.0), (1e-6, 2.0)] {
            let v = g_log_raw(a, b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            assert!(v >= 1.0 / hi - 1e-15 && v <= 1.0 / lo + 1e-15, "({a},{b}) -> {v}");
        }
    }

    #[test]
    fn log1m_exp_neg_known_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((log1m_exp_neg(ln2).unwrap() + ln2).abs() < 1e-15);
        // small d: log(d - d^2/2 + ...) ~ log(1e-9) - 5e-10
        let v = log1m_exp_neg(1e-9).unwrap();
        let series = (1e-9f64 - 0.5e-18).ln();
        assert!((v - series).abs() < 1e-12);
        assert!((v - (-20.72326584)).abs() < 1e-7);
        // large d: ~ -e^{-50}
        let v50 = log1m_exp_neg(50.0).unwrap();
        assert!((v50 + (-50.0f64).exp()).abs() < 1e-30);
        assert!(log1m_exp_neg(0.0).is_err());
        assert!(log1m_exp_neg(-1.0).is_err());
    }

    #[test]
    fn log1m_exp_neg_consistency_grid() {
        // exp(log1m_exp_neg(d)) == 1 - e^{-d} to 1e-12 relative over [1e-9, 50]
        let mut d = 1e-9;
        while d <= 50.0 {
            let got = log1m_exp_neg(d).unwrap().exp();
            let want = -(-d).exp_m1();
            assert!(
                (got - want).abs() <= 1e-12 * want.max(1.0),
                "d={d}: {got} vs {want}"
            );
            d *= 1.7;
        }
    }

    #[test]
    fn g_exp_derivative_bound_on_window() {
        // (g(x+h) - g(x))/h < -0.2 on [0.3, 2.5-h]
        let h = 1e-6;
        let steps = 2000;
        for k in 0..=steps {
            let x = 0.3 + (2.5 - h - 0.3) * k as f64 / steps as f64;
            let q = (g_exp_raw(x + h) - g_exp_raw(x)) / h;
            assert!(q < -0.2, "difference quotient {q} at x={x}");
        }
    }

    #[test]
    fn h_lin_derivative_bound_on_window() {
        let h = 1e-6;
        let steps = 2000;
        for k in 0..=steps {
            let x = 0.5 + (2.0 - h - 0.5) * k as f64 / steps as f64;
            let q = (h_lin_raw(x + h) - h_lin_raw(x)) / h;
            assert!(q < -0.1, "difference quotient {q} at x={x}");
        }
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 1.0).is_err());
        let i = Interval::new(0.3, 2.5).unwrap();
        assert!(i.contains(0.3) && i.contains(2.5) && !i.contains(2.6));
    }
}
