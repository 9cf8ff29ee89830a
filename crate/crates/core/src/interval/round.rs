//! Directed rounding without touching the floating-point environment.
//!
//! Each operation is computed in round-to-nearest and the exact rounding
//! error is recovered with an error-free transformation (TwoSum for sums,
//! an FMA residual for products, quotients and square roots). The sign of
//! that error decides whether the nearest result must be stepped one ulp
//! outward. When an intermediate could underflow and the residual is no
//! longer exact, the result is stepped outward unconditionally.

/// Below this magnitude the FMA residual may lose bits to gradual underflow.
const TINY: f64 = 1.0e-280;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn overflow_down(s: f64, a: f64, b: f64) -> f64 {
    if s == f64::INFINITY && a.is_finite() && b.is_finite() {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn overflow_up(s: f64, a: f64, b: f64) -> f64 {
    if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
        f64::MIN
    } else {
        s
    }
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return overflow_down(s, a, b);
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return overflow_up(s, a, b);
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return overflow_down(p, a, b);
    }
    if a == 0.0 || b == 0.0 {
        return p;
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return overflow_up(p, a, b);
    }
    if a == 0.0 || b == 0.0 {
        return p;
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - fl(a/b)`: -1, 0 or 1, or `None` if the residual is unreliable.
#[inline]
fn div_err_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if q.abs() < TINY || a.abs() < TINY || !b.is_finite() {
        return None;
    }
    let r = (-q).mul_add(b, a);
    Some(if r == 0.0 { 0.0 } else { r.signum() * b.signum() })
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return overflow_down(q, a, b);
    }
    if a == 0.0 {
        return q;
    }
    match div_err_sign(a, b, q) {
        Some(s) if s >= 0.0 => q,
        _ => q.next_down(),
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return overflow_up(q, a, b);
    }
    if a == 0.0 {
        return q;
    }
    match div_err_sign(a, b, q) {
        Some(s) if s <= 0.0 => q,
        _ => q.next_up(),
    }
}

#[inline]
pub fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if x == 0.0 || !s.is_finite() {
        return s;
    }
    if x < TINY {
        return s.next_down().max(0.0);
    }
    if (-s).mul_add(s, x) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if x == 0.0 || !s.is_finite() {
        return s;
    }
    if x < TINY {
        return s.next_up();
    }
    if (-s).mul_add(s, x) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_are_not_widened() {
        assert_eq!(add_down(1.0, 2.0), 3.0);
        assert_eq!(add_up(1.0, 2.0), 3.0);
        assert_eq!(mul_down(3.0, 7.0), 21.0);
        assert_eq!(mul_up(3.0, 7.0), 21.0);
        assert_eq!(div_down(1.0, 4.0), 0.25);
        assert_eq!(div_up(1.0, 4.0), 0.25);
        assert_eq!(sqrt_down(9.0), 3.0);
        assert_eq!(sqrt_up(9.0), 3.0);
    }

    #[test]
    fn inexact_operations_bracket_the_result() {
        let (lo, hi) = (add_down(0.1, 0.2), add_up(0.1, 0.2));
        assert!(lo < hi && hi == lo.next_up());
        let (lo, hi) = (div_down(1.0, 3.0), div_up(1.0, 3.0));
        assert!(3.0 * lo <= 1.0 && lo.next_up() == hi);
        let (lo, hi) = (sqrt_down(2.0), sqrt_up(2.0));
        assert!(lo * lo <= 2.0 && hi == lo.next_up());
        let (lo, hi) = (div_down(-1.0, 3.0), div_up(-1.0, 3.0));
        assert!(lo < hi && hi == lo.next_up());
    }

    #[test]
    fn overflow_saturates_toward_finite() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(mul_up(-f64::MAX, 2.0), f64::MIN);
    }

    #[test]
    fn underflow_steps_outward() {
        let t = 1e-200;
        assert!(mul_down(t, t) <= 0.0 || mul_down(t, t) < t * t);
        assert!(mul_up(t, t) > 0.0);
    }
}
