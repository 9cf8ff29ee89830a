//! Radii polynomials `p(r) = Z₂ r² − (1 − Z₁) r + Y` and the search for a
//! radius where they are rigorously negative.
//!
//! A negative value at `r` means the Newton-like operator is a contraction
//! on the closed `r`-ball about the approximate solution, so a unique true
//! zero lies within distance `r`.

use crate::interval::Interval;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadiiError {
    #[error("no radius makes the radii polynomial negative (Y = {y}, Z₁ = {z1}, Z₂ = {z2})")]
    NoContraction { y: f64, z1: f64, z2: f64 },
    #[error("bound {0} is not a finite nonnegative number")]
    BadBound(&'static str),
}

/// Coefficients of `p(r) = Z₂ r² − (1 − Z₁) r + Y`. `Z₁` collects every
/// term linear in `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiiPoly {
    pub y: Interval,
    pub z1: Interval,
    pub z2: Interval,
}

/// Outcome of a successful radius search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radius {
    /// Validated radius: the smallest candidate found with `p(r) < 0`.
    pub r: f64,
    /// Enclosure of the smaller root of `p`.
    pub threshold: Interval,
    /// Largest radius found with `p(r) < 0`; `None` when `p` is linear.
    pub r_max: Option<f64>,
}

impl RadiiPoly {
    pub fn new(y: Interval, z1: Interval, z2: Interval) -> Self {
        RadiiPoly { y, z1, z2 }
    }

    pub fn eval(&self, r: f64) -> Interval {
        let r = Interval::point(r);
        self.z2 * r.sqr() - (Interval::ONE - self.z1) * r + self.y
    }

    pub fn negative_at(&self, r: f64) -> bool {
        r > 0.0 && r.is_finite() && self.eval(r).hi() < 0.0
    }

    fn check(&self) -> Result<(), RadiiError> {
        for (name, v) in [("Y", self.y), ("Z1", self.z1), ("Z2", self.z2)] {
            if !v.hi().is_finite() || v.lo() < 0.0 {
                return Err(RadiiError::BadBound(name));
            }
        }
        Ok(())
    }

    fn fail(&self) -> RadiiError {
        RadiiError::NoContraction {
            y: self.y.hi(),
            z1: self.z1.hi(),
            z2: self.z2.hi(),
        }
    }

    /// Floating-point roots `(r₋, r₊)` of the upper-endpoint polynomial.
    fn float_roots(&self) -> Option<(f64, Option<f64>)> {
        let (a, b, c) = (self.z2.hi(), 1.0 - self.z1.hi(), self.y.hi());
        if !(b > 0.0) {
            return None;
        }
        if a == 0.0 {
            return Some((c / b, None));
        }
        let disc = b * b - 4.0 * a * c;
        if !(disc > 0.0) {
            return None;
        }
        let sq = disc.sqrt();
        let lo = 2.0 * c / (b + sq);
        let hi = (b + sq) / (2.0 * a);
        Some((lo, Some(hi)))
    }

    /// Locates a radius with `p(r) < 0`. The floating-point root is tried
    /// first, slightly enlarged, then a geometric grid `Y·2^j`.
    pub fn find_radius(&self) -> Result<Radius, RadiiError> {
        self.check()?;
        let (lo, hi) = self.float_roots().ok_or_else(|| self.fail())?;
        let base = lo.max(1e-300);
        let mut r = None;
        for d in [1e-13, 1e-11, 1e-9, 1e-7, 1e-5, 1e-3, 1e-1] {
            let cand = base * (1.0 + d);
            if self.negative_at(cand) {
                r = Some(cand);
                break;
            }
        }
        if r.is_none() {
            let start = self.y.hi().max(1e-300);
            r = (0..1100)
                .map(|j| start * 2f64.powi(j))
                .take_while(|x| x.is_finite())
                .find(|&x| self.negative_at(x));
        }
        let r = r.ok_or_else(|| self.fail())?;
        let mut below = 0.0;
        for d in [1e-13, 1e-11, 1e-9, 1e-7, 1e-5, 1e-3, 1e-1, 0.5] {
            let cand = lo * (1.0 - d);
            if cand >= 0.0 && self.eval(cand).lo() > 0.0 {
                below = cand;
                break;
            }
        }
        let threshold = Interval::new(below, r).unwrap_or(Interval::upto(r));
        let r_max = hi.map(|h| {
            [1e-13, 1e-11, 1e-9, 1e-7, 1e-5, 1e-3, 1e-1]
                .iter()
                .map(|d| h * (1.0 - d))
                .find(|&x| self.negative_at(x))
                .unwrap_or(r)
        });
        Ok(Radius { r, threshold, r_max })
    }
}
