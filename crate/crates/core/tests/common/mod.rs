//! Oracles shared by the property suite and the acceptance run.
#![allow(dead_code)]

use parm_core::fourier_taylor::FourierTaylorSeq;
use parm_core::multi_index::MultiBox;
use parm_core::pipeline::PipelineConfig;
use parm_core::{CosineSeq, Interval};
use rand::Rng;
use std::cmp::Ordering;

pub fn dec(s: &str) -> Interval {
    Interval::from_decimal(s).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

pub const OPS: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

/// Sign of `exact(x op y) − fl(x op y)`, recovered exactly with an FMA or
/// TwoSum residual. Operands must keep products away from underflow.
fn residual_sign(op: Op, x: f64, y: f64, r: f64) -> Ordering {
    let e = match op {
        Op::Add => {
            let bb = r - x;
            (x - (r - bb)) + (y - bb)
        }
        Op::Sub => {
            let y = -y;
            let bb = r - x;
            (x - (r - bb)) + (y - bb)
        }
        Op::Mul => x.mul_add(y, -r),
        // x − r·y has the sign of (x/y − r)·y.
        Op::Div => (-r).mul_add(y, x) * y.signum(),
    };
    e.partial_cmp(&0.0).unwrap()
}

pub fn apply_f64(op: Op, x: f64, y: f64) -> f64 {
    match op {
        Op::Add => x + y,
        Op::Sub => x - y,
        Op::Mul => x * y,
        Op::Div => x / y,
    }
}

pub fn apply(op: Op, x: Interval, y: Interval) -> Interval {
    match op {
        Op::Add => x + y,
        Op::Sub => x - y,
        Op::Mul => x * y,
        Op::Div => x / y,
    }
}

/// Whether the exact value of `x op y` lies in `z`.
pub fn exact_in(op: Op, x: f64, y: f64, z: Interval) -> bool {
    let r = apply_f64(op, x, y);
    if !r.is_finite() {
        return z.lo() <= r && r <= z.hi();
    }
    let s = residual_sign(op, x, y, r);
    let lo_ok = z.lo() < r || (z.lo() == r && s != Ordering::Less);
    let hi_ok = z.hi() > r || (z.hi() == r && s != Ordering::Greater);
    lo_ok && hi_ok
}

/// Whether the exact square root of `x` lies in `z`.
pub fn exact_sqrt_in(x: f64, z: Interval) -> bool {
    let q = x.sqrt();
    let s = (-q).mul_add(q, x).partial_cmp(&0.0).unwrap();
    let lo_ok = z.lo() < q || (z.lo() == q && s != Ordering::Less);
    let hi_ok = z.hi() > q || (z.hi() == q && s != Ordering::Greater);
    lo_ok && hi_ok
}

/// A float with random sign, mantissa and exponent in `[2^-60, 2^60]`,
/// or zero now and then.
pub fn rand_f64<R: Rng>(rng: &mut R) -> f64 {
    if rng.random_ratio(1, 20) {
        return 0.0;
    }
    let m: f64 = rng.random_range(1.0..2.0);
    let e: i32 = rng.random_range(-60..=60);
    let s = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    s * m * 2f64.powi(e)
}

pub fn rand_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = rand_f64(rng);
    let b = match rng.random_range(0..3) {
        0 => a,
        1 => a + a.abs() * rng.random_range(0.0..1e-6),
        _ => rand_f64(rng),
    };
    Interval::new(a.min(b), a.max(b)).unwrap()
}

/// Endpoints, midpoint and a random interior point.
pub fn samples<R: Rng>(rng: &mut R, x: Interval) -> [f64; 4] {
    let t: f64 = rng.random_range(0.0..1.0);
    let inner = (x.lo() + t * (x.hi() - x.lo())).clamp(x.lo(), x.hi());
    [x.lo(), x.hi(), x.mid(), inner]
}

/// Checks one random case of every arithmetic operation plus `sqrt`.
/// Returns the number of containment violations.
pub fn containment_case<R: Rng>(rng: &mut R) -> usize {
    let x = rand_interval(rng);
    let y = rand_interval(rng);
    let mut bad = 0;
    for op in OPS {
        if op == Op::Div && y.contains_zero() {
            continue;
        }
        let z = apply(op, x, y);
        let (xs, ys) = (samples(rng, x), samples(rng, y));
        for (&a, &b) in xs.iter().zip(ys.iter()) {
            if !exact_in(op, a, b, z) {
                bad += 1;
            }
        }
    }
    let ax = x.abs();
    if let Ok(z) = ax.sqrt() {
        for a in samples(rng, ax) {
            if !exact_sqrt_in(a, z) {
                bad += 1;
            }
        }
    }
    bad
}

/// Two-sided cosine convolution `c_k = Σ_{l ∈ Z} a_{|l|} b_{|k−l|}` on integers.
pub fn cosine_conv_brute(a: &[i64], b: &[i64]) -> Vec<i64> {
    let (ka, kb) = (a.len() as i64 - 1, b.len() as i64 - 1);
    (0..=ka + kb)
        .map(|k| {
            (-ka..=ka)
                .filter(|l| (k - l).abs() <= kb)
                .map(|l| a[l.unsigned_abs() as usize] * b[(k - l).unsigned_abs() as usize])
                .sum()
        })
        .collect()
}

/// Cauchy product of integer Fourier-Taylor tensors over the box `Mp + Mq`.
pub fn tf_conv_brute(p: &[Vec<i64>], mp: &[usize], q: &[Vec<i64>], mq: &[usize]) -> Vec<Vec<i64>> {
    let (bp, bq) = (MultiBox::new(mp), MultiBox::new(mq));
    let order: Vec<usize> = mp.iter().zip(mq).map(|(a, b)| a + b).collect();
    let out = MultiBox::new(&order);
    let len = p[0].len() + q[0].len() - 1;
    out.iter()
        .map(|m| {
            let mut acc = vec![0i64; len];
            for l in bp.iter() {
                if !l.iter().zip(&m).all(|(a, b)| a <= b) {
                    continue;
                }
                let n: Vec<usize> = m.iter().zip(&l).map(|(a, b)| a - b).collect();
                if !bq.contains(&n) {
                    continue;
                }
                let c = cosine_conv_brute(&p[bp.index(&l)], &q[bq.index(&n)]);
                for (x, y) in acc.iter_mut().zip(c) {
                    *x += y;
                }
            }
            acc
        })
        .collect()
}

pub fn to_seq(nu: Interval, a: &[i64]) -> CosineSeq {
    CosineSeq::new(nu, a.iter().map(|&x| Interval::point(x as f64)).collect(), Interval::ZERO).unwrap()
}

pub fn to_tf(nu: Interval, order: &[usize], rows: &[Vec<i64>]) -> FourierTaylorSeq {
    let coeffs = rows.iter().map(|r| to_seq(nu, r)).collect();
    FourierTaylorSeq::new(order, nu, coeffs, Interval::ZERO).unwrap()
}

/// Whether an interval sequence equals integer coefficients exactly.
pub fn equals_exact(got: &CosineSeq, want: &[i64]) -> bool {
    let n = got.coeffs().len().max(want.len());
    (0..n).all(|k| {
        let w = want.get(k).copied().unwrap_or(0) as f64;
        let g = got.coeff(k);
        g.lo() == w && g.hi() == w
    }) && got.tail().hi() == 0.0
}

/// A random cosine sequence; a nonzero tail now and then.
pub fn rand_seq<R: Rng>(rng: &mut R, nu: Interval, k_max: usize) -> CosineSeq {
    let c: Vec<Interval> = (0..=k_max)
        .map(|_| {
            let m: f64 = rng.random_range(-1.0..1.0);
            Interval::mid_rad(m, rng.random_range(0.0..1e-10))
        })
        .collect();
    let tail = if rng.random_bool(0.3) {
        Interval::upto(rng.random_range(0.0..1e-3))
    } else {
        Interval::ZERO
    };
    CosineSeq::new(nu, c, tail).unwrap()
}

pub fn rand_tf<R: Rng>(rng: &mut R, nu: Interval, order: &[usize], k_max: usize) -> FourierTaylorSeq {
    let n = MultiBox::new(order).len();
    let coeffs = (0..n).map(|_| rand_seq(rng, nu, k_max)).collect();
    let tail = if rng.random_bool(0.3) {
        Interval::upto(rng.random_range(0.0..1e-3))
    } else {
        Interval::ZERO
    };
    FourierTaylorSeq::new(order, nu, coeffs, tail).unwrap()
}

/// The Poisson-kernel run: `α = 2.1`, `c = P_{1/5}`, `K = 20`, `ν = 1.1`, `M = 60`.
pub fn poisson_config() -> PipelineConfig {
    PipelineConfig::default()
}

/// Constant `c`, one unstable direction, chart scaled to reach the sink's basin.
pub fn connection_config() -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    for (k, v) in [("c", "constant"), ("M", "80"), ("scalings", "-1.1"), ("theta", "search")] {
        cfg.set(k, v).unwrap();
    }
    cfg
}

/// Trivial equilibrium, two unstable directions: `M = (5, 20)`, `K = 20`, `ν = 1.01`.
pub fn origin_config() -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    for (k, v) in [
        ("c", "constant"),
        ("nu", "1.01"),
        ("M", "5,20"),
        ("d", "2"),
        ("source", "origin"),
        ("scalings", "0.01,0.04"),
    ] {
        cfg.set(k, v).unwrap();
    }
    cfg.check().unwrap();
    cfg
}

/// `|a ∗ b| ≤ |a||b|` fails for the enclosures. Upper endpoints may differ by
/// rounding alone when equality holds, as for a scalar factor.
pub fn banach_violated(lhs: Interval, rhs: Interval) -> bool {
    lhs.lo() > rhs.hi() || lhs.hi() > rhs.hi() * (1.0 + 1e-14)
}
