//! Computer-assisted bounds for a Taylor chart of the unstable manifold.
//!
//! The unknown is the full coefficient array `p = (p_{m,k})` in the space
//! with norm `Σ_m |p_m|_ν`. The zero-finding map fixes `p₀ = ã`,
//! `p_{e_i} = s_i ξ̃_i` and imposes the homological equations at every
//! `|m| ≥ 2`. `A` is the floating-point inverse of the truncated block
//! derivative, extended by `1/(λ·m + k² − α)` on the tail (identity on the
//! first-order rows). The true eigenvalues enter through enclosures, so
//! `I − A A†` has no tail.

use crate::fisher::beta_windows;
use crate::interval::{round, Interval};
use crate::linalg::{self, block_col_sums, col_sums_f64, point_times_midrad};
use crate::manifold::{dot, BlockInverse, BlockSystem, ManifoldApprox, ManifoldError};
use crate::multi_index::{degree, precedes, MultiBox};
use crate::par::{self, Exec};
use crate::radii::{RadiiError, RadiiPoly};
use crate::sequence_space::{conv_acc, conv_operator, SeqError, Weights};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("manifold not validated ({dominant} dominates): {bounds}")]
    NotValidated {
        dominant: String,
        bounds: Box<ManifoldBounds>,
        #[source]
        source: RadiiError,
    },
    #[error("tail denominator {0} is not positive; raise the truncation order")]
    TailGap(Interval),
}

/// Every term of the manifold bounds; all values are upper bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldBounds {
    /// `A` applied to `ā − ã`.
    pub y_equilibrium: f64,
    /// `A` applied to the eigenvector defects and rounding of `s_i ξ̄_i`.
    pub y_eigen: f64,
    /// `A^{MK}` applied to the finite defect.
    pub y_finite: f64,
    /// High Fourier modes at orders `m ⪯ M`.
    pub y_tail: f64,
    /// Orders `M ≺ m ⪯ 2M` outside the box.
    pub y_far: f64,
    /// Terms carrying the tail `c^∞`.
    pub y_c_tail: f64,
    pub y: f64,
    /// `‖I − A^{MK} Df^{MK}‖`.
    pub epsilon: f64,
    pub z_high_modes: f64,
    pub z_tail_finite: f64,
    pub z_tail_tail: f64,
    pub z_c_tail: f64,
    pub z_far: f64,
    pub z1: f64,
    pub z2: f64,
    /// Largest column norm of `A` over columns `|m| ≥ 2`.
    pub max_col: f64,
}

impl ManifoldBounds {
    fn named(&self) -> [(&'static str, f64); 13] {
        [
            ("Y equilibrium", self.y_equilibrium),
            ("Y eigen", self.y_eigen),
            ("Y finite", self.y_finite),
            ("Y tail", self.y_tail),
            ("Y far", self.y_far),
            ("Y c-tail", self.y_c_tail),
            ("epsilon", self.epsilon),
            ("Z high modes", self.z_high_modes),
            ("Z tail (finite)", self.z_tail_finite),
            ("Z tail (tail)", self.z_tail_tail),
            ("Z c-tail", self.z_c_tail),
            ("Z far", self.z_far),
            ("Z2", self.z2),
        ]
    }

    /// The term most responsible for a failure: the largest `Z₁` part when
    /// `Z₁ ≥ 1`, otherwise the largest `Y` part.
    pub fn dominant(&self) -> &'static str {
        let named = self.named();
        let pick = |range: std::ops::Range<usize>| {
            named[range]
                .iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|x| x.0)
                .unwrap_or("Y")
        };
        if self.z1 >= 1.0 {
            pick(6..12)
        } else if self.z2 * self.y * 4.0 >= (1.0 - self.z1).powi(2) {
            "Z2"
        } else {
            pick(0..6)
        }
    }
}

impl fmt::Display for ManifoldBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y = {:e}, Z1 = {:e}, Z2 = {:e} [", self.y, self.z1, self.z2)?;
        for (i, (name, v)) in self.named().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} {v:e}")?;
        }
        write!(f, "]")
    }
}

/// A validated chart: the true coefficients lie within `r` of `p̄` in the
/// norm `Σ_m |p_m|_ν`, so `sup_{θ ∈ B₁} ‖P(θ) − P̄(θ)‖_ν ≤ r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldCertificate {
    pub approx: ManifoldApprox,
    pub r: f64,
    pub r_max: Option<f64>,
    pub bounds: ManifoldBounds,
}

/// `sup_{j > K} (|b_{j−k}| + |b_{j+k}|)/(2ν^j)` for each `k ≤ K`, the
/// bound on `|(b ∗ h)_k|` over unit `h` supported on modes above `K`.
pub fn tail_product_bound(b: &[Interval], k_max: usize, nu: Interval) -> Vec<Interval> {
    beta_windows(b, k_max, nu)
}

fn up(x: Interval) -> f64 {
    x.hi().max(0.0)
}

fn add_up(a: f64, b: f64) -> f64 {
    round::add_up(a, b)
}

fn mul_up(a: f64, b: f64) -> f64 {
    round::mul_up(a, b)
}

/// Interval blocks of `Df^{MK}(p̄)` as midpoint-radius pairs.
struct IntervalBlocks {
    diag: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    toeplitz: Vec<(DMatrix<f64>, DMatrix<f64>)>,
}

impl IntervalBlocks {
    fn block(&self, shape: &MultiBox, m: &[usize], l: &[usize]) -> Option<&(DMatrix<f64>, DMatrix<f64>)> {
        if m == l {
            Some(&self.diag[shape.index(m)])
        } else if degree(m) <= 1 {
            None
        } else {
            Some(&self.toeplitz[shape.diff_index(m, l)])
        }
    }
}

/// Validates a manifold chart.
pub fn validate_manifold(approx: &ManifoldApprox, exec: Exec) -> Result<ManifoldCertificate, ValidationError> {
    let prob = &approx.problem;
    let lin = &approx.linear;
    let shape = approx.shape().clone();
    let order = shape.order().to_vec();
    let d = shape.dim();
    let n = prob.n();
    let k_max = prob.k_max;
    let nu = prob.nu;
    let w = Weights::new(nu, 3 * n);
    let alpha = prob.alpha;
    let two_alpha = Interval::point(2.0) * alpha;
    let c: Vec<Interval> = prob.c.coeffs().to_vec();
    let c_tail = prob.c.tail();
    let c_norm = w.norm(&c);
    let rows = approx.rows();
    let rows_iv: Vec<Vec<Interval>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Interval::point(x)).collect())
        .collect();
    let lambdas = &lin.lambdas;
    let lam_min = lambdas.iter().map(|l| l.lo()).fold(f64::INFINITY, f64::min);
    let lam_m = |m: &[usize]| dot(lambdas, m);
    let kk = |k: usize| Interval::point((k * k) as f64);

    // Smallest tail denominators: high modes at |m| ≥ 2, and orders outside the box.
    let d_high = kk(k_max + 1) - alpha + Interval::point(2.0) * Interval::point(lam_min);
    let d_far = (0..d)
        .map(|i| Interval::point(lambdas[i].lo()) * Interval::point((order[i] + 1) as f64))
        .fold(Interval::ENTIRE, |a: Interval, b| if a == Interval::ENTIRE { b } else { a.min(b) })
        - alpha;
    for gap in [d_high, d_far] {
        if !gap.is_pos() {
            return Err(ValidationError::TailGap(gap));
        }
    }
    let inv_tail = Interval::ONE / d_high.min(d_far);

    // Floating-point A and interval Df.
    let sys = BlockSystem::new(approx);
    let inv = BlockInverse::new(&sys, exec)?;
    let products: Vec<Vec<Interval>> = par::map(exec, shape.len(), |i| {
        let mut b = vec![Interval::ZERO; 2 * n - 1];
        conv_acc(&c, &rows_iv[i], &mut b);
        b
    });
    let toeplitz: Vec<(DMatrix<f64>, DMatrix<f64>)> = par::map(exec, shape.len(), |i| {
        let mut t = conv_operator(&products[i], n);
        for r in 0..n {
            for s in 0..n {
                t.set(r, s, two_alpha * t.get(r, s));
            }
        }
        (t.mid(), t.rad())
    });
    let diag: Vec<(DMatrix<f64>, DMatrix<f64>)> = shape
        .iter()
        .map(|m| {
            if degree(&m) <= 1 {
                return (DMatrix::identity(n, n), DMatrix::zeros(n, n));
            }
            let lm = lam_m(&m);
            let mut t = conv_operator(&products[0], n);
            for r in 0..n {
                for s in 0..n {
                    let mut v = two_alpha * t.get(r, s);
                    if r == s {
                        v += lm + kk(r) - alpha;
                    }
                    t.set(r, s, v);
                }
            }
            (t.mid(), t.rad())
        })
        .collect();
    let blocks = IntervalBlocks { diag, toeplitz };
    let wn = Weights::new(nu, n);

    // ε = ‖I − A^{MK} Df^{MK}‖, column block by column block.
    let eps_cols: Vec<f64> = par::map(exec, shape.len(), |li| {
        let l = shape.multi(li);
        let mut sums = vec![0.0; n];
        for (mi, m) in shape.iter().enumerate().skip(li) {
            if !precedes(&l, &m) || (degree(&m) <= 1 && m != l) {
                continue;
            }
            let span: Vec<usize> = m.iter().zip(&l).map(|(a, b)| a - b).collect();
            let mids: Vec<Vec<usize>> = MultiBox::new(&span)
                .iter()
                .map(|t| l.iter().zip(&t).map(|(a, b)| a + b).collect::<Vec<usize>>())
                .filter(|nn| blocks.block(&shape, nn, &l).is_some())
                .collect();
            let cnt = mids.len();
            let mut x = DMatrix::zeros(n, n * cnt);
            let mut yc = DMatrix::zeros(n * cnt, n);
            let mut yr = DMatrix::zeros(n * cnt, n);
            for (t, nn) in mids.iter().enumerate() {
                x.view_mut((0, t * n), (n, n)).copy_from(inv.get(mi, nn));
                let (bc, br) = blocks.block(&shape, nn, &l).expect("block");
                yc.view_mut((t * n, 0), (n, n)).copy_from(bc);
                yr.view_mut((t * n, 0), (n, n)).copy_from(br);
            }
            let (pc, pr) = point_times_midrad(&x, &yc, Some(&yr));
            for (s, v) in sums.iter_mut().zip(block_col_sums(&pc, &pr, &wn, mi == li)) {
                *s = add_up(*s, v);
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    });
    let epsilon = eps_cols.into_iter().fold(0.0, f64::max);

    // Column sums of A: normalized per column, and unnormalized for Z_ii.
    let col_norm: Vec<Vec<f64>> = par::map(exec, shape.len(), |li| {
        let l = shape.multi(li);
        let mut sums = vec![0.0; n];
        for (mi, m) in shape.iter().enumerate().skip(li) {
            if !precedes(&l, &m) {
                continue;
            }
            for (s, v) in sums.iter_mut().zip(col_sums_f64(inv.get(mi, &l), &wn)) {
                *s = add_up(*s, v);
            }
        }
        sums
    });
    let col_raw: Vec<Vec<f64>> = col_norm
        .iter()
        .map(|cs| cs.iter().enumerate().map(|(k, &v)| mul_up(v, wn.get(k).hi())).collect())
        .collect();
    let col_max = |li: usize| col_norm[li].iter().copied().fold(0.0, f64::max);
    let mut max_col = up(inv_tail);
    for (li, m) in shape.iter().enumerate() {
        if degree(&m) >= 2 {
            max_col = max_col.max(col_max(li));
        }
    }

    // Y: the defect f(p̄) split into its pieces.
    let mut f_c = vec![vec![0.0; n]; shape.len()];
    let mut f_r = vec![vec![0.0; n]; shape.len()];
    let mut put = |i: usize, v: &[Interval]| {
        for (k, x) in v.iter().enumerate().take(n) {
            f_c[i][k] = x.mid();
            f_r[i][k] = x.rad();
        }
    };
    let f0: Vec<Interval> = (0..n).map(|k| rows_iv[0][k] - lin.a_bar.coeff(k)).collect();
    put(0, &f0);
    let y_equilibrium = mul_up(col_max(0).max(1.0), add_up(lin.r_a, up(lin.a_bar.tail())));
    let mut y_eigen = 0.0;
    for i in 0..d {
        let e = shape.unit(i);
        if !shape.contains(&e) {
            continue;
        }
        let ei = shape.index(&e);
        let s = lin.scalings[i];
        let fe: Vec<Interval> = (0..n).map(|k| rows_iv[ei][k] - s * lin.xis[i].coeff(k)).collect();
        put(ei, &fe);
        let xi_err = up(s.abs() * Interval::point(lin.r_xi[i]) + s.abs() * lin.xis[i].tail());
        y_eigen = add_up(y_eigen, mul_up(col_max(ei).max(1.0), xi_err));
    }

    let doubled: Vec<usize> = order.iter().map(|m| 2 * m).collect();
    let big = MultiBox::new(&doubled);
    // q_m = (p̄ ∗ p̄)_m and c̄ ∗ q_m with every mode kept.
    let cq: Vec<Option<(Interval, Vec<Interval>)>> = par::map(exec, big.len(), |bi| {
        let m = big.multi(bi);
        if degree(&m) < 2 {
            return None;
        }
        let mut q = vec![Interval::ZERO; 2 * n - 1];
        for l in MultiBox::new(&m).iter() {
            if !shape.contains(&l) {
                continue;
            }
            let rest: Vec<usize> = m.iter().zip(&l).map(|(a, b)| a - b).collect();
            if !shape.contains(&rest) {
                continue;
            }
            conv_acc(&rows_iv[shape.index(&l)], &rows_iv[shape.index(&rest)], &mut q);
        }
        let mut out = vec![Interval::ZERO; 3 * n - 2];
        conv_acc(&c, &q, &mut out);
        Some((w.norm(&q), out))
    });
    let mut y_tail = 0.0;
    let mut y_far = 0.0;
    let mut y_c_tail = 0.0;
    for (bi, entry) in cq.iter().enumerate() {
        let Some((q_norm, out)) = entry else { continue };
        let m = big.multi(bi);
        let lm = lam_m(&m);
        let c_inf = up(alpha * c_tail * *q_norm);
        if shape.contains(&m) {
            let i = shape.index(&m);
            let fin: Vec<Interval> = (0..n)
                .map(|k| (lm + kk(k) - alpha) * rows_iv[i][k] + alpha * out[k])
                .collect();
            put(i, &fin);
            for (k, v) in out.iter().enumerate().skip(n) {
                let t = w.get(k) * (alpha * *v).abs() / (lm + kk(k) - alpha);
                y_tail = add_up(y_tail, up(t));
            }
            let tail_col = up(Interval::ONE / (lm + kk(n) - alpha));
            y_c_tail = add_up(y_c_tail, mul_up(c_inf, col_max(i).max(tail_col)));
        } else {
            let base = lm - alpha;
            if !base.is_pos() {
                return Err(ValidationError::TailGap(base));
            }
            for (k, v) in out.iter().enumerate() {
                let t = w.get(k) * (alpha * *v).abs() / (lm + kk(k) - alpha);
                y_far = add_up(y_far, up(t));
            }
            y_c_tail = add_up(y_c_tail, up(Interval::point(c_inf) / base));
        }
    }
    let fc_all: Vec<DMatrix<f64>> = f_c.iter().map(|v| DMatrix::from_column_slice(n, 1, v)).collect();
    let fr_all: Vec<DMatrix<f64>> = f_r.iter().map(|v| DMatrix::from_column_slice(n, 1, v)).collect();
    let y_rows: Vec<f64> = par::map(exec, shape.len(), |mi| {
        let m = shape.multi(mi);
        let sub = MultiBox::new(&m);
        let cnt = sub.len();
        let mut x = DMatrix::zeros(n, n * cnt);
        let mut yc = DMatrix::zeros(n * cnt, 1);
        let mut yr = DMatrix::zeros(n * cnt, 1);
        for (t, l) in sub.iter().enumerate() {
            let li = shape.index(&l);
            x.view_mut((0, t * n), (n, n)).copy_from(inv.get(mi, &l));
            yc.view_mut((t * n, 0), (n, 1)).copy_from(&fc_all[li]);
            yr.view_mut((t * n, 0), (n, 1)).copy_from(&fr_all[li]);
        }
        let (vc, vr) = point_times_midrad(&x, &yc, Some(&yr));
        (0..n).fold(0.0, |s, k| {
            let mag = add_up(vc[k].abs(), vr[k]);
            add_up(s, mul_up(wn.get(k).hi(), mag))
        })
    });
    let y_finite = y_rows.into_iter().fold(0.0, add_up);
    let y = [y_equilibrium, y_eigen, y_finite, y_tail, y_far, y_c_tail]
        .into_iter()
        .fold(0.0, add_up);

    // Z.
    let p_norm = rows.iter().fold(0.0, |s, r| add_up(s, up(wn.norm(&r.iter().map(|&x| Interval::point(x)).collect::<Vec<_>>()))));
    let p_norm_iv = Interval::point(p_norm);
    let mut b_abs = vec![Interval::ZERO; 2 * n - 1];
    for b in &products {
        for (a, v) in b_abs.iter_mut().zip(b) {
            *a += v.abs();
        }
    }
    let b_abs_op = conv_operator(&b_abs, 3 * n - 2);
    let mut high = Interval::ZERO;
    for j in 0..n {
        let mut s = Interval::ZERO;
        for k in n..3 * n - 2 {
            s += w.get(k) * b_abs_op.get(k, j);
        }
        high = high.max(s / w.get(j));
    }
    let z_high_modes = up(two_alpha * high / d_high);

    let windows: Vec<Vec<f64>> = products
        .iter()
        .map(|b| tail_product_bound(b, k_max, nu).into_iter().map(up).collect())
        .collect();
    let z_fin_cols: Vec<f64> = par::map(exec, shape.len(), |li| {
        let l = shape.multi(li);
        let span: Vec<usize> = order.iter().zip(&l).map(|(a, b)| a - b).collect();
        let mut s = 0.0;
        for dd in MultiBox::new(&span).iter() {
            let m: Vec<usize> = l.iter().zip(&dd).map(|(a, b)| a + b).collect();
            if degree(&m) < 2 {
                continue;
            }
            let mi = shape.index(&m);
            let di = shape.index(&dd);
            for k in 0..n {
                s = add_up(s, mul_up(windows[di][k], col_raw[mi][k]));
            }
        }
        s
    });
    let z_tail_finite = mul_up(up(two_alpha), z_fin_cols.into_iter().fold(0.0, f64::max));
    let z_tail_tail = up(two_alpha * c_norm * p_norm_iv * inv_tail);
    let z_c_tail = up(two_alpha * c_tail * p_norm_iv * Interval::point(max_col));
    let z_far = up(two_alpha * c_norm * p_norm_iv / d_far);
    let z1 = [epsilon, z_high_modes, z_tail_finite, z_tail_tail, z_c_tail, z_far]
        .into_iter()
        .fold(0.0, add_up);
    let z2 = up(two_alpha * (c_norm + c_tail) * Interval::point(max_col));

    let bounds = ManifoldBounds {
        y_equilibrium,
        y_eigen,
        y_finite,
        y_tail,
        y_far,
        y_c_tail,
        y,
        epsilon,
        z_high_modes,
        z_tail_finite,
        z_tail_tail,
        z_c_tail,
        z_far,
        z1,
        z2,
        max_col,
    };
    let poly = RadiiPoly::new(Interval::upto(y), Interval::upto(z1), Interval::upto(z2));
    match poly.find_radius() {
        Ok(rad) => Ok(ManifoldCertificate {
            approx: approx.clone(),
            r: rad.r,
            r_max: rad.r_max,
            bounds,
        }),
        Err(source) => Err(ValidationError::NotValidated {
            dominant: bounds.dominant().to_string(),
            bounds: Box::new(bounds),
            source,
        }),
    }
}

/// `‖I − A^{MK} Df^{MK}‖` computed densely, for cross-checking.
pub fn epsilon_dense(approx: &ManifoldApprox) -> Result<f64, ValidationError> {
    let sys = BlockSystem::new(approx);
    let dense = sys.dense();
    let inv = dense.clone().try_inverse().ok_or(ManifoldError::Singular(vec![]))?;
    let n = sys.n;
    let w = Weights::new(approx.problem.nu, n);
    let wide = Weights::new(approx.problem.nu, n);
    let (c, r) = point_times_midrad(&inv, &dense, None);
    let blocks = sys.shape.len();
    let mut best: f64 = 0.0;
    for lj in 0..blocks * n {
        let mut s = 0.0;
        for i in 0..blocks * n {
            let delta = if i == lj { 1.0 } else { 0.0 };
            let e = (delta - c[(i, lj)]).abs() + r[(i, lj)];
            s += w.get(i % n).hi() * e;
        }
        best = best.max(s / wide.get(lj % n).lo());
    }
    let _ = linalg::UNIT_ROUNDOFF;
    Ok(best)
}
