//! The weighted sequence space ℓ¹_ν of cosine coefficients.
//!
//! A sequence `a` represents `a₀ + 2 Σ_{k≥1} a_k cos(kx)` and carries the norm
//! `|a|_ν = |a₀| + 2 Σ_{k≥1} |a_k| ν^k`. With this normalization the
//! reflected-index convolution makes ℓ¹_ν a Banach algebra with unit `e₀`.

use crate::interval::Interval;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeqError {
    #[error("weight ν must satisfy ν > 1, got {0}")]
    BadWeight(Interval),
    #[error("tail bound must be nonnegative, got {0}")]
    NegativeTail(Interval),
    #[error("sequences carry different weights {0} and {1}")]
    WeightMismatch(Interval, Interval),
    #[error("Poisson parameter violates r·ν < 1 (r·ν = {0})")]
    PoissonNotSummable(Interval),
    #[error("tail rule has no computable supremum beyond mode {0}")]
    UnboundedTail(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Minimal arithmetic shared by floating-point and interval coefficients.
pub trait Ring: Copy + Add<Output = Self> + Mul<Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn two() -> Self;
}

impl Ring for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn two() -> Self {
        2.0
    }
}

impl Ring for Interval {
    #[inline]
    fn zero() -> Self {
        Interval::ZERO
    }
    #[inline]
    fn two() -> Self {
        Interval::point(2.0)
    }
}

/// Full cosine convolution of two finite coefficient vectors.
///
/// Output has length `a.len() + b.len() - 1`; all modes are kept.
pub fn conv_raw<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    conv_acc(a, b, &mut out);
    out
}

/// Accumulates `a ∗ b` into `out`, dropping modes beyond `out.len()`.
pub fn conv_acc<T: Ring>(a: &[T], b: &[T], out: &mut [T]) {
    let n = out.len();
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let p = ai * bj;
            if i + j < n {
                out[i + j] = out[i + j] + p;
            }
            if i > 0 && j > 0 {
                let d = i.abs_diff(j);
                if d < n {
                    out[d] = out[d] + if i == j { T::two() * p } else { p };
                }
            }
        }
    }
}

/// Floating-point product of several cosine sequences through the FFT,
/// returning modes `0..out_len`. Not rigorous; used by Newton iterations.
pub fn conv_fft(factors: &[&[f64]], out_len: usize) -> Vec<f64> {
    use rustfft::{num_complex::Complex, FftPlanner};
    let span: usize = factors.iter().map(|f| f.len().saturating_sub(1)).sum();
    let n = (2 * span + 1).next_power_of_two().max(2);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut acc = vec![Complex::new(1.0, 0.0); n];
    for f in factors {
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (k, &x) in f.iter().enumerate() {
            buf[k].re += x;
            if k > 0 {
                buf[n - k].re += x;
            }
        }
        fwd.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a *= b;
        }
    }
    inv.process(&mut acc);
    let scale = 1.0 / n as f64;
    (0..out_len)
        .map(|k| if k <= span { acc[k].re * scale } else { 0.0 })
        .collect()
}

/// Weights `w₀ = 1`, `w_k = 2ν^k` of the ℓ¹_ν norm.
#[derive(Debug, Clone)]
pub struct Weights {
    nu: Interval,
    w: Vec<Interval>,
}

impl Weights {
    pub fn new(nu: Interval, len: usize) -> Self {
        let mut w = Vec::with_capacity(len);
        let mut p = Interval::ONE;
        for k in 0..len {
            if k == 0 {
                w.push(Interval::ONE);
            } else {
                p *= nu;
                w.push(Interval::point(2.0) * p);
            }
        }
        Weights { nu, w }
    }

    pub fn nu(&self) -> Interval {
        self.nu
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `w_k`, extended on demand beyond the precomputed range.
    pub fn get(&self, k: usize) -> Interval {
        if k < self.w.len() {
            return self.w[k];
        }
        weight(self.nu, k)
    }

    /// `w_i / w_j`, exact on the diagonal.
    pub fn ratio(&self, i: usize, j: usize) -> Interval {
        if i == j {
            return Interval::ONE;
        }
        let two = match (i > 0, j > 0) {
            (true, false) => Interval::point(2.0),
            (false, true) => Interval::point(0.5),
            _ => Interval::ONE,
        };
        two * self.nu.powi(i as i32 - j as i32)
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.w
    }

    /// Weighted sum `Σ w_k |a_k|` as an enclosure `[Σ w mig, Σ w mag]`.
    pub fn norm(&self, a: &[Interval]) -> Interval {
        a.iter()
            .enumerate()
            .map(|(k, x)| self.get(k) * x.abs())
            .sum()
    }

    /// Upper bound on `Σ w_k |a_k|` for floating-point coefficients.
    pub fn norm_f64(&self, a: &[f64]) -> f64 {
        a.iter()
            .enumerate()
            .map(|(k, &x)| self.get(k) * Interval::point(x.abs()))
            .sum::<Interval>()
            .hi()
    }

    /// Dual norm `max_k |b_k| / w_k` of a row functional.
    pub fn dual_norm(&self, b: &[Interval]) -> Interval {
        let mut m = Interval::ZERO;
        for (k, x) in b.iter().enumerate() {
            m = m.max(x.abs() / self.get(k));
        }
        m
    }
}

/// `w_k` computed directly.
pub fn weight(nu: Interval, k: usize) -> Interval {
    if k == 0 {
        Interval::ONE
    } else {
        Interval::point(2.0) * nu.powi(k as i32)
    }
}

/// Floating-point ℓ¹_ν norm, for diagnostics only.
pub fn norm_f64(a: &[f64], nu: f64) -> f64 {
    let mut s = 0.0;
    let mut p = 1.0;
    for (k, &x) in a.iter().enumerate() {
        if k == 0 {
            s += x.abs();
        } else {
            p *= nu;
            s += 2.0 * x.abs() * p;
        }
    }
    s
}

/// An element of ℓ¹_ν: finitely many interval coefficients plus a tail bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSeq {
    nu: Interval,
    coeffs: Vec<Interval>,
    tail: Interval,
}

impl CosineSeq {
    pub fn new(nu: Interval, coeffs: Vec<Interval>, tail: Interval) -> Result<Self, SeqError> {
        if !(nu.lo() > 1.0) {
            return Err(SeqError::BadWeight(nu));
        }
        if tail.lo() < 0.0 {
            return Err(SeqError::NegativeTail(tail));
        }
        Ok(CosineSeq {
            nu,
            coeffs,
            tail: Interval::upto(tail.hi()),
        })
    }

    /// Tail-free sequence with exact floating-point coefficients.
    pub fn from_f64(nu: Interval, coeffs: &[f64]) -> Result<Self, SeqError> {
        Self::new(
            nu,
            coeffs.iter().map(|&x| Interval::point(x)).collect(),
            Interval::ZERO,
        )
    }

    pub fn zeros(nu: Interval, k_max: usize) -> Result<Self, SeqError> {
        Self::new(nu, vec![Interval::ZERO; k_max + 1], Interval::ZERO)
    }

    /// The unit vector `e_k` padded to `k_max`.
    pub fn unit(nu: Interval, k: usize, k_max: usize) -> Result<Self, SeqError> {
        let mut c = vec![Interval::ZERO; k_max.max(k) + 1];
        c[k] = Interval::ONE;
        Self::new(nu, c, Interval::ZERO)
    }

    pub fn nu(&self) -> Interval {
        self.nu
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Interval] {
        &mut self.coeffs
    }

    /// Upper bound on the ℓ¹_ν norm of the neglected modes.
    pub fn tail(&self) -> Interval {
        self.tail
    }

    /// Highest stored mode.
    pub fn k_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Interval {
        self.coeffs.get(k).copied().unwrap_or(Interval::ZERO)
    }

    pub fn mid(&self) -> Vec<f64> {
        self.coeffs.iter().map(|x| x.mid()).collect()
    }

    pub fn is_tail_free(&self) -> bool {
        self.tail.hi() == 0.0
    }

    pub fn with_tail(mut self, tail: Interval) -> Self {
        self.tail = Interval::upto(tail.hi());
        self
    }

    /// Adds `extra` to the tail bound.
    pub fn add_tail(mut self, extra: f64) -> Self {
        self.tail = Interval::upto((self.tail + Interval::point(extra.abs())).hi());
        self
    }

    /// Enclosure of `|a|_ν` valid for every sequence represented.
    pub fn norm_nu(&self) -> Interval {
        let w = Weights::new(self.nu, self.coeffs.len());
        let fin = w.norm(&self.coeffs);
        Interval::new(fin.lo(), (fin + self.tail).hi()).unwrap_or(Interval::ENTIRE)
    }

    /// Norm of the finite part only.
    pub fn finite_norm(&self) -> Interval {
        Weights::new(self.nu, self.coeffs.len()).norm(&self.coeffs)
    }

    /// Keeps modes `0..=k_max`, moving the rest into the tail bound.
    pub fn truncate(&self, k_max: usize) -> CosineSeq {
        if self.coeffs.len() <= k_max + 1 {
            return self.clone();
        }
        let w = Weights::new(self.nu, self.coeffs.len());
        let dropped: Interval = (k_max + 1..self.coeffs.len())
            .map(|k| w.get(k) * self.coeffs[k].abs())
            .sum();
        CosineSeq {
            nu: self.nu,
            coeffs: self.coeffs[..=k_max].to_vec(),
            tail: Interval::upto((self.tail + dropped).hi()),
        }
    }

    /// Zero-pads the finite part to `k_max`.
    pub fn padded(&self, k_max: usize) -> CosineSeq {
        let mut c = self.clone();
        if c.coeffs.len() < k_max + 1 {
            c.coeffs.resize(k_max + 1, Interval::ZERO);
        }
        c
    }

    fn check_nu(&self, other: &CosineSeq) -> Result<(), SeqError> {
        if self.nu != other.nu {
            return Err(SeqError::WeightMismatch(self.nu, other.nu));
        }
        Ok(())
    }

    /// Banach-algebra product. The finite part is the exact convolution of the
    /// finite parts; products involving a tail are bounded in norm.
    pub fn conv(&self, other: &CosineSeq) -> Result<CosineSeq, SeqError> {
        self.check_nu(other)?;
        let coeffs = conv_raw(&self.coeffs, &other.coeffs);
        let tail = if self.is_tail_free() && other.is_tail_free() {
            Interval::ZERO
        } else {
            let (fa, fb) = (self.finite_norm(), other.finite_norm());
            let (ta, tb) = (self.tail, other.tail);
            let up = |x: Interval| Interval::point(x.hi());
            up(fa) * up(tb) + up(ta) * up(fb) + up(ta) * up(tb)
        };
        Ok(CosineSeq {
            nu: self.nu,
            coeffs,
            tail: Interval::upto(tail.hi()),
        })
    }

    pub fn add(&self, other: &CosineSeq) -> Result<CosineSeq, SeqError> {
        self.check_nu(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Ok(CosineSeq {
            nu: self.nu,
            coeffs,
            tail: Interval::upto((self.tail + other.tail).hi()),
        })
    }

    pub fn sub(&self, other: &CosineSeq) -> Result<CosineSeq, SeqError> {
        self.add(&other.scale(Interval::point(-1.0)))
    }

    pub fn scale(&self, s: Interval) -> CosineSeq {
        CosineSeq {
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|&x| x * s).collect(),
            tail: Interval::upto((self.tail * Interval::point(s.mag())).hi()),
        }
    }

    /// One `k, midpoint` row per stored mode.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,coefficient\n");
        for (k, x) in self.coeffs.iter().enumerate() {
            s.push_str(&format!("{k},{:e}\n", x.mid()));
        }
        s
    }

    /// Evaluates `a₀ + 2 Σ a_k cos(kx)` at the midpoints of the coefficients.
    pub fn eval_mid(&self, x: f64) -> f64 {
        eval_cosine(&self.mid(), x)
    }
}

/// Matrix of `h ↦ Π_n (b ∗ h)` on modes `0..n`:
/// `C_{k0} = b_k` and `C_{kj} = b_{|k−j|} + b_{k+j}` for `j ≥ 1`.
pub fn conv_operator(b: &[Interval], n: usize) -> crate::linalg::IMatrix {
    let at = |i: usize| b.get(i).copied().unwrap_or(Interval::ZERO);
    crate::linalg::IMatrix::from_fn(n, n, |k, j| {
        if j == 0 {
            at(k)
        } else {
            at(k.abs_diff(j)) + at(k + j)
        }
    })
}

/// Floating-point version of [`conv_operator`].
pub fn conv_operator_f64(b: &[f64], n: usize) -> nalgebra::DMatrix<f64> {
    let at = |i: usize| b.get(i).copied().unwrap_or(0.0);
    nalgebra::DMatrix::from_fn(n, n, |k, j| {
        if j == 0 {
            at(k)
        } else {
            at(k.abs_diff(j)) + at(k + j)
        }
    })
}

/// `a₀ + 2 Σ_{k≥1} a_k cos(kx)` in floating point.
pub fn eval_cosine(a: &[f64], x: f64) -> f64 {
    a.iter()
        .enumerate()
        .map(|(k, &ak)| if k == 0 { ak } else { 2.0 * ak * (k as f64 * x).cos() })
        .sum()
}

/// Coefficients `c_k = r^k` of the Poisson kernel `1 + 2 Σ r^k cos(kx)`.
pub fn poisson_coeffs(r: Interval, k_max: usize, nu: Interval) -> Result<CosineSeq, SeqError> {
    let rnu = r * nu;
    if !(rnu.hi() < 1.0) || r.lo() < 0.0 {
        return Err(SeqError::PoissonNotSummable(rnu));
    }
    let coeffs: Vec<Interval> = (0..=k_max).map(|k| r.powi(k as i32)).collect();
    let tail = Interval::point(2.0) * rnu.powi(k_max as i32 + 1) / (Interval::ONE - rnu);
    CosineSeq::new(nu, coeffs, tail)
}

/// Diagonal action of an operator on the modes `k > K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailRule {
    Zero,
    Identity,
    /// `k ↦ c0 + c2 k²`.
    Affine { c0: Interval, c2: Interval },
    /// `k ↦ 1 / (c0 + c2 k²)`.
    InverseAffine { c0: Interval, c2: Interval },
}

impl TailRule {
    pub fn at(&self, k: usize) -> Interval {
        let k2 = Interval::point((k * k) as f64);
        match *self {
            TailRule::Zero => Interval::ZERO,
            TailRule::Identity => Interval::ONE,
            TailRule::Affine { c0, c2 } => c0 + c2 * k2,
            TailRule::InverseAffine { c0, c2 } => Interval::ONE / (c0 + c2 * k2),
        }
    }

    /// Upper bound on `sup_{k > K} |rule(k)|`.
    pub fn sup_beyond(&self, k_max: usize) -> Result<Interval, SeqError> {
        match *self {
            TailRule::Zero => Ok(Interval::ZERO),
            TailRule::Identity => Ok(Interval::ONE),
            TailRule::Affine { c2, .. } if c2 == Interval::ZERO => Ok(self.at(k_max + 1).abs()),
            TailRule::Affine { .. } => Err(SeqError::UnboundedTail(k_max)),
            TailRule::InverseAffine { c0, c2 } => {
                let k = k_max + 1;
                let d = c0 + c2 * Interval::point((k * k) as f64);
                // |c0 + c2 k²| grows with k once it has the sign of c2.
                let grows = (c2.is_pos() && d.is_pos()) || (c2.is_neg() && d.is_neg());
                if grows || (c2 == Interval::ZERO && !d.contains_zero()) {
                    Ok(Interval::upto((Interval::ONE / d).mag()))
                } else {
                    Err(SeqError::UnboundedTail(k_max))
                }
            }
        }
    }
}

/// A finite interval block acting on modes `0..=K` plus a diagonal tail rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub block: crate::linalg::IMatrix,
    pub tail: TailRule,
}

impl BlockOperator {
    pub fn new(block: crate::linalg::IMatrix, tail: TailRule) -> Self {
        assert_eq!(block.rows(), block.cols(), "block must be square");
        BlockOperator { block, tail }
    }

    pub fn k_max(&self) -> usize {
        self.block.rows() - 1
    }

    /// Enclosure of the ℓ¹_ν operator norm.
    pub fn op_norm(&self, nu: Interval) -> Result<Interval, SeqError> {
        let w = Weights::new(nu, self.block.rows());
        let fin = self.block.weighted_norm(&w);
        let tail = self.tail.sup_beyond(self.k_max())?;
        Ok(fin.max(tail))
    }

    /// Applies the operator to a sequence whose finite part fits the block.
    /// Modes beyond `K` are scaled by the tail rule; the tail bound is scaled
    /// by its supremum.
    pub fn apply(&self, a: &CosineSeq) -> Result<CosineSeq, SeqError> {
        let n = self.block.rows();
        let head: Vec<Interval> = (0..n).map(|k| a.coeff(k)).collect();
        let mut out = self.block.mul_vec(&head);
        for k in n..a.coeffs().len() {
            out.push(self.tail.at(k) * a.coeff(k));
        }
        let sup = self.tail.sup_beyond(self.k_max())?;
        CosineSeq::new(a.nu(), out, a.tail() * sup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IMatrix;

    fn nu11() -> Interval {
        Interval::from_decimal("1.1").unwrap()
    }

    #[test]
    fn unit_norms() {
        let nu = nu11();
        assert_eq!(CosineSeq::unit(nu, 0, 5).unwrap().norm_nu(), Interval::ONE);
        let n1 = CosineSeq::unit(nu, 1, 5).unwrap().norm_nu();
        assert!(n1.contains(2.2) && n1.width() < 1e-15);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(CosineSeq::zeros(Interval::ONE, 3).is_err());
        assert!(CosineSeq::new(nu11(), vec![], Interval::point(-1.0)).is_err());
    }

    #[test]
    fn e1_squared() {
        let nu = nu11();
        let e1 = CosineSeq::unit(nu, 1, 1).unwrap();
        let sq = e1.conv(&e1).unwrap();
        let mids: Vec<f64> = sq.mid();
        assert_eq!(mids, vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn fft_product_matches_direct() {
        let a = [0.5, -0.25, 0.125, 0.3];
        let b = [1.0, 0.2];
        let c = [0.7, -0.1, 0.05];
        let direct = conv_raw(&conv_raw(&a[..], &b[..]), &c[..]);
        let fast = conv_fft(&[&a, &b, &c], direct.len() + 2);
        for (k, x) in direct.iter().enumerate() {
            assert!((x - fast[k]).abs() < 1e-14);
        }
        assert_eq!(fast[direct.len()], 0.0);
    }

    #[test]
    fn conv_operator_reproduces_products() {
        let b = [0.5, -0.25, 0.125, 0.3, 0.1];
        let h = [0.2, 0.7, -0.4];
        let full = conv_raw(&b[..], &h[..]);
        let c = conv_operator_f64(&b, 3);
        for k in 0..3 {
            let v: f64 = (0..3).map(|j| c[(k, j)] * h[j]).sum();
            assert!((v - full[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn e0_is_identity() {
        let nu = nu11();
        let b = CosineSeq::from_f64(nu, &[0.5, -0.25, 0.125]).unwrap();
        let e0 = CosineSeq::unit(nu, 0, 0).unwrap();
        assert_eq!(e0.conv(&b).unwrap().coeffs(), b.coeffs());
    }

    #[test]
    fn weight_mismatch_is_an_error() {
        let a = CosineSeq::unit(nu11(), 0, 1).unwrap();
        let b = CosineSeq::unit(Interval::point(1.5), 0, 1).unwrap();
        assert!(matches!(a.conv(&b), Err(SeqError::WeightMismatch(..))));
    }

    #[test]
    fn poisson_norm_matches_closed_form() {
        let nu = nu11();
        let r = Interval::from_decimal("0.2").unwrap();
        let c = poisson_coeffs(r, 20, nu).unwrap();
        let n = c.norm_nu();
        let exact = 2.0 / (1.0 - 0.22) - 1.0;
        assert!(n.lo() <= exact + 1e-15 && exact - 1e-15 <= n.hi());
        assert!(n.width() < 1e-13);
    }

    #[test]
    fn poisson_tail_is_geometric() {
        let nu = nu11();
        let r = Interval::from_decimal("0.2").unwrap();
        let c = poisson_coeffs(r, 5, nu).unwrap();
        let expected = 2.0 * 0.22f64.powi(6) / 0.78;
        assert!((c.tail().hi() - expected).abs() < 1e-15);
        assert!(poisson_coeffs(Interval::point(0.95), 5, nu).is_err());
        let e0 = poisson_coeffs(Interval::ZERO, 4, nu).unwrap();
        assert_eq!(e0.norm_nu(), Interval::ONE);
    }

    #[test]
    fn tails_enter_the_product_bound() {
        let nu = nu11();
        let a = CosineSeq::from_f64(nu, &[1.0, 0.5]).unwrap().with_tail(Interval::point(0.1));
        let p = a.conv(&a).unwrap();
        assert!(p.norm_nu().hi() <= a.norm_nu().hi().powi(2) * (1.0 + 1e-14));
        assert!(p.tail().hi() > 0.0);
    }

    #[test]
    fn op_norms() {
        let nu = nu11();
        let id = BlockOperator::new(IMatrix::identity(4), TailRule::Identity);
        assert!(id.op_norm(nu).unwrap().contains(1.0) && id.op_norm(nu).unwrap().hi() < 1.0 + 1e-15);
        let alpha = Interval::from_decimal("2.1").unwrap();
        let t = BlockOperator::new(
            IMatrix::zeros(21, 21),
            TailRule::InverseAffine { c0: -alpha, c2: Interval::ONE },
        );
        let n = t.op_norm(nu).unwrap();
        assert!(n.contains(1.0 / (441.0 - 2.1)));
        let bad = BlockOperator::new(
            IMatrix::zeros(2, 2),
            TailRule::Affine { c0: alpha, c2: Interval::point(-1.0) },
        );
        assert!(bad.op_norm(nu).is_err());
    }
}
