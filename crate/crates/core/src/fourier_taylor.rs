//! Fourier-Taylor tensors: power series in `θ ∈ ℝ^d` whose coefficients are
//! cosine sequences, normed by `‖p‖_ν = Σ_m |p_m|_ν`.

use crate::interval::Interval;
use crate::multi_index::{precedes, MultiBox};
use crate::sequence_space::{conv_acc, CosineSeq, SeqError, Weights};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaylorError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("dimension mismatch: {0} versus {1}")]
    Dimension(usize, usize),
    #[error("coefficient count {got} does not match the box ({expected})")]
    Shape { expected: usize, got: usize },
    #[error("|θ_{0}| = {1} exceeds 1")]
    OutsideUnitBall(usize, f64),
    #[error("scaling s_{0} = {1} contains zero")]
    ZeroScaling(usize, Interval),
}

/// An element of `X^{ν,d}` truncated to the box `m ⪯ M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTaylorSeq {
    shape: MultiBox,
    nu: Interval,
    coeffs: Vec<CosineSeq>,
    tail: Interval,
}

impl FourierTaylorSeq {
    pub fn new(
        order: &[usize],
        nu: Interval,
        coeffs: Vec<CosineSeq>,
        tail: Interval,
    ) -> Result<Self, TaylorError> {
        let shape = MultiBox::new(order);
        if coeffs.len() != shape.len() {
            return Err(TaylorError::Shape {
                expected: shape.len(),
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            if c.nu() != nu {
                return Err(SeqError::WeightMismatch(nu, c.nu()).into());
            }
        }
        if tail.lo() < 0.0 {
            return Err(SeqError::NegativeTail(tail).into());
        }
        Ok(FourierTaylorSeq {
            shape,
            nu,
            coeffs,
            tail: Interval::upto(tail.hi()),
        })
    }

    pub fn zeros(order: &[usize], k_max: usize, nu: Interval) -> Result<Self, TaylorError> {
        let shape = MultiBox::new(order);
        let z = CosineSeq::zeros(nu, k_max)?;
        Self::new(order, nu, vec![z; shape.len()], Interval::ZERO)
    }

    /// Tail-free tensor from floating-point coefficient rows in storage order.
    pub fn from_f64(order: &[usize], nu: Interval, rows: &[Vec<f64>]) -> Result<Self, TaylorError> {
        let coeffs = rows
            .iter()
            .map(|r| CosineSeq::from_f64(nu, r))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(order, nu, coeffs, Interval::ZERO)
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn order(&self) -> &[usize] {
        self.shape.order()
    }

    pub fn shape(&self) -> &MultiBox {
        &self.shape
    }

    pub fn nu(&self) -> Interval {
        self.nu
    }

    pub fn tail(&self) -> Interval {
        self.tail
    }

    pub fn coeffs(&self) -> &[CosineSeq] {
        &self.coeffs
    }

    pub fn get(&self, m: &[usize]) -> &CosineSeq {
        &self.coeffs[self.shape.index(m)]
    }

    pub fn set(&mut self, m: &[usize], v: CosineSeq) {
        let i = self.shape.index(m);
        self.coeffs[i] = v;
    }

    /// Midpoints of every coefficient row, in storage order.
    pub fn mid_rows(&self) -> Vec<Vec<f64>> {
        self.coeffs.iter().map(|c| c.mid()).collect()
    }

    /// `Σ_m |p_m|_ν` plus the order tail.
    pub fn norm(&self) -> Interval {
        let s: Interval = self.coeffs.iter().map(|c| c.norm_nu()).sum();
        Interval::new(s.lo(), (s + self.tail).hi()).unwrap_or(Interval::ENTIRE)
    }

    /// `|p_m|_ν` for each stored `m`.
    pub fn coeff_norms(&self) -> Vec<Interval> {
        self.coeffs.iter().map(|c| c.norm_nu()).collect()
    }

    fn check(&self, other: &FourierTaylorSeq) -> Result<(), TaylorError> {
        if self.dim() != other.dim() {
            return Err(TaylorError::Dimension(self.dim(), other.dim()));
        }
        if self.nu != other.nu {
            return Err(SeqError::WeightMismatch(self.nu, other.nu).into());
        }
        Ok(())
    }

    /// Cauchy product `(p ∗ q)_m = Σ_{l⪯m} p_l ∗ q_{m−l}` on the box `M_p + M_q`.
    pub fn conv(&self, other: &FourierTaylorSeq) -> Result<FourierTaylorSeq, TaylorError> {
        self.check(other)?;
        let order: Vec<usize> = self
            .order()
            .iter()
            .zip(other.order())
            .map(|(a, b)| a + b)
            .collect();
        let shape = MultiBox::new(&order);
        let klen = self.max_len() + other.max_len() - 1;
        let mut fin = vec![vec![Interval::ZERO; klen]; shape.len()];
        let mut tails = vec![Interval::ZERO; shape.len()];
        for (li, l) in self.shape.iter().enumerate() {
            let pl = &self.coeffs[li];
            for (ni, n) in other.shape.iter().enumerate() {
                let qn = &other.coeffs[ni];
                let m: Vec<usize> = l.iter().zip(&n).map(|(a, b)| a + b).collect();
                let mi = shape.index(&m);
                conv_acc(pl.coeffs(), qn.coeffs(), &mut fin[mi]);
                if !(pl.is_tail_free() && qn.is_tail_free()) {
                    let up = |x: Interval| Interval::point(x.hi());
                    tails[mi] += up(pl.finite_norm()) * up(qn.tail())
                        + up(pl.tail()) * up(qn.finite_norm())
                        + up(pl.tail()) * up(qn.tail());
                }
            }
        }
        let coeffs = fin
            .into_iter()
            .zip(tails)
            .map(|(c, t)| CosineSeq::new(self.nu, c, t))
            .collect::<Result<Vec<_>, _>>()?;
        let tail = if self.tail.hi() == 0.0 && other.tail.hi() == 0.0 {
            Interval::ZERO
        } else {
            let fp = Interval::point(self.coeff_norms().into_iter().sum::<Interval>().hi());
            let fq = Interval::point(other.coeff_norms().into_iter().sum::<Interval>().hi());
            fp * other.tail + self.tail * fq + self.tail * other.tail
        };
        FourierTaylorSeq::new(&order, self.nu, coeffs, tail)
    }

    fn max_len(&self) -> usize {
        self.coeffs.iter().map(|c| c.coeffs().len()).max().unwrap_or(1).max(1)
    }

    /// Horner evaluation `Σ_{m⪯M} p_m θ^m` for `θ` in the closed unit box.
    pub fn eval(&self, theta: &[Interval]) -> Result<CosineSeq, TaylorError> {
        if theta.len() != self.dim() {
            return Err(TaylorError::Dimension(self.dim(), theta.len()));
        }
        for (i, t) in theta.iter().enumerate() {
            if t.mag() > 1.0 {
                return Err(TaylorError::OutsideUnitBall(i, t.mag()));
            }
        }
        let klen = self.max_len();
        let rows: Vec<Vec<Interval>> = self
            .coeffs
            .iter()
            .map(|c| (0..klen).map(|k| c.coeff(k)).collect())
            .collect();
        let fin = horner(&rows, self.order(), theta);
        // |θ^m| ≤ 1, so per-coefficient tails add without weights.
        let tail: Interval = self.coeffs.iter().map(|c| c.tail()).sum::<Interval>() + self.tail;
        Ok(CosineSeq::new(self.nu, fin, tail)?)
    }

    /// `p_m ↦ s^m p_m`.
    pub fn rescale(&self, s: &[Interval]) -> Result<FourierTaylorSeq, TaylorError> {
        if s.len() != self.dim() {
            return Err(TaylorError::Dimension(self.dim(), s.len()));
        }
        for (i, si) in s.iter().enumerate() {
            if si.contains_zero() {
                return Err(TaylorError::ZeroScaling(i, *si));
            }
        }
        let coeffs = self
            .shape
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| c.scale(monomial(s, &m)))
            .collect();
        // Tail coefficients have |m| beyond the box; only |s_j| ≤ 1 keeps the bound.
        let tail = if s.iter().all(|x| x.mag() <= 1.0) {
            self.tail
        } else if self.tail.hi() == 0.0 {
            Interval::ZERO
        } else {
            Interval::upto(f64::INFINITY)
        };
        FourierTaylorSeq::new(self.order(), self.nu, coeffs, tail)
    }

    /// Keeps only `m ⪯ order`, moving the dropped norms into the tail.
    pub fn truncate(&self, order: &[usize]) -> Result<FourierTaylorSeq, TaylorError> {
        let shape = MultiBox::new(order);
        let mut coeffs = Vec::with_capacity(shape.len());
        for m in shape.iter() {
            if self.shape.contains(&m) {
                coeffs.push(self.get(&m).clone());
            } else {
                coeffs.push(CosineSeq::zeros(self.nu, 0)?);
            }
        }
        let mut tail = self.tail;
        for (m, c) in self.shape.iter().zip(&self.coeffs) {
            if !precedes(&m, order) {
                tail += Interval::point(c.norm_nu().hi());
            }
        }
        FourierTaylorSeq::new(order, self.nu, coeffs, tail)
    }

    /// Rows of `(m..., |p_m|_ν)` for plotting coefficient decay.
    pub fn decay_csv(&self) -> String {
        let d = self.dim();
        let mut s = String::new();
        for i in 0..d {
            s.push_str(&format!("m{},", i + 1));
        }
        s.push_str("norm_upper\n");
        for (m, c) in self.shape.iter().zip(&self.coeffs) {
            for mi in &m {
                s.push_str(&format!("{mi},"));
            }
            s.push_str(&format!("{:e}\n", c.norm_nu().hi()));
        }
        s
    }
}

/// `Π_j s_j^{m_j}`.
pub fn monomial(s: &[Interval], m: &[usize]) -> Interval {
    s.iter()
        .zip(m)
        .fold(Interval::ONE, |acc, (x, &e)| acc * x.powi(e as i32))
}

/// Iterated Horner: the last variable is eliminated first.
fn horner(rows: &[Vec<Interval>], order: &[usize], theta: &[Interval]) -> Vec<Interval> {
    if order.is_empty() {
        return rows[0].clone();
    }
    let d = order.len();
    let inner = order[d - 1] + 1;
    let t = theta[d - 1];
    let reduced: Vec<Vec<Interval>> = rows
        .chunks(inner)
        .map(|chunk| {
            let mut acc = chunk[inner - 1].clone();
            for row in chunk[..inner - 1].iter().rev() {
                for (a, &r) in acc.iter_mut().zip(row) {
                    *a = *a * t + r;
                }
            }
            acc
        })
        .collect();
    horner(&reduced, &order[..d - 1], &theta[..d - 1])
}

/// Floating-point Horner evaluation of coefficient rows in storage order.
pub fn eval_f64(rows: &[Vec<f64>], order: &[usize], theta: &[f64]) -> Vec<f64> {
    if order.is_empty() {
        return rows[0].clone();
    }
    let d = order.len();
    let inner = order[d - 1] + 1;
    let t = theta[d - 1];
    let reduced: Vec<Vec<f64>> = rows
        .chunks(inner)
        .map(|chunk| {
            let mut acc = chunk[inner - 1].clone();
            for row in chunk[..inner - 1].iter().rev() {
                for (a, &r) in acc.iter_mut().zip(row) {
                    *a = *a * t + r;
                }
            }
            acc
        })
        .collect();
    eval_f64(&reduced, &order[..d - 1], &theta[..d - 1])
}

/// Floating-point `∂P/∂θ_i` rows: coefficient `m` becomes `(m_i + 1) p_{m + e_i}`.
pub fn derivative_rows(rows: &[Vec<f64>], shape: &MultiBox, i: usize) -> Vec<Vec<f64>> {
    shape
        .iter()
        .map(|m| {
            let mut n = m.clone();
            n[i] += 1;
            if shape.contains(&n) {
                let f = n[i] as f64;
                rows[shape.index(&n)].iter().map(|x| x * f).collect()
            } else {
                vec![0.0; rows[0].len()]
            }
        })
        .collect()
}

/// Sum of weighted norms of floating-point rows.
pub fn norm_rows(rows: &[Vec<f64>], w: &Weights) -> f64 {
    rows.iter().map(|r| w.norm_f64(r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu() -> Interval {
        Interval::from_decimal("1.1").unwrap()
    }

    #[test]
    fn identity_and_square_of_theta() {
        let nu = nu();
        let e0 = CosineSeq::unit(nu, 0, 0).unwrap();
        let z = CosineSeq::zeros(nu, 0).unwrap();
        let one = FourierTaylorSeq::new(&[0], nu, vec![e0.clone()], Interval::ZERO).unwrap();
        let q = FourierTaylorSeq::new(&[1], nu, vec![z, e0], Interval::ZERO).unwrap();
        assert_eq!(one.conv(&q).unwrap().coeffs(), q.coeffs());
        let sq = q.conv(&q).unwrap();
        assert_eq!(sq.order(), &[2]);
        let mids = sq.mid_rows();
        assert_eq!(mids, vec![vec![0.0], vec![0.0], vec![1.0]]);
    }

    #[test]
    fn norm_and_linear_eval() {
        let nu = nu();
        let p = FourierTaylorSeq::from_f64(&[1], nu, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let n = p.norm();
        assert!(n.contains(3.2));
        let half = Interval::point(0.5);
        let v = p.eval(&[half]).unwrap();
        assert_eq!(v.mid(), vec![1.0, 0.5]);
        assert_eq!(p.eval(&[Interval::ZERO]).unwrap().coeffs(), p.get(&[0]).coeffs());
        assert!(p.eval(&[Interval::point(1.5)]).is_err());
    }

    #[test]
    fn rescale_scales_by_monomials() {
        let nu = nu();
        let rows: Vec<Vec<f64>> = (0..4).map(|m| vec![m as f64 + 1.0]).collect();
        let p = FourierTaylorSeq::from_f64(&[3], nu, &rows).unwrap();
        let q = p.rescale(&[Interval::point(2.0)]).unwrap();
        assert_eq!(q.get(&[3]).mid(), vec![32.0]);
        let same = p.rescale(&[Interval::ONE]).unwrap();
        assert_eq!(same, p);
        assert!(p.rescale(&[Interval::ZERO]).is_err());
    }

    #[test]
    fn two_dimensional_eval_matches_monomials() {
        let nu = nu();
        let shape = MultiBox::new(&[2, 3]);
        let rows: Vec<Vec<f64>> = (0..shape.len()).map(|i| vec![1.0 / (i as f64 + 1.0), 0.5]).collect();
        let p = FourierTaylorSeq::from_f64(&[2, 3], nu, &rows).unwrap();
        let th = [0.3, -0.7];
        let v = p.eval(&[Interval::point(th[0]), Interval::point(th[1])]).unwrap();
        let mut direct = [0.0; 2];
        for (i, m) in shape.iter().enumerate() {
            let mono = th[0].powi(m[0] as i32) * th[1].powi(m[1] as i32);
            direct[0] += rows[i][0] * mono;
            direct[1] += rows[i][1] * mono;
        }
        for (k, &d) in direct.iter().enumerate() {
            assert!(v.coeff(k).inflate(1e-14).contains(d));
        }
        let f = eval_f64(&rows, &[2, 3], &th);
        assert!((f[0] - direct[0]).abs() < 1e-14);
    }
}
