//! Dense interval matrices and rigorous products of floating-point matrices.

use crate::interval::{round, Interval};
use crate::sequence_space::{SeqError, Weights};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Row-major dense matrix of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMatrix {
            rows,
            cols,
            data: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Interval::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IMatrix { rows, cols, data }
    }

    pub fn from_f64(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| Interval::point(m[(i, j)]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mid(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mid())
    }

    /// Entrywise radii about [`mid`](Self::mid), rounded up.
    pub fn rad(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).rad())
    }

    pub fn mul_vec(&self, x: &[Interval]) -> Vec<Interval> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Plain interval product, for small matrices.
    pub fn mul(&self, other: &IMatrix) -> IMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Interval::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IMatrix) -> IMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> IMatrix {
        IMatrix::identity(self.rows).sub(self)
    }

    /// Enclosure of the ℓ¹_ν operator norm `max_j w_j⁻¹ Σ_i w_i |T_ij|`.
    pub fn weighted_norm(&self, w: &Weights) -> Interval {
        self.weighted_col_sums(w)
            .into_iter()
            .fold(Interval::ZERO, Interval::max)
    }

    /// Weighted column sums `w_j⁻¹ Σ_i w_i |T_ij|`, one per column.
    pub fn weighted_col_sums(&self, w: &Weights) -> Vec<Interval> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| w.ratio(i, j) * self.get(i, j).abs()).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Interval> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Unit roundoff of binary64.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// `γ_n = n u / (1 - n u)` rounded up.
pub fn gamma(n: usize) -> f64 {
    let nu = round::mul_up(n as f64, UNIT_ROUNDOFF);
    round::div_up(nu, round::sub_down(1.0, nu))
}

/// Upper bound on `|X| Y` for a nonnegative `Y`, from a floating-point product.
fn abs_product_up(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let ax = x.abs();
    let p = &ax * y;
    let g = gamma(x.ncols() + 2);
    let scale = round::div_up(1.0, round::sub_down(1.0, g));
    let floor = (x.ncols() as f64 + 2.0) * f64::MIN_POSITIVE;
    p.map(|v| round::add_up(round::mul_up(v, scale), floor))
}

/// Midpoint-radius enclosure of `X · [Yc ± Yr]` for a floating-point `X`.
///
/// Returns `(C, R)` with `|X·Y − C| ≤ R` entrywise for every `Y` in the
/// interval matrix. Only floating-point matrix products are used.
pub fn point_times_midrad(
    x: &DMatrix<f64>,
    yc: &DMatrix<f64>,
    yr: Option<&DMatrix<f64>>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = x * yc;
    let g = gamma(x.ncols());
    let d = DMatrix::from_fn(yc.nrows(), yc.ncols(), |i, j| {
        let base = round::mul_up(g, yc[(i, j)].abs());
        match yr {
            Some(r) => round::add_up(r[(i, j)], base),
            None => base,
        }
    });
    (c, abs_product_up(x, &d))
}

/// Midpoint-radius enclosure of `[Xc ± Xr] · [Yc ± Yr]`.
pub fn midrad_product(
    xc: &DMatrix<f64>,
    xr: &DMatrix<f64>,
    yc: &DMatrix<f64>,
    yr: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (c, r1) = point_times_midrad(xc, yc, Some(yr));
    let d2 = yc.zip_map(yr, |a, b| round::add_up(a.abs(), b));
    let r2 = abs_product_up(xr, &d2);
    let r = r1.zip_map(&r2, |a, b| round::add_up(a, b).next_up());
    (c, r)
}

/// Interval matrix from a midpoint-radius pair.
pub fn from_midrad(c: &DMatrix<f64>, r: &DMatrix<f64>) -> IMatrix {
    IMatrix::from_fn(c.nrows(), c.ncols(), |i, j| Interval::mid_rad(c[(i, j)], r[(i, j)]))
}

/// Rigorous product of two interval matrices via midpoint-radius splitting.
pub fn rigorous_mul(a: &IMatrix, b: &IMatrix) -> IMatrix {
    let (c, r) = midrad_product(&a.mid(), &a.rad(), &b.mid(), &b.rad());
    from_midrad(&c, &r)
}

/// Upper bound on `max_j w_j⁻¹ Σ_i w_i |δ_ij − C_ij ± R_ij|`.
pub fn identity_minus_norm(c: &DMatrix<f64>, r: &DMatrix<f64>, w: &Weights) -> f64 {
    identity_minus_col_sums(c, r, w)
        .into_iter()
        .fold(0.0, f64::max)
}

/// Weighted column sums of `δ·I − [C ± R]`, where `δ` is 1 for a diagonal
/// block and 0 otherwise.
pub fn block_col_sums(c: &DMatrix<f64>, r: &DMatrix<f64>, w: &Weights, diag: bool) -> Vec<f64> {
    (0..c.ncols())
        .map(|j| {
            let mut s = 0.0;
            for i in 0..c.nrows() {
                let delta = if diag && i == j { 1.0 } else { 0.0 };
                let d = round::sub_up(delta, c[(i, j)]).max(round::sub_up(c[(i, j)], delta));
                let e = round::add_up(d, r[(i, j)]);
                s = round::add_up(s, round::mul_up(w.get(i).hi(), e));
            }
            round::div_up(s, w.get(j).lo())
        })
        .collect()
}

fn identity_minus_col_sums(c: &DMatrix<f64>, r: &DMatrix<f64>, w: &Weights) -> Vec<f64> {
    block_col_sums(c, r, w, true)
}

/// Weighted column sums `w_j⁻¹ Σ_i w_i |X_ij|` of a floating-point matrix, rounded up.
pub fn col_sums_f64(x: &DMatrix<f64>, w: &Weights) -> Vec<f64> {
    (0..x.ncols())
        .map(|j| {
            let mut s = 0.0;
            for i in 0..x.nrows() {
                s = round::add_up(s, round::mul_up(w.get(i).hi(), x[(i, j)].abs()));
            }
            round::div_up(s, w.get(j).lo())
        })
        .collect()
}

/// Weighted operator norm of a floating-point matrix, rounded up.
pub fn norm_f64(x: &DMatrix<f64>, w: &Weights) -> f64 {
    col_sums_f64(x, w).into_iter().fold(0.0, f64::max)
}

/// Dense LU solve in floating point.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>, SeqError> {
    let lu = a.clone().lu();
    lu.solve(b).ok_or(SeqError::Dimension {
        expected: a.nrows(),
        got: 0,
    })
}

/// 1-norm condition estimate from an explicit inverse.
pub fn condition_1(a: &DMatrix<f64>) -> f64 {
    let inv = match a.clone().try_inverse() {
        Some(m) => m,
        None => return f64::INFINITY,
    };
    let n1 = |m: &DMatrix<f64>| {
        (0..m.ncols())
            .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    n1(a) * n1(&inv)
}
