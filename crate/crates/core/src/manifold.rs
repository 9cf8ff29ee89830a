//! Taylor coefficients of the unstable manifold of an equilibrium.
//!
//! The chart `P(θ) = Σ_m p_m θ^m` solves the invariance equation
//! `g(P(θ)) = DP(θ) Λ θ`. Matching powers gives, for `|m| ≥ 2`,
//!
//! `[(λ·m) I − Dg(p₀)] p_m = −α c ∗ Σ_{l ≠ 0, m} p_l ∗ p_{m−l}`,
//!
//! solved order by order. The derivative of the full map is block lower
//! triangular in the order `⪯`, which [`BlockSystem`] and [`BlockInverse`]
//! exploit.

use crate::eigen::EigenpairCertificate;
use crate::fisher::{EquilibriumCertificate, FisherProblem};
use crate::fourier_taylor::{self, FourierTaylorSeq, TaylorError};
use crate::interval::Interval;
use crate::linalg;
use crate::multi_index::{degree, MultiBox};
use crate::par::{self, Exec};
use crate::sequence_space::{conv_acc, conv_fft, conv_operator_f64, CosineSeq, SeqError, Weights};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifoldError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Taylor(#[from] TaylorError),
    #[error("{0}")]
    Shape(String),
    #[error("possible resonance: {lhs} overlaps λ_{j} = {rhs} at m = {m:?}")]
    Resonant {
        m: Vec<usize>,
        j: usize,
        lhs: Interval,
        rhs: Interval,
    },
    #[error("homological system at m = {m:?} is near-singular (condition {cond:e}); closest resonance λ_{j}")]
    NearResonance { m: Vec<usize>, cond: f64, j: usize },
    #[error("unstable eigenvalue {0} is not certainly positive")]
    NotUnstable(Interval),
    #[error("singular diagonal block at m = {0:?}")]
    Singular(Vec<usize>),
    #[error("|θ| must not exceed 1 (got {0})")]
    OutsideBall(f64),
}

/// Validated linear data at an equilibrium, plus eigenvector scalings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearData {
    /// `ā`; the true equilibrium lies within `r_a`.
    pub a_bar: CosineSeq,
    pub r_a: f64,
    /// Enclosures of the unstable eigenvalues `λ̃_j`.
    pub lambdas: Vec<Interval>,
    /// Numerical eigenvalues `λ̄_j` used by the floating-point solver.
    pub lambda_bar: Vec<f64>,
    /// `ξ̄_j`; the true eigenvectors lie within `r_xi[j]`.
    pub xis: Vec<CosineSeq>,
    pub r_xi: Vec<f64>,
    pub scalings: Vec<Interval>,
}

impl LinearData {
    pub fn from_certificates(
        a_cert: &EquilibriumCertificate,
        eig: &[EigenpairCertificate],
        scalings: Vec<Interval>,
    ) -> Result<Self, ManifoldError> {
        if eig.len() != scalings.len() {
            return Err(ManifoldError::Shape(format!(
                "{} eigenpairs but {} scalings",
                eig.len(),
                scalings.len()
            )));
        }
        Ok(LinearData {
            a_bar: a_cert.a_bar.clone(),
            r_a: a_cert.r,
            lambdas: eig.iter().map(|e| e.lambda).collect(),
            lambda_bar: eig.iter().map(|e| e.lambda_bar).collect(),
            xis: eig.iter().map(|e| e.xi_bar.clone()).collect(),
            r_xi: eig.iter().map(|e| e.r).collect(),
            scalings,
        })
    }

    /// Exact data at the origin: `λ_j = α − j²`, `ξ_j = e_j`, for the
    /// `d` leading modes.
    pub fn origin(prob: &FisherProblem, d: usize, scalings: Vec<Interval>) -> Result<Self, ManifoldError> {
        if scalings.len() != d {
            return Err(ManifoldError::Shape(format!("{d} directions but {} scalings", scalings.len())));
        }
        let lambdas: Vec<Interval> = (0..d).map(|j| prob.mu(j)).collect();
        Ok(LinearData {
            a_bar: CosineSeq::zeros(prob.nu, prob.k_max)?,
            r_a: 0.0,
            lambda_bar: lambdas.iter().map(|l| l.mid()).collect(),
            lambdas,
            xis: (0..d)
                .map(|j| CosineSeq::unit(prob.nu, j, prob.k_max))
                .collect::<Result<_, _>>()?,
            r_xi: vec![0.0; d],
            scalings,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn with_scalings(&self, scalings: Vec<Interval>) -> Self {
        LinearData {
            scalings,
            ..self.clone()
        }
    }
}

/// Checks `m·λ ∉ λ_j` for every `|m| ≥ 2` that could possibly resonate.
/// `false` means a resonance could not be excluded.
pub fn check_nonresonance(lambdas: &[Interval]) -> Result<bool, ManifoldError> {
    match find_resonance(lambdas, None) {
        Ok(()) => Ok(true),
        Err(ManifoldError::Resonant { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Like [`check_nonresonance`] but reports the offending multi-index.
/// `m_bound` caps `|m|`; by default the bound `⌈max λ / min λ⌉` is used.
pub fn find_resonance(lambdas: &[Interval], m_bound: Option<usize>) -> Result<(), ManifoldError> {
    for l in lambdas {
        if !l.is_pos() {
            return Err(ManifoldError::NotUnstable(*l));
        }
    }
    let d = lambdas.len();
    let lmin = lambdas.iter().map(|l| l.lo()).fold(f64::INFINITY, f64::min);
    let lmax = lambdas.iter().map(|l| l.hi()).fold(0.0, f64::max);
    let bound = m_bound.unwrap_or_else(|| (lmax / lmin).ceil() as usize + 1);
    let shape = MultiBox::new(&vec![bound; d]);
    for m in shape.iter() {
        let deg = degree(&m);
        if deg < 2 || deg > bound {
            continue;
        }
        let lhs = dot(lambdas, &m);
        for (j, rhs) in lambdas.iter().enumerate() {
            if lhs.intersects(*rhs) {
                return Err(ManifoldError::Resonant { m, j, lhs, rhs: *rhs });
            }
        }
    }
    Ok(())
}

/// `λ·m`.
pub fn dot(lambdas: &[Interval], m: &[usize]) -> Interval {
    lambdas
        .iter()
        .zip(m)
        .map(|(l, &k)| *l * Interval::point(k as f64))
        .sum()
}

fn dot_f64(lambdas: &[f64], m: &[usize]) -> f64 {
    lambdas.iter().zip(m).map(|(l, &k)| l * k as f64).sum()
}

/// A floating-point manifold chart `p̄` together with the data it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldApprox {
    pub problem: FisherProblem,
    pub linear: LinearData,
    /// Tail-free coefficients `p̄_m`, `m ⪯ M`.
    pub p: FourierTaylorSeq,
}

impl ManifoldApprox {
    pub fn order(&self) -> &[usize] {
        self.p.order()
    }

    pub fn shape(&self) -> &MultiBox {
        self.p.shape()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p.mid_rows()
    }

    /// Floating-point `P(θ)`.
    pub fn eval_f64(&self, theta: &[f64]) -> Vec<f64> {
        fourier_taylor::eval_f64(&self.rows(), self.order(), theta)
    }
}

/// Sum `Σ_{l ⪯ m, l ∉ {0, m}} p_l ∗ p_{m−l}` with all modes kept.
pub fn rhs_restricted(rows: &[Vec<f64>], shape: &MultiBox, m: &[usize]) -> Vec<f64> {
    let n = rows[0].len();
    let mut out = vec![0.0; 2 * n - 1];
    let sub = MultiBox::new(m);
    let last = sub.len() - 1;
    for (i, l) in sub.iter().enumerate() {
        if i == 0 || i == last {
            continue;
        }
        conv_acc(&rows[shape.index(&l)], &rows[shape.diff_index(m, &l)], &mut out);
    }
    out
}

/// Same sum computed as the full Cauchy product minus `2 p₀ ∗ p_m`.
pub fn rhs_subtraction(rows: &[Vec<f64>], shape: &MultiBox, m: &[usize]) -> Vec<f64> {
    let n = rows[0].len();
    let mut full = vec![0.0; 2 * n - 1];
    for l in MultiBox::new(m).iter() {
        conv_acc(&rows[shape.index(&l)], &rows[shape.diff_index(m, &l)], &mut full);
    }
    let mut cross = vec![0.0; 2 * n - 1];
    conv_acc(&rows[0], &rows[shape.index(m)], &mut cross);
    full.iter().zip(&cross).map(|(f, c)| f - 2.0 * c).collect()
}

/// Floating-point `Dg^K(p₀)`.
fn dg0(prob: &FisherProblem, p0: &[f64]) -> DMatrix<f64> {
    prob.dg_f64(p0)
}

fn closest_eigen(lambdas: &[f64], x: f64) -> usize {
    lambdas
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map(|(j, _)| j)
        .unwrap_or(0)
}

/// Solves the homological equations order by order. Within one total degree
/// the systems are independent and run through `exec`.
pub fn solve_homological(
    linear: &LinearData,
    prob: &FisherProblem,
    order: &[usize],
    exec: Exec,
) -> Result<ManifoldApprox, ManifoldError> {
    let d = linear.dim();
    if order.len() != d {
        return Err(ManifoldError::Shape(format!(
            "order has {} components for a {d}-dimensional manifold",
            order.len()
        )));
    }
    find_resonance(&linear.lambdas, None)?;
    let n = prob.n();
    let shape = MultiBox::new(order);
    let mut rows = vec![vec![0.0; n]; shape.len()];
    let abar = linear.a_bar.mid();
    rows[0] = (0..n).map(|k| abar.get(k).copied().unwrap_or(0.0)).collect();
    for i in 0..d {
        let e = shape.unit(i);
        if !shape.contains(&e) {
            continue;
        }
        let s = linear.scalings[i].mid();
        let xi = linear.xis[i].mid();
        rows[shape.index(&e)] = (0..n).map(|k| s * xi.get(k).copied().unwrap_or(0.0)).collect();
    }
    let dg = dg0(prob, &rows[0]);
    let alpha = prob.alpha.mid();
    let c = prob.c_mid();
    let max_deg = degree(order);
    let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for (i, m) in shape.iter().enumerate() {
        by_degree[degree(&m)].push(i);
    }
    for group in by_degree.iter().skip(2) {
        let solved = par::map(exec, group.len(), |gi| {
            let idx = group[gi];
            let m = shape.multi(idx);
            let s = rhs_subtraction(&rows, &shape, &m);
            let cs = conv_fft(&[&c, &s], n);
            let rhs = DVector::from_iterator(n, cs.iter().map(|v| -alpha * v));
            let lm = dot_f64(&linear.lambda_bar, &m);
            let sys = DMatrix::identity(n, n) * lm - &dg;
            let cond = linalg::condition_1(&sys);
            if !(cond <= 1e14) {
                return Err(ManifoldError::NearResonance {
                    j: closest_eigen(&linear.lambda_bar, lm),
                    m,
                    cond,
                });
            }
            let x = sys.lu().solve(&rhs).ok_or_else(|| ManifoldError::Singular(m.clone()))?;
            Ok((idx, x.iter().copied().collect::<Vec<f64>>()))
        });
        for r in solved {
            let (idx, x) = r?;
            rows[idx] = x;
        }
    }
    Ok(ManifoldApprox {
        problem: prob.clone(),
        linear: linear.clone(),
        p: FourierTaylorSeq::from_f64(order, prob.nu, &rows)?,
    })
}

/// Float homological residuals `‖[(λ̄·m) − Dg^K(p₀)] p_m + α Π_K(c ∗ S_m)‖_ν`
/// for every `|m| ≥ 2`, in storage order (zeros elsewhere).
pub fn homological_residuals(approx: &ManifoldApprox) -> Vec<f64> {
    let prob = &approx.problem;
    let rows = approx.rows();
    let shape = approx.shape();
    let n = prob.n();
    let dg = dg0(prob, &rows[0]);
    let alpha = prob.alpha.mid();
    let c = prob.c_mid();
    let nu = prob.nu.mid();
    shape
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if degree(&m) < 2 {
                return 0.0;
            }
            let s = rhs_restricted(&rows, shape, &m);
            let cs = conv_fft(&[&c, &s], n);
            let lm = dot_f64(&approx.linear.lambda_bar, &m);
            let pm = DVector::from_column_slice(&rows[i]);
            let lhs = &pm * lm - &dg * &pm;
            let res: Vec<f64> = (0..n).map(|k| lhs[k] + alpha * cs[k]).collect();
            crate::sequence_space::norm_f64(&res, nu)
        })
        .collect()
}

/// Scalings that bring the coefficient at `M_i e_i` down to about `target`
/// in norm, from a solve with unit scalings.
pub fn auto_scalings(
    linear: &LinearData,
    prob: &FisherProblem,
    order: &[usize],
    target: f64,
    exec: Exec,
) -> Result<Vec<Interval>, ManifoldError> {
    let unit = linear.with_scalings(vec![Interval::ONE; linear.dim()]);
    let base = solve_homological(&unit, prob, order, exec)?;
    let w = Weights::new(prob.nu, prob.n());
    let rows = base.rows();
    Ok((0..linear.dim())
        .map(|i| {
            let mut m = vec![0; linear.dim()];
            m[i] = order[i];
            let norm = w.norm_f64(&rows[base.shape().index(&m)]);
            let s = if order[i] == 0 || norm == 0.0 {
                1.0
            } else {
                (target / norm).powf(1.0 / order[i] as f64)
            };
            // Round to a short decimal so the scaling is exactly reproducible.
            let s = format!("{s:.3e}");
            Interval::from_decimal(&s).unwrap_or(Interval::ONE)
        })
        .collect())
}

/// Float `max_θ ‖g(P(θ)) − DP(θ) Λ̄ θ‖_ν` over a uniform grid on `[−1, 1]^d`
/// with `points` nodes per axis.
pub fn conjugacy_residual(approx: &ManifoldApprox, points: usize) -> f64 {
    let d = approx.linear.dim();
    let grid: Vec<f64> = (0..points)
        .map(|i| if points == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (points - 1) as f64 })
        .collect();
    let total = points.pow(d as u32);
    let rows = approx.rows();
    let shape = approx.shape();
    let derivs: Vec<Vec<Vec<f64>>> = (0..d).map(|i| fourier_taylor::derivative_rows(&rows, shape, i)).collect();
    (0..total)
        .map(|mut t| {
            let mut theta = vec![0.0; d];
            for th in theta.iter_mut() {
                *th = grid[t % points];
                t /= points;
            }
            invariance_defect(approx, &rows, &derivs, &theta)
        })
        .fold(0.0, f64::max)
}

/// `‖g(P(θ)) − Σ_i λ̄_i θ_i ∂_i P(θ)‖_ν` in floating point.
pub fn invariance_defect(
    approx: &ManifoldApprox,
    rows: &[Vec<f64>],
    derivs: &[Vec<Vec<f64>>],
    theta: &[f64],
) -> f64 {
    let prob = &approx.problem;
    let order = approx.order();
    let pt = fourier_taylor::eval_f64(rows, order, theta);
    let g = g_full(prob, &pt);
    let mut res = g;
    for (i, dr) in derivs.iter().enumerate() {
        let v = fourier_taylor::eval_f64(dr, order, theta);
        let f = approx.linear.lambda_bar[i] * theta[i];
        for (r, x) in res.iter_mut().zip(v) {
            *r -= f * x;
        }
    }
    crate::sequence_space::norm_f64(&res, prob.nu.mid())
}

/// Floating-point `g(a)` with all `3K` modes of the cubic term.
pub fn g_full(prob: &FisherProblem, a: &[f64]) -> Vec<f64> {
    let alpha = prob.alpha.mid();
    let c = prob.c_mid();
    let len = c.len() + 2 * a.len() - 2;
    let cubic = conv_fft(&[&c, a, a], len);
    (0..len)
        .map(|k| {
            let lin = a.get(k).map_or(0.0, |x| (alpha - (k * k) as f64) * x);
            lin - alpha * cubic[k]
        })
        .collect()
}

/// Storage for blocks `(m, l)` with `l ⪯ m`, indexed by
/// `offset[m] + (position of l in the box [0, m])`.
#[derive(Debug, Clone)]
pub struct PairIndex {
    pub shape: MultiBox,
    offsets: Vec<usize>,
    subs: Vec<MultiBox>,
}

impl PairIndex {
    pub fn new(shape: &MultiBox) -> Self {
        let mut offsets = Vec::with_capacity(shape.len());
        let mut subs = Vec::with_capacity(shape.len());
        let mut acc = 0;
        for m in shape.iter() {
            offsets.push(acc);
            let sub = MultiBox::new(&m);
            acc += sub.len();
            subs.push(sub);
        }
        offsets.push(acc);
        PairIndex {
            shape: shape.clone(),
            offsets,
            subs,
        }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of block `(m, l)` given storage indices; `l ⪯ m` is assumed.
    #[inline]
    pub fn pos(&self, mi: usize, l: &[usize]) -> usize {
        self.offsets[mi] + self.subs[mi].index(l)
    }
}

/// Floating-point `Df^{MK}(p̄)`: identity rows for `|m| ≤ 1`, and for
/// `|m| ≥ 2` the diagonal blocks `diag(λ·m + k² − α) + 2α C(c ∗ p₀)` and
/// Toeplitz blocks `2α C(c ∗ p_{m−l})` below the diagonal.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub shape: MultiBox,
    pub n: usize,
    pub diag: Vec<DMatrix<f64>>,
    /// Indexed by the storage index of `m − l`.
    pub toeplitz: Vec<DMatrix<f64>>,
}

impl BlockSystem {
    pub fn new(approx: &ManifoldApprox) -> Self {
        let prob = &approx.problem;
        let rows = approx.rows();
        let shape = approx.shape().clone();
        let n = prob.n();
        let alpha = prob.alpha.mid();
        let c = prob.c_mid();
        let toeplitz: Vec<DMatrix<f64>> = rows
            .iter()
            .map(|p| {
                let b = conv_fft(&[&c, p], 2 * n - 1);
                conv_operator_f64(&b, n) * (2.0 * alpha)
            })
            .collect();
        let diag = shape
            .iter()
            .map(|m| {
                if degree(&m) <= 1 {
                    return DMatrix::identity(n, n);
                }
                let lm = dot_f64(&approx.linear.lambda_bar, &m);
                let mut b = toeplitz[0].clone();
                for k in 0..n {
                    b[(k, k)] += lm + (k * k) as f64 - alpha;
                }
                b
            })
            .collect();
        BlockSystem {
            shape,
            n,
            diag,
            toeplitz,
        }
    }

    /// Block `(m, l)` for `l ≺ m`, or `None` when it vanishes.
    pub fn lower(&self, m: &[usize], l: &[usize]) -> Option<&DMatrix<f64>> {
        if degree(m) <= 1 {
            return None;
        }
        Some(&self.toeplitz[self.shape.diff_index(m, l)])
    }

    /// Block forward substitution for `Df h = b`, one `(K+1)`-sized solve
    /// per multi-index.
    pub fn solve(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, ManifoldError> {
        let mut x: Vec<Vec<f64>> = Vec::with_capacity(self.shape.len());
        for (mi, m) in self.shape.iter().enumerate() {
            let mut r = DVector::from_column_slice(&rhs[mi]);
            if degree(&m) >= 2 {
                for (li, l) in MultiBox::new(&m).iter().enumerate() {
                    if li + 1 == MultiBox::new(&m).len() {
                        break;
                    }
                    let b = self.lower(&m, &l).expect("lower block");
                    r -= b * DVector::from_column_slice(&x[self.shape.index(&l)]);
                }
            }
            let sol = self.diag[mi]
                .clone()
                .lu()
                .solve(&r)
                .ok_or_else(|| ManifoldError::Singular(m.clone()))?;
            x.push(sol.iter().copied().collect());
        }
        Ok(x)
    }

    /// The full matrix, for testing.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n;
        let s = self.shape.len();
        let mut out = DMatrix::zeros(s * n, s * n);
        for (mi, m) in self.shape.iter().enumerate() {
            for l in MultiBox::new(&m).iter() {
                let li = self.shape.index(&l);
                let blk = if li == mi {
                    Some(&self.diag[mi])
                } else {
                    self.lower(&m, &l)
                };
                if let Some(b) = blk {
                    out.view_mut((mi * n, li * n), (n, n)).copy_from(b);
                }
            }
        }
        out
    }
}

/// Floating-point inverse of a [`BlockSystem`], itself block lower triangular.
#[derive(Debug, Clone)]
pub struct BlockInverse {
    pub index: PairIndex,
    pub n: usize,
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockInverse {
    /// Column block `l` of the inverse is found by forward substitution; the
    /// columns are independent and run through `exec`.
    pub fn new(sys: &BlockSystem, exec: Exec) -> Result<Self, ManifoldError> {
        let shape = &sys.shape;
        let n = sys.n;
        let index = PairIndex::new(shape);
        let dinv: Vec<DMatrix<f64>> = shape
            .iter()
            .zip(&sys.diag)
            .map(|(m, d)| d.clone().try_inverse().ok_or(ManifoldError::Singular(m)))
            .collect::<Result<_, _>>()?;
        let columns = par::map(exec, shape.len(), |li| {
            let l = shape.multi(li);
            // Rows m ⪰ l, in storage order, as (m index, block).
            let mut col: Vec<(usize, DMatrix<f64>)> = Vec::new();
            let mut pos_of: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
            for (mi, m) in shape.iter().enumerate().skip(li) {
                if !crate::multi_index::precedes(&l, &m) {
                    continue;
                }
                let blk = if mi == li {
                    dinv[mi].clone()
                } else if degree(&m) <= 1 {
                    DMatrix::zeros(n, n)
                } else {
                    let mut acc = DMatrix::zeros(n, n);
                    let span: Vec<usize> = m.iter().zip(&l).map(|(a, b)| a - b).collect();
                    for t in MultiBox::new(&span).iter() {
                        let nn: Vec<usize> = l.iter().zip(&t).map(|(a, b)| a + b).collect();
                        if nn == m {
                            continue;
                        }
                        let ni = shape.index(&nn);
                        let anl: &DMatrix<f64> = &col[pos_of[&ni]].1;
                        let b = &sys.toeplitz[shape.diff_index(&m, &nn)];
                        acc.gemm(1.0, b, anl, 1.0);
                    }
                    -(&dinv[mi] * acc)
                };
                pos_of.insert(mi, col.len());
                col.push((mi, blk));
            }
            col
        });
        let mut blocks = vec![DMatrix::zeros(0, 0); index.len()];
        for (li, col) in columns.into_iter().enumerate() {
            let l = shape.multi(li);
            for (mi, blk) in col {
                blocks[index.pos(mi, &l)] = blk;
            }
        }
        Ok(BlockInverse { index, n, blocks })
    }

    pub fn get(&self, mi: usize, l: &[usize]) -> &DMatrix<f64> {
        &self.blocks[self.index.pos(mi, l)]
    }
}

/// One global Newton step on the truncated map `f^{MK}`, keeping the
/// orders `|m| ≤ 1` fixed.
pub fn newton_polish(approx: &ManifoldApprox) -> Result<ManifoldApprox, ManifoldError> {
    let sys = BlockSystem::new(approx);
    let rows = approx.rows();
    let shape = approx.shape();
    let prob = &approx.problem;
    let n = prob.n();
    let alpha = prob.alpha.mid();
    let c = prob.c_mid();
    let f: Vec<Vec<f64>> = shape
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if degree(&m) <= 1 {
                return vec![0.0; n];
            }
            let mut full = vec![0.0; 2 * n - 1];
            for l in MultiBox::new(&m).iter() {
                conv_acc(&rows[shape.index(&l)], &rows[shape.diff_index(&m, &l)], &mut full);
            }
            let cs = conv_fft(&[&c, &full], n);
            let lm = dot_f64(&approx.linear.lambda_bar, &m);
            (0..n)
                .map(|k| (lm + (k * k) as f64 - alpha) * rows[i][k] + alpha * cs[k])
                .collect()
        })
        .collect();
    let h = sys.solve(&f)?;
    let new_rows: Vec<Vec<f64>> = rows
        .iter()
        .zip(&h)
        .map(|(r, d)| r.iter().zip(d).map(|(a, b)| a - b).collect())
        .collect();
    Ok(ManifoldApprox {
        p: FourierTaylorSeq::from_f64(approx.order(), prob.nu, &new_rows)?,
        ..approx.clone()
    })
}
