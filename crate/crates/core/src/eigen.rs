//! Eigendata of the linearization `Dg(ã)`: approximate eigenpairs,
//! validated eigenpairs, and a certified count of unstable eigenvalues.
//!
//! `Dg` is self-adjoint for the cosine inner product, so in the basis scaled
//! by `diag(1, √2, √2, …)` its finite block is symmetric and the spectrum is
//! real. All eigenvalue work is therefore done with real arithmetic.

use crate::fisher::{EquilibriumCertificate, FisherProblem};
use crate::interval::{round, Interval};
use crate::linalg::{self, from_midrad, midrad_product, point_times_midrad, IMatrix};
use crate::radii::{RadiiError, RadiiPoly};
use crate::sequence_space::{conv_raw, BlockOperator, CosineSeq, SeqError, Weights};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("eigenvalue iteration failed: {0}")]
    Solver(String),
    #[error("approximate eigenvector basis is too ill-conditioned (‖I − XQ‖ ≥ {0})")]
    IllConditioned(f64),
    #[error("eigenvalue {0} has a zero-containing enclosure; hyperbolicity unverifiable")]
    NotHyperbolic(f64),
    #[error("eigenpair not validated: {source} ({bounds})")]
    NotValidated {
        bounds: EigenBounds,
        source: RadiiError,
    },
    #[error("Morse index not verified: ‖Q‖‖Q⁻¹‖μ₀ε = {product} ≥ 1")]
    MorseFailed { product: f64 },
    #[error("{found} validated unstable eigenvalues exceed the Morse index {m}")]
    Inconsistent { found: usize, m: usize },
    #[error("tail shift (K+1)² − α + λ is not positive")]
    TailShift,
}

fn sqrt_w0(n: usize) -> Vec<f64> {
    (0..n).map(|k| if k == 0 { 1.0 } else { std::f64::consts::SQRT_2 }).collect()
}

/// Floating-point `Dg = Q diag(μ) Q⁻¹` with a rigorous bound on the
/// distance between `X` and the exact inverse of `Q`.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub q: DMatrix<f64>,
    /// Approximate inverse of `q`.
    pub x: DMatrix<f64>,
    /// `‖Q⁻¹ − X‖_ν ≤ eta`.
    pub eta: f64,
}

impl Diagonalization {
    /// Diagonalizes a matrix that is symmetric after scaling by `diag(1, √2, …)`.
    pub fn new(dg: &DMatrix<f64>, nu: Interval) -> Result<Self, EigenError> {
        let n = dg.nrows();
        let s = sqrt_w0(n);
        let sym = DMatrix::from_fn(n, n, |i, j| s[i] * dg[(i, j)] / s[j]);
        let asym = (&sym - sym.transpose()).abs().max();
        if asym > 1e-9 * sym.abs().max().max(1.0) {
            return Err(EigenError::Solver(format!(
                "matrix is not self-adjoint in the cosine basis (asymmetry {asym:e})"
            )));
        }
        let sym = (&sym + sym.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let v = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        let mut q = DMatrix::from_fn(n, n, |i, j| v[(i, j)] / s[i]);
        let mut x = DMatrix::from_fn(n, n, |i, j| v[(j, i)] * s[j]);
        // Columns normalized to unit ν-norm; the inverse absorbs the scaling.
        let w = Weights::new(nu, n);
        for j in 0..n {
            let cn = (0..n).map(|i| w.get(i).mid() * q[(i, j)].abs()).sum::<f64>() / w.get(j).mid();
            if cn > 0.0 {
                q.column_mut(j).scale_mut(1.0 / cn);
                x.row_mut(j).scale_mut(cn);
            }
        }
        let (c, r) = point_times_midrad(&x, &q, None);
        let rho = linalg::identity_minus_norm(&c, &r, &w);
        if !(rho < 1.0) {
            return Err(EigenError::IllConditioned(rho));
        }
        let xn = linalg::norm_f64(&x, &w);
        let eta = round::div_up(round::mul_up(rho, xn), round::sub_down(1.0, rho));
        Ok(Diagonalization { values, q, x, eta })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn q_norm(&self, w: &Weights) -> f64 {
        linalg::norm_f64(&self.q, w)
    }

    /// Upper bound on `‖Q⁻¹‖_ν`.
    pub fn qinv_norm(&self, w: &Weights) -> f64 {
        round::add_up(linalg::norm_f64(&self.x, w), self.eta)
    }

    /// Entrywise enclosure of the exact `Q⁻¹`: `|T_ij| ≤ ‖T‖ w_j / w_i`.
    fn qinv_radius(&self, w: &Weights) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| round::mul_up(self.eta, w.ratio(j, i).hi()))
    }

    /// Enclosure of `Q diag(1/μ) Q⁻¹` with the exact `Q⁻¹`.
    pub fn inverse_enclosure(&self, w: &Weights) -> IMatrix {
        let n = self.len();
        let sigma: Vec<f64> = self.values.iter().map(|m| 1.0 / m).collect();
        let s = IMatrix::from_fn(n, n, |i, j| Interval::point(self.q[(i, j)]) * Interval::point(sigma[j]));
        let (c, r) = midrad_product(&s.mid(), &s.rad(), &self.x, &self.qinv_radius(w));
        from_midrad(&c, &r)
    }
}

/// Approximate eigenpairs of the finite block, sorted by descending value.
pub fn approx_eigs(t: &BlockOperator) -> Result<Vec<(f64, Vec<f64>)>, EigenError> {
    let m = t.block.mid();
    let n = m.nrows();
    let s = sqrt_w0(n);
    let sym = DMatrix::from_fn(n, n, |i, j| s[i] * m[(i, j)] / s[j]);
    let asym = (&sym - sym.transpose()).abs().max();
    let mut pairs: Vec<(f64, Vec<f64>)> = if asym <= 1e-12 * sym.abs().max().max(1.0) {
        let eig = ((&sym + sym.transpose()) * 0.5).symmetric_eigen();
        (0..n)
            .map(|j| {
                let v: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, j)] / s[i]).collect();
                (eig.eigenvalues[j], v)
            })
            .collect()
    } else {
        let vals = m
            .clone()
            .schur()
            .eigenvalues()
            .ok_or_else(|| EigenError::Solver("complex eigenvalues are not supported".into()))?;
        vals.iter().map(|&l| (l, inverse_iteration(&m, l))).collect()
    };
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs)
}

fn inverse_iteration(m: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let n = m.nrows();
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let lu = (m - DMatrix::identity(n, n) * shift).lu();
    let mut x = DVector::from_fn(n, |i, _| 1.0 / (i as f64 + 1.0));
    for _ in 0..3 {
        if let Some(y) = lu.solve(&x) {
            let nrm = y.amax();
            if nrm > 0.0 {
                x = y / nrm;
            }
        }
    }
    x.iter().copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBounds {
    pub y1: Interval,
    pub y2: Interval,
    pub z0_1: Interval,
    pub z0_2: Interval,
    pub z1_1: Interval,
    pub z1_2: Interval,
    pub z2_1: Interval,
    pub z2_2: Interval,
}

impl fmt::Display for EigenBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Y = ({:e}, {:e}), Z0 = ({:e}, {:e}), Z1 = ({:e}, {:e}), Z2 = ({:e}, {:e})",
            self.y1.hi(),
            self.y2.hi(),
            self.z0_1.hi(),
            self.z0_2.hi(),
            self.z1_1.hi(),
            self.z1_2.hi(),
            self.z2_1.hi(),
            self.z2_2.hi()
        )
    }
}

impl EigenBounds {
    pub fn polys(&self) -> [RadiiPoly; 2] {
        [
            RadiiPoly::new(self.y1, self.z0_1 + self.z1_1, self.z2_1),
            RadiiPoly::new(self.y2, self.z0_2 + self.z1_2, self.z2_2),
        ]
    }

    /// `Z₂ r² − (1 − Z₁ − Z₀) + Y`, the form without the factor `r` on the
    /// linear term, reported alongside the polynomial actually checked.
    pub fn unscaled_form(&self, r: f64) -> [Interval; 2] {
        let r2 = Interval::point(r).sqr();
        [
            self.z2_1 * r2 - (Interval::ONE - self.z1_1 - self.z0_1) + self.y1,
            self.z2_2 * r2 - (Interval::ONE - self.z1_2 - self.z0_2) + self.y2,
        ]
    }
}

/// A validated eigenpair of `Dg(ã)`: a true pair lies within `r` of
/// `(λ̄, ξ̄)` in the norm `max(|λ|, |ξ|_ν)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenpairCertificate {
    /// `λ̄ ± r`.
    pub lambda: Interval,
    pub lambda_bar: f64,
    pub xi_bar: CosineSeq,
    pub r: f64,
    pub r_max: Option<f64>,
    /// Index fixed by the phase condition `ξ_j = s`.
    pub phase_index: usize,
    pub s: Interval,
    pub bounds: EigenBounds,
    pub unscaled_form: [Interval; 2],
}

impl EigenpairCertificate {
    /// `ξ̃` as a ball about `ξ̄`.
    pub fn xi_enclosure(&self) -> CosineSeq {
        self.xi_bar.clone().with_tail(Interval::point(self.r))
    }
}

fn phase_index(xi: &[f64]) -> usize {
    let (imax, vmax) = xi
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
    if xi[0].abs() >= 0.1 * vmax {
        0
    } else {
        imax
    }
}

/// Float Newton refinement of `(λ, ξ)` on `H^K`, with `ξ_{j*}` held fixed.
fn refine(dg: &DMatrix<f64>, lambda: f64, xi: &[f64], j: usize) -> (f64, Vec<f64>) {
    let n = xi.len();
    let (mut l, mut v) = (lambda, DVector::from_column_slice(xi));
    for _ in 0..4 {
        let f = dg * &v - &v * l;
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        jac[(0, j + 1)] = 1.0;
        for i in 0..n {
            jac[(i + 1, 0)] = -v[i];
            for k in 0..n {
                jac[(i + 1, k + 1)] = dg[(i, k)] - if i == k { l } else { 0.0 };
            }
        }
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i + 1] = f[i];
        }
        match jac.lu().solve(&rhs) {
            Some(d) => {
                l -= d[0];
                for i in 0..n {
                    v[i] -= d[i + 1];
                }
            }
            None => break,
        }
    }
    (l, v.iter().copied().collect())
}

/// Validates an approximate eigenpair of `Dg(ã)` for the equilibrium in `a_cert`.
pub fn validate_eigenpair(
    prob: &FisherProblem,
    a_cert: &EquilibriumCertificate,
    lambda0: f64,
    xi0: &[f64],
) -> Result<EigenpairCertificate, EigenError> {
    let n = prob.n();
    let nu = prob.nu;
    let w = Weights::new(nu, 3 * n);
    let a_mid = a_cert.a_bar.mid();
    let dgf = prob.dg_f64(&a_mid);
    let mut xi: Vec<f64> = (0..n).map(|k| xi0.get(k).copied().unwrap_or(0.0)).collect();
    let j = phase_index(&xi);
    normalize(&mut xi, j, &w);
    let (lbar, mut xi) = refine(&dgf, lambda0, &xi, j);
    normalize(&mut xi, j, &w);
    let s = Interval::point(xi[j]);

    let alpha = prob.alpha;
    let two_alpha = Interval::point(2.0) * alpha;
    let lam = Interval::point(lbar);
    let shift = prob.tail_gap() + lam;
    if !shift.is_pos() {
        return Err(EigenError::TailShift);
    }
    let tailsup = Interval::ONE / shift;

    // DH^K at (λ̄, ξ̄) over ā, ordered (λ, ξ_0..ξ_K).
    let abar = &a_cert.a_bar;
    let dg = prob.dg_matrix(abar).block;
    let dh = IMatrix::from_fn(n + 1, n + 1, |i, k| match (i, k) {
        (0, 0) => Interval::ZERO,
        (0, k) => {
            if k - 1 == j {
                Interval::ONE
            } else {
                Interval::ZERO
            }
        }
        (i, 0) => -Interval::point(xi[i - 1]),
        (i, k) => {
            let v = dg.get(i - 1, k - 1);
            if i == k {
                v - lam
            } else {
                v
            }
        }
    });
    let bf = dh
        .mid()
        .try_inverse()
        .ok_or_else(|| EigenError::Solver("DH^K is singular".into()))?;
    let b = IMatrix::from_f64(&bf);
    let b12: Vec<Interval> = (0..n).map(|k| b.get(0, k + 1)).collect();
    let b21: Vec<Interval> = (0..n).map(|i| b.get(i + 1, 0)).collect();
    let b22 = IMatrix::from_fn(n, n, |i, k| b.get(i + 1, k + 1));
    let b12_dual = w.dual_norm(&b12);
    let b22_norm = b22.weighted_norm(&w).max(tailsup);
    let bcol: Vec<Interval> = (0..n)
        .map(|k| (0..n).map(|i| w.get(i) * b22.get(i, k).abs()).sum())
        .collect();

    // Residual F = (α − k² − λ̄) ξ̄ − 2α c^K ∗ ā ∗ ξ̄.
    let c_fin = &prob.c.coeffs()[..n];
    let xiv: Vec<Interval> = xi.iter().map(|&x| Interval::point(x)).collect();
    let cub = conv_raw(&conv_raw(c_fin, abar.coeffs()), &xiv);
    let f: Vec<Interval> = (0..cub.len())
        .map(|k| {
            let lin = if k < n { (prob.mu(k) - lam) * xiv[k] } else { Interval::ZERO };
            lin - two_alpha * cub[k]
        })
        .collect();
    let r_a = Interval::point(a_cert.r);
    let c_k_norm = CosineSeq::new(nu, c_fin.to_vec(), Interval::ZERO)?.norm_nu();
    let c_tail = prob.c.tail();
    let a_norm = abar.norm_nu();
    let xi_norm = w.norm(&xiv);
    let rho_p = c_k_norm * r_a + c_tail * (a_norm + r_a);
    let rho_e = two_alpha * xi_norm * rho_p;

    let y1 = b12.iter().zip(&f[..n]).map(|(x, y)| *x * *y).sum::<Interval>().abs() + b12_dual * rho_e;
    let y_tail: Interval = (n..f.len())
        .map(|k| w.get(k) * f[k].abs() / (Interval::point((k * k) as f64) - alpha + lam))
        .sum();
    let y2 = w.norm(&b22.mul_vec(&f[..n])) + y_tail + b22_norm * rho_e;

    let e = linalg::rigorous_mul(&b, &dh).identity_minus();
    let z0_1 = e.get(0, 0).abs() + w.dual_norm(&(1..=n).map(|k| e.get(0, k)).collect::<Vec<_>>());
    let e21: Vec<Interval> = (1..=n).map(|i| e.get(i, 0)).collect();
    let e22 = IMatrix::from_fn(n, n, |i, k| e.get(i + 1, k + 1));
    let z0_2 = w.norm(&e21) + e22.weighted_norm(&w);

    let bsum = conv_raw(c_fin, abar.coeffs());
    let beta = crate::fisher::beta_windows(&bsum, prob.k_max, nu);
    let z1_1 = two_alpha * beta.iter().zip(&b12).map(|(x, y)| *x * y.abs()).sum::<Interval>()
        + two_alpha * b12_dual * rho_p;
    let cb_norm = CosineSeq::new(nu, bsum.clone(), Interval::ZERO)?.norm_nu();
    let z1_2 = two_alpha * beta.iter().zip(&bcol).map(|(x, y)| *x * *y).sum::<Interval>()
        + two_alpha * cb_norm * tailsup
        + two_alpha * b22_norm * rho_p;
    let _ = b21;
    let two = Interval::point(2.0);
    let bounds = EigenBounds {
        y1: up(y1),
        y2: up(y2),
        z0_1: up(z0_1),
        z0_2: up(z0_2),
        z1_1: up(z1_1),
        z1_2: up(z1_2),
        z2_1: up(two * b12_dual),
        z2_2: up(two * b22_norm),
    };
    let [p1, p2] = bounds.polys();
    let (r1, r2) = match (p1.find_radius(), p2.find_radius()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(source), _) | (_, Err(source)) => return Err(EigenError::NotValidated { bounds, source }),
    };
    // A common radius: the larger of the two minimal ones, if both accept it.
    let r = r1.r.max(r2.r);
    if !(p1.negative_at(r) && p2.negative_at(r)) {
        return Err(EigenError::NotValidated {
            bounds,
            source: RadiiError::NoContraction {
                y: bounds.y1.hi().max(bounds.y2.hi()),
                z1: (bounds.z0_1 + bounds.z1_1).hi().max((bounds.z0_2 + bounds.z1_2).hi()),
                z2: bounds.z2_1.hi().max(bounds.z2_2.hi()),
            },
        });
    }
    let r_max = match (r1.r_max, r2.r_max) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(EigenpairCertificate {
        lambda: Interval::mid_rad(lbar, r),
        lambda_bar: lbar,
        xi_bar: CosineSeq::from_f64(nu, &xi)?,
        r,
        r_max,
        phase_index: j,
        s,
        bounds,
        unscaled_form: bounds.unscaled_form(r),
    })
}

fn up(x: Interval) -> Interval {
    Interval::upto(x.hi())
}

/// Scales `ξ` to unit ν-norm with `ξ_j > 0`.
fn normalize(xi: &mut [f64], j: usize, w: &Weights) {
    let n = w.norm_f64(xi);
    let sign = if xi[j] < 0.0 { -1.0 } else { 1.0 };
    if n > 0.0 {
        for x in xi.iter_mut() {
            *x *= sign / n;
        }
    }
}

/// A certified count of unstable eigenvalues of `Dg(ã)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseCertificate {
    pub m: usize,
    pub mu0: Interval,
    pub epsilon: Interval,
    pub q_norm: Interval,
    pub qinv_norm: Interval,
    /// `‖Q‖‖Q⁻¹‖` with identity tails included.
    pub qnorm_product: Interval,
    /// `‖Q‖‖Q⁻¹‖μ₀ε`, certified below 1.
    pub product: Interval,
    /// Approximate unstable eigenvalues.
    pub unstable: Vec<f64>,
}

/// Verifies the Morse index of the equilibrium in `a_cert`. Any validated
/// eigenpairs passed in are checked for consistency with the count.
pub fn verify_morse_index(
    prob: &FisherProblem,
    a_cert: &EquilibriumCertificate,
    eig_certs: &[EigenpairCertificate],
) -> Result<MorseCertificate, EigenError> {
    let n = prob.n();
    let w = Weights::new(prob.nu, n);
    let diag = Diagonalization::new(&prob.dg_f64(&a_cert.a_bar.mid()), prob.nu)?;
    // The certificate's A^K must be this very factorization.
    let ak = diag.inverse_enclosure(&Weights::new(prob.nu, 3 * n));
    if ak != a_cert.a_k.block {
        return Err(EigenError::Solver(
            "equilibrium certificate was built from a different factorization".into(),
        ));
    }
    for &v in &diag.values {
        if v == 0.0 || !v.is_finite() {
            return Err(EigenError::NotHyperbolic(v));
        }
    }
    // Real spectrum, and real tail eigenvalues 1/(α − k²): the cone factor is 1.
    let mu0 = Interval::ONE;
    let eps = a_cert.epsilon();
    let qn = Interval::upto(diag.q_norm(&w)).max(Interval::ONE);
    let qin = Interval::upto(diag.qinv_norm(&w)).max(Interval::ONE);
    let qq = qn * qin;
    let product = qq * mu0 * eps;
    if !(product.hi() < 1.0) {
        return Err(EigenError::MorseFailed { product: product.hi() });
    }
    let unstable: Vec<f64> = diag.values.iter().copied().filter(|&v| v > 0.0).collect();
    let m = unstable.len();
    let found = eig_certs.iter().filter(|c| c.lambda.is_pos()).count();
    if found > m {
        return Err(EigenError::Inconsistent { found, m });
    }
    Ok(MorseCertificate {
        m,
        mu0,
        epsilon: up(eps),
        q_norm: qn,
        qinv_norm: qin,
        qnorm_product: up(qq),
        product: up(product),
        unstable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::CSpec;
    use crate::linalg::IMatrix;
    use crate::sequence_space::TailRule;

    fn dec(s: &str) -> Interval {
        Interval::from_decimal(s).unwrap()
    }

    #[test]
    fn diagonal_spectrum() {
        let d = DMatrix::from_fn(5, 5, |i, j| if i == j { 2.1 - (i * i) as f64 } else { 0.0 });
        let op = BlockOperator::new(IMatrix::from_f64(&d), TailRule::Zero);
        let vals: Vec<f64> = approx_eigs(&op).unwrap().iter().map(|p| p.0).collect();
        let expect = [2.1, 1.1, -1.9, -6.9, -13.9];
        for (a, b) in vals.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let op = BlockOperator::new(IMatrix::from_f64(&d), TailRule::Zero);
        let vals: Vec<f64> = approx_eigs(&op).unwrap().iter().map(|p| p.0).collect();
        let (t, disc) = (2.5, (0.25f64 + 1.0).sqrt());
        assert!((vals[0] - (t + disc)).abs() < 1e-14 && (vals[1] - (t - disc)).abs() < 1e-14);
        let ns = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let op = BlockOperator::new(IMatrix::from_f64(&ns), TailRule::Zero);
        let pairs = approx_eigs(&op).unwrap();
        assert!((pairs[0].0 - 3.0).abs() < 1e-12);
        let v = &pairs[0].1;
        assert!((v[0] - v[1]).abs() < 1e-8 * v[0].abs());
    }

    #[test]
    fn diagonalization_inverts() {
        let p = FisherProblem::new(dec("2.1"), CSpec::Poisson { r: dec("0.2") }, 8, dec("1.1")).unwrap();
        let a = vec![0.23, 0.25, -0.06, 0.01, 0.0, 0.0, 0.0, 0.0, 0.0];
        let dg = p.dg_f64(&a);
        let d = Diagonalization::new(&dg, p.nu).unwrap();
        assert!(d.eta < 1e-12);
        let w = Weights::new(p.nu, 9);
        let inv = d.inverse_enclosure(&w);
        let prod = inv.mid() * &dg;
        assert!((prod - DMatrix::identity(9, 9)).abs().max() < 1e-10);
    }

    #[test]
    fn origin_eigenpair_is_exact() {
        let p = FisherProblem::new(dec("2.1"), CSpec::Constant, 10, dec("1.1")).unwrap();
        let cert = p.validate_equilibrium(&[0.0]).unwrap();
        let mut e0 = vec![0.0; 11];
        e0[0] = 1.0;
        let ep = validate_eigenpair(&p, &cert, 2.1, &e0).unwrap();
        assert!(ep.lambda.contains(2.1) && ep.r < 1e-13);
        let mut e1 = vec![0.0; 11];
        e1[1] = 1.0;
        let ep = validate_eigenpair(&p, &cert, 1.1, &e1).unwrap();
        assert!(ep.lambda.inflate(1e-15).contains(1.1));
        assert_eq!(ep.phase_index, 1);
        let morse = verify_morse_index(&p, &cert, &[]).unwrap();
        assert_eq!(morse.m, 2);
    }
}
