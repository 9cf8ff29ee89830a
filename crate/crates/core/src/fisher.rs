//! The Fisher vector field `g_k(a) = (α − k²) a_k − α (c ∗ a ∗ a)_k` on
//! cosine coefficients, Newton's method for its zeros, and the a-posteriori
//! validation of an approximate equilibrium.

use crate::eigen::{Diagonalization, EigenError};
use crate::interval::Interval;
use crate::linalg::{self, IMatrix};
use crate::radii::{RadiiError, RadiiPoly};
use crate::sequence_space::{
    conv_fft, conv_operator, conv_operator_f64, conv_raw, norm_f64, poisson_coeffs, BlockOperator,
    CosineSeq, SeqError, TailRule, Weights,
};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FisherError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("Newton iteration hit a singular Jacobian at step {step}")]
    Singular { step: usize },
    #[error("Newton iteration did not converge; residual trace {trace:?}")]
    NoConvergence { trace: Vec<f64> },
    #[error("equilibrium not validated: {source} ({bounds})")]
    NotValidated {
        bounds: EquilibriumBounds,
        source: RadiiError,
    },
}

/// Spatial inhomogeneity `c(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CSpec {
    /// `c ≡ 1`.
    Constant,
    /// Poisson kernel `1 + 2 Σ r^k cos(kx)`.
    Poisson { r: Interval },
}

impl FromStr for CSpec {
    type Err = FisherError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "constant" {
            return Ok(CSpec::Constant);
        }
        if let Some(r) = s.strip_prefix("poisson:") {
            let r = Interval::from_decimal(r)
                .map_err(|e| FisherError::Problem(format!("poisson parameter: {e}")))?;
            return Ok(CSpec::Poisson { r });
        }
        Err(FisherError::Problem(format!(
            "unknown inhomogeneity {s:?}; expected `constant` or `poisson:<r>`"
        )))
    }
}

impl fmt::Display for CSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CSpec::Constant => write!(f, "constant"),
            CSpec::Poisson { r } => write!(f, "poisson:{}", r.mid()),
        }
    }
}

/// The Fisher equation truncated at `K` cosine modes, with weight `ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherProblem {
    pub alpha: Interval,
    pub c_spec: CSpec,
    /// `c^K` in the finite part, `|c^∞|_ν` in the tail.
    pub c: CosineSeq,
    pub k_max: usize,
    pub nu: Interval,
}

impl FisherProblem {
    pub fn new(alpha: Interval, c_spec: CSpec, k_max: usize, nu: Interval) -> Result<Self, FisherError> {
        if !alpha.is_pos() {
            return Err(FisherError::Problem(format!("α must be positive, got {alpha}")));
        }
        let kp1 = Interval::point((k_max + 1) as f64);
        if !alpha.certainly_lt(kp1.sqr()) {
            return Err(FisherError::Problem(format!(
                "need √α < K + 1; α = {alpha}, K = {k_max}"
            )));
        }
        if !(nu.lo() > 1.0) {
            return Err(SeqError::BadWeight(nu).into());
        }
        let c = match c_spec {
            CSpec::Constant => CosineSeq::unit(nu, 0, k_max)?,
            CSpec::Poisson { r } => poisson_coeffs(r, k_max, nu)?,
        };
        Ok(FisherProblem {
            alpha,
            c_spec,
            c,
            k_max,
            nu,
        })
    }

    /// Number of stored modes `K + 1`.
    pub fn n(&self) -> usize {
        self.k_max + 1
    }

    pub fn weights(&self, len: usize) -> Weights {
        Weights::new(self.nu, len)
    }

    /// `μ_k = α − k²`.
    pub fn mu(&self, k: usize) -> Interval {
        self.alpha - Interval::point((k * k) as f64)
    }

    /// `(K+1)² − α`, the smallest modulus of the tail of `Dg`.
    pub fn tail_gap(&self) -> Interval {
        Interval::point(((self.k_max + 1) * (self.k_max + 1)) as f64) - self.alpha
    }

    pub fn c_mid(&self) -> Vec<f64> {
        self.c.mid()
    }

    /// Floating-point `g^K(a)` on modes `0..=K`.
    pub fn g_f64(&self, a: &[f64]) -> Vec<f64> {
        let al = self.alpha.mid();
        let c = self.c_mid();
        let cubic = conv_fft(&[&c, a, a], self.n());
        (0..self.n())
            .map(|k| (al - (k * k) as f64) * a.get(k).copied().unwrap_or(0.0) - al * cubic[k])
            .collect()
    }

    /// Floating-point Jacobian `Dg^K(a)`.
    pub fn dg_f64(&self, a: &[f64]) -> DMatrix<f64> {
        let al = self.alpha.mid();
        let ca = conv_fft(&[&self.c_mid(), a], 2 * self.n());
        let mut m = conv_operator_f64(&ca, self.n()) * (-2.0 * al);
        for k in 0..self.n() {
            m[(k, k)] += al - (k * k) as f64;
        }
        m
    }

    /// Rigorous `g(a)` with every mode of the cubic term kept (up to `3K`).
    /// A positive tail on `a` makes the linear part unbounded, reported as an
    /// infinite tail bound.
    pub fn g_eval(&self, a: &CosineSeq) -> Result<CosineSeq, FisherError> {
        let caa = self.c.conv(a)?.conv(a)?;
        let n = caa.coeffs().len().max(a.coeffs().len());
        let coeffs = (0..n)
            .map(|k| self.mu(k) * a.coeff(k) - self.alpha * caa.coeff(k))
            .collect();
        let tail = if a.is_tail_free() {
            self.alpha * caa.tail()
        } else {
            Interval::upto(f64::INFINITY)
        };
        Ok(CosineSeq::new(self.nu, coeffs, tail)?)
    }

    /// Finite block `Dg^K(a)` with the tail rule `k ↦ α − k²`.
    pub fn dg_matrix(&self, a: &CosineSeq) -> BlockOperator {
        let b = conv_raw(self.c.coeffs(), a.coeffs());
        let mut m = conv_operator(&b, self.n());
        let two_alpha = Interval::point(2.0) * self.alpha;
        for k in 0..self.n() {
            for j in 0..self.n() {
                let v = -(two_alpha * m.get(k, j));
                m.set(k, j, if k == j { v + self.mu(k) } else { v });
            }
        }
        BlockOperator::new(
            m,
            TailRule::Affine {
                c0: self.alpha,
                c2: Interval::point(-1.0),
            },
        )
    }

    /// Newton's method on `g^K`, in floating point.
    pub fn newton_equilibrium(&self, a0: &[f64]) -> Result<Vec<f64>, FisherError> {
        let nu = self.nu.mid();
        let mut a: Vec<f64> = (0..self.n()).map(|k| a0.get(k).copied().unwrap_or(0.0)).collect();
        let mut trace = Vec::new();
        let mut settled = 0;
        for step in 0..50 {
            let g = self.g_f64(&a);
            let res = norm_f64(&g, nu);
            trace.push(res);
            if res < 1e-14 || settled >= 2 {
                return Ok(a);
            }
            let lu = self.dg_f64(&a).lu();
            let dx = lu
                .solve(&DVector::from_vec(g))
                .ok_or(FisherError::Singular { step })?;
            let scale = norm_f64(&a, nu).max(1.0);
            for (x, d) in a.iter_mut().zip(dx.iter()) {
                *x -= d;
            }
            // Roundoff floor: further steps no longer move the iterate.
            if norm_f64(dx.as_slice(), nu) < 1e-15 * scale {
                settled += 1;
            }
        }
        Err(FisherError::NoConvergence { trace })
    }

    /// Validates `ā` and returns a certificate on success.
    pub fn validate_equilibrium(&self, a_bar: &[f64]) -> Result<EquilibriumCertificate, FisherError> {
        let n = self.n();
        if a_bar.len() > n {
            return Err(SeqError::Dimension {
                expected: n,
                got: a_bar.len(),
            }
            .into());
        }
        let mut padded = a_bar.to_vec();
        padded.resize(n, 0.0);
        let abar = CosineSeq::from_f64(self.nu, &padded)?;
        let w = self.weights(3 * n);
        let alpha = self.alpha;
        let two_alpha = Interval::point(2.0) * alpha;
        let gap = self.tail_gap();

        let dg = self.dg_matrix(&abar);
        let diag = Diagonalization::new(&self.dg_f64(&padded), self.nu)?;
        let ak = diag.inverse_enclosure(&w);
        let ak_norm = ak.weighted_norm(&w);
        let acol: Vec<Interval> = (0..n)
            .map(|k| (0..n).map(|i| w.get(i) * ak.get(i, k).abs()).sum())
            .collect();

        let c_fin = &self.c.coeffs()[..n];
        let c_tail = self.c.tail();
        let abar_norm = abar.norm_nu();
        let c_norm = self.c.norm_nu();

        // Residual: finite modes through A^K, higher modes through 1/(k² − α).
        let cubic = conv_raw(&conv_raw(c_fin, abar.coeffs()), abar.coeffs());
        let gk: Vec<Interval> = (0..n)
            .map(|k| self.mu(k) * abar.coeff(k) - alpha * cubic[k])
            .collect();
        let y_fin = w.norm(&ak.mul_vec(&gk));
        let y_hi: Interval = (n..cubic.len())
            .map(|k| w.get(k) * (alpha * cubic[k]).abs() / (Interval::point((k * k) as f64) - alpha))
            .sum();
        let c_inf_part = alpha * abar_norm.sqr() * c_tail;
        let y0 = y_fin + ak_norm * c_inf_part + c_inf_part / gap + y_hi;

        let z0 = rigorous_identity_minus(&ak, &dg.block).weighted_norm(&w);

        let b = conv_raw(c_fin, abar.coeffs());
        let beta = beta_windows(&b, self.k_max, self.nu);
        let z1_fin: Interval = beta.iter().zip(&acol).map(|(bk, ak)| *bk * *ak).sum();
        let cb = CosineSeq::new(self.nu, b.clone(), Interval::ZERO)?.norm_nu();
        let a_max = ak_norm.max(Interval::ONE / gap);
        let z1 = two_alpha * z1_fin + two_alpha * cb / gap + two_alpha * a_max * c_tail * abar_norm;
        let z2 = two_alpha * ak_norm.max(Interval::ONE) * c_norm.max(Interval::ONE);

        let bounds = EquilibriumBounds {
            y0: nonneg(y0),
            z0: nonneg(z0),
            z1: nonneg(z1),
            z2: nonneg(z2),
        };
        let poly = RadiiPoly::new(bounds.y0, bounds.z0 + bounds.z1, bounds.z2);
        let radius = poly
            .find_radius()
            .map_err(|source| FisherError::NotValidated { bounds, source })?;
        Ok(EquilibriumCertificate {
            problem: self.clone(),
            a_bar: abar,
            r: radius.r,
            r_max: radius.r_max,
            bounds,
            a_k: BlockOperator::new(
                ak,
                TailRule::InverseAffine {
                    c0: alpha,
                    c2: Interval::point(-1.0),
                },
            ),
        })
    }
}

/// Upper endpoints only: every bound is a nonnegative quantity.
fn nonneg(x: Interval) -> Interval {
    Interval::upto(x.hi())
}

/// `I − A·B` for interval matrices, by midpoint-radius products.
pub fn rigorous_identity_minus(a: &IMatrix, b: &IMatrix) -> IMatrix {
    linalg::rigorous_mul(a, b).identity_minus()
}

/// `β_k = sup_{K<j≤2K+k} |b_{j−k}|/(2ν^j) + sup_{K<j≤2K−k} |b_{j+k}|/(2ν^j)`
/// for `b` supported on `0..=2K`; empty windows contribute 0.
pub fn beta_windows(b: &[Interval], k_max: usize, nu: Interval) -> Vec<Interval> {
    let at = |i: usize| b.get(i).copied().unwrap_or(Interval::ZERO).abs();
    let top = b.len().saturating_sub(1);
    let wj = |j: usize| Interval::point(2.0) * nu.powi(j as i32);
    (0..=k_max)
        .map(|k| {
            let mut s1 = Interval::ZERO;
            for j in k_max + 1..=top + k {
                s1 = s1.max(at(j - k) / wj(j));
            }
            let mut s2 = Interval::ZERO;
            for j in k_max + 1..=top.saturating_sub(k) {
                s2 = s2.max(at(j + k) / wj(j));
            }
            s1 + s2
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumBounds {
    pub y0: Interval,
    pub z0: Interval,
    pub z1: Interval,
    pub z2: Interval,
}

impl fmt::Display for EquilibriumBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Y0 = {:e}, Z0 = {:e}, Z1 = {:e}, Z2 = {:e}",
            self.y0.hi(),
            self.z0.hi(),
            self.z1.hi(),
            self.z2.hi()
        )
    }
}

impl EquilibriumBounds {
    /// The bound that most limits contraction.
    pub fn dominant(&self) -> &'static str {
        if self.z0.hi() + self.z1.hi() >= 1.0 {
            if self.z0.hi() >= self.z1.hi() {
                "Z0"
            } else {
                "Z1"
            }
        } else {
            "Y0"
        }
    }
}

/// A validated equilibrium: a true zero of `g` lies within `r` of `ā`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub problem: FisherProblem,
    pub a_bar: CosineSeq,
    pub r: f64,
    pub r_max: Option<f64>,
    pub bounds: EquilibriumBounds,
    pub a_k: BlockOperator,
}

impl EquilibriumCertificate {
    /// `ã` as a ball: `ā` with tail bound `r`.
    pub fn enclosure(&self) -> CosineSeq {
        self.a_bar.clone().with_tail(Interval::point(self.r))
    }

    /// ε bounding `‖I − A Dg(ã)‖`.
    pub fn epsilon(&self) -> Interval {
        let b = self.bounds;
        b.z0 + b.z1 + b.z2 * Interval::point(self.r)
    }
}
