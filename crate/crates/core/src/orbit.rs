//! Connecting orbits from a validated manifold into the basin of the sink
//! `ã¹ = 1`, and flow samples along the chart.
//!
//! For constant `c` every solution starting in `{a : |a − ã¹|_ν < 1}`
//! converges to `ã¹`. A point of the validated chart inside that ball
//! therefore lies on a heteroclinic orbit from the source equilibrium.

use crate::eigen::MorseCertificate;
use crate::fisher::{CSpec, FisherProblem};
use crate::fourier_taylor::TaylorError;
use crate::interval::Interval;
use crate::manifold::ManifoldApprox;
use crate::manifold_validation::ManifoldCertificate;
use crate::par::{self, Exec};
use crate::sequence_space::{norm_f64, CosineSeq, SeqError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrbitError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Taylor(#[from] TaylorError),
    #[error("attracting neighborhood requires constant c (got {0})")]
    NonConstant(CSpec),
    #[error("image is not inside the attracting neighborhood: distance {distance} is not below 1")]
    NotAttracted { distance: Interval },
    #[error("Morse index {morse} does not match the manifold dimension {dim}")]
    MorseMismatch { morse: usize, dim: usize },
    #[error("flow time {t} takes θ to {theta:?}, outside the unit ball")]
    OutsideBall { t: f64, theta: Vec<f64> },
    #[error("{0}")]
    Shape(String),
}

/// The sink `ã¹ = (1, 0, 0, …)`.
pub fn sink(prob: &FisherProblem) -> Result<CosineSeq, OrbitError> {
    Ok(CosineSeq::unit(prob.nu, 0, prob.k_max)?)
}

/// Rigorous distance to the sink and whether it is strictly below 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractCheck {
    pub distance: Interval,
    pub inside: bool,
}

/// Checks `|a − ã¹|_ν < 1` for every `a` in the enclosure.
pub fn attracting_check(prob: &FisherProblem, a: &CosineSeq) -> Result<AttractCheck, OrbitError> {
    if prob.c_spec != CSpec::Constant {
        return Err(OrbitError::NonConstant(prob.c_spec));
    }
    let diff = a.sub(&sink(prob)?)?;
    let distance = diff.norm_nu();
    Ok(AttractCheck {
        distance,
        inside: distance.hi() < 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCertificate {
    pub source_cert: ManifoldCertificate,
    pub theta: Vec<Interval>,
    /// Encloses `|P̄(θ) − ã¹|_ν + r_P`.
    pub image_distance: Interval,
    pub sink: CosineSeq,
}

/// Proves that `P(θ)` lies in the attracting neighborhood of the sink.
pub fn prove_connection(
    cert: &ManifoldCertificate,
    morse: Option<&MorseCertificate>,
    theta: &[Interval],
) -> Result<ConnectionCertificate, OrbitError> {
    let approx = &cert.approx;
    let prob = &approx.problem;
    if let Some(mc) = morse {
        if mc.m != approx.linear.dim() {
            return Err(OrbitError::MorseMismatch {
                morse: mc.m,
                dim: approx.linear.dim(),
            });
        }
    }
    let image = approx.p.eval(theta)?.add_tail(cert.r);
    let check = attracting_check(prob, &image)?;
    if !check.inside {
        return Err(OrbitError::NotAttracted {
            distance: check.distance,
        });
    }
    Ok(ConnectionCertificate {
        source_cert: cert.clone(),
        theta: theta.to_vec(),
        image_distance: check.distance,
        sink: sink(prob)?,
    })
}

/// Float distance `|P̄(θ) − ã¹|_ν`.
pub fn sink_distance_f64(approx: &ManifoldApprox, theta: &[f64]) -> f64 {
    let mut v = approx.eval_f64(theta);
    v[0] -= 1.0;
    norm_f64(&v, approx.problem.nu.mid())
}

/// Grid search over `[−1, 1]^d` (`points` nodes per axis) for the `θ`
/// closest to the sink. Returns `(θ, distance)`.
pub fn search_theta(approx: &ManifoldApprox, points: usize, exec: Exec) -> (Vec<f64>, f64) {
    let d = approx.linear.dim();
    let points = points.max(2);
    let node = |i: usize| -1.0 + 2.0 * i as f64 / (points - 1) as f64;
    let total = points.pow(d as u32);
    let dists = par::map(exec, total, |mut t| {
        let mut theta = vec![0.0; d];
        for th in theta.iter_mut() {
            *th = node(t % points);
            t /= points;
        }
        let dist = sink_distance_f64(approx, &theta);
        (theta, dist)
    });
    dists
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((vec![0.0; d], f64::INFINITY))
}

/// Float samples `a(t) = P̄(e^{λ̄t} θ₀)` of the flow on the manifold.
pub fn flow_trace(approx: &ManifoldApprox, theta0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>, OrbitError> {
    let lam = &approx.linear.lambda_bar;
    if theta0.len() != lam.len() {
        return Err(OrbitError::Shape(format!(
            "θ has {} components for a {}-dimensional manifold",
            theta0.len(),
            lam.len()
        )));
    }
    times
        .iter()
        .map(|&t| {
            let theta: Vec<f64> = theta0.iter().zip(lam).map(|(th, l)| th * (l * t).exp()).collect();
            if theta.iter().any(|x| x.abs() > 1.0) {
                return Err(OrbitError::OutsideBall { t, theta });
            }
            Ok(approx.eval_f64(&theta))
        })
        .collect()
}

/// `(t, x, u)` rows of a trace evaluated on `x_points` nodes of `[0, π]`.
pub fn trajectory_csv(times: &[f64], samples: &[Vec<f64>], x_points: usize) -> String {
    let mut out = String::from("t,x,u\n");
    let x_points = x_points.max(2);
    for (t, a) in times.iter().zip(samples) {
        for j in 0..x_points {
            let x = std::f64::consts::PI * j as f64 / (x_points - 1) as f64;
            let u = crate::sequence_space::eval_cosine(a, x);
            out.push_str(&format!("{t},{x},{u}\n"));
        }
    }
    out
}
