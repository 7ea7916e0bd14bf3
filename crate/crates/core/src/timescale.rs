//! The entanglement timescale
//!
//! ```text
//! T_ent^-2 = sum_{n,m} (<A_n A_m> - <A_n><A_m>) (<B_n B_m> - <B_n><B_m>)
//! ```
//!
//! evaluated in a product initial state, and the predicted initial curvature
//! `d^2 S_alpha / dt^2 |_0 = 2 alpha / (alpha - 1) * T_ent^-2` of every integer
//! Renyi entropy.

use serde::{Deserialize, Serialize};

use crate::entropy::{EntropyOrder, Evolution};
use crate::error::{Error, Result};
use crate::hamiltonian::{ProductHamiltonian, ProductState};
use crate::linalg::{vector_norm, ComplexMatrix, C64};
use crate::stencil;

/// Relative degeneracy threshold: `T_ent^-2 <= DEGEN_TOL * scale` is degenerate.
///
/// `scale = ||G_a||_F ||G_b||_F` with `G[n, m] = ||O_n^+ psi|| ||O_m psi||`. It
/// bounds every second moment and mean product entering the covariances, so it
/// measures their roundoff even when the covariances themselves cancel.
pub const DEGEN_TOL: f64 = 1e-12;
/// Largest accepted `|Im T_ent^-2|` relative to the same scale.
pub const IMAG_TOL: f64 = 1e-10;
/// Largest accepted negative `T_ent^-2` relative to the scale before clipping.
pub const NEGATIVE_TOL: f64 = 1e-12;
/// Curvature stencil width in units of the reference time.
pub const CURVATURE_STEP_FRACTION: f64 = 1.0 / 50.0;

#[derive(Clone, Debug)]
pub struct TimescaleReport {
    /// `T_ent^-2` clipped at zero, in 1/time^2.
    pub t_ent_inv_sq: f64,
    /// Real part of the covariance sum before clipping.
    pub raw_t_ent_inv_sq: f64,
    /// Imaginary part of the covariance sum.
    pub imag_residual: f64,
    /// Moment scale `||G_a||_F ||G_b||_F`, see [`DEGEN_TOL`].
    pub scale: f64,
    /// `cov_a[n, m] = <A_n A_m> - <A_n><A_m>`.
    pub cov_a: ComplexMatrix,
    pub cov_b: ComplexMatrix,
    pub degenerate: bool,
    /// `None` stands for an infinite timescale.
    pub t_ent: Option<f64>,
}

impl TimescaleReport {
    /// `T_ent` when finite, otherwise `1/sqrt(scale)`, otherwise 1.
    pub fn reference_time(&self) -> f64 {
        match self.t_ent {
            Some(t) => t,
            None if self.scale > 0.0 => self.scale.sqrt().recip(),
            None => 1.0,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePrediction {
    pub alpha: u32,
    pub coefficient: f64,
    pub curvature: f64,
}

/// `<psi|op|psi>`.
pub fn expectation(op: &ComplexMatrix, psi: &[C64]) -> Result<C64> {
    if !op.is_square() || op.rows() != psi.len() {
        return Err(Error::Dimension(format!(
            "operator {}x{} against vector of length {}",
            op.rows(),
            op.cols(),
            psi.len()
        )));
    }
    let v = op.apply(psi)?;
    Ok(psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
}

/// Covariance matrix `<O_n O_m> - <O_n><O_m>` of a family of operators, and
/// the Frobenius norm of its moment bound `G`.
fn covariance<'a>(ops: impl Iterator<Item = &'a ComplexMatrix>, psi: &[C64]) -> Result<(ComplexMatrix, f64)> {
    let mut applied = Vec::new();
    let mut adjoint_applied = Vec::new();
    let mut means = Vec::new();
    for op in ops {
        let v = op.apply(psi)?;
        means.push(psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>());
        applied.push(v);
        adjoint_applied.push(op.adjoint().apply(psi)?);
    }
    let k = applied.len();
    // <O_n O_m> = <O_n^dagger psi | O_m psi>
    let cov = ComplexMatrix::from_fn(k, k, |n, m| {
        let second: C64 = adjoint_applied[n].iter().zip(&applied[m]).map(|(a, b)| a.conj() * b).sum();
        second - means[n] * means[m]
    })?;
    let sq_norms = |vs: &[Vec<C64>]| vs.iter().map(|v| vector_norm(v).powi(2)).sum::<f64>();
    let bound = (sq_norms(&adjoint_applied) * sq_norms(&applied)).sqrt();
    Ok((cov, bound))
}

fn pairwise_sum(v: &[C64]) -> C64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (lo, hi) = v.split_at(v.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Computes the timescale from the Hamiltonian's product terms and the initial
/// state factors, without solving the dynamics.
pub fn entanglement_timescale(h: &ProductHamiltonian, s: &ProductState) -> Result<TimescaleReport> {
    s.check_compatible(h)?;
    let (cov_a, bound_a) = covariance(h.terms().iter().map(|(a, _)| a), s.psi_a())?;
    let (cov_b, bound_b) = covariance(h.terms().iter().map(|(_, b)| b), s.psi_b())?;
    let products: Vec<C64> = cov_a.as_nalgebra().iter().zip(cov_b.as_nalgebra().iter()).map(|(a, b)| a * b).collect();
    let sum = pairwise_sum(&products);
    let scale = bound_a * bound_b;
    if sum.im.abs() > IMAG_TOL * scale {
        return Err(Error::Numerical(format!(
            "covariance sum has imaginary part {:.3e} (scale {scale:.3e}); \
             the assembled Hamiltonian is not Hermitian",
            sum.im
        )));
    }
    if sum.re < -NEGATIVE_TOL * scale {
        return Err(Error::Numerical(format!(
            "covariance sum {:.3e} is negative beyond roundoff (scale {scale:.3e})",
            sum.re
        )));
    }
    let t_ent_inv_sq = sum.re.max(0.0);
    let degenerate = t_ent_inv_sq <= DEGEN_TOL * scale;
    Ok(TimescaleReport {
        t_ent_inv_sq,
        raw_t_ent_inv_sq: sum.re,
        imag_residual: sum.im,
        scale,
        cov_a,
        cov_b,
        degenerate,
        t_ent: (!degenerate).then(|| t_ent_inv_sq.sqrt().recip()),
    })
}

/// `2 alpha / (alpha - 1)`.
pub fn curvature_coefficient(alpha: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::Domain(format!(
            "alpha = {alpha}: the predicted curvature needs alpha >= 2; \
             use the von Neumann curvature probe for alpha = 1"
        )));
    }
    let a = alpha as f64;
    Ok(2.0 * a / (a - 1.0))
}

pub fn predicted_curvature(report: &TimescaleReport, alpha: u32) -> Result<CurvaturePrediction> {
    let coefficient = curvature_coefficient(alpha)?;
    Ok(CurvaturePrediction { alpha, coefficient, curvature: coefficient * report.t_ent_inv_sq })
}

/// Centered estimate `(S_alpha(dt) - S_alpha(-dt)) / (2 dt)` of the initial
/// slope, which vanishes to `O(dt^2)` for product initial states.
pub fn first_derivative_check(h: &ProductHamiltonian, s: &ProductState, alpha: u32, dt: f64) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::Domain(format!("alpha = {alpha} < 2")));
    }
    let evolution = Evolution::new(h, s)?;
    stencil::first_derivative(|t| evolution.entropy_at(EntropyOrder::Renyi(alpha), t), 0.0, dt)
}

/// Five-point finite-difference `d^2 S / dt^2` at `t = 0` from exact evolution.
/// The default step is `reference_time / 50`.
pub fn measured_curvature(
    h: &ProductHamiltonian,
    s: &ProductState,
    order: EntropyOrder,
    step: Option<f64>,
) -> Result<f64> {
    let step = match step {
        Some(x) => x,
        None => entanglement_timescale(h, s)?.reference_time() * CURVATURE_STEP_FRACTION,
    };
    let evolution = Evolution::new(h, s)?;
    stencil::second_derivative(|t| evolution.entropy_at(order, t), 0.0, step)
}
