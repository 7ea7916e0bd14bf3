//! Renyi and von Neumann entropies of reduced states, and entropy time series
//! from exact evolution.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{product_state_vector, ProductHamiltonian, ProductState};
use crate::linalg::{eig_hermitian, BipartitePureState, ComplexMatrix, Propagator, PSD_TOL};
use crate::stencil;
use crate::timescale::entanglement_timescale;

/// Largest accepted `|tr rho - 1|` for density-matrix inputs.
pub const TRACE_TOL: f64 = 1e-8;
const CLIP_WARN: f64 = -1e-9;

/// Entropy flavour: integer Renyi index or the von Neumann limit.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum EntropyOrder {
    Renyi(u32),
    VonNeumann,
}

impl fmt::Display for EntropyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Renyi(a) => write!(f, "{a}"),
            Self::VonNeumann => f.write_str("vn"),
        }
    }
}

impl FromStr for EntropyOrder {
    type Err = Error;

    /// `"vn"` and `"1"` both name the von Neumann entropy.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("vn") {
            return Ok(Self::VonNeumann);
        }
        match s.parse::<u32>() {
            Ok(1) => Ok(Self::VonNeumann),
            Ok(a) if a >= 2 => Ok(Self::Renyi(a)),
            _ => Err(Error::Domain(format!("invalid entropy order {s:?}"))),
        }
    }
}

impl From<EntropyOrder> for String {
    fn from(o: EntropyOrder) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for EntropyOrder {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Eigenvalues of a reduced density matrix: clipped at zero, normalized, and
/// sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSpectrum {
    probs: Vec<f64>,
}

impl ReducedSpectrum {
    pub fn from_probabilities(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::State("empty or non-finite spectrum".into()));
        }
        let clipped: f64 = probs.iter().filter(|&&p| p < 0.0).sum();
        if clipped < CLIP_WARN {
            log::warn!("clipping {clipped:.3e} of negative eigenvalue mass");
        }
        if let Some(&worst) = probs.iter().min_by(|a, b| a.total_cmp(b)) {
            if worst < PSD_TOL {
                log::debug!("eigenvalue {worst:.3e} below PSD tolerance");
            }
        }
        probs.iter_mut().for_each(|p| *p = p.max(0.0));
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::State("spectrum has no positive mass".into()));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    /// Spectrum of a density matrix with unit trace (within [`TRACE_TOL`]).
    pub fn from_density(rho: &ComplexMatrix) -> Result<Self> {
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::State(format!("density matrix trace {tr} is not 1")));
        }
        Self::from_probabilities(eig_hermitian(rho)?.eigenvalues)
    }

    /// Schmidt spectrum of a pure bipartite state.
    pub fn from_state(psi: &BipartitePureState) -> Result<Self> {
        Self::from_probabilities(psi.schmidt_probabilities()?)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Mass outside the dominant eigenvalue, summed from the small ones.
    fn tail(&self) -> f64 {
        self.probs[1..].iter().sum()
    }

    /// `tr rho^alpha`.
    pub fn alpha_purity(&self, alpha: u32) -> f64 {
        self.probs.iter().map(|p| p.powi(alpha as i32)).sum()
    }

    /// `ln tr rho^alpha / (1 - alpha)`, evaluated as
    /// `alpha ln(1 - tail) + ln(1 + sum_j (p_j/p_1)^alpha)` so that a nearly
    /// pure state keeps full relative precision.
    pub fn renyi(&self, alpha: u32) -> Result<f64> {
        if alpha < 2 {
            return Err(Error::Domain(format!("Renyi index {alpha} < 2; use the von Neumann entropy for alpha -> 1")));
        }
        let p1 = self.probs[0];
        let ratio_sum: f64 = self.probs[1..].iter().map(|p| (p / p1).powi(alpha as i32)).sum();
        let ln_purity = alpha as f64 * (-self.tail()).ln_1p() + ratio_sum.ln_1p();
        Ok((ln_purity / (1.0 - alpha as f64)).max(0.0))
    }

    /// `-sum p ln p` with `0 ln 0 = 0`.
    pub fn von_neumann(&self) -> f64 {
        let tail = self.tail();
        let lead = -(1.0 - tail) * (-tail).ln_1p();
        let rest: f64 = self.probs[1..].iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum();
        (lead + rest).max(0.0)
    }

    pub fn entropy(&self, order: EntropyOrder) -> Result<f64> {
        match order {
            EntropyOrder::Renyi(a) => self.renyi(a),
            EntropyOrder::VonNeumann => Ok(self.von_neumann()),
        }
    }
}

pub fn alpha_purity(rho_a: &ComplexMatrix, alpha: u32) -> Result<f64> {
    if alpha < 1 {
        return Err(Error::Domain("alpha must be at least 1".into()));
    }
    Ok(ReducedSpectrum::from_density(rho_a)?.alpha_purity(alpha))
}

pub fn renyi_entropy(rho_a: &ComplexMatrix, alpha: u32) -> Result<f64> {
    ReducedSpectrum::from_density(rho_a)?.renyi(alpha)
}

pub fn von_neumann_entropy(rho_a: &ComplexMatrix) -> Result<f64> {
    Ok(ReducedSpectrum::from_density(rho_a)?.von_neumann())
}

/// Exact evolution of a product state under a time-independent
/// [`ProductHamiltonian`], with entropies of the reduced state on demand.
#[derive(Clone, Debug)]
pub struct Evolution {
    propagator: Propagator,
    psi0: BipartitePureState,
}

impl Evolution {
    pub fn new(h: &ProductHamiltonian, s: &ProductState) -> Result<Self> {
        s.check_compatible(h)?;
        Ok(Self { propagator: Propagator::new(&h.assemble()?)?, psi0: product_state_vector(s)? })
    }

    pub fn initial_state(&self) -> &BipartitePureState {
        &self.psi0
    }

    pub fn state_at(&self, t: f64) -> Result<BipartitePureState> {
        self.propagator.evolve(&self.psi0, t)
    }

    pub fn spectrum_at(&self, t: f64) -> Result<ReducedSpectrum> {
        ReducedSpectrum::from_state(&self.state_at(t)?)
    }

    pub fn entropy_at(&self, order: EntropyOrder, t: f64) -> Result<f64> {
        self.spectrum_at(t)?.entropy(order)
    }
}

/// Entropies of `rho_A(t)` sampled on a time grid, in nats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySeries {
    pub order: EntropyOrder,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-time eigenvalues of `rho_A`, descending, when requested.
    pub spectra: Option<Vec<Vec<f64>>>,
}

/// One series per requested order over a strictly ascending, non-negative grid.
pub fn entropy_series(
    h: &ProductHamiltonian,
    s: &ProductState,
    orders: &[EntropyOrder],
    t_grid: &[f64],
    capture_spectra: bool,
) -> Result<Vec<EntropySeries>> {
    if t_grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Domain("time grid must be finite and non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be strictly ascending".into()));
    }
    let evolution = Evolution::new(h, s)?;
    let spectra: Vec<ReducedSpectrum> = t_grid.par_iter().map(|&t| evolution.spectrum_at(t)).collect::<Result<_>>()?;
    orders
        .iter()
        .map(|&order| {
            let values = spectra.iter().map(|sp| sp.entropy(order)).collect::<Result<Vec<_>>>()?;
            Ok(EntropySeries {
                order,
                times: t_grid.to_vec(),
                values,
                spectra: capture_spectra.then(|| spectra.iter().map(|sp| sp.probabilities().to_vec()).collect()),
            })
        })
        .collect()
}

/// Relative stencil width of the von Neumann curvature probe.
pub const PROBE_RELATIVE_STEP: f64 = 1.0 / 20.0;
/// Smallest stencil width accepted, in units of the reference timescale.
pub const PROBE_MIN_STEP: f64 = 1e-7;

/// Five-point estimates of `d^2 S / dt^2` for the von Neumann entropy at each
/// `t` in a strictly decreasing list of positive times. The stencil width is
/// `t / 20`.
pub fn von_neumann_curvature_probe(
    h: &ProductHamiltonian,
    s: &ProductState,
    t_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if t_list.is_empty() {
        return Err(Error::Domain("empty probe list".into()));
    }
    if t_list.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::Domain("probe times must be positive".into()));
    }
    if t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("probe times must be strictly decreasing".into()));
    }
    let reference = entanglement_timescale(h, s)?.reference_time();
    let evolution = Evolution::new(h, s)?;
    t_list
        .par_iter()
        .map(|&t| {
            let step = t * PROBE_RELATIVE_STEP;
            if step < PROBE_MIN_STEP * reference {
                return Err(Error::Numerical(format!(
                    "stencil width {step:.3e} at t = {t:.3e} is below {PROBE_MIN_STEP:e} x \
                     reference time {reference:.3e}"
                )));
            }
            let d2 = stencil::second_derivative(|x| evolution.entropy_at(EntropyOrder::VonNeumann, x), t, step)?;
            Ok((t, d2))
        })
        .collect()
}
