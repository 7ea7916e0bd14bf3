//! Worked systems: the resonant Jaynes-Cummings model on a truncated Fock
//! space, and the two boundary sites of a 1-D Bose-Hubbard chain.
//!
//! Atom basis order is `(|e>, |g>)`, so `sigma_z = diag(1, -1)`. Field states
//! are Fock states `|0> .. |n_max>`; the truncated creation operator drops
//! `|n_max> -> |n_max + 1>`, and the dynamics are trusted only while the two
//! highest levels carry less than `1e-10` of the population.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{ProductHamiltonian, ProductState};
use crate::linalg::{c, ops, BipartitePureState, ComplexMatrix, C64, NORM_TOL};
use crate::timescale::entanglement_timescale;

/// Largest Poisson mass allowed above the field cutoff of a coherent state.
pub const TAIL_TOL: f64 = 1e-12;

const ATOM_E: usize = 0;
const ATOM_G: usize = 1;

/// `C_g |g> + C_e |e>`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AtomState {
    pub c_g: C64,
    pub c_e: C64,
}

impl AtomState {
    pub fn excited() -> Self {
        Self { c_g: c(0.0, 0.0), c_e: c(1.0, 0.0) }
    }

    pub fn ground() -> Self {
        Self { c_g: c(1.0, 0.0), c_e: c(0.0, 0.0) }
    }

    pub fn new(c_g: C64, c_e: C64) -> Result<Self> {
        let s = Self { c_g, c_e };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let norm = (self.c_g.norm_sqr() + self.c_e.norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::State(format!("atom amplitudes have norm {norm}")));
        }
        Ok(())
    }

    fn is_excited(&self) -> bool {
        self.c_g.norm() == 0.0
    }

    fn is_ground(&self) -> bool {
        self.c_e.norm() == 0.0
    }

    /// Amplitudes in `(e, g)` order.
    pub fn vector(&self) -> Vec<C64> {
        vec![self.c_e, self.c_g]
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum FieldState {
    Fock(usize),
    /// Coherent state with `a |nu> = nu |nu>`.
    Coherent(C64),
}

/// Resonant JCM, `H = (omega/2) sigma_z + omega a^+ a + lambda (a^+ sigma_- + a sigma_+)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JcmSpec {
    /// Coupling rate.
    pub lambda: f64,
    /// Common atomic and field frequency.
    pub omega: f64,
    /// Field cutoff; chosen automatically when `None`.
    pub n_max: Option<usize>,
    pub atom: AtomState,
    pub field: FieldState,
}

impl JcmSpec {
    pub fn new(lambda: f64, atom: AtomState, field: FieldState) -> Self {
        Self { lambda, omega: 0.0, n_max: None, atom, field }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = Some(n_max);
        self
    }

    /// Explicit cutoff, or `N + 2` for Fock fields and
    /// `ceil(|nu|^2 + 10|nu| + 20)` for coherent fields.
    pub fn resolved_n_max(&self) -> usize {
        self.n_max.unwrap_or_else(|| match self.field {
            FieldState::Fock(n) => n + 2,
            FieldState::Coherent(nu) => {
                let r = nu.norm();
                (r * r + 10.0 * r + 20.0).ceil() as usize
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || !self.omega.is_finite() {
            return Err(Error::Model("lambda and omega must be finite".into()));
        }
        self.atom.validate()?;
        let n_max = self.resolved_n_max();
        if 2 * (n_max + 1) > crate::linalg::MAX_DIM {
            return Err(Error::Dimension(format!("field cutoff {n_max} exceeds MAX_DIM")));
        }
        match self.field {
            FieldState::Fock(n) if n + 1 > n_max => Err(Error::Truncation { n_max, tail: 1.0, required_n_max: n + 1 }),
            FieldState::Fock(_) => Ok(()),
            FieldState::Coherent(nu) => {
                if !(nu.re.is_finite() && nu.im.is_finite()) {
                    return Err(Error::Model("coherent amplitude must be finite".into()));
                }
                let mean = nu.norm_sqr();
                let tail = poisson_tail(mean, n_max);
                if tail > TAIL_TOL {
                    return Err(Error::Truncation { n_max, tail, required_n_max: minimal_cutoff(mean, TAIL_TOL) });
                }
                Ok(())
            }
        }
    }

    /// Field amplitudes `C_0 .. C_{n_max}`, renormalized after truncation.
    pub fn field_amplitudes(&self) -> Result<Vec<C64>> {
        self.validate()?;
        let n_max = self.resolved_n_max();
        let mut amps = vec![c(0.0, 0.0); n_max + 1];
        match self.field {
            FieldState::Fock(n) => amps[n] = c(1.0, 0.0),
            FieldState::Coherent(nu) => {
                let mean = nu.norm_sqr();
                let phase = nu.arg();
                for (n, a) in amps.iter_mut().enumerate() {
                    let ln_p = ln_poisson(mean, n);
                    *a = C64::from_polar((0.5 * ln_p).exp(), phase * n as f64);
                }
                let norm = crate::linalg::vector_norm(&amps);
                amps.iter_mut().for_each(|a| *a /= norm);
            }
        }
        Ok(amps)
    }
}

fn ln_poisson(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    -mean + n as f64 * mean.ln() - ln_fact
}

/// `sum_{n > n_max} e^{-mean} mean^n / n!`, summed upward from the cutoff.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut ln_p = ln_poisson(mean, n_max + 1);
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let p = ln_p.exp();
        tail += p;
        if (n as f64) > mean && p < 1e-30 * tail.max(f64::MIN_POSITIVE) {
            break;
        }
        if p == 0.0 && (n as f64) > mean {
            break;
        }
        n += 1;
        ln_p += mean.ln() - (n as f64).ln();
    }
    tail
}

/// Smallest cutoff whose Poisson tail is at most `tol`.
pub fn minimal_cutoff(mean: f64, tol: f64) -> usize {
    (0..).find(|&n| poisson_tail(mean, n) <= tol).expect("tail vanishes")
}

fn atom_operators() -> (ComplexMatrix, ComplexMatrix) {
    // sigma_+ = |e><g|, sigma_- = |g><e|
    let mut plus = vec![c(0.0, 0.0); 4];
    plus[ATOM_E * 2 + ATOM_G] = c(1.0, 0.0);
    let sigma_plus = ComplexMatrix::from_row_major(2, 2, plus).unwrap();
    let sigma_minus = sigma_plus.adjoint();
    (sigma_plus, sigma_minus)
}

/// Terms `{(omega/2 sigma_z, I), (I, omega a^+ a), (lambda sigma_-, a^+), (lambda sigma_+, a)}`
/// with the atom as subsystem A.
pub fn build_jcm(spec: &JcmSpec) -> Result<(ProductHamiltonian, ProductState)> {
    let field = spec.field_amplitudes()?;
    let n_max = spec.resolved_n_max();
    let (sigma_plus, sigma_minus) = atom_operators();
    let a = ops::annihilation(n_max);
    let terms = vec![
        (ops::pauli_z().scale_real(spec.omega / 2.0), ComplexMatrix::identity(n_max + 1)),
        (ComplexMatrix::identity(2), ops::number(n_max).scale_real(spec.omega)),
        (sigma_minus.scale_real(spec.lambda), a.adjoint()),
        (sigma_plus.scale_real(spec.lambda), a),
    ];
    let h = ProductHamiltonian::new(terms)?;
    let s = ProductState::new(spec.atom.vector(), field)?;
    Ok((h, s))
}

/// Closed-form JCM state at time `t`. Each pair `{|e, n>, |g, n + 1>}` rotates
/// at `lambda sqrt(n + 1)`; the free part contributes the phases
/// `exp(-i omega (n +- 1/2) t)`. The state `|e, n_max>` has no partner in the
/// truncated space and only picks up its phase.
pub fn jcm_analytic_state(spec: &JcmSpec, t: f64) -> Result<BipartitePureState> {
    let cn = spec.field_amplitudes()?;
    let n_max = cn.len() - 1;
    let dim_b = n_max + 1;
    let (cg, ce) = (spec.atom.c_g, spec.atom.c_e);
    let lt = |n: usize| spec.lambda * (n as f64).sqrt() * t;
    let i = c(0.0, 1.0);
    let mut amps = vec![c(0.0, 0.0); 2 * dim_b];
    for n in 0..=n_max {
        let excited =
            if n < n_max { ce * cn[n] * lt(n + 1).cos() - i * cg * cn[n + 1] * lt(n + 1).sin() } else { ce * cn[n] };
        let ground = if n > 0 { -i * ce * cn[n - 1] * lt(n).sin() + cg * cn[n] * lt(n).cos() } else { cg * cn[0] };
        let nf = n as f64;
        amps[ATOM_E * dim_b + n] = excited * C64::from_polar(1.0, -spec.omega * (nf + 0.5) * t);
        amps[ATOM_G * dim_b + n] = ground * C64::from_polar(1.0, -spec.omega * (nf - 0.5) * t);
    }
    BipartitePureState::new(2, dim_b, amps)
}

/// `T_ent^-2` from the field-amplitude series when the atom starts exactly
/// excited (`lambda^2 [sum (n+1)|C_n|^2 - |<a>|^2]`) or exactly in the ground
/// state (`lambda^2 [sum n |C_n|^2 - |<a>|^2]`). Superposed atoms fall back to
/// the general covariance computation.
pub fn jcm_timescale_closed_form(spec: &JcmSpec) -> Result<f64> {
    let cn = spec.field_amplitudes()?;
    let n_max = cn.len() - 1;
    let lambda_sq = spec.lambda * spec.lambda;
    let mean_a: C64 = (0..n_max).map(|n| ((n + 1) as f64).sqrt() * cn[n].conj() * cn[n + 1]).sum();
    if spec.atom.is_excited() {
        let first: f64 = (0..n_max).map(|n| (n + 1) as f64 * cn[n].norm_sqr()).sum();
        Ok(lambda_sq * (first - mean_a.norm_sqr()))
    } else if spec.atom.is_ground() {
        let first: f64 = (1..=n_max).map(|n| n as f64 * cn[n].norm_sqr()).sum();
        Ok(lambda_sq * (first - mean_a.norm_sqr()))
    } else {
        let (h, s) = build_jcm(spec)?;
        Ok(entanglement_timescale(&h, &s)?.t_ent_inv_sq)
    }
}

/// Small-`t` form `d^2 S / dt^2 ~ constant + log_coefficient * ln t` of the
/// von Neumann curvature.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDivergence {
    pub constant: f64,
    pub log_coefficient: f64,
}

/// For an initially excited atom the qubit spectrum starts as
/// `p_2(t) ~ T_ent^-2 t^2`, and the eigenvalue form of the von Neumann
/// curvature gives `d^2 S / dt^2 ~ 2 T_ent^-2 (-2 - ln p_2(t))`, i.e.
/// `constant = -2 T_ent^-2 (2 + ln T_ent^-2)` and `log_coefficient = -4 T_ent^-2`.
pub fn jcm_log_divergence_coefficient(spec: &JcmSpec) -> Result<LogDivergence> {
    if !spec.atom.is_excited() {
        return Err(Error::Domain("log-divergence form needs an initially excited atom".into()));
    }
    let inv_sq = jcm_timescale_closed_form(spec)?;
    if inv_sq <= 0.0 {
        return Err(Error::Domain("stationary state: the entanglement timescale is infinite".into()));
    }
    Ok(LogDivergence { constant: -2.0 * inv_sq * (2.0 + inv_sq.ln()), log_coefficient: -4.0 * inv_sq })
}

/// Two neighbouring Bose-Hubbard sites, one per subsystem, each starting in a
/// Fock state.
#[derive(Clone, Debug, PartialEq)]
pub struct BoseHubbardBoundarySpec {
    /// Tunneling rate `J`.
    pub j_rate: f64,
    /// On-site interaction `U`.
    pub u: f64,
    /// Local boson cutoff.
    pub n_per_site_max: usize,
    /// Initial occupations `(n_A, n_B)`.
    pub initial: (usize, usize),
}

impl BoseHubbardBoundarySpec {
    pub fn new(j_rate: f64) -> Self {
        Self { j_rate, u: 0.0, n_per_site_max: 2, initial: (1, 1) }
    }

    pub fn with_u(mut self, u: f64) -> Self {
        self.u = u;
        self
    }

    pub fn with_cutoff(mut self, n_per_site_max: usize) -> Self {
        self.n_per_site_max = n_per_site_max;
        self
    }
}

/// Terms `{(-J a^+, a), (-J a, a^+)}` plus `(U/2 n(n-1), I)` and `(I, U/2 n(n-1))`
/// when `U != 0`.
pub fn build_bose_hubbard_boundary(spec: &BoseHubbardBoundarySpec) -> Result<(ProductHamiltonian, ProductState)> {
    if !spec.j_rate.is_finite() || !spec.u.is_finite() {
        return Err(Error::Model("J and U must be finite".into()));
    }
    let cutoff = spec.n_per_site_max;
    if cutoff < 1 {
        return Err(Error::Model("local boson cutoff must be at least 1".into()));
    }
    let (na, nb) = spec.initial;
    if na > cutoff || nb > cutoff {
        return Err(Error::Model(format!("cutoff {cutoff} below initial occupation ({na}, {nb})")));
    }
    let d = cutoff + 1;
    let a = ops::annihilation(cutoff);
    let ad = a.adjoint();
    let mut terms = vec![(ad.scale_real(-spec.j_rate), a.clone()), (a.scale_real(-spec.j_rate), ad)];
    if spec.u != 0.0 {
        let onsite: Vec<f64> = (0..d).map(|n| 0.5 * spec.u * (n * n.saturating_sub(1)) as f64).collect();
        let onsite = ComplexMatrix::from_diagonal(&onsite);
        terms.push((onsite.clone(), ComplexMatrix::identity(d)));
        terms.push((ComplexMatrix::identity(d), onsite));
    }
    let h = ProductHamiltonian::new(terms)?;
    let s = ProductState::basis(d, na, d, nb)?;
    Ok((h, s))
}
