//! Entanglement timescales for bipartite quantum systems.
//!
//! A Hamiltonian `H = sum_n A_n (x) B_n` acting on a product state
//! `|psi_A> (x) |psi_B>` entangles the two factors at a rate fixed by the
//! covariances of the `A_n` and `B_n` in the initial state. Every integer
//! Renyi entropy then starts out as
//!
//! ```text
//! S_alpha(t) = alpha / (alpha - 1) * t^2 / T_ent^2 + O(t^3)
//! ```
//!
//! [`timescale`] computes `T_ent` without solving the dynamics; [`entropy`]
//! evolves the state exactly so the prediction can be checked.

pub mod entropy;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod models;
pub mod stencil;
pub mod timescale;

pub use entropy::{
    alpha_purity, entropy_series, renyi_entropy, von_neumann_curvature_probe, von_neumann_entropy, EntropyOrder,
    EntropySeries, Evolution, ReducedSpectrum,
};
pub use error::{Error, Result};
pub use hamiltonian::{product_state_vector, ProductHamiltonian, ProductState};
pub use linalg::{
    eig_hermitian, evolve_state, kron, partial_trace, BipartitePureState, ComplexMatrix, HermitianSpectrum, Propagator,
    Subsystem, C64,
};
pub use models::{
    build_bose_hubbard_boundary, build_jcm, jcm_analytic_state, jcm_log_divergence_coefficient,
    jcm_timescale_closed_form, AtomState, BoseHubbardBoundarySpec, FieldState, JcmSpec, LogDivergence,
};
pub use timescale::{
    entanglement_timescale, expectation, first_derivative_check, measured_curvature, predicted_curvature,
    CurvaturePrediction, TimescaleReport,
};
