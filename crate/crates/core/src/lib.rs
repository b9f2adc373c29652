//! Construction and verification of viscous contact / rarefaction composite
//! waves for the 1D compressible Navier-Stokes system in Lagrangian
//! coordinates: exact wave-curve algebra, self-similar contact profiles,
//! Burgers-smoothed rarefactions, a finite-difference solver for perturbed
//! initial data, and the stability functionals that monitor decay.

pub mod ansatz;
pub mod composite;
pub mod contact;
pub mod diagnostics;
pub mod error;
pub mod gas;
pub mod rarefaction;
pub mod riemann;
pub mod solver;

pub use ansatz::{Ansatz, AnsatzPoint, AnsatzProfile};
pub use composite::CompositeAnsatz;
pub use contact::{ContactWave, DecayConstants, SelfSimilarProfile};
pub use error::{Error, Result};
pub use gas::{entropy, lambda, phi_kernel, pressure, Family, GasParams, ThermoState};
pub use rarefaction::{BurgersWave, RarefactionWave};
pub use riemann::{
    exact_rarefaction_fan, is_contact_compatible, rarefaction_u_along_curve,
    solve_intermediate_states, EndStates, WaveDecomposition,
};
pub use solver::{
    initialize, run, step, BoundaryMode, FieldState, Grid1D, PerturbationKind, PerturbationSpec,
    SolverConfig,
};
