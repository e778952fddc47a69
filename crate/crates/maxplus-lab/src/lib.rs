// Guards like `!(t >= 0.0)` intentionally catch NaN along with the
// out-of-range case.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical laboratory for max-additive and max-plus linear operator
//! semigroups.
//!
//! The crate discretizes the function max-plus vector space on uniform
//! grids, implements three evolution semigroups arising from nonlinear
//! PDEs — the scalar conservation law (Godunov), the Hamilton–Jacobi
//! equation (Hopf–Lax and Lax–Friedrichs), and the Hamilton–Jacobi–
//! Bellman equation (dynamic programming) — and provides a harness that
//! measures the defect of every algebraic and metric property such
//! semigroups are expected to satisfy: max-additivity, plus-homogeneity,
//! monotonicity, the semigroup law, strong continuity, sup-norm
//! contraction and L¹ isometry, together with generator estimation and
//! the standard constructions (rescaling, products, restrictions,
//! similarity, quotients).
//!
//! # Sign conventions
//!
//! All Hamilton–Jacobi-type solvers in this crate realize the
//! *maximization* evolution
//!
//! ```text
//!     u_t = H(x, ∇u),      u(0, ·) = h,
//! ```
//!
//! whose generator is `f ↦ +H(x, ∇f)` and whose explicit solution for
//! state-independent convex `H` is the sup-form Hopf–Lax formula
//! `u(t,x) = sup_y [ h(y) − t·L((x−y)/t) ]` with `L` the convex
//! conjugate of `H`. The classical minimization orientation
//! `u_t + H(∇u) = 0` corresponds to running this evolution with `−H`;
//! the bridge is encoded once, in [`hamilton_jacobi::HjSemigroup`],
//! which hands the finite-difference path the negated Hamiltonian.
//! Everything downstream (generator probes, cross-solver checks, the
//! Bellman solver) states its expectations in the maximization
//! convention.

pub mod error;
pub mod scalar;
pub mod space;
pub mod samples;
pub mod semigroup;
pub mod harness;
pub mod conservation;
pub mod hamilton_jacobi;
pub mod control;
pub mod generator;
pub mod constructions;
pub mod residuation;
pub mod quotient;
pub mod io;
pub mod experiment;

pub use error::{Error, Result};
pub use scalar::MaxScalar;
pub use space::{dist, dist_via_lattice, Grid, Grid2, GridFunction, GridFunction2, Norm};
pub use semigroup::{
    lip_seminorm_estimate, Direction, IdentitySemigroup, Semigroup, TranslationSemigroup,
};
pub use harness::{
    check_contraction, check_isometry_l1, continuity_modulus, defect_max_additivity,
    defect_monotonicity, defect_plus_homogeneity, defect_semigroup_law, refinement_verdict,
    Budget, Property, PropertyReport, RefinementPoint, Verdict,
};
pub use conservation::{
    godunov_step, kruzkov_residual, mass_integral, riemann_flux, ConservationLawSemigroup, Flux,
    TestBump, Trajectory,
};
pub use hamilton_jacobi::{
    hopf_lax_evolve, lax_friedrichs_step, legendre_transform, Hamiltonian, HjSemigroup,
    Lagrangian,
};
pub use control::{
    dp_step, evolve_hjb_2d, hamiltonian_eval, hj_consistency_check, ControlProblem,
    ControlProblem2, HjbSemigroup,
};
pub use generator::{
    dissipativity_probe, generator_estimate, generator_max_additivity_counterexample,
    DiscreteGenerator, GeneratorEstimate,
};
pub use constructions::{conjugate, product, rescale, restrict, GridMap, RescaleVariant};
pub use quotient::{quotient_apply, quotient_equivalent, Equivalence, FiniteMaxVector, FiniteSubspace};
