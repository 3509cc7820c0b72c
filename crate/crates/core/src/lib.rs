//! Hybrid Cramér-Rao bounds for qubit estimation with random nuisance
//! parameters.
//!
//! The parameters of interest are estimated pointwise while the nuisance is
//! integrated against a prior. The central quantity is the hybrid partial
//! QFIM
//!
//! ```text
//! J⁽π⁾_{I|N} = E_π[J_II] − E_π[J_IN] (E_π[J_NN] + J_π)⁻¹ E_π[J_NI]
//! ```
//!
//! whose inverse lower-bounds the prior-averaged MSE of any locally unbiased
//! estimator, and which is bracketed by `E_π[J_II] ⪰ J⁽π⁾_{I|N} ⪰ E_π[J_{I|N}]`.
//!
//! Modules, bottom-up: [`matlib`] (symmetric matrices, Schur complements,
//! Loewner checks), [`states`] (Bloch vectors and the qubit SLD QFIM),
//! [`models`] (parametric qubit families), [`priors`] and [`quadrature`]
//! (nuisance priors and integration), [`hybrid`] (the bound engine) and
//! [`measure`] (POVMs, classical Fisher information, Monte Carlo risk).

#![forbid(unsafe_code)]

pub mod domain;
pub mod error;
pub mod hybrid;
pub mod matlib;
pub mod measure;
pub mod models;
pub mod priors;
pub mod quadrature;
pub mod states;

pub use domain::Interval;
pub use error::{Error, Result};
pub use hybrid::{HybridBoundReport, InverseForm, WeightMatrix};
pub use matlib::{BlockSym, LoewnerVerdict, RectMat, SymMat};
pub use measure::{OutcomeDist, Povm, PovmElement};
pub use models::{EvalPoint, ModelKind, ModelSpec};
pub use priors::{NuisancePrior, PriorKind};
pub use quadrature::{QuadratureRule, Scheme};
pub use states::{BlochVec, TangentFrame};
