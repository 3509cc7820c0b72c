//! Fixed workloads shared by the benchmarks.

use std::f64::consts::{FRAC_PI_2, PI};

use hpqfim::{ModelKind, ModelSpec, NuisancePrior, PriorKind, Result};

/// Every built-in model at `r = 0.5`, `φ = π/2` (direction model as is).
pub fn models() -> Result<Vec<ModelSpec>> {
    ModelKind::ALL
        .iter()
        .map(|k| ModelSpec::from_kind(*k, 0.5, FRAC_PI_2))
        .collect()
}

/// Von Mises prior with `κ = 1` on the model's nuisance domain.
pub fn von_mises(model: &ModelSpec) -> Result<NuisancePrior> {
    let domain = model.domain_n()[0];
    NuisancePrior::new(
        PriorKind::VonMises {
            mu: domain.midpoint(),
            kappa: 1.0,
        },
        domain,
    )
}

/// Interest point in the interior of every model's domain.
pub fn interest_point(model: &ModelSpec) -> Vec<f64> {
    match model.d_i() {
        1 => vec![0.3 * PI],
        _ => vec![0.4 * PI, 0.25 * PI],
    }
}
