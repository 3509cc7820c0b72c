//! Prior-averaged information blocks, the hybrid partial QFIM, its two-sided
//! surrogates and the hybrid risk lower bound.

use crate::error::{Error, Result};
use crate::matlib::{psd_gap, schur_complement, schur_complement_pinv, BlockSym, SymMat};
use crate::models::{EvalPoint, ModelSpec};
use crate::priors::{prior_fisher, NuisancePrior, PriorKind};
use crate::quadrature::QuadratureRule;

/// Weight matrix `W ≻ 0` of the hybrid risk `Tr[W V]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(SymMat);

impl WeightMatrix {
    pub fn new(w: SymMat) -> Result<Self> {
        if !w.is_spd() {
            return Err(Error::InvalidWeight(format!(
                "weight matrix must be positive definite (min eigenvalue {})",
                w.min_eigenvalue()
            )));
        }
        Ok(Self(w))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self(SymMat::identity(dim)?))
    }

    pub fn matrix(&self) -> &SymMat {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Inverse of an information matrix, or `+∞` when the information is
/// singular.
#[derive(Debug, Clone, PartialEq)]
pub enum InverseForm {
    Finite(SymMat),
    Infinite,
}

impl InverseForm {
    /// Inverts `info`; singularity is judged against
    /// `max(reference, largest |eigenvalue|)`.
    pub fn of(info: &SymMat, reference: f64) -> Self {
        match info.inverse_against(reference) {
            Ok(inv) => InverseForm::Finite(inv),
            Err(_) => InverseForm::Infinite,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, InverseForm::Finite(_))
    }

    pub fn finite(&self) -> Option<&SymMat> {
        match self {
            InverseForm::Finite(m) => Some(m),
            InverseForm::Infinite => None,
        }
    }

    /// `Tr[W · self]`, `+∞` for the infinite form.
    pub fn weighted_trace(&self, w: &WeightMatrix) -> Result<f64> {
        match self {
            InverseForm::Finite(m) => w.matrix().trace_product(m),
            InverseForm::Infinite => Ok(f64::INFINITY),
        }
    }

    /// Extended Loewner order: `∞ ⪰ anything`, finite never dominates `∞`.
    pub fn dominates(&self, other: &InverseForm, tol: f64) -> Result<bool> {
        match (self, other) {
            (InverseForm::Infinite, _) => Ok(true),
            (InverseForm::Finite(_), InverseForm::Infinite) => Ok(false),
            (InverseForm::Finite(a), InverseForm::Finite(b)) => Ok(psd_gap(a, b, tol)?.holds),
        }
    }
}

/// Single pass over the quadrature nodes: averaged blocks, averaged pointwise
/// Schur complement, and the number of nodes whose nuisance block needed the
/// pseudo-inverse.
struct NodePass {
    avg: BlockSym,
    low: SymMat,
    pinv_nodes: usize,
}

fn node_pass(
    model: &ModelSpec,
    prior: &NuisancePrior,
    rule: &QuadratureRule,
    theta_i: &[f64],
) -> Result<NodePass> {
    if model.d_n() != 1 {
        return Err(Error::InvalidPrior(format!(
            "univariate prior cannot average a {}-dimensional nuisance",
            model.d_n()
        )));
    }
    let mut avg = BlockSym::zeros(model.d_i(), model.d_n())?;
    let mut low = SymMat::zeros(model.d_i())?;
    let mut pinv_nodes = 0;
    let mut any = false;
    for (x, pw) in prior.weighted_nodes(rule) {
        let j = model.qfim(&EvalPoint::new(theta_i.to_vec(), vec![x]))?;
        let pointwise = match schur_complement(&j) {
            Ok(s) => s,
            Err(Error::SingularBlock { .. }) => {
                pinv_nodes += 1;
                schur_complement_pinv(&j)?
            }
            Err(e) => return Err(e),
        };
        avg.add_scaled(pw, &j)?;
        low.add_scaled(pw, &pointwise)?;
        any = true;
    }
    if !any {
        return Err(Error::InvalidRule(
            "rule has no node inside the prior support".into(),
        ));
    }
    Ok(NodePass {
        avg,
        low,
        pinv_nodes,
    })
}

/// `E_π[J]` in block form at interest point `theta_i`.
pub fn averaged_blocks(
    model: &ModelSpec,
    prior: &NuisancePrior,
    rule: &QuadratureRule,
    theta_i: &[f64],
) -> Result<BlockSym> {
    Ok(node_pass(model, prior, rule, theta_i)?.avg)
}

/// `E_π[J_II] − E_π[J_IN] (E_π[J_NN] + J_π)⁻¹ E_π[J_NI]`.
pub fn hpqfim(avg: &BlockSym, j_pi: &SymMat) -> Result<SymMat> {
    schur_complement(&avg.with_nn_added(j_pi)?)
}

/// `G⁽π⁾ = E_π[J] + (0 ⊕ J_π)` as a full matrix, interest block first.
pub fn g_matrix(avg: &BlockSym, j_pi: &SymMat) -> Result<SymMat> {
    Ok(avg.with_nn_added(j_pi)?.assemble())
}

/// Two-sided surrogates of the hybrid partial QFIM.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogates {
    /// `E_π[J_{I|N}]`.
    pub low: SymMat,
    /// `E_π[J_II]`.
    pub high: SymMat,
    /// Nodes where `J_NN` was singular and the pseudo-inverse was used.
    pub pinv_nodes: usize,
}

pub fn surrogates(
    model: &ModelSpec,
    prior: &NuisancePrior,
    rule: &QuadratureRule,
    theta_i: &[f64],
) -> Result<Surrogates> {
    let pass = node_pass(model, prior, rule, theta_i)?;
    Ok(Surrogates {
        high: pass.avg.ii,
        low: pass.low,
        pinv_nodes: pass.pinv_nodes,
    })
}

/// `Tr[W h⁻¹]`, or `+∞` when `h` is singular.
pub fn risk_lower_bound(h: &SymMat, w: &WeightMatrix) -> Result<f64> {
    if h.dim() != w.dim() {
        return Err(Error::DimMismatch {
            expected: w.dim(),
            found: h.dim(),
        });
    }
    InverseForm::of(h, 0.0).weighted_trace(w)
}

/// All hybrid quantities at one interest point.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridBoundReport {
    pub theta_i: Vec<f64>,
    pub avg_blocks: BlockSym,
    pub j_pi: SymMat,
    pub hpqfim: SymMat,
    pub surrogate_low: SymMat,
    pub surrogate_high: SymMat,
    /// `(E_π[J_II])⁻¹`.
    pub inv_l: InverseForm,
    /// `(J⁽π⁾_{I|N})⁻¹`.
    pub inv_m: InverseForm,
    /// `(E_π[J_{I|N}])⁻¹`.
    pub inv_u: InverseForm,
    pub risk_bound: f64,
    pub pinv_nodes: usize,
    /// `E_π[J_NN] + J_π` was singular and its pseudo-inverse was used.
    pub hpqfim_pinv: bool,
}

impl HybridBoundReport {
    /// `high ⪰ hpqfim ⪰ low` and `inv_u ⪰ inv_m ⪰ inv_l`, all up to `tol`.
    pub fn ordering_holds(&self, tol: f64) -> Result<bool> {
        Ok(psd_gap(&self.surrogate_high, &self.hpqfim, tol)?.holds
            && psd_gap(&self.hpqfim, &self.surrogate_low, tol)?.holds
            && self.inv_u.dominates(&self.inv_m, tol)?
            && self.inv_m.dominates(&self.inv_l, tol)?)
    }
}

/// Evaluates the full report; `J_π` is computed from `prior` with `rule` as
/// the starting resolution.
pub fn evaluate(
    model: &ModelSpec,
    prior: &NuisancePrior,
    rule: &QuadratureRule,
    theta_i: &[f64],
    w: &WeightMatrix,
) -> Result<HybridBoundReport> {
    let j_pi = prior_fisher(prior, rule)?;
    evaluate_with_prior_fisher(model, prior, rule, theta_i, w, j_pi)
}

/// Same as [`evaluate`] with a precomputed `J_π`, for sweeps that reuse it
/// across grid points.
pub fn evaluate_with_prior_fisher(
    model: &ModelSpec,
    prior: &NuisancePrior,
    rule: &QuadratureRule,
    theta_i: &[f64],
    w: &WeightMatrix,
    j_pi: SymMat,
) -> Result<HybridBoundReport> {
    if w.dim() != model.d_i() {
        return Err(Error::DimMismatch {
            expected: model.d_i(),
            found: w.dim(),
        });
    }
    let pass = node_pass(model, prior, rule, theta_i)?;
    let (h, hpqfim_pinv) = match hpqfim(&pass.avg, &j_pi) {
        Ok(h) => (h, false),
        Err(Error::SingularBlock { .. }) => {
            (schur_complement_pinv(&pass.avg.with_nn_added(&j_pi)?)?, true)
        }
        Err(e) => return Err(e),
    };
    let high = pass.avg.ii.clone();
    let scale = high.max_abs_eigenvalue();
    let low = pass.low.snap_small_eigenvalues(scale);
    let inv_l = InverseForm::of(&high, scale);
    let inv_m = InverseForm::of(&h, scale);
    let inv_u = InverseForm::of(&low, scale);
    let risk_bound = inv_m.weighted_trace(w)?;
    Ok(HybridBoundReport {
        theta_i: theta_i.to_vec(),
        avg_blocks: pass.avg,
        j_pi,
        hpqfim: h,
        surrogate_low: low,
        surrogate_high: high,
        inv_l,
        inv_m,
        inv_u,
        risk_bound,
        pinv_nodes: pass.pinv_nodes,
        hpqfim_pinv,
    })
}

/// One-parameter family of priors ordered by increasing concentration.
#[derive(Debug, Clone, PartialEq)]
pub enum ConcentrationFamily {
    /// Von Mises priors with increasing `κ`.
    VonMises { mu: f64, kappas: Vec<f64> },
    /// Truncated Gaussians with decreasing `σ` (concentration `1/σ`).
    TruncatedGaussian { mu: f64, sigmas: Vec<f64> },
}

impl ConcentrationFamily {
    fn center(&self) -> f64 {
        match self {
            ConcentrationFamily::VonMises { mu, .. }
            | ConcentrationFamily::TruncatedGaussian { mu, .. } => *mu,
        }
    }

    fn members(&self) -> Vec<(f64, PriorKind)> {
        match self {
            ConcentrationFamily::VonMises { mu, kappas } => kappas
                .iter()
                .map(|&kappa| (kappa, PriorKind::VonMises { mu: *mu, kappa }))
                .collect(),
            ConcentrationFamily::TruncatedGaussian { mu, sigmas } => sigmas
                .iter()
                .map(|&sigma| (1.0 / sigma, PriorKind::TruncatedGaussian { mu: *mu, sigma }))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitStep {
    pub concentration: f64,
    pub j_pi: SymMat,
    pub hpqfim: SymMat,
    /// Largest entrywise distance from `hpqfim` to the target.
    pub distance: f64,
}

/// hpQFIM along a concentration family, compared against `J_II` at the
/// prior center (the point-mass limit).
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub target: SymMat,
    pub steps: Vec<LimitStep>,
    /// Every consecutive pair satisfies `h_{k+1} ⪰ h_k` up to `tol`.
    pub monotone_nondecreasing: bool,
    /// Distances to the target never grow (up to `tol`) and the last one is
    /// below the first.
    pub approaching_target: bool,
}

pub fn prior_concentration_limit_check(
    model: &ModelSpec,
    family: &ConcentrationFamily,
    theta_i: &[f64],
    tol: f64,
) -> Result<LimitReport> {
    let domain = model.domain_n()[0];
    let center = domain.wrap(family.center());
    let target = model
        .qfim(&EvalPoint::new(theta_i.to_vec(), vec![center]))?
        .ii;
    let mut steps = Vec::new();
    for (concentration, kind) in family.members() {
        let prior = NuisancePrior::new(kind, domain)?;
        let rule = prior.default_rule()?;
        let j_pi = prior_fisher(&prior, &rule)?;
        let avg = averaged_blocks(model, &prior, &rule, theta_i)?;
        let h = hpqfim(&avg, &j_pi)?;
        let distance = h.max_abs_diff(&target)?;
        steps.push(LimitStep {
            concentration,
            j_pi,
            hpqfim: h,
            distance,
        });
    }
    let mut monotone = true;
    let mut approaching = true;
    for pair in steps.windows(2) {
        monotone &= psd_gap(&pair[1].hpqfim, &pair[0].hpqfim, tol)?.holds;
        approaching &= pair[1].distance <= pair[0].distance + tol;
    }
    if let (Some(first), Some(last)) = (steps.first(), steps.last()) {
        approaching &= steps.len() < 2 || last.distance < first.distance;
    }
    Ok(LimitReport {
        target,
        steps,
        monotone_nondecreasing: monotone,
        approaching_target: approaching,
    })
}
