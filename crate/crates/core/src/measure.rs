//! Finite-outcome qubit measurements, classical Fisher information and a
//! Monte Carlo estimate of the hybrid risk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hybrid::{averaged_blocks, hpqfim, InverseForm};
use crate::matlib::{psd_gap, schur_complement_pinv, BlockSym, LoewnerVerdict, SymMat};
use crate::models::{EvalPoint, ModelSpec};
use crate::priors::{prior_fisher, NuisancePrior};
use crate::quadrature::QuadratureRule;
use crate::states::{dot, BlochVec, Vec3};

/// Tolerance on positivity and completeness of POVM elements.
pub const POVM_TOL: f64 = 1e-12;
/// Outcomes at or below this probability are treated as impossible.
pub const PROB_FLOOR: f64 = 1e-12;
/// Minimum Monte Carlo sample count.
pub const MIN_SAMPLES: usize = 10_000;
/// Samples drawn from one RNG substream.
pub const CHUNK: usize = 10_000;

/// Operator `a I + m·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmElement {
    pub a: f64,
    pub m: Vec3,
}

impl PovmElement {
    pub fn new(a: f64, m: Vec3) -> Self {
        Self { a, m }
    }

    fn m_norm(&self) -> f64 {
        dot(&self.m, &self.m).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    /// Checks `a ≥ |m|` per element, `Σ a = 1` and `Σ m = 0`.
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let mut sum_a = 0.0;
        let mut sum_m = [0.0; 3];
        for (k, e) in elements.iter().enumerate() {
            if !(e.a.is_finite() && e.m.iter().all(|v| v.is_finite())) {
                return Err(Error::InvalidPovm(format!("element {k} is not finite")));
            }
            if e.a < e.m_norm() - POVM_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {k} is not positive: a = {} < |m| = {}",
                    e.a,
                    e.m_norm()
                )));
            }
            sum_a += e.a;
            for i in 0..3 {
                sum_m[i] += e.m[i];
            }
        }
        let defect = (sum_a - 1.0)
            .abs()
            .max(sum_m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())));
        if defect > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements do not sum to the identity (defect {defect:e})"
            )));
        }
        Ok(Self { elements })
    }

    /// Two-outcome projective measurement along `axis` (normalized here).
    pub fn projective(axis: Vec3) -> Result<Self> {
        let n = dot(&axis, &axis).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidPovm("projective axis must be nonzero".into()));
        }
        let u = [0.5 * axis[0] / n, 0.5 * axis[1] / n, 0.5 * axis[2] / n];
        Self::new(vec![
            PovmElement::new(0.5, u),
            PovmElement::new(0.5, [-u[0], -u[1], -u[2]]),
        ])
    }

    /// `k` outcomes, each `I / k`.
    pub fn trivial(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        Self::new(vec![PovmElement::new(1.0 / k as f64, [0.0; 3]); k])
    }

    /// Randomized choice of `parts[j]` with probability `weights[j]`; the
    /// outcomes are the disjoint union of the parts' outcomes.
    pub fn mixture(weights: &[f64], parts: &[Povm]) -> Result<Self> {
        if weights.len() != parts.len() {
            return Err(Error::DimMismatch {
                expected: parts.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidPovm("mixture weights must be nonnegative".into()));
        }
        let elements = weights
            .iter()
            .zip(parts)
            .flat_map(|(&w, p)| {
                p.elements
                    .iter()
                    .map(move |e| PovmElement::new(w * e.a, [w * e.m[0], w * e.m[1], w * e.m[2]]))
            })
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDist {
    pub probs: Vec<f64>,
}

impl OutcomeDist {
    /// Index of the outcome whose cumulative probability first exceeds `u`.
    pub fn inverse_cdf(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        // u landed in the rounding gap above the final partial sum.
        self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}

/// `p_k = a_k + m_k·s`.
pub fn outcome_dist(povm: &Povm, s: &BlochVec) -> Result<OutcomeDist> {
    let sv = s.as_array();
    let probs: Vec<f64> = povm
        .elements
        .iter()
        .map(|e| (e.a + dot(&e.m, &sv)).max(0.0))
        .collect();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > POVM_TOL {
        return Err(Error::InvalidPovm(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(OutcomeDist { probs })
}

/// Probabilities and their gradients (one row per outcome) at `p`.
fn likelihood_parts(povm: &Povm, model: &ModelSpec, p: &EvalPoint) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let s = model.bloch(p)?;
    let frame = model.jacobian(p)?;
    let dist = outcome_dist(povm, &s)?;
    let grads = povm
        .elements
        .iter()
        .map(|e| frame.columns().iter().map(|c| dot(&e.m, c)).collect())
        .collect();
    Ok((dist.probs, grads))
}

/// `Σ_k ∂ᵢp_k ∂ⱼp_k / p_k` split into interest and nuisance blocks.
///
/// An outcome with `p_k ≤ PROB_FLOOR` contributes nothing when its gradient
/// also vanishes and is an error otherwise.
pub fn classical_fim(povm: &Povm, model: &ModelSpec, p: &EvalPoint) -> Result<BlockSym> {
    let (probs, grads) = likelihood_parts(povm, model, p)?;
    let d = model.d_i() + model.d_n();
    let mut f = vec![0.0; d * d];
    for (k, (pk, g)) in probs.iter().zip(&grads).enumerate() {
        if *pk <= PROB_FLOOR {
            if g.iter().all(|v| v.abs() <= PROB_FLOOR) {
                continue;
            }
            return Err(Error::ZeroProbabilityOutcome {
                outcome: k,
                prob: *pk,
            });
        }
        for i in 0..d {
            for j in 0..d {
                f[i * d + j] += g[i] * g[j] / pk;
            }
        }
    }
    BlockSym::extract(&SymMat::new(d, f)?, model.d_i())
}

/// `J(θ) − J(θ|Π) ⪰ 0`.
pub fn data_processing_check(
    povm: &Povm,
    model: &ModelSpec,
    p: &EvalPoint,
    tol: f64,
) -> Result<LoewnerVerdict> {
    let q = model.qfim(p)?;
    let c = classical_fim(povm, model, p)?;
    psd_gap(&q.assemble(), &c.assemble(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainVerdict {
    Holds,
    Fails,
    /// Both interest blocks carry no information.
    Degenerate,
}

/// Classical versus quantum hybrid information at one interest point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// `(G⁽π⁾⁻¹)_II`.
    pub quantum: InverseForm,
    /// `(G⁽π⁾(·|Π)⁻¹)_II`.
    pub classical: InverseForm,
    pub verdict: ChainVerdict,
    /// Smallest eigenvalue of `classical − quantum` when both are finite.
    pub min_eig: Option<f64>,
}

fn hybrid_inverse(avg: &BlockSym, j_pi: &SymMat) -> Result<InverseForm> {
    let h = match hpqfim(avg, j_pi) {
        Ok(h) => h,
        Err(Error::SingularBlock { .. }) => schur_complement_pinv(&avg.with_nn_added(j_pi)?)?,
        Err(e) => return Err(e),
    };
    Ok(InverseForm::of(&h, avg.ii.max_abs_eigenvalue()))
}

/// `(G⁽π⁾(·|Π)⁻¹)_II ⪰ (G⁽π⁾⁻¹)_II` at `theta_i`.
pub fn classical_hybrid_chain(
    povm: &Povm,
    model: &ModelSpec,
    prior: &NuisancePrior,
    rule: &QuadratureRule,
    theta_i: &[f64],
    tol: f64,
) -> Result<ChainReport> {
    let j_pi = prior_fisher(prior, rule)?;
    let avg_q = averaged_blocks(model, prior, rule, theta_i)?;
    let mut avg_c = BlockSym::zeros(model.d_i(), model.d_n())?;
    for (x, pw) in prior.weighted_nodes(rule) {
        let c = classical_fim(povm, model, &EvalPoint::new(theta_i.to_vec(), vec![x]))?;
        avg_c.add_scaled(pw, &c)?;
    }
    let quantum = hybrid_inverse(&avg_q, &j_pi)?;
    let classical = hybrid_inverse(&avg_c, &j_pi)?;
    let (verdict, min_eig) = match (&classical, &quantum) {
        (InverseForm::Infinite, InverseForm::Infinite) => (ChainVerdict::Degenerate, None),
        (InverseForm::Finite(c), InverseForm::Finite(q)) => {
            let v = psd_gap(c, q, tol)?;
            let verdict = if v.holds {
                ChainVerdict::Holds
            } else {
                ChainVerdict::Fails
            };
            (verdict, Some(v.min_eig))
        }
        (InverseForm::Infinite, InverseForm::Finite(_)) => (ChainVerdict::Holds, None),
        (InverseForm::Finite(_), InverseForm::Infinite) => (ChainVerdict::Fails, None),
    };
    Ok(ChainReport {
        quantum,
        classical,
        verdict,
        min_eig,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    /// Sample mean of `|θ̂_I − θ_I|²`.
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Monte Carlo estimate of `Tr[V]` (unit weight) for the score estimator
/// `θ̂_I = θ_I + J_II(·|Π)⁻¹ ∇_I log p(x | θ_I, θ̄_N)`, with `θ̄_N` the prior
/// mean and `θ_N ~ π` redrawn per sample.
///
/// Sample `j` comes from substream `j / CHUNK` of a ChaCha20 generator seeded
/// with `seed`, so a run is a prefix of any longer run with the same seed.
pub fn empirical_hybrid_risk(
    povm: &Povm,
    model: &ModelSpec,
    prior: &NuisancePrior,
    theta_i: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "n_samples = {n_samples} is below {MIN_SAMPLES}"
        )));
    }
    if model.d_n() != 1 {
        return Err(Error::InvalidPrior(format!(
            "univariate prior cannot drive a {}-dimensional nuisance",
            model.d_n()
        )));
    }
    let reference = EvalPoint::new(theta_i.to_vec(), vec![prior.mean()?]);
    let f_ii = classical_fim(povm, model, &reference)?.ii;
    let k = f_ii.inverse_against(0.0)?;
    let (probs, grads) = likelihood_parts(povm, model, &reference)?;
    let d_i = model.d_i();
    // The estimator error depends on the outcome only.
    let losses: Vec<f64> = probs
        .iter()
        .zip(&grads)
        .map(|(pk, g)| {
            if *pk <= PROB_FLOOR {
                return 0.0;
            }
            (0..d_i)
                .map(|a| {
                    let e: f64 = (0..d_i).map(|b| k.get(a, b) * g[b] / pk).sum();
                    e * e
                })
                .sum()
        })
        .collect();

    let n_chunks = n_samples.div_ceil(CHUNK);
    let partials: Vec<Result<(f64, f64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let tn = prior.sample(&mut rng);
                let s = model.bloch(&EvalPoint::new(theta_i.to_vec(), vec![tn]))?;
                let dist = outcome_dist(povm, &s)?;
                let x = dist.inverse_cdf(rng.random::<f64>());
                if dist.probs[x] > 0.0 && probs[x] <= PROB_FLOOR {
                    return Err(Error::ZeroProbabilityOutcome {
                        outcome: x,
                        prob: probs[x],
                    });
                }
                let l = losses[x];
                sum += l;
                sum_sq += l * l;
            }
            Ok((sum, sum_sq))
        })
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for part in partials {
        let (s, q) = part?;
        sum += s;
        sum_sq += q;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(RiskEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn projective_probabilities() {
        let z = Povm::projective([0.0, 0.0, 1.0]).unwrap();
        let d = outcome_dist(&z, &BlochVec::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.probs, vec![0.5, 0.5]);
        let x = Povm::projective([1.0, 0.0, 0.0]).unwrap();
        let d = outcome_dist(&x, &BlochVec::new(0.5, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.probs, vec![0.75, 0.25]);
    }

    #[test]
    fn rejects_invalid_povms() {
        assert!(Povm::new(vec![PovmElement::new(0.5, [0.6, 0.0, 0.0]), PovmElement::new(0.5, [-0.6, 0.0, 0.0])]).is_err());
        assert!(Povm::new(vec![PovmElement::new(0.6, [0.0; 3])]).is_err());
        assert!(Povm::new(vec![]).is_err());
        assert!(Povm::projective([0.0; 3]).is_err());
    }

    #[test]
    fn mixture_is_complete() {
        let z = Povm::projective([0.0, 0.0, 1.0]).unwrap();
        let x = Povm::projective([1.0, 0.0, 0.0]).unwrap();
        let m = Povm::mixture(&[0.5, 0.5], &[z, x]).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.elements()[2], PovmElement::new(0.25, [0.25, 0.0, 0.0]));
    }

    #[test]
    fn trivial_povm_has_zero_fim() {
        let m = ModelSpec::extra_rotation(0.5, FRAC_PI_2).unwrap();
        let f = classical_fim(&Povm::trivial(3).unwrap(), &m, &EvalPoint::scalar(0.4, 1.1)).unwrap();
        assert_eq!(f.assemble().max_abs(), 0.0);
    }

    #[test]
    fn inverse_cdf_edges() {
        let d = OutcomeDist {
            probs: vec![0.25, 0.0, 0.75],
        };
        assert_eq!(d.inverse_cdf(0.0), 0);
        assert_eq!(d.inverse_cdf(0.25), 2);
        assert_eq!(d.inverse_cdf(1.0), 2);
    }

    #[test]
    fn small_sample_counts_rejected() {
        let m = ModelSpec::extra_rotation(0.5, FRAC_PI_2).unwrap();
        let prior = NuisancePrior::uniform(m.domain_n()[0]).unwrap();
        let x = Povm::projective([1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            empirical_hybrid_risk(&x, &m, &prior, &[0.3], 100, 1),
            Err(Error::InvalidArgument(_))
        ));
    }
}
