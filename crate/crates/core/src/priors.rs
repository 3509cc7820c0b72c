//! Nuisance priors, their Fisher information, and prior expectations.
//!
//! Every prior is univariate on a bounded interval. Each kind declares the
//! interval it is integrated over (its support, or a ±12σ window for the
//! truncated Gaussian) together with the quadrature scheme suited to it.

use std::f64::consts::PI;

use rand::Rng;
use statrs::function::erf::erf;

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::matlib::SymMat;
use crate::quadrature::{QuadratureRule, Scheme};

/// Default Gauss-Legendre node count on non-periodic integration intervals.
pub const DEFAULT_GL_NODES: usize = 64;
/// Default node count for the periodic trapezoid rule.
pub const DEFAULT_PERIODIC_NODES: usize = 128;
/// Relative change on node doubling accepted as converged.
pub const CONVERGED_REL: f64 = 1e-8;
/// Relative change on node doubling that signals a non-regular prior.
pub const DIVERGED_REL: f64 = 1e-4;
/// Offset applied to a node that lands on an excluded endpoint.
pub const BOUNDARY_EPS: f64 = 1e-9;

const NORMALIZATION_TOL: f64 = 1e-8;
const GAUSS_WINDOW: f64 = 12.0;
const MAX_DOUBLINGS: usize = 8;
const MAX_KAPPA: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    Uniform,
    TruncatedGaussian { mu: f64, sigma: f64 },
    /// Von Mises density with period equal to the domain length:
    /// `∝ exp(κ cos(2π(x − μ)/L))`.
    VonMises { mu: f64, kappa: f64 },
    /// `(1 + cos(π(x − c)/w)) / (2w)` on `[c − w, c + w]`.
    RaisedCosine { center: f64, width: f64 },
}

impl PriorKind {
    pub fn name(&self) -> &'static str {
        match self {
            PriorKind::Uniform => "uniform",
            PriorKind::TruncatedGaussian { .. } => "truncated_gaussian",
            PriorKind::VonMises { .. } => "von_mises",
            PriorKind::RaisedCosine { .. } => "raised_cosine",
        }
    }
}

/// A normalized prior density on a nuisance interval.
#[derive(Debug, Clone, PartialEq)]
pub struct NuisancePrior {
    kind: PriorKind,
    domain: Interval,
    /// Multiplicative normalizer applied to the kernel.
    norm: f64,
}

/// `e^{-κ} I₀(κ)` by the power series in log space.
pub(crate) fn bessel_i0_scaled(kappa: f64) -> f64 {
    if kappa == 0.0 {
        return 1.0;
    }
    let log_half = (0.5 * kappa).ln();
    let mut log_term = -kappa;
    let mut sum = log_term.exp();
    let mut k = 1.0f64;
    loop {
        log_term += 2.0 * (log_half - k.ln());
        let t = log_term.exp();
        sum += t;
        if k > kappa && t < 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum
}

impl NuisancePrior {
    pub fn new(kind: PriorKind, domain: Interval) -> Result<Self> {
        domain.validate()?;
        let len = domain.length();
        let norm = match kind {
            PriorKind::Uniform => 1.0 / len,
            PriorKind::TruncatedGaussian { mu, sigma } => {
                if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
                    return Err(Error::InvalidPrior(format!(
                        "truncated_gaussian needs finite mu and sigma > 0, got ({mu}, {sigma})"
                    )));
                }
                if !domain.periodic && !(mu >= domain.lo && mu <= domain.hi) {
                    return Err(Error::InvalidPrior(format!(
                        "truncated_gaussian mean {mu} outside {domain}"
                    )));
                }
                let (a, b) = Self::gauss_window(kind, &domain);
                let phi = |t: f64| 0.5 * (1.0 + erf(t / std::f64::consts::SQRT_2));
                let mass = phi((b - mu) / sigma) - phi((a - mu) / sigma);
                if mass.is_nan() || mass <= 1e-300 {
                    return Err(Error::InvalidPrior("truncated_gaussian has no mass".into()));
                }
                1.0 / (sigma * (2.0 * PI).sqrt() * mass)
            }
            PriorKind::VonMises { mu, kappa } => {
                if !((0.0..=MAX_KAPPA).contains(&kappa) && mu.is_finite()) {
                    return Err(Error::InvalidPrior(format!(
                        "von_mises needs finite mu and kappa in [0, {MAX_KAPPA}], got ({mu}, {kappa})"
                    )));
                }
                1.0 / (len * bessel_i0_scaled(kappa))
            }
            PriorKind::RaisedCosine { center, width } => {
                if !(width > 0.0 && center.is_finite()) {
                    return Err(Error::InvalidPrior(format!(
                        "raised_cosine needs width > 0, got {width}"
                    )));
                }
                let fits = if domain.periodic {
                    2.0 * width <= len * (1.0 + 1e-12)
                } else {
                    center - width >= domain.lo - 1e-12 && center + width <= domain.hi + 1e-12
                };
                if !fits {
                    return Err(Error::InvalidPrior(format!(
                        "raised_cosine support [{}, {}] does not fit {domain}",
                        center - width,
                        center + width
                    )));
                }
                1.0 / (2.0 * width)
            }
        };
        let prior = Self { kind, domain, norm };
        let mass = prior.default_rule()?.integrate(|x| prior.density(x));
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPrior(format!(
                "density integrates to {mass}, not 1"
            )));
        }
        Ok(prior)
    }

    pub fn uniform(domain: Interval) -> Result<Self> {
        Self::new(PriorKind::Uniform, domain)
    }

    pub fn kind(&self) -> PriorKind {
        self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    fn gauss_window(kind: PriorKind, domain: &Interval) -> (f64, f64) {
        let PriorKind::TruncatedGaussian { mu, sigma } = kind else {
            unreachable!("window requested for non-Gaussian prior")
        };
        let half = GAUSS_WINDOW * sigma;
        if domain.periodic {
            let h = half.min(0.5 * domain.length());
            (mu - h, mu + h)
        } else {
            ((mu - half).max(domain.lo), (mu + half).min(domain.hi))
        }
    }

    /// Signed offset of `x` from `origin`, reduced to half a period on
    /// periodic domains.
    fn offset(&self, x: f64, origin: f64) -> f64 {
        let d = x - origin;
        if self.domain.periodic {
            let l = self.domain.length();
            (d + 0.5 * l).rem_euclid(l) - 0.5 * l
        } else {
            d
        }
    }

    /// Interval integrated over and its quadrature scheme.
    pub fn integration_interval(&self) -> (f64, f64, Scheme) {
        match self.kind {
            PriorKind::Uniform => {
                let scheme = if self.domain.periodic {
                    Scheme::PeriodicTrapezoid
                } else {
                    Scheme::GaussLegendre
                };
                (self.domain.lo, self.domain.hi, scheme)
            }
            PriorKind::VonMises { .. } => {
                (self.domain.lo, self.domain.hi, Scheme::PeriodicTrapezoid)
            }
            PriorKind::TruncatedGaussian { .. } => {
                let (a, b) = Self::gauss_window(self.kind, &self.domain);
                (a, b, Scheme::GaussLegendre)
            }
            PriorKind::RaisedCosine { center, width } => {
                (center - width, center + width, Scheme::GaussLegendre)
            }
        }
    }

    /// Gauss-Legendre with 64 nodes on bounded non-periodic intervals,
    /// periodic trapezoid with 128 nodes otherwise.
    pub fn default_rule(&self) -> Result<QuadratureRule> {
        let (a, b, scheme) = self.integration_interval();
        let n = match (scheme, self.kind) {
            (Scheme::GaussLegendre, _) => DEFAULT_GL_NODES,
            // Aliasing error of the trapezoid rule decays like exp(-n²/2κ).
            (Scheme::PeriodicTrapezoid, PriorKind::VonMises { kappa, .. }) => {
                DEFAULT_PERIODIC_NODES.max(((9.0 * kappa.sqrt()).ceil() as usize).next_power_of_two())
            }
            (Scheme::PeriodicTrapezoid, _) => DEFAULT_PERIODIC_NODES,
        };
        QuadratureRule::new(scheme, a, b, n)
    }

    pub fn density(&self, x: f64) -> f64 {
        match self.kind {
            PriorKind::Uniform => {
                if self.domain.contains(self.domain.wrap(x)) {
                    self.norm
                } else {
                    0.0
                }
            }
            PriorKind::TruncatedGaussian { mu, sigma } => {
                let (a, b) = Self::gauss_window(self.kind, &self.domain);
                let d = self.offset(x, mu);
                if d < a - mu || d > b - mu {
                    return 0.0;
                }
                self.norm * (-0.5 * (d / sigma).powi(2)).exp()
            }
            PriorKind::VonMises { mu, kappa } => {
                let u = 2.0 * PI * (x - mu) / self.domain.length();
                self.norm * (kappa * (u.cos() - 1.0)).exp()
            }
            PriorKind::RaisedCosine { center, width } => {
                let d = self.offset(x, center);
                if d.abs() > width {
                    return 0.0;
                }
                self.norm * (1.0 + (PI * d / width).cos())
            }
        }
    }

    /// `∂ log π(x)`; zero outside the support.
    pub fn log_derivative(&self, x: f64) -> f64 {
        match self.kind {
            PriorKind::Uniform => 0.0,
            PriorKind::TruncatedGaussian { mu, sigma } => {
                if self.density(x) == 0.0 {
                    0.0
                } else {
                    -self.offset(x, mu) / (sigma * sigma)
                }
            }
            PriorKind::VonMises { mu, kappa } => {
                let omega = 2.0 * PI / self.domain.length();
                -kappa * omega * (omega * (x - mu)).sin()
            }
            PriorKind::RaisedCosine { center, width } => {
                let d = self.offset(x, center);
                if d.abs() >= width {
                    0.0
                } else {
                    -(PI / width) * (0.5 * PI * d / width).tan()
                }
            }
        }
    }

    /// `(∂ log π)² π` in a form that stays finite where `π → 0`.
    pub fn fisher_integrand(&self, x: f64) -> f64 {
        match self.kind {
            PriorKind::RaisedCosine { center, width } => {
                let d = self.offset(x, center);
                if d.abs() > width {
                    0.0
                } else {
                    PI * PI / (2.0 * width.powi(3)) * (1.0 - (PI * d / width).cos())
                }
            }
            _ => self.log_derivative(x).powi(2) * self.density(x),
        }
    }

    /// Maps a quadrature node into the domain: wraps periodic coordinates
    /// and moves a node sitting on an excluded endpoint inward by
    /// [`BOUNDARY_EPS`].
    pub fn place_node(&self, x: f64) -> f64 {
        let x = self.domain.wrap(x);
        if self.domain.lo_open && x <= self.domain.lo {
            self.domain.lo + BOUNDARY_EPS
        } else if self.domain.hi_open && !self.domain.periodic && x >= self.domain.hi {
            self.domain.hi - BOUNDARY_EPS
        } else {
            x
        }
    }

    /// Nodes placed in the domain with their prior-weighted quadrature
    /// weights `wₖ π(xₖ)`; nodes of zero weight are dropped.
    pub fn weighted_nodes(&self, rule: &QuadratureRule) -> Vec<(f64, f64)> {
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .filter_map(|(&x, &w)| {
                let pw = w * self.density(x);
                (pw != 0.0).then(|| (self.place_node(x), pw))
            })
            .collect()
    }

    /// Prior mean of the nuisance coordinate; circular mean on periodic
    /// domains (midpoint when the resultant vanishes).
    pub fn mean(&self) -> Result<f64> {
        let rule = self.default_rule()?;
        if self.domain.periodic {
            let l = self.domain.length();
            let omega = 2.0 * PI / l;
            let c = rule.integrate(|x| self.density(x) * (omega * x).cos());
            let s = rule.integrate(|x| self.density(x) * (omega * x).sin());
            if c.hypot(s) < 1e-12 {
                return Ok(self.domain.midpoint());
            }
            Ok(self.domain.wrap(s.atan2(c) / omega))
        } else {
            Ok(rule.integrate(|x| x * self.density(x)))
        }
    }

    /// Exact draw by rejection from a uniform proposal on the integration
    /// interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b, _) = self.integration_interval();
        let peak = match self.kind {
            PriorKind::Uniform => self.norm,
            PriorKind::TruncatedGaussian { mu, .. } => self.density(mu.clamp(a, b)),
            PriorKind::VonMises { mu, .. } => self.density(mu),
            PriorKind::RaisedCosine { center, .. } => self.density(center),
        };
        loop {
            let x = a + (b - a) * rng.random::<f64>();
            if rng.random::<f64>() * peak <= self.density(x) {
                let placed = self.place_node(x);
                if self.domain.contains(placed) {
                    return placed;
                }
            }
        }
    }
}

fn rel_change(coarse: f64, fine: f64) -> f64 {
    let diff = (fine - coarse).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / fine.abs().max(coarse.abs())
    }
}

/// Fisher information of the prior, `∫ (∂ log π)² π`, as a 1×1 matrix.
///
/// The rule is doubled until the relative change drops below
/// [`CONVERGED_REL`]; a first-doubling change of [`DIVERGED_REL`] or more,
/// or failure to settle, is reported as [`Error::QuadratureDivergence`].
pub fn prior_fisher(prior: &NuisancePrior, rule: &QuadratureRule) -> Result<SymMat> {
    let mut coarse_rule = rule.clone();
    let mut coarse = coarse_rule.integrate(|x| prior.fisher_integrand(x));
    for step in 0..MAX_DOUBLINGS {
        let fine_rule = coarse_rule.refined()?;
        let fine = fine_rule.integrate(|x| prior.fisher_integrand(x));
        let change = rel_change(coarse, fine);
        // Two zero sums for an informative prior mean the rule missed its support.
        let resolved = fine != 0.0 || prior.kind == PriorKind::Uniform;
        if change < CONVERGED_REL && resolved {
            return Ok(SymMat::scalar(fine));
        }
        if step == 0 && change >= DIVERGED_REL {
            return Err(Error::QuadratureDivergence { rel_change: change });
        }
        coarse_rule = fine_rule;
        coarse = fine;
    }
    let last = coarse_rule.refined()?.integrate(|x| prior.fisher_integrand(x));
    Err(Error::QuadratureDivergence {
        rel_change: rel_change(coarse, last),
    })
}

/// `E_π[f] = Σ wₖ π(xₖ) f(xₖ)` with nodes placed in the domain.
pub fn expect<F>(prior: &NuisancePrior, rule: &QuadratureRule, mut f: F) -> Result<SymMat>
where
    F: FnMut(f64) -> Result<SymMat>,
{
    let mut acc: Option<SymMat> = None;
    for (x, pw) in prior.weighted_nodes(rule) {
        let v = f(x)?;
        match acc.as_mut() {
            Some(a) => a.add_scaled(pw, &v)?,
            None => acc = Some(v.scale(pw)),
        }
    }
    acc.ok_or_else(|| Error::InvalidRule("rule has no node inside the prior support".into()))
}
