//! Parametric qubit families as Bloch-vector maps with analytic Jacobians.
//!
//! Interest parameters always lead. The direction model is stored in the
//! order `(θ, φ, r)`: polar and azimuthal angle of interest, Bloch radius as
//! nuisance.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::matlib::BlockSym;
use crate::states::{qfim_bloch, BlochVec, TangentFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `s = (a cos(θ_I+θ_N), a sin(θ_I+θ_N), r cos φ)`, `a = r sin φ`.
    ExtraRotation,
    /// `s = (a cos θ_I, a sin(θ_I+θ_N), r cos φ)`.
    AdditionalSine,
    /// `s = (a cos θ_I, a θ_N sin θ_I, r cos φ)`.
    AnisotropicShrink,
    /// `s = r n̂(θ, φ)` with direction of interest and radius as nuisance.
    Direction,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::ExtraRotation,
        ModelKind::AdditionalSine,
        ModelKind::AnisotropicShrink,
        ModelKind::Direction,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::ExtraRotation => "extra_rotation",
            ModelKind::AdditionalSine => "additional_sine",
            ModelKind::AnisotropicShrink => "anisotropic_shrink",
            ModelKind::Direction => "direction",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidModel(format!("unknown model name `{s}`")))
    }
}

/// A model family with its fixed parameters and declared domains.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    kind: ModelKind,
    r: f64,
    phi: f64,
    domain_i: Vec<Interval>,
    domain_n: Vec<Interval>,
}

/// Evaluation point `(θ_I, θ_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub theta_i: Vec<f64>,
    pub theta_n: Vec<f64>,
}

impl EvalPoint {
    pub fn new(theta_i: Vec<f64>, theta_n: Vec<f64>) -> Self {
        Self { theta_i, theta_n }
    }

    pub fn scalar(theta_i: f64, theta_n: f64) -> Self {
        Self::new(vec![theta_i], vec![theta_n])
    }
}

fn full_turn() -> Interval {
    Interval::periodic(0.0, 2.0 * PI)
}

impl ModelSpec {
    fn planar(kind: ModelKind, r: f64, phi: f64, domain_n: Interval) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidModel(format!("r = {r} must lie in (0, 1)")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidModel(format!("phi = {phi} is not finite")));
        }
        Ok(Self {
            kind,
            r,
            phi: full_turn().wrap(phi),
            domain_i: vec![full_turn()],
            domain_n: vec![domain_n],
        })
    }

    pub fn extra_rotation(r: f64, phi: f64) -> Result<Self> {
        Self::planar(ModelKind::ExtraRotation, r, phi, full_turn())
    }

    /// Requires `r²(sin²φ + 1) ≤ 1`.
    pub fn additional_sine(r: f64, phi: f64) -> Result<Self> {
        let m = Self::planar(ModelKind::AdditionalSine, r, phi, full_turn())?;
        let bound = r * r * (phi.sin().powi(2) + 1.0);
        if bound > 1.0 {
            return Err(Error::InvalidModel(format!(
                "additional_sine needs r^2 (sin^2 phi + 1) <= 1, got {bound}"
            )));
        }
        Ok(m)
    }

    pub fn anisotropic_shrink(r: f64, phi: f64) -> Result<Self> {
        Self::planar(
            ModelKind::AnisotropicShrink,
            r,
            phi,
            Interval::open_closed(0.0, 1.0),
        )
    }

    pub fn direction() -> Self {
        Self {
            kind: ModelKind::Direction,
            r: f64::NAN,
            phi: f64::NAN,
            domain_i: vec![Interval::closed(0.0, PI), full_turn()],
            domain_n: vec![Interval::open(0.0, 1.0)],
        }
    }

    /// Builds a model by kind; `r` and `phi` are ignored for the direction
    /// model.
    pub fn from_kind(kind: ModelKind, r: f64, phi: f64) -> Result<Self> {
        match kind {
            ModelKind::ExtraRotation => Self::extra_rotation(r, phi),
            ModelKind::AdditionalSine => Self::additional_sine(r, phi),
            ModelKind::AnisotropicShrink => Self::anisotropic_shrink(r, phi),
            ModelKind::Direction => Ok(Self::direction()),
        }
    }

    /// Replaces the nuisance domain. For the direction model the radius
    /// domain must stay inside `(0, 1)`.
    pub fn with_nuisance_domain(mut self, domain: Interval) -> Result<Self> {
        domain.validate()?;
        if self.kind == ModelKind::Direction && (domain.periodic || domain.lo < 0.0 || domain.hi > 1.0)
        {
            return Err(Error::InvalidModel(format!(
                "radius domain {domain} must lie inside (0, 1)"
            )));
        }
        if self.kind == ModelKind::AnisotropicShrink
            && (domain.periodic || domain.lo < 0.0 || domain.hi > 1.0)
        {
            return Err(Error::InvalidModel(format!(
                "shrink factor domain {domain} must lie inside (0, 1]"
            )));
        }
        self.domain_n = vec![domain];
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Fixed Bloch radius (NaN for the direction model).
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Fixed polar angle (NaN for the direction model).
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn d_i(&self) -> usize {
        self.domain_i.len()
    }

    pub fn d_n(&self) -> usize {
        self.domain_n.len()
    }

    pub fn domain_i(&self) -> &[Interval] {
        &self.domain_i
    }

    pub fn domain_n(&self) -> &[Interval] {
        &self.domain_n
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self.kind {
            ModelKind::Direction => &["theta", "phi", "r"],
            _ => &["theta_I", "theta_N"],
        }
    }

    /// Wraps periodic components and checks every component against its
    /// domain.
    pub fn admit(&self, p: &EvalPoint) -> Result<EvalPoint> {
        if p.theta_i.len() != self.d_i() {
            return Err(Error::DimMismatch {
                expected: self.d_i(),
                found: p.theta_i.len(),
            });
        }
        if p.theta_n.len() != self.d_n() {
            return Err(Error::DimMismatch {
                expected: self.d_n(),
                found: p.theta_n.len(),
            });
        }
        let names = self.param_names();
        let theta_i = p
            .theta_i
            .iter()
            .zip(&self.domain_i)
            .enumerate()
            .map(|(k, (x, d))| d.admit(names[k], *x))
            .collect::<Result<Vec<_>>>()?;
        let theta_n = p
            .theta_n
            .iter()
            .zip(&self.domain_n)
            .enumerate()
            .map(|(k, (x, d))| d.admit(names[self.d_i() + k], *x))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalPoint { theta_i, theta_n })
    }

    fn raw_bloch(&self, p: &EvalPoint) -> [f64; 3] {
        let ti = p.theta_i[0];
        let tn = p.theta_n[0];
        let a = self.r * self.phi.sin();
        let c = self.r * self.phi.cos();
        match self.kind {
            ModelKind::ExtraRotation => [a * (ti + tn).cos(), a * (ti + tn).sin(), c],
            ModelKind::AdditionalSine => [a * ti.cos(), a * (ti + tn).sin(), c],
            ModelKind::AnisotropicShrink => [a * ti.cos(), a * tn * ti.sin(), c],
            ModelKind::Direction => {
                let (theta, phi, r) = (ti, p.theta_i[1], tn);
                [
                    r * theta.sin() * phi.cos(),
                    r * theta.sin() * phi.sin(),
                    r * theta.cos(),
                ]
            }
        }
    }

    fn raw_jacobian(&self, p: &EvalPoint) -> Vec<[f64; 3]> {
        let ti = p.theta_i[0];
        let tn = p.theta_n[0];
        let a = self.r * self.phi.sin();
        match self.kind {
            ModelKind::ExtraRotation => {
                let d = [-a * (ti + tn).sin(), a * (ti + tn).cos(), 0.0];
                vec![d, d]
            }
            ModelKind::AdditionalSine => vec![
                [-a * ti.sin(), a * (ti + tn).cos(), 0.0],
                [0.0, a * (ti + tn).cos(), 0.0],
            ],
            ModelKind::AnisotropicShrink => vec![
                [-a * ti.sin(), a * tn * ti.cos(), 0.0],
                [0.0, a * ti.sin(), 0.0],
            ],
            ModelKind::Direction => {
                let (theta, phi, r) = (ti, p.theta_i[1], tn);
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                vec![
                    [r * ct * cp, r * ct * sp, -r * st],
                    [-r * st * sp, r * st * cp, 0.0],
                    [st * cp, st * sp, ct],
                ]
            }
        }
    }

    pub fn bloch(&self, p: &EvalPoint) -> Result<BlochVec> {
        let p = self.admit(p)?;
        BlochVec::from_array(self.raw_bloch(&p))
    }

    pub fn jacobian(&self, p: &EvalPoint) -> Result<TangentFrame> {
        let p = self.admit(p)?;
        TangentFrame::new(self.raw_jacobian(&p))
    }

    /// SLD QFIM at `p`, split into interest and nuisance blocks.
    pub fn qfim(&self, p: &EvalPoint) -> Result<BlockSym> {
        let p = self.admit(p)?;
        let s = BlochVec::from_array(self.raw_bloch(&p))?;
        let frame = TangentFrame::new(self.raw_jacobian(&p))?;
        BlockSym::extract(&qfim_bloch(&s, &frame)?, self.d_i())
    }
}
