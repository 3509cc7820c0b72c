//! Qubit states in Bloch form and their SLD quantum Fisher information.
//!
//! For `ρ = ½(I + s·σ)` with `|s| < 1` the SLD QFIM has the closed form
//!
//! ```text
//! J_ij = ∂ᵢs·∂ⱼs + (s·∂ᵢs)(s·∂ⱼs) / (1 − |s|²)
//! ```
//!
//! so no complex arithmetic is needed.

use crate::error::{Error, Result};
use crate::matlib::SymMat;

/// Tolerance on `|s| ≤ 1` for a physical state.
pub const NORM_TOL: f64 = 1e-12;
/// Distance from the Bloch sphere surface below which the QFIM is refused.
pub const MIXED_MARGIN: f64 = 1e-9;

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bloch vector of a physical qubit state, `|s| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVec {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVec {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let s = Self { x, y, z };
        let norm = s.norm();
        if norm.is_nan() || norm > 1.0 + NORM_TOL {
            return Err(Error::NonPhysical { norm });
        }
        Ok(s)
    }

    pub fn from_array(v: Vec3) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn as_array(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

/// Derivatives `∂ₖs` of the Bloch vector, interest parameters first.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    columns: Vec<Vec3>,
}

impl TangentFrame {
    pub fn new(columns: Vec<Vec3>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::DimOutOfRange(0));
        }
        Ok(Self { columns })
    }

    pub fn d_params(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec3] {
        &self.columns
    }

    pub fn column(&self, k: usize) -> &Vec3 {
        &self.columns[k]
    }
}

/// SLD quantum Fisher information matrix of a mixed qubit state.
pub fn qfim_bloch(s: &BlochVec, frame: &TangentFrame) -> Result<SymMat> {
    let norm = s.norm();
    if norm >= 1.0 - MIXED_MARGIN {
        return Err(Error::PureStateBoundary { norm });
    }
    let sv = s.as_array();
    let purity_gap = 1.0 - s.norm_sq();
    let n = frame.d_params();
    let radial: Vec<f64> = frame.columns().iter().map(|c| dot(&sv, c)).collect();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = dot(frame.column(i), frame.column(j)) + radial[i] * radial[j] / purity_gap;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SymMat::new(n, data)
}

/// `ρ = ½(I + s·σ)` as the real quadruple `(ρ₀₀, Re ρ₀₁, Im ρ₀₁, ρ₁₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density2 {
    pub a: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub d: f64,
}

impl Density2 {
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a + self.d);
        let half = 0.5 * (self.a - self.d);
        let rad = (half * half + self.b_re * self.b_re + self.b_im * self.b_im).sqrt();
        [mean - rad, mean + rad]
    }
}

pub fn density_matrix(s: &BlochVec) -> Result<Density2> {
    let norm = s.norm();
    if norm.is_nan() || norm > 1.0 + NORM_TOL {
        return Err(Error::NonPhysical { norm });
    }
    Ok(Density2 {
        a: 0.5 * (1.0 + s.z),
        b_re: 0.5 * s.x,
        b_im: -0.5 * s.y,
        d: 0.5 * (1.0 - s.z),
    })
}

/// Von Neumann entropy in nats. The spectrum is `(1 ± |s|)/2`.
pub fn von_neumann_entropy(s: &BlochVec) -> Result<f64> {
    let norm = s.norm();
    if norm.is_nan() || norm > 1.0 + NORM_TOL {
        return Err(Error::NonPhysical { norm });
    }
    let r = norm.min(1.0);
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(h(0.5 * (1.0 + r)) + h(0.5 * (1.0 - r)))
}
