//! Fixed quadrature rules on a bounded interval.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GaussLegendre,
    /// Equal weights at the cell midpoints `lo + (k + ½)h`; spectrally
    /// accurate for smooth periodic integrands and never touches the
    /// endpoints.
    PeriodicTrapezoid,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::GaussLegendre => "gauss_legendre",
            Scheme::PeriodicTrapezoid => "periodic_trapezoid",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_legendre" => Ok(Scheme::GaussLegendre),
            "periodic_trapezoid" => Ok(Scheme::PeriodicTrapezoid),
            _ => Err(Error::InvalidRule(format!("unknown scheme `{s}`"))),
        }
    }
}

pub const MAX_NODES: usize = 1 << 16;

/// Nodes and positive weights on `[lo, hi]`; weights sum to `hi − lo`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    scheme: Scheme,
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(scheme: Scheme, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidRule(format!("bad interval [{lo}, {hi}]")));
        }
        if n == 0 || n > MAX_NODES {
            return Err(Error::InvalidRule(format!(
                "node count {n} outside 1..={MAX_NODES}"
            )));
        }
        let (nodes, weights) = match scheme {
            Scheme::GaussLegendre => {
                let (x, w) = gauss_legendre_unit(n);
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                (
                    x.iter().map(|t| mid + half * t).collect(),
                    w.iter().map(|v| half * v).collect(),
                )
            }
            Scheme::PeriodicTrapezoid => {
                let h = (hi - lo) / n as f64;
                (
                    (0..n).map(|k| lo + (k as f64 + 0.5) * h).collect(),
                    vec![h; n],
                )
            }
        };
        Ok(Self {
            scheme,
            lo,
            hi,
            nodes,
            weights,
        })
    }

    pub fn gauss_legendre(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(Scheme::GaussLegendre, lo, hi, n)
    }

    pub fn periodic_trapezoid(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(Scheme::PeriodicTrapezoid, lo, hi, n)
    }

    /// Same scheme and interval with twice the nodes.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.scheme, self.lo, self.hi, 2 * self.len())
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Plain `∫ f` over the rule's interval.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]` by Newton
/// iteration on the three-term recurrence.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_length() {
        for n in [1, 2, 3, 7, 64, 513] {
            let r = QuadratureRule::gauss_legendre(-0.5, 2.0, n).unwrap();
            assert!((r.weights().iter().sum::<f64>() - 2.5).abs() < 1e-12, "n={n}");
            let t = QuadratureRule::periodic_trapezoid(0.0, 2.0 * PI, n).unwrap();
            assert!((t.weights().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn single_node_is_midpoint() {
        let r = QuadratureRule::gauss_legendre(0.0, 4.0, 1).unwrap();
        assert_eq!(r.nodes(), &[2.0]);
        assert_eq!(r.weights(), &[4.0]);
    }

    #[test]
    fn polynomial_exactness() {
        // n-point Gauss-Legendre integrates degree 2n-1 exactly.
        for n in 1..12 {
            let r = QuadratureRule::gauss_legendre(0.0, 1.0, n).unwrap();
            let deg = 2 * n - 1;
            let got = r.integrate(|x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn nodes_strictly_interior_and_sorted() {
        let r = QuadratureRule::gauss_legendre(0.0, 1.0, 200).unwrap();
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes()[0] > 0.0 && *r.nodes().last().unwrap() < 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(QuadratureRule::gauss_legendre(1.0, 0.0, 4).is_err());
        assert!(QuadratureRule::gauss_legendre(0.0, 1.0, 0).is_err());
        assert!("simpson".parse::<Scheme>().is_err());
    }
}
