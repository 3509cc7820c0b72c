#![allow(dead_code)]

use hpqfim::{EvalPoint, ModelSpec, SymMat};
use num_complex::Complex64;
use rand::Rng;

pub type C2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `ρ = ½(I + s·σ)` built entry by entry from the Pauli matrices.
pub fn rho(s: [f64; 3]) -> C2 {
    [
        [c(0.5 * (1.0 + s[2]), 0.0), c(0.5 * s[0], -0.5 * s[1])],
        [c(0.5 * s[0], 0.5 * s[1]), c(0.5 * (1.0 - s[2]), 0.0)],
    ]
}

fn mul(a: &C2, b: &C2) -> C2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &C2) -> C2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn trace(a: &C2) -> Complex64 {
    a[0][0] + a[1][1]
}

/// Eigenvalues (ascending) and unitary of eigenvectors (columns) of a 2×2
/// Hermitian matrix.
fn eigh(h: &C2) -> ([f64; 2], C2) {
    let a = h[0][0].re;
    let d = h[1][1].re;
    let b = h[0][1];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let lam = [mean - rad, mean + rad];
    if b.norm() < 1e-300 {
        let u = if a <= d {
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
        } else {
            [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
        };
        return (lam, u);
    }
    let mut u = [[c(0.0, 0.0); 2]; 2];
    for (k, l) in lam.iter().enumerate() {
        // (H − λ) v = 0 with v = (b, λ − a).
        let v = [b, c(l - a, 0.0)];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        u[0][k] = v[0] / n;
        u[1][k] = v[1] / n;
    }
    (lam, u)
}

/// SLD QFIM of `θ ↦ ρ(s(θ))` at `theta` by solving `2∂ρ = Lρ + ρL` in the
/// eigenbasis of `ρ`, with `∂ρ` from central differences of step `h`.
pub fn sld_qfim(s_of: impl Fn(&[f64]) -> [f64; 3], theta: &[f64], h: f64) -> SymMat {
    let d = theta.len();
    let r = rho(s_of(theta));
    let (lam, u) = eigh(&r);
    let ud = dagger(&u);
    let mut ls = Vec::with_capacity(d);
    for i in 0..d {
        let mut tp = theta.to_vec();
        let mut tm = theta.to_vec();
        tp[i] += h;
        tm[i] -= h;
        let rp = rho(s_of(&tp));
        let rm = rho(s_of(&tm));
        let mut dr = [[c(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                dr[a][b] = (rp[a][b] - rm[a][b]) / (2.0 * h);
            }
        }
        let de = mul(&mul(&ud, &dr), &u);
        let mut le = [[c(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let den = lam[a] + lam[b];
                if den > 1e-14 {
                    le[a][b] = de[a][b] * (2.0 / den);
                }
            }
        }
        ls.push(mul(&mul(&u, &le), &ud));
    }
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let anti = {
                let p = mul(&ls[i], &ls[j]);
                let q = mul(&ls[j], &ls[i]);
                let mut s = [[c(0.0, 0.0); 2]; 2];
                for a in 0..2 {
                    for b in 0..2 {
                        s[a][b] = p[a][b] + q[a][b];
                    }
                }
                s
            };
            out[i * d + j] = 0.5 * trace(&mul(&r, &anti)).re;
        }
    }
    let sym: Vec<f64> = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            0.5 * (out[i * d + j] + out[j * d + i])
        })
        .collect();
    SymMat::new(d, sym).unwrap()
}

/// Model Bloch vector as a function of the flat parameter vector
/// `(θ_I, θ_N)`.
pub fn bloch_fn(model: &ModelSpec) -> impl Fn(&[f64]) -> [f64; 3] + '_ {
    move |t: &[f64]| {
        let p = EvalPoint::new(t[..model.d_i()].to_vec(), t[model.d_i()..].to_vec());
        model.bloch(&p).unwrap().as_array()
    }
}

/// `tr[ρ(s) (a I + m·σ)]` computed from explicit 2×2 matrices.
pub fn trace_prob(s: [f64; 3], a: f64, m: [f64; 3]) -> f64 {
    let e = [
        [c(a + m[2], 0.0), c(m[0], -m[1])],
        [c(m[0], m[1]), c(a - m[2], 0.0)],
    ];
    trace(&mul(&rho(s), &e)).re
}

/// Modified Bessel function `I_n(x)` by its power series.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..500 {
        let mf = m as f64;
        term *= half * half / (mf * (mf + n as f64));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Von Mises prior Fisher information on a full turn, `κ I₁(κ)/I₀(κ)`.
pub fn von_mises_fisher(kappa: f64) -> f64 {
    kappa * bessel_i(1, kappa) / bessel_i(0, kappa)
}

/// Random SPD matrix `A Aᵀ + δ I` with entries of `A` uniform in `[-1, 1]`.
pub fn random_spd<R: Rng>(rng: &mut R, d: usize, delta: f64) -> SymMat {
    let a: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut v: f64 = (0..d).map(|k| a[i * d + k] * a[j * d + k]).sum();
            if i == j {
                v += delta;
            }
            m[i * d + j] = v;
        }
    }
    SymMat::new(d, m).unwrap()
}

/// Inverse by the adjugate formula for dimensions up to 4.
pub fn cofactor_inverse(m: &SymMat) -> Vec<Vec<f64>> {
    let rows = m.rows();
    let n = rows.len();
    let det = det(&rows);
    let mut inv = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            inv[j][i] = sign * det_or_one(&minor) / det;
        }
    }
    inv
}

fn det_or_one(m: &[Vec<f64>]) -> f64 {
    if m.is_empty() {
        1.0
    } else {
        det(m)
    }
}

pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
