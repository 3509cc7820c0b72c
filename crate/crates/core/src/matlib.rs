//! Small dense real matrices: symmetric storage, Jacobi eigensolver,
//! SPD inversion, Schur complements and Loewner-order checks.
//!
//! Everything here targets dimensions up to [`MAX_DIM`]. Eigenvalues come
//! from cyclic Jacobi rotations, so results are deterministic and need no
//! external solver. SPD inversion goes through the eigendecomposition so that
//! near-singular matrices are rejected by one uniform criterion: the smallest
//! eigenvalue must exceed [`SINGULAR_TOL`] times the largest magnitude.

use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;
/// Absolute tolerance for the symmetry check in constructors.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative eigenvalue threshold below which a matrix counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Default absolute tolerance for Loewner-order verdicts.
pub const PSD_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 64;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::DimOutOfRange(dim))
    } else {
        Ok(())
    }
}

/// Dense row-major rectangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMat {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dim(rows)?;
        check_dim(cols)?;
        Ok(Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        })
    }

    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows)?;
        check_dim(cols)?;
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> RectMat {
        let mut out = RectMat {
            rows: self.cols,
            cols: self.rows,
            data: vec![0.0; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &RectMat) -> Result<RectMat> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = RectMat {
            rows: self.rows,
            cols: rhs.cols,
            data: vec![0.0; self.rows * rhs.cols],
        };
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> RectMat {
        RectMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &RectMat) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &RectMat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Real symmetric matrix of dimension `1..=MAX_DIM`.
///
/// Storage is full row-major and exactly symmetric: constructors accept
/// inputs whose asymmetry is within [`SYMMETRY_TOL`] and average the two
/// triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    dim: usize,
    data: Vec<f64>,
}

/// Eigendecomposition of a [`SymMat`]; eigenvalues ascending, eigenvectors
/// stored as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: RectMat,
}

impl SymMat {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let diff = (entries[i * dim + j] - entries[j * dim + i]).abs();
                if diff > SYMMETRY_TOL || diff.is_nan() {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff,
                    });
                }
            }
        }
        Ok(Self::symmetrized(dim, entries))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    /// Averages the two triangles without checking the asymmetry. Used for
    /// results of products that are symmetric up to rounding.
    pub(crate) fn symmetrized(dim: usize, mut entries: Vec<f64>) -> Self {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let m = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
                entries[i * dim + j] = m;
                entries[j * dim + i] = m;
            }
        }
        Self { dim, data: entries }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![0.0; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diag(&vec![1.0; dim])
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, v) in values.iter().enumerate() {
            m.data[i * m.dim + i] = *v;
        }
        Ok(m)
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            dim: 1,
            data: vec![value],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn to_rect(&self) -> RectMat {
        RectMat {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    fn same_dim(&self, other: &SymMat) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &SymMat) -> Result<SymMat> {
        self.same_dim(other)?;
        Ok(SymMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SymMat) -> Result<SymMat> {
        self.same_dim(other)?;
        Ok(SymMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: f64) -> SymMat {
        SymMat {
            dim: self.dim,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &SymMat) -> Result<()> {
        self.same_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr[self · other]`.
    pub fn trace_product(&self, other: &SymMat) -> Result<f64> {
        self.same_dim(other)?;
        // Both symmetric: Tr[AB] = sum_ij A_ij B_ij.
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn max_abs_diff(&self, other: &SymMat) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `m · self · mᵀ` for a `k × dim` matrix `m`.
    pub fn sandwich(&self, m: &RectMat) -> Result<SymMat> {
        if m.cols() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: m.cols(),
            });
        }
        let left = m.matmul(&self.to_rect())?;
        let full = left.matmul(&m.transpose())?;
        Ok(SymMat::symmetrized(full.rows(), full.data))
    }

    /// Eigendecomposition by cyclic Jacobi rotations.
    pub fn eigen(&self) -> Eigen {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * 1e-2 * frob || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        let values = order.iter().map(|&i| a[i * n + i]).collect();
        let mut vectors = RectMat {
            rows: n,
            cols: n,
            data: vec![0.0; n * n],
        };
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors.set(row, col, v[row * n + src]);
            }
        }
        Eigen { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 1 {
            return vec![self.data[0]];
        }
        self.eigen().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Rebuilds `V diag(values) Vᵀ`.
    pub fn from_eigen(values: &[f64], vectors: &RectMat) -> Result<SymMat> {
        let n = values.len();
        if vectors.rows() != n || vectors.cols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: vectors.rows(),
            });
        }
        check_dim(n)?;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| vectors.get(i, k) * values[k] * vectors.get(j, k))
                    .sum();
            }
        }
        Ok(SymMat::symmetrized(n, out))
    }

    /// True when the smallest eigenvalue exceeds the singularity threshold
    /// relative to the largest eigenvalue magnitude.
    pub fn is_spd(&self) -> bool {
        let ev = self.eigenvalues();
        let scale = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        scale > 0.0 && ev[0] > SINGULAR_TOL * scale
    }

    /// SPD inverse via eigendecomposition. Fails with
    /// [`Error::SingularBlock`] when the smallest eigenvalue is not above
    /// `SINGULAR_TOL` times the largest eigenvalue magnitude.
    pub fn inverse(&self) -> Result<SymMat> {
        self.inverse_against(0.0)
    }

    /// Like [`SymMat::inverse`], but the singularity threshold is taken
    /// relative to `max(reference, largest |eigenvalue|)`. Lets callers judge
    /// a cancellation-prone result against the scale of its inputs.
    pub fn inverse_against(&self, reference: f64) -> Result<SymMat> {
        if self.dim == 1 {
            let x = self.data[0];
            let scale = reference.abs().max(x.abs());
            if !(scale > 0.0 && x > SINGULAR_TOL * scale) {
                return Err(Error::SingularBlock { min_eig: x });
            }
            return Ok(SymMat::scalar(1.0 / x));
        }
        let eig = self.eigen();
        let scale = eig
            .values
            .iter()
            .fold(reference.abs(), |m, x| m.max(x.abs()));
        let min = eig.values[0];
        if !(scale > 0.0 && min > SINGULAR_TOL * scale) {
            return Err(Error::SingularBlock { min_eig: min });
        }
        let inv: Vec<f64> = eig.values.iter().map(|x| 1.0 / x).collect();
        SymMat::from_eigen(&inv, &eig.vectors)
    }

    /// Moore-Penrose pseudo-inverse; eigenvalues with magnitude at or below
    /// the relative singularity threshold are treated as zero.
    pub fn pseudo_inverse(&self) -> SymMat {
        let eig = self.eigen();
        let scale = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let inv: Vec<f64> = eig
            .values
            .iter()
            .map(|&x| {
                if scale == 0.0 || x.abs() <= SINGULAR_TOL * scale {
                    0.0
                } else {
                    1.0 / x
                }
            })
            .collect();
        SymMat::from_eigen(&inv, &eig.vectors).expect("square eigenvector matrix")
    }

    /// Sets eigenvalues with `|λ| ≤ SINGULAR_TOL * scale` to exactly zero.
    /// Returns `self` unchanged when nothing is snapped.
    pub fn snap_small_eigenvalues(&self, scale: f64) -> SymMat {
        let thr = SINGULAR_TOL * scale.abs();
        if self.dim == 1 {
            let x = self.data[0];
            return SymMat::scalar(if x.abs() <= thr { 0.0 } else { x });
        }
        let eig = self.eigen();
        if eig.values.iter().all(|x| x.abs() > thr) {
            return self.clone();
        }
        let snapped: Vec<f64> = eig
            .values
            .iter()
            .map(|&x| if x.abs() <= thr { 0.0 } else { x })
            .collect();
        SymMat::from_eigen(&snapped, &eig.vectors).expect("square eigenvector matrix")
    }

    /// Zero-padded block diagonal `diag(self, other)`.
    pub fn direct_sum(&self, other: &SymMat) -> Result<SymMat> {
        let n = self.dim + other.dim;
        check_dim(n)?;
        let mut out = vec![0.0; n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i * n + j] = self.get(i, j);
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out[(self.dim + i) * n + self.dim + j] = other.get(i, j);
            }
        }
        Ok(SymMat { dim: n, data: out })
    }
}

/// Interest/nuisance block partition of a symmetric matrix:
/// `[[ii, in_], [in_ᵀ, nn]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSym {
    pub ii: SymMat,
    pub in_: RectMat,
    pub nn: SymMat,
}

impl BlockSym {
    pub fn new(ii: SymMat, in_: RectMat, nn: SymMat) -> Result<Self> {
        if in_.rows() != ii.dim() {
            return Err(Error::DimMismatch {
                expected: ii.dim(),
                found: in_.rows(),
            });
        }
        if in_.cols() != nn.dim() {
            return Err(Error::DimMismatch {
                expected: nn.dim(),
                found: in_.cols(),
            });
        }
        check_dim(ii.dim() + nn.dim())?;
        Ok(Self { ii, in_, nn })
    }

    /// Scalar blocks, the common case for one interest and one nuisance
    /// parameter.
    pub fn scalars(ii: f64, in_: f64, nn: f64) -> Self {
        Self {
            ii: SymMat::scalar(ii),
            in_: RectMat {
                rows: 1,
                cols: 1,
                data: vec![in_],
            },
            nn: SymMat::scalar(nn),
        }
    }

    pub fn zeros(d_i: usize, d_n: usize) -> Result<Self> {
        Self::new(
            SymMat::zeros(d_i)?,
            RectMat::zeros(d_i, d_n)?,
            SymMat::zeros(d_n)?,
        )
    }

    pub fn d_i(&self) -> usize {
        self.ii.dim()
    }

    pub fn d_n(&self) -> usize {
        self.nn.dim()
    }

    pub fn assemble(&self) -> SymMat {
        let (di, dn) = (self.d_i(), self.d_n());
        let n = di + dn;
        let mut out = vec![0.0; n * n];
        for i in 0..di {
            for j in 0..di {
                out[i * n + j] = self.ii.get(i, j);
            }
            for a in 0..dn {
                out[i * n + di + a] = self.in_.get(i, a);
                out[(di + a) * n + i] = self.in_.get(i, a);
            }
        }
        for a in 0..dn {
            for b in 0..dn {
                out[(di + a) * n + di + b] = self.nn.get(a, b);
            }
        }
        SymMat { dim: n, data: out }
    }

    /// Splits `m` after its first `d_i` rows/columns.
    pub fn extract(m: &SymMat, d_i: usize) -> Result<Self> {
        let n = m.dim();
        if d_i == 0 || d_i >= n {
            return Err(Error::InvalidArgument(format!(
                "interest dimension {d_i} must lie in 1..{n}"
            )));
        }
        let dn = n - d_i;
        let ii: Vec<f64> = (0..d_i)
            .flat_map(|i| (0..d_i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j))
            .collect();
        let in_: Vec<f64> = (0..d_i)
            .flat_map(|i| (0..dn).map(move |a| (i, a)))
            .map(|(i, a)| m.get(i, d_i + a))
            .collect();
        let nn: Vec<f64> = (0..dn)
            .flat_map(|a| (0..dn).map(move |b| (a, b)))
            .map(|(a, b)| m.get(d_i + a, d_i + b))
            .collect();
        Ok(Self {
            ii: SymMat { dim: d_i, data: ii },
            in_: RectMat {
                rows: d_i,
                cols: dn,
                data: in_,
            },
            nn: SymMat { dim: dn, data: nn },
        })
    }

    /// `self += c * other`, blockwise.
    pub fn add_scaled(&mut self, c: f64, other: &BlockSym) -> Result<()> {
        self.ii.add_scaled(c, &other.ii)?;
        self.in_.add_scaled(c, &other.in_)?;
        self.nn.add_scaled(c, &other.nn)
    }

    /// Copy with `extra` added to the nuisance block.
    pub fn with_nn_added(&self, extra: &SymMat) -> Result<BlockSym> {
        Ok(BlockSym {
            ii: self.ii.clone(),
            in_: self.in_.clone(),
            nn: self.nn.add(extra)?,
        })
    }

    pub fn max_abs_diff(&self, other: &BlockSym) -> Result<f64> {
        Ok(self
            .ii
            .max_abs_diff(&other.ii)?
            .max(self.in_.max_abs_diff(&other.in_))
            .max(self.nn.max_abs_diff(&other.nn)?))
    }
}

/// Outcome of a Loewner-order comparison `a ⪰ b`, carrying the smallest
/// eigenvalue of `a − b` as witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoewnerVerdict {
    pub holds: bool,
    pub min_eig: f64,
}

/// `ii − in_ · nn⁻¹ · in_ᵀ`.
///
/// Eigenvalues of the result within `SINGULAR_TOL · max|λ(ii)|` of zero are
/// snapped to exactly zero, so a complement that vanishes analytically is
/// reported as zero rather than as rounding noise.
pub fn schur_complement(b: &BlockSym) -> Result<SymMat> {
    let nn_inv = b.nn.inverse()?;
    finish_schur(b, &nn_inv)
}

/// Schur complement with the pseudo-inverse of the nuisance block.
pub fn schur_complement_pinv(b: &BlockSym) -> Result<SymMat> {
    finish_schur(b, &b.nn.pseudo_inverse())
}

fn finish_schur(b: &BlockSym, nn_inv: &SymMat) -> Result<SymMat> {
    let correction = nn_inv.sandwich(&b.in_)?;
    let raw = b.ii.sub(&correction)?;
    Ok(raw.snap_small_eigenvalues(b.ii.max_abs_eigenvalue()))
}

/// Loewner comparison `a ⪰ b` up to `tol`.
pub fn psd_gap(a: &SymMat, b: &SymMat, tol: f64) -> Result<LoewnerVerdict> {
    let diff = a.sub(b)?;
    let min_eig = diff.min_eigenvalue();
    Ok(LoewnerVerdict {
        holds: min_eig >= -tol,
        min_eig,
    })
}

/// Checks that the interest block of `assemble(g)⁻¹` equals the inverse of
/// the Schur complement. Entries are compared with the mixed criterion
/// `|x − y| ≤ tol · max(1, |y|)`.
pub fn block_inverse_identity_check(g: &BlockSym, tol: f64) -> Result<bool> {
    let full_inv = g.assemble().inverse()?;
    let top_left = BlockSym::extract(&full_inv, g.d_i())?.ii;
    let schur_inv = schur_complement(g)?.inverse()?;
    Ok(top_left
        .entries()
        .iter()
        .zip(schur_inv.entries())
        .all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0)))
}

/// Matrix Jensen inequality for the Schur-complement map:
/// `Σ wᵢ Bᵢᵀ Aᵢ⁻¹ Bᵢ ⪰ (Σ wᵢ Bᵢ)ᵀ (Σ wᵢ Aᵢ)⁻¹ (Σ wᵢ Bᵢ)`.
pub fn jensen_schur_check(
    samples: &[(SymMat, RectMat)],
    weights: &[f64],
    tol: f64,
) -> Result<LoewnerVerdict> {
    if samples.is_empty() || samples.len() != weights.len() {
        return Err(Error::DimMismatch {
            expected: samples.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| w.is_nan() || *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "weights must be a probability vector".into(),
        ));
    }
    let (a0, b0) = &samples[0];
    let mut mean_a = SymMat::zeros(a0.dim())?;
    let mut mean_b = RectMat::zeros(b0.rows(), b0.cols())?;
    let mut lhs = SymMat::zeros(b0.cols())?;
    for ((a, b), &w) in samples.iter().zip(weights) {
        let bt = b.transpose();
        lhs.add_scaled(w, &a.inverse()?.sandwich(&bt)?)?;
        mean_a.add_scaled(w, a)?;
        mean_b.add_scaled(w, b)?;
    }
    let rhs = mean_a.inverse()?.sandwich(&mean_b.transpose())?;
    psd_gap(&lhs, &rhs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_inverse_3(m: &SymMat) -> [[f64; 3]; 3] {
        let a = |i: usize, j: usize| m.get(i, j);
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        let mut inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = match j {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let (c0, c1) = match i {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let minor = a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0);
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                inv[i][j] = sign * minor / det;
            }
        }
        inv
    }

    #[test]
    fn rejects_asymmetric_and_bad_dims() {
        assert!(matches!(
            SymMat::new(2, vec![1.0, 0.5, 0.4, 1.0]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(SymMat::zeros(0), Err(Error::DimOutOfRange(0))));
        assert!(matches!(SymMat::zeros(9), Err(Error::DimOutOfRange(9))));
        let m = SymMat::new(2, vec![1.0, 0.5, 0.5 + 5e-13, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn schur_with_zero_cross_term() {
        let r = 0.6;
        let b = BlockSym::scalars(r * r, 0.0, 7.0);
        assert_eq!(schur_complement(&b).unwrap(), SymMat::scalar(r * r));
    }

    #[test]
    fn schur_of_collinear_blocks_is_zero() {
        let b = BlockSym::scalars(0.25, 0.25, 0.25);
        assert_eq!(schur_complement(&b).unwrap().get(0, 0), 0.0);
    }

    #[test]
    fn schur_matches_cofactor_inverse() {
        let m = SymMat::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.7],
            vec![0.5, -0.7, 2.0],
        ])
        .unwrap();
        let b = BlockSym::extract(&m, 2).unwrap();
        let inv = cofactor_inverse_3(&m);
        let top = SymMat::from_rows(&[
            vec![inv[0][0], inv[0][1]],
            vec![inv[1][0], inv[1][1]],
        ])
        .unwrap();
        let expected = top.inverse().unwrap();
        let got = schur_complement(&b).unwrap();
        assert!(got.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn singular_nuisance_block() {
        let b = BlockSym::scalars(1.0, 0.0, 0.0);
        assert!(matches!(
            schur_complement(&b),
            Err(Error::SingularBlock { .. })
        ));
    }

    #[test]
    fn psd_gap_examples() {
        let a = SymMat::diag(&[2.0, 2.0]).unwrap();
        let v = psd_gap(&a, &a, PSD_TOL).unwrap();
        assert!(v.holds);
        assert_eq!(v.min_eig, 0.0);
        let b = SymMat::diag(&[1.0, 3.0]).unwrap();
        let v = psd_gap(&a, &b, PSD_TOL).unwrap();
        assert!(!v.holds);
        assert!((v.min_eig + 1.0).abs() < 1e-15);
        assert!(matches!(
            psd_gap(&a, &SymMat::scalar(1.0), PSD_TOL),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn jensen_scalar_example() {
        let one = RectMat::new(1, 1, vec![1.0]).unwrap();
        let samples = vec![
            (SymMat::scalar(1.0), one.clone()),
            (SymMat::scalar(4.0), one),
        ];
        let v = jensen_schur_check(&samples, &[0.5, 0.5], 1e-12).unwrap();
        // LHS = (1 + 1/4)/2 = 0.625, RHS = 1/2.5 = 0.4.
        assert!(v.holds);
        assert!((v.min_eig - 0.225).abs() < 1e-15);
    }

    #[test]
    fn jensen_single_sample_has_zero_gap() {
        let a = SymMat::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let b = RectMat::from_rows(&[vec![1.0], vec![-0.5]]).unwrap();
        let v = jensen_schur_check(&[(a, b)], &[1.0], 1e-12).unwrap();
        assert!(v.holds);
        assert!(v.min_eig.abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs() {
        let m = SymMat::from_rows(&[
            vec![2.0, -1.0, 0.0, 0.3],
            vec![-1.0, 2.0, -1.0, 0.0],
            vec![0.0, -1.0, 2.0, 0.1],
            vec![0.3, 0.0, 0.1, 5.0],
        ])
        .unwrap();
        let e = m.eigen();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let back = SymMat::from_eigen(&e.values, &e.vectors).unwrap();
        assert!(back.max_abs_diff(&m).unwrap() < 1e-13);
        assert!((e.values.iter().sum::<f64>() - m.trace()).abs() < 1e-13);
    }

    #[test]
    fn block_identity_on_diagonal_blocks() {
        let g = BlockSym::new(
            SymMat::diag(&[2.0, 3.0]).unwrap(),
            RectMat::zeros(2, 1).unwrap(),
            SymMat::scalar(5.0),
        )
        .unwrap();
        assert!(block_inverse_identity_check(&g, 1e-14).unwrap());
    }

    #[test]
    fn assemble_extract_roundtrip() {
        let g = BlockSym::new(
            SymMat::from_rows(&[vec![2.0, 0.1], vec![0.1, 3.0]]).unwrap(),
            RectMat::from_rows(&[vec![0.4], vec![-0.2]]).unwrap(),
            SymMat::scalar(5.0),
        )
        .unwrap();
        assert_eq!(BlockSym::extract(&g.assemble(), 2).unwrap(), g);
    }

    #[test]
    fn pseudo_inverse_of_rank_one() {
        let m = SymMat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let p = m.pseudo_inverse();
        for x in p.entries() {
            assert!((x - 0.25).abs() < 1e-14);
        }
        assert!(matches!(m.inverse(), Err(Error::SingularBlock { .. })));
    }
}
