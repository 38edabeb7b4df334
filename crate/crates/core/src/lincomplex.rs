//! Dense complex linear algebra and the symmetric bilinear operators that
//! carry second derivatives, pre-Schwarzians and Schwarzians.
//!
//! Everything here is immutable after construction. Matrices are square and
//! stored row-major; bilinear operators store `c[k][i][j]` so that
//! `T<u, v>_k = sum_{i,j} c[k][i][j] u_i v_j`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative pivot threshold used by [`mat_inverse`].
pub const SINGULAR_PIVOT_TOL: f64 = 1e-13;
/// Relative asymmetry tolerated before a derivative-valued operator is rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

// ---------------------------------------------------------------------------
// CVector
// ---------------------------------------------------------------------------

/// A point or direction in C^n.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector(Vec<C64>);

impl CVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDimension);
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![ZERO; n])
    }

    /// Standard basis vector `e_k` (zero-based `k`).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    /// Hermitian norm `|z| = (sum |z_i|^2)^(1/2)`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// Bilinear pairing `sum_k a_k b_k`, no conjugation.
    pub fn pair(&self, other: &CVector) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(C64::new(1.0 / n, 0.0))
        }
    }

    /// Adds `step * e_k`.
    pub fn shifted(&self, k: usize, step: C64) -> Self {
        let mut v = self.clone();
        v.0[k] += step;
        v
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// CMatrix
// ---------------------------------------------------------------------------

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(cols: &[CVector]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.n)
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector((0..self.n).map(|i| self[(i, j)]).collect())
    }

    /// Entrywise conjugate (the bar of a matrix), not the adjoint.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.n, v.dim(), "matrix-vector dimension mismatch");
        CVector(
            self.rows()
                .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// Largest entry-wise distance to `other`.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Lu {
        Lu::new(self)
    }

    pub fn det(&self) -> C64 {
        self.lu().det()
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        mat_inverse(self)
    }

    /// Product of Euclidean row norms, an upper bound for `|det|`.
    pub fn hadamard_bound(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .product()
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Spectral condition number `s_max / s_min`.
    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        let min = *s.last().unwrap();
        if min == 0.0 {
            f64::INFINITY
        } else {
            s[0] / min
        }
    }

    /// Largest singular value together with a unit right singular vector.
    pub fn top_singular_pair(&self) -> (f64, CVector) {
        let svd = self.to_nalgebra().svd(false, true);
        let v_t = svd.v_t.expect("v_t requested");
        let (idx, sigma) = svd
            .singular_values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
                if s > best.1 {
                    (i, s)
                } else {
                    best
                }
            });
        let v = CVector((0..self.n).map(|j| v_t[(idx, j)].conj()).collect());
        (sigma, v)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        mat_mul(self, rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

/// Partial-pivot LU factorization `P A = L U`, stored compactly.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
    min_pivot: f64,
    max_entry: f64,
}

impl Lu {
    fn new(a: &CMatrix) -> Self {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let (p, mag) = (col..n)
                .map(|r| (r, lu[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(mag);
            if p != col {
                for j in 0..n {
                    lu.swap(p * n + j, col * n + j);
                }
                perm.swap(p, col);
                sign = -sign;
            }
            let pivot = lu[col * n + col];
            if pivot == ZERO {
                continue;
            }
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                for j in col + 1..n {
                    let upd = factor * lu[col * n + j];
                    lu[r * n + j] -= upd;
                }
            }
        }
        Self {
            n,
            lu,
            perm,
            sign,
            min_pivot,
            max_entry: a.max_abs(),
        }
    }

    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.sign, 0.0);
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }

    fn threshold(&self) -> f64 {
        SINGULAR_PIVOT_TOL * self.max_entry
    }

    pub fn is_singular(&self) -> bool {
        !(self.min_pivot > self.threshold())
    }

    fn solve_unchecked(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &CVector) -> Result<CVector> {
        check_dim(self.n, b.dim())?;
        self.ensure_regular()?;
        Ok(CVector(self.solve_unchecked(b.as_slice())))
    }

    fn ensure_regular(&self) -> Result<()> {
        if self.is_singular() {
            Err(Error::Singular {
                pivot: self.min_pivot,
                threshold: self.threshold(),
            })
        } else {
            Ok(())
        }
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.ensure_regular()?;
        let n = self.n;
        let mut inv = CMatrix::zeros(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            let col = self.solve_unchecked(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_dim(a.n, b.n)?;
    let n = a.n;
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for l in 0..n {
            let a_il = a[(i, l)];
            if a_il == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += a_il * b[(l, j)];
            }
        }
    }
    Ok(out)
}

/// Inverse via partial-pivot LU. Fails with [`Error::Singular`] when some
/// pivot falls below `1e-13` times the largest entry magnitude.
pub fn mat_inverse(a: &CMatrix) -> Result<CMatrix> {
    a.lu().inverse()
}

/// Spectral norm (largest singular value).
pub fn op_norm_linear(a: &CMatrix) -> f64 {
    // sqrt of the top eigenvalue of A*A: exact whenever A*A is exactly
    // diagonal, where the SVD can be off by an ulp
    let m = a.to_nalgebra();
    nalgebra::SymmetricEigen::new(m.adjoint() * &m)
        .eigenvalues
        .iter()
        .fold(0.0, |acc: f64, &l| acc.max(l))
        .sqrt()
}

// ---------------------------------------------------------------------------
// BilinearOp
// ---------------------------------------------------------------------------

/// Bilinear map `C^n x C^n -> C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearOp {
    n: usize,
    c: Vec<C64>,
}

impl BilinearOp {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            c: vec![ZERO; n * n * n],
        }
    }

    /// General (possibly asymmetric) operator from `f(k, i, j) = c[k][i][j]`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let mut c = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    c.push(f(k, i, j));
                }
            }
        }
        Self { n, c }
    }

    /// Operator built from a flat `c[k][i][j]` table.
    pub fn from_coefficients(n: usize, c: Vec<C64>) -> Result<Self> {
        check_dim(n * n * n, c.len())?;
        Ok(Self { n, c })
    }

    /// Derivative-valued operator: rejected if its asymmetry exceeds
    /// `1e-12` relative to its scale, otherwise symmetrized in `(i, j)`.
    pub fn symmetric(self) -> Result<Self> {
        let scale = self.max_abs().max(1.0);
        let asym = self.asymmetry();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::Asymmetric(asym));
        }
        let n = self.n;
        Ok(Self::from_fn(n, |k, i, j| {
            if i == j {
                self.get(k, i, j)
            } else {
                (self.get(k, i, j) + self.get(k, j, i)) * 0.5
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> C64 {
        self.c[(k * self.n + i) * self.n + j]
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.c
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &BilinearOp) -> f64 {
        assert_eq!(self.n, other.n);
        self.c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|c[k][i][j] - c[k][j][i]|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).norm());
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().map(|z| z * s).collect(),
        }
    }

    pub fn apply(&self, u: &CVector, v: &CVector) -> Result<CVector> {
        apply_bilinear(self, u, v)
    }

    /// Matrix of `v -> T<u, v>`.
    pub fn slot_matrix(&self, u: &CVector) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, |k, j| (0..n).map(|i| self.get(k, i, j) * u[i]).sum())
    }

    /// Matrix of `u -> T<u, v>`.
    pub fn first_slot_matrix(&self, v: &CVector) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, |k, i| (0..n).map(|j| self.get(k, i, j) * v[j]).sum())
    }

    /// `result<u, v> = T<m u, m v>`.
    pub fn pullback(&self, m: &CMatrix) -> Result<Self> {
        let n = self.n;
        check_dim(n, m.dim())?;
        let second = right_slot_compose(self, m)?;
        Ok(Self::from_fn(n, |k, i, j| {
            (0..n).map(|l| second.get(k, l, j) * m[(l, i)]).sum()
        }))
    }

    pub fn trace_slot(&self, k: usize) -> Result<C64> {
        trace_slot(self, k)
    }

    /// Vector of `trace_slot(k)` for every `k`.
    pub fn slot_traces(&self) -> CVector {
        let n = self.n;
        CVector((0..n).map(|k| (0..n).map(|i| self.get(i, k, i)).sum()).collect())
    }

    /// Euclidean norm of the coefficient table.
    pub fn frobenius(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for &BilinearOp {
    type Output = BilinearOp;
    fn add(self, rhs: &BilinearOp) -> BilinearOp {
        assert_eq!(self.n, rhs.n, "operator dimension mismatch");
        BilinearOp {
            n: self.n,
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &BilinearOp {
    type Output = BilinearOp;
    fn sub(self, rhs: &BilinearOp) -> BilinearOp {
        assert_eq!(self.n, rhs.n, "operator dimension mismatch");
        BilinearOp {
            n: self.n,
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn apply_bilinear(t: &BilinearOp, u: &CVector, v: &CVector) -> Result<CVector> {
    check_dim(t.n, u.dim())?;
    check_dim(t.n, v.dim())?;
    let n = t.n;
    Ok(CVector(
        (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..n {
                    if u[i] == ZERO {
                        continue;
                    }
                    let inner: C64 = (0..n).map(|j| t.get(k, i, j) * v[j]).sum();
                    acc += u[i] * inner;
                }
                acc
            })
            .collect(),
    ))
}

/// `result<u, v> = m * T<u, v>`.
pub fn left_mat_apply(m: &CMatrix, t: &BilinearOp) -> Result<BilinearOp> {
    check_dim(t.n, m.dim())?;
    let n = t.n;
    Ok(BilinearOp::from_fn(n, |k, i, j| {
        (0..n).map(|l| m[(k, l)] * t.get(l, i, j)).sum()
    }))
}

/// `result<u, v> = T<u, m v>`.
pub fn right_slot_compose(t: &BilinearOp, m: &CMatrix) -> Result<BilinearOp> {
    check_dim(t.n, m.dim())?;
    let n = t.n;
    Ok(BilinearOp::from_fn(n, |k, i, j| {
        (0..n).map(|l| t.get(k, i, l) * m[(l, j)]).sum()
    }))
}

/// Trace of `v -> T<e_k, v>`, with zero-based `k`.
pub fn trace_slot(t: &BilinearOp, k: usize) -> Result<C64> {
    if k >= t.n {
        return Err(Error::IndexOutOfRange { index: k, n: t.n });
    }
    Ok((0..t.n).map(|i| t.get(i, k, i)).sum())
}

const ALT_MAX_ITERS: usize = 500;
const ALT_STAGNATION: f64 = 1e-10;
const ALT_SEED: u64 = 0x5eed_b111_1ea5;

/// Lower bound on the operator norm `max |T<u, v>|` over unit `u`, `v`.
///
/// Alternating maximization: with `u` fixed the best `v` is the top right
/// singular vector of `T<u, .>`, and symmetrically for `u`. Each sweep is
/// non-decreasing; it stops when the gain drops below `1e-10` (relative).
/// The first `n` starts are basis vectors, the rest are drawn from a fixed
/// seed, so the estimate is deterministic. This is a high-confidence
/// estimate, not a certificate.
pub fn op_norm_bilinear(t: &BilinearOp, restarts: usize) -> f64 {
    let n = t.n;
    let restarts = restarts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(ALT_SEED);
    let mut best: f64 = 0.0;
    for r in 0..restarts {
        let start = if r < n {
            CVector::basis(n, r)
        } else {
            CVector(
                (0..n)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
            .normalized()
        };
        best = best.max(alternate_from(t, start));
    }
    best
}

fn alternate_from(t: &BilinearOp, mut u: CVector) -> f64 {
    let mut value = 0.0;
    for _ in 0..ALT_MAX_ITERS {
        let (_, v) = t.slot_matrix(&u).top_singular_pair();
        let (sigma, u_next) = t.first_slot_matrix(&v).top_singular_pair();
        let gain = sigma - value;
        value = sigma;
        u = u_next;
        if sigma == 0.0 || gain <= ALT_STAGNATION * sigma.max(1.0) {
            break;
        }
    }
    value
}

pub const DEFAULT_RESTARTS: usize = 16;
