//! Independent verification machinery: real-coordinate finite differences,
//! seeded random instances, named fixtures and the R^4 shear map.

pub mod fixtures;
pub mod random;
pub mod shear;

use crate::error::{Error, Result};
use crate::lincomplex::{BilinearOp, CMatrix, CVector, C64};
use crate::plurimap::PluriJet;

pub use fixtures::{fixture, Fixture, FixtureParams, FIXTURE_NAMES};
pub use random::{gen_plurimap, Instance, RandomInstanceConfig};
pub use shear::{shear_demo, ShearDemo};

/// Central-difference step sizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteDiffConfig {
    pub step: f64,
    pub dbar_step: f64,
}

impl Default for FiniteDiffConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            dbar_step: 1e-4,
        }
    }
}

impl FiniteDiffConfig {
    pub fn new(step: f64, dbar_step: f64) -> Result<Self> {
        if !(step > 0.0 && dbar_step > 0.0) {
            return Err(Error::ContractViolation(
                "finite-difference steps must be positive".into(),
            ));
        }
        Ok(Self { step, dbar_step })
    }
}

/// Determinant of the real `2n x 2n` Jacobian of `f = h + conj(g)` in the
/// coordinates `(x_1..x_n, y_1..y_n)`.
pub fn real_jacobian_determinant(j: &PluriJet) -> f64 {
    let n = j.dim();
    let i = C64::new(0.0, 1.0);
    let mut m = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
    for col in 0..n {
        let dh = j.h.d1.column(col);
        let dg = j.g.d1.column(col);
        let dx = &dh + &dg.conj();
        let dy = &dh.scale(i) + &dg.scale(i).conj();
        for row in 0..n {
            m[(row, col)] = dx[row].re;
            m[(row + n, col)] = dx[row].im;
            m[(row, col + n)] = dy[row].re;
            m[(row + n, col + n)] = dy[row].im;
        }
    }
    m.determinant()
}

/// Values that can be differenced: anything closed under complex linear
/// combinations.
pub trait Differentiable: Sized {
    fn lin_comb(terms: &[(C64, &Self)]) -> Self;
}

impl Differentiable for C64 {
    fn lin_comb(terms: &[(C64, &Self)]) -> Self {
        terms.iter().map(|(s, x)| s * **x).sum()
    }
}

impl Differentiable for CVector {
    fn lin_comb(terms: &[(C64, &Self)]) -> Self {
        let n = terms[0].1.dim();
        let mut out = CVector::zeros(n);
        for (s, x) in terms {
            for i in 0..n {
                out[i] += s * x[i];
            }
        }
        out
    }
}

impl Differentiable for CMatrix {
    fn lin_comb(terms: &[(C64, &Self)]) -> Self {
        let n = terms[0].1.dim();
        CMatrix::from_fn(n, |i, j| terms.iter().map(|(s, x)| s * x[(i, j)]).sum())
    }
}

impl Differentiable for BilinearOp {
    fn lin_comb(terms: &[(C64, &Self)]) -> Self {
        let n = terms[0].1.dim();
        BilinearOp::from_fn(n, |k, i, j| {
            terms.iter().map(|(s, x)| s * x.get(k, i, j)).sum()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wirtinger {
    /// `d/dz_k = (d/dx_k - i d/dy_k) / 2`
    Holo,
    /// `d/dzbar_k = (d/dx_k + i d/dy_k) / 2`
    Antiholo,
}

/// Wirtinger derivative in coordinate `k` (zero-based) by central
/// differences along `x_k` and `y_k`.
pub fn wirtinger_diff<T, F>(eval: F, z: &CVector, k: usize, kind: Wirtinger, step: f64) -> Result<T>
where
    T: Differentiable,
    F: Fn(&CVector) -> Result<T>,
{
    if k >= z.dim() {
        return Err(Error::IndexOutOfRange { index: k, n: z.dim() });
    }
    let xp = eval(&z.shifted(k, C64::new(step, 0.0)))?;
    let xm = eval(&z.shifted(k, C64::new(-step, 0.0)))?;
    let yp = eval(&z.shifted(k, C64::new(0.0, step)))?;
    let ym = eval(&z.shifted(k, C64::new(0.0, -step)))?;
    let w = 1.0 / (4.0 * step);
    let iy = match kind {
        Wirtinger::Holo => C64::new(0.0, -w),
        Wirtinger::Antiholo => C64::new(0.0, w),
    };
    let re = C64::new(w, 0.0);
    Ok(T::lin_comb(&[(re, &xp), (-re, &xm), (iy, &yp), (-iy, &ym)]))
}

/// [`wirtinger_diff`] with one Richardson step, `(4 D(h/2) - D(h)) / 3`:
/// truncation error `O(h^4)` instead of `O(h^2)`.
pub fn wirtinger_diff_richardson<T, F>(
    eval: F,
    z: &CVector,
    k: usize,
    kind: Wirtinger,
    step: f64,
) -> Result<T>
where
    T: Differentiable,
    F: Fn(&CVector) -> Result<T>,
{
    let coarse: T = wirtinger_diff(&eval, z, k, kind, step)?;
    let fine: T = wirtinger_diff(&eval, z, k, kind, step / 2.0)?;
    Ok(T::lin_comb(&[(C64::new(4.0 / 3.0, 0.0), &fine), (C64::new(-1.0 / 3.0, 0.0), &coarse)]))
}

/// Derivative along the real direction `e_k` by central differences. For a
/// holomorphic function this is the complex partial `d/dz_k`.
pub fn central_diff<T, F>(eval: F, z: &CVector, k: usize, step: f64) -> Result<T>
where
    T: Differentiable,
    F: Fn(&CVector) -> Result<T>,
{
    let p = eval(&z.shifted(k, C64::new(step, 0.0)))?;
    let m = eval(&z.shifted(k, C64::new(-step, 0.0)))?;
    let w = C64::new(0.5 / step, 0.0);
    Ok(T::lin_comb(&[(w, &p), (-w, &m)]))
}
