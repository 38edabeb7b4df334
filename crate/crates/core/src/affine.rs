//! Affine twists `F = f + A conj(f)`: transport of the dilatation, the
//! determinant factorization, invariance checks, the best affine
//! approximation and the stability defect.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::holomap::Jet2;
use crate::lincomplex::{
    left_mat_apply, mat_inverse, op_norm_linear, BilinearOp, CMatrix, CVector, C64,
};
use crate::oracles::fixtures::CounterOmega;
use crate::plurimap::{PluriJet, PluriMap, CLASS_TOL};

/// Margin used for the strict `|A| < 1` contract.
pub const NORM_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwistContract {
    /// `|A| < 1` verified.
    Strict,
    /// Built without the norm check; `norm` records `|A|`.
    Relaxed { norm: f64 },
}

/// The matrix `A` of an affine twist.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineTwist {
    a: CMatrix,
    contract: TwistContract,
}

impl AffineTwist {
    pub fn new(a: CMatrix) -> Result<Self> {
        let norm = op_norm_linear(&a);
        if !(norm < 1.0 - NORM_MARGIN) {
            return Err(Error::ContractViolation(format!(
                "affine twist needs |A| < 1, got {norm}"
            )));
        }
        Ok(Self {
            a,
            contract: TwistContract::Strict,
        })
    }

    /// No norm check; for reproducing counterexamples.
    pub fn relaxed(a: CMatrix) -> Self {
        let norm = op_norm_linear(&a);
        Self {
            a,
            contract: TwistContract::Relaxed { norm },
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn contract(&self) -> TwistContract {
        self.contract
    }
}

fn twisted_factor(omega: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    let m = &CMatrix::identity(omega.dim()) + &(a * omega);
    let ratio = m.det().norm() / m.hadamard_bound().max(f64::MIN_POSITIVE);
    if ratio <= CLASS_TOL {
        return Err(Error::SingularTwistedDerivative);
    }
    mat_inverse(&m).map_err(|_| Error::SingularTwistedDerivative)
}

/// Jets of `H = h + A g` and `G = g + conj(A) h`.
pub fn affine_transform(f: &PluriJet, twist: &AffineTwist) -> Result<PluriJet> {
    let a = twist.matrix();
    twisted_factor(&f.omega, a)?;
    let h = f.h.plus_mul(a, &f.g)?;
    let g = f.g.plus_mul(&a.conj(), &f.h)?;
    PluriJet::from_jets(h, g)
}

/// `w_F = (w + conj(A)) (I + A w)^{-1}`.
pub fn dilatation_affine(omega: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    let inv = twisted_factor(omega, a)?;
    Ok(&(omega + &a.conj()) * &inv)
}

/// `w = (I - w_F A)^{-1} (w_F - conj(A))`, inverse of [`dilatation_affine`].
pub fn dilatation_recover(omega_f: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    let m = &CMatrix::identity(omega_f.dim()) - &(omega_f * a);
    Ok(&mat_inverse(&m)? * &(omega_f - &a.conj()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    /// `I - w_F conj(w_F)`
    pub lhs: CMatrix,
    /// `(I - conj(A) A)(I + w A)^{-1}(I - w conj(w))(I + conj(A) conj(w))^{-1}`
    pub rhs: CMatrix,
    pub det: f64,
    pub residual: f64,
}

impl Factorization {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual < tol && self.det > 0.0
    }
}

/// Both sides of the factorization of `I - w_F conj(w_F)` for contractive
/// `w` and `A`.
pub fn factorization_check(omega: &CMatrix, a: &CMatrix) -> Result<Factorization> {
    let (nw, na) = (op_norm_linear(omega), op_norm_linear(a));
    if !(nw < 1.0 && na < 1.0) {
        return Err(Error::ContractViolation(format!(
            "factorization needs |w| < 1 and |A| < 1, got {nw} and {na}"
        )));
    }
    let id = CMatrix::identity(omega.dim());
    let wf = dilatation_affine(omega, a)?;
    let lhs = &id - &(&wf * &wf.conj());
    let first = &id - &(&a.conj() * a);
    let second = mat_inverse(&(&id + &(omega * a)))?;
    let third = &id - &(omega * &omega.conj());
    let fourth = mat_inverse(&(&id + &(&a.conj() * &omega.conj())))?;
    let rhs = &(&(&first * &second) * &third) * &fourth;
    let d = lhs.det();
    Ok(Factorization {
        residual: lhs.max_diff(&rhs),
        det: d.re,
        lhs,
        rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvarianceDefect {
    pub pre_schwarzian: f64,
    pub schwarzian: f64,
}

/// Coefficient gaps between `P_F, S_F` and `P_f, S_f` for `F = f + A conj(f)`.
pub fn affine_invariance_check(
    f: &PluriMap,
    twist: &AffineTwist,
    z: &CVector,
) -> Result<InvarianceDefect> {
    let jf = f.jet(z)?;
    let jt = affine_transform(&jf, twist)?;
    Ok(InvarianceDefect {
        pre_schwarzian: jt.pre_schwarzian()?.max_diff(&jf.pre_schwarzian()?),
        schwarzian: jt.schwarzian()?.max_diff(&jf.schwarzian()?),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestAffine {
    /// Jet at `0` of `H_a(z) = M (h(z + a) - conj(w(a)) g(z + a))`,
    /// `M = Dh(a)^{-1} (I - conj(w(a)) w(a))^{-1}`.
    pub h_a_jet: Jet2,
    pub p_check: BilinearOp,
}

pub fn best_affine_deviation(f: &PluriMap, a: &CVector) -> Result<BestAffine> {
    let j = f.jet(a)?;
    let gap_inv = mat_inverse(&j.dilatation_gap())
        .map_err(|_| Error::DegenerateDilatation(0.0))?;
    let m = &j.dh_inv * &gap_inv;
    let frozen = j.frozen_jet()?.left_mul(&m);
    let h_a_jet = Jet2 {
        point: CVector::zeros(a.dim()),
        ..frozen
    };
    Ok(BestAffine {
        p_check: h_a_jet.d2.clone(),
        h_a_jet,
    })
}

/// `(A conj(w) conj(A) - conj(w)) (I - w conj(w))^{-1} Dw<., .>` for unitary
/// `A`; zero exactly when the stable twist leaves `P_f` unchanged at the
/// point.
pub fn stability_defect(omega: &CMatrix, domega: &BilinearOp, a: &CMatrix) -> Result<BilinearOp> {
    let n = omega.dim();
    let id = CMatrix::identity(n);
    let unitary_gap = (a * &a.adjoint()).max_diff(&id);
    if unitary_gap > 1e-10 {
        return Err(Error::NotUnitary(unitary_gap));
    }
    let wb = omega.conj();
    let front = &(&(a * &wb) * &a.conj()) - &wb;
    let inv = mat_inverse(&(&id - &(omega * &wb)))?;
    left_mat_apply(&(&front * &inv), domega)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupEstimate {
    pub grid_max: f64,
    pub refined: f64,
    pub argmax: C64,
    pub grid_points: usize,
}

/// `sup |w_F(z)|` over the closed unit disk for the counter-omega scenario,
/// computed from the matrices (not the closed form): a polar grid with
/// `radial x angular` points, then golden-section refinement in the angle on
/// the boundary circle.
pub fn sup_twisted_norm(s: &CounterOmega, radial: usize, angular: usize) -> Result<SupEstimate> {
    let a = s.twist();
    let norm_at = |z: C64| -> Result<f64> { Ok(op_norm_linear(&dilatation_affine(&s.omega(z), &a)?)) };
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    let mut count = 0;
    for ir in 1..=radial {
        let r = ir as f64 / radial as f64;
        for it in 0..angular {
            let theta = -PI + 2.0 * PI * it as f64 / angular as f64;
            let z = C64::from_polar(r, theta);
            let v = norm_at(z)?;
            count += 1;
            if v > best.0 {
                best = (v, z);
            }
        }
    }
    let grid_max = best.0;
    // golden section on the boundary around the best grid angle
    let step = 2.0 * PI / angular as f64;
    let (mut lo, mut hi) = (best.1.arg() - step, best.1.arg() + step);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let on_circle = |t: f64| norm_at(C64::from_polar(1.0, t));
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (on_circle(x1)?, on_circle(x2)?);
    for _ in 0..80 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = on_circle(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = on_circle(x2)?;
        }
    }
    let (refined, argmax) = if f1.max(f2) > grid_max {
        let t = if f1 > f2 { x1 } else { x2 };
        (f1.max(f2), C64::from_polar(1.0, t))
    } else {
        (grid_max, best.1)
    };
    Ok(SupEstimate {
        grid_max,
        refined,
        argmax,
        grid_points: count,
    })
}
