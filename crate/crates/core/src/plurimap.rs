//! Pluriharmonic maps `f = h + conj(g)` and their pre-Schwarzian and
//! Schwarzian operators.

use crate::error::{Error, Result};
use crate::holomap::{
    invert_derivative, jet_compose, pre_schwarzian_holo, schwarzian_holo, trace_corrected,
    HoloMap, Jet2, PolyMap,
};
use crate::lincomplex::{
    left_mat_apply, mat_inverse, op_norm_linear, right_slot_compose, BilinearOp, CMatrix, CVector,
    C64,
};
use crate::oracles::{central_diff, wirtinger_diff, wirtinger_diff_richardson, Wirtinger};

/// Relative determinant threshold (against the Hadamard bound) for pointwise
/// class membership.
pub const CLASS_TOL: f64 = 1e-10;

/// Default step of the anti-holomorphic probe.
pub const DBAR_STEP: f64 = 1e-4;

/// `f = h + conj(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PluriMap {
    h: HoloMap,
    g: HoloMap,
}

impl PluriMap {
    pub fn new(h: HoloMap, g: HoloMap) -> Result<Self> {
        if h.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: g.dim(),
            });
        }
        Ok(Self { h, g })
    }

    /// `g = 0`.
    pub fn holomorphic(h: HoloMap) -> Self {
        let n = h.dim();
        Self {
            h,
            g: HoloMap::Poly(PolyMap::zero(n)),
        }
    }

    pub fn h(&self) -> &HoloMap {
        &self.h
    }

    pub fn g(&self) -> &HoloMap {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn eval(&self, z: &CVector) -> Result<CVector> {
        Ok(&self.h.eval(z)? + &self.g.eval(z)?.conj())
    }

    pub fn jet(&self, z: &CVector) -> Result<PluriJet> {
        PluriJet::from_jets(self.h.jet(z)?, self.g.jet(z)?)
    }

    /// `F = B f`, whose parts are `B h` and `conj(B) g`.
    pub fn left_mul(&self, b: &CMatrix) -> PluriMap {
        PluriMap {
            h: self.h.left_mul(b),
            g: self.g.left_mul(&b.conj()),
        }
    }

    /// `F = f + A conj(f)`, whose parts are `h + A g` and `g + conj(A) h`.
    pub fn affine_twist(&self, a: &CMatrix) -> PluriMap {
        PluriMap {
            h: self.h.plus_mul(a, &self.g),
            g: self.g.plus_mul(&a.conj(), &self.h),
        }
    }

    /// `F = h + A conj(g)`, whose anti-holomorphic part is `conj(A) g`.
    pub fn stable_twist(&self, a: &CMatrix) -> PluriMap {
        PluriMap {
            h: self.h.clone(),
            g: self.g.left_mul(&a.conj()),
        }
    }

    /// `f ∘ phi`.
    pub fn compose(&self, phi: &HoloMap) -> PluriMap {
        PluriMap {
            h: self.h.compose(phi),
            g: self.g.compose(phi),
        }
    }

    pub fn jacobian(&self, z: &CVector) -> Result<f64> {
        Ok(self.jet(z)?.jacobian())
    }

    pub fn sense_preserving_bound(&self, z: &CVector) -> Result<SenseBound> {
        self.jet(z)?.sense_preserving_bound()
    }

    pub fn u_operator(&self, z: &CVector) -> Result<CMatrix> {
        Ok(self.jet(z)?.u_operator())
    }

    pub fn pre_schwarzian(&self, z: &CVector) -> Result<BilinearOp> {
        self.jet(z)?.pre_schwarzian()
    }

    pub fn pre_schwarzian_frozen(&self, z: &CVector) -> Result<BilinearOp> {
        self.jet(z)?.pre_schwarzian_frozen()
    }

    pub fn schwarzian(&self, z: &CVector) -> Result<BilinearOp> {
        self.jet(z)?.schwarzian()
    }

    /// Schwarzian via `Sh`, the dilatation term and the gradient of
    /// `log det(I - w conj(w))`, the latter by extrapolated Wirtinger differences.
    /// Used only as a cross-check of [`PluriMap::schwarzian`].
    pub fn schwarzian_gradient_form(&self, z: &CVector, step: f64) -> Result<BilinearOp> {
        let j = self.jet(z)?;
        let sh = schwarzian_holo(&j.h)?;
        let correction = j.dilatation_term()?;
        let log_det = |w: &CVector| -> Result<C64> {
            let jw = self.jet(w)?;
            let n = jw.dim();
            let d = (&CMatrix::identity(n) - &(&jw.omega * &jw.omega.conj())).det();
            Ok(C64::new(d.re.ln(), 0.0))
        };
        let n = self.dim();
        let grad = CVector::new(
            (0..n)
                .map(|k| wirtinger_diff_richardson(log_det, z, k, Wirtinger::Holo, step))
                .collect::<Result<Vec<C64>>>()?,
        )?;
        let base = &sh - &correction;
        Ok(trace_corrected(&base, &grad))
    }

    /// Largest `|d/dzbar_k P_f|` coefficient over `k`, by central differences.
    pub fn dbar_pre_schwarzian_norm(&self, z: &CVector, step: f64) -> Result<f64> {
        self.pre_schwarzian(z)?;
        let mut worst: f64 = 0.0;
        for k in 0..self.dim() {
            let d: BilinearOp = wirtinger_diff(
                |w| self.pre_schwarzian(w),
                z,
                k,
                Wirtinger::Antiholo,
                step,
            )?;
            worst = worst.max(d.max_abs());
        }
        Ok(worst)
    }

    /// Both sides of the chain rules for `P` and `S` under `f ∘ phi`.
    pub fn chain_rule_check(&self, phi: &HoloMap, z: &CVector) -> Result<ChainRuleCheck> {
        let composite = self.compose(phi);
        let p_lhs = composite.pre_schwarzian(z)?;
        let s_lhs = composite.schwarzian(z)?;

        let phi_jet = phi.jet(z)?;
        let at = self.jet(&phi_jet.value)?;
        let dphi_inv = invert_derivative(&phi_jet.d1, "D phi")?;
        let pull = |t: &BilinearOp| -> Result<BilinearOp> {
            left_mat_apply(&dphi_inv, &t.pullback(&phi_jet.d1)?)
        };
        let p_rhs = &pull(&at.pre_schwarzian()?)? + &pre_schwarzian_holo(&phi_jet)?;
        let s_rhs = &pull(&at.schwarzian()?)? + &schwarzian_holo(&phi_jet)?;
        let defect = p_lhs.max_diff(&p_rhs).max(s_lhs.max_diff(&s_rhs));
        Ok(ChainRuleCheck {
            p_lhs,
            p_rhs,
            s_lhs,
            s_rhs,
            defect,
        })
    }
}

/// Outcome of the sufficient sense-preservation test `|w| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SenseBound {
    pub norm: f64,
    pub jacobian: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainRuleCheck {
    pub p_lhs: BilinearOp,
    pub p_rhs: BilinearOp,
    pub s_lhs: BilinearOp,
    pub s_rhs: BilinearOp,
    pub defect: f64,
}

/// Jets of `h` and `g` at a point, together with the dilatation
/// `w = Dg Dh^{-1}` and its derivative.
///
/// `domega<u, v> = (Dw<u>) v`: the first slot is the direction of
/// differentiation, so `domega` is in general not symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct PluriJet {
    pub point: CVector,
    pub h: Jet2,
    pub g: Jet2,
    pub dh_inv: CMatrix,
    pub omega: CMatrix,
    pub domega: BilinearOp,
}

fn check_class_det(m: &CMatrix) -> std::result::Result<(), f64> {
    let ratio = m.det().norm() / m.hadamard_bound().max(f64::MIN_POSITIVE);
    if ratio > CLASS_TOL {
        Ok(())
    } else {
        Err(ratio)
    }
}

impl PluriJet {
    /// Fails with `SingularDerivative` when `Dh` is numerically singular.
    pub fn from_jets(h: Jet2, g: Jet2) -> Result<Self> {
        let gap = (&h.point - &g.point).max_abs();
        if gap > 0.0 {
            return Err(Error::PointMismatch(gap));
        }
        if let Err(ratio) = check_class_det(&h.d1) {
            return Err(Error::SingularDerivative(format!(
                "|det Dh| / Hadamard bound = {ratio:e}"
            )));
        }
        let dh_inv = invert_derivative(&h.d1, "Dh")?;
        let omega = &g.d1 * &dh_inv;
        let raw = &g.d2 - &left_mat_apply(&omega, &h.d2)?;
        let domega = right_slot_compose(&raw, &dh_inv)?;
        Ok(Self {
            point: h.point.clone(),
            h,
            g,
            dh_inv,
            omega,
            domega,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// `J_f = |det Dh|^2 det(I - w conj(w))`.
    pub fn jacobian(&self) -> f64 {
        let n = self.dim();
        let dh = self.h.d1.det().norm_sqr();
        let d = (&CMatrix::identity(n) - &(&self.omega * &self.omega.conj())).det();
        debug_assert!(
            d.im.abs() <= 1e-10 * d.norm().max(1.0),
            "det(I - w conj(w)) has imaginary part {}",
            d.im
        );
        dh * d.re
    }

    pub fn sense_preserving_bound(&self) -> Result<SenseBound> {
        let norm = op_norm_linear(&self.omega);
        let jacobian = self.jacobian();
        let certified = norm < 1.0;
        if certified && jacobian <= 0.0 {
            return Err(Error::ContractViolation(format!(
                "|w| = {norm} < 1 but J_f = {jacobian}"
            )));
        }
        Ok(SenseBound {
            norm,
            jacobian,
            certified,
        })
    }

    /// `I - conj(w) w`.
    pub fn dilatation_gap(&self) -> CMatrix {
        &CMatrix::identity(self.dim()) - &(&self.omega.conj() * &self.omega)
    }

    /// `U = (I - conj(w) w) Dh`.
    pub fn u_operator(&self) -> CMatrix {
        &self.dilatation_gap() * &self.h.d1
    }

    fn gap_inverse(&self) -> Result<CMatrix> {
        let gap = self.dilatation_gap();
        if let Err(ratio) = check_class_det(&gap) {
            return Err(Error::DegenerateDilatation(ratio));
        }
        mat_inverse(&gap).map_err(|_| Error::DegenerateDilatation(0.0))
    }

    /// `Dh^{-1} (I - conj(w) w)^{-1} conj(w) Dw<., Dh .>`.
    pub fn dilatation_term(&self) -> Result<BilinearOp> {
        let m = &(&self.dh_inv * &self.gap_inverse()?) * &self.omega.conj();
        left_mat_apply(&m, &right_slot_compose(&self.domega, &self.h.d1)?)
    }

    /// `P_f = Ph - Dh^{-1} (I - conj(w) w)^{-1} conj(w) Dw<., Dh .>`.
    pub fn pre_schwarzian(&self) -> Result<BilinearOp> {
        let ph = left_mat_apply(&self.dh_inv, &self.h.d2)?;
        (&ph - &self.dilatation_term()?).symmetric()
    }

    /// Jet of the holomorphic map `h - conj(w(z0)) g` at `z0`.
    pub fn frozen_jet(&self) -> Result<Jet2> {
        self.h.plus_mul(&(-&self.omega.conj()), &self.g)
    }

    /// `P_f(z0)` as the holomorphic pre-Schwarzian of `h - conj(w(z0)) g`.
    pub fn pre_schwarzian_frozen(&self) -> Result<BilinearOp> {
        self.gap_inverse()?;
        pre_schwarzian_holo(&self.frozen_jet()?)
    }

    /// `S_f` from `P_f` and its slot traces.
    pub fn schwarzian(&self) -> Result<BilinearOp> {
        let p = self.pre_schwarzian()?;
        let tau = p.slot_traces();
        Ok(trace_corrected(&p, &tau))
    }
}

/// Pre-Schwarzian of `f ∘ phi` computed from composed jets, independent of
/// any explicit composed map.
pub fn pre_schwarzian_of_composition(f: &PluriMap, phi: &HoloMap, z: &CVector) -> Result<BilinearOp> {
    let phi_jet = phi.jet(z)?;
    let h = jet_compose(&f.h().jet(&phi_jet.value)?, &phi_jet)?;
    let g = jet_compose(&f.g().jet(&phi_jet.value)?, &phi_jet)?;
    PluriJet::from_jets(h, g)?.pre_schwarzian()
}

/// `z -> Dg(z) Dh(z)^{-1}` evaluated directly; a finite-difference target for
/// `domega`.
pub fn dilatation_at(f: &PluriMap, z: &CVector) -> Result<CMatrix> {
    let dh = f.h().jet(z)?.d1;
    let dg = f.g().jet(z)?.d1;
    Ok(&dg * &invert_derivative(&dh, "Dh")?)
}

/// `d w / d z_k` by central differences; compare with `domega.slot_matrix(e_k)`.
pub fn dilatation_derivative_fd(f: &PluriMap, z: &CVector, k: usize, step: f64) -> Result<CMatrix> {
    central_diff(|w| dilatation_at(f, w), z, k, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomplex::{ONE, ZERO};
    use crate::oracles::random::{random_invertible, random_poly, random_point, trial_rng};
    use crate::oracles::{gen_plurimap, RandomInstanceConfig};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn instance(seed: u64, n: usize) -> (PluriMap, CVector) {
        let inst = gen_plurimap(&RandomInstanceConfig {
            seed,
            n,
            ..RandomInstanceConfig::default()
        })
        .unwrap();
        (inst.map, inst.point)
    }

    fn example_25(phi: PolyMap) -> PluriMap {
        // g(z, w) = (0, phi(z)) with phi given as a univariate map
        let terms: Vec<(Vec<u32>, CVector)> = phi
            .terms()
            .map(|(a, c)| (vec![a[0], 0], CVector::new(vec![ZERO, c[0]]).unwrap()))
            .collect();
        PluriMap::new(
            HoloMap::Poly(PolyMap::identity(2)),
            HoloMap::Poly(PolyMap::new(2, terms).unwrap()),
        )
        .unwrap()
    }

    fn univariate(coeffs: &[(u32, C64)]) -> PolyMap {
        PolyMap::new(
            1,
            coeffs
                .iter()
                .map(|&(k, c)| (vec![k], CVector::new(vec![c]).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn holomorphic_map_has_zero_dilatation() {
        let mut rng = trial_rng(1, 0);
        let h = random_poly(&mut rng, 2, 3, 1.0);
        let f = PluriMap::holomorphic(HoloMap::Poly(h.clone()));
        let z = random_point(&mut rng, 2, 0.3);
        let j = f.jet(&z).unwrap();
        assert_eq!(j.omega.max_abs(), 0.0);
        assert_eq!(j.domega.max_abs(), 0.0);
        let ph = pre_schwarzian_holo(&h.jet(&z)).unwrap();
        assert!(j.pre_schwarzian().unwrap().max_diff(&ph) < 1e-14);
        assert!(j.u_operator().max_diff(&h.jet(&z).d1) == 0.0);
        let sb = j.sense_preserving_bound().unwrap();
        assert!(sb.certified && sb.norm == 0.0 && sb.jacobian > 0.0);
    }

    #[test]
    fn identity_has_unit_jacobian() {
        let f = PluriMap::holomorphic(HoloMap::Poly(PolyMap::identity(3)));
        let z = CVector::from_real(&[0.1, 0.2, 0.3]);
        assert!((f.jacobian(&z).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domega_matches_finite_differences() {
        for seed in 0..10 {
            let (f, z) = instance(seed, 1 + (seed as usize % 3));
            let j = f.jet(&z).unwrap();
            for k in 0..z.dim() {
                let fd = dilatation_derivative_fd(&f, &z, k, 1e-5).unwrap();
                let exact = j.domega.slot_matrix(&CVector::basis(z.dim(), k));
                assert!(
                    fd.max_diff(&exact) < 1e-6 * exact.max_abs().max(1.0),
                    "seed {seed}: {}",
                    fd.max_diff(&exact)
                );
            }
        }
    }

    #[test]
    fn example_25_dilatation_and_vanishing() {
        for phi in [
            univariate(&[(2, ONE)]),
            univariate(&[(3, c(0.5, 0.0)), (2, c(0.0, 1.0))]),
            univariate(&[(4, c(0.2, 0.1)), (1, c(0.3, 0.0))]),
        ] {
            let f = example_25(phi.clone());
            let z = CVector::new(vec![c(0.3, -0.2), c(0.1, 0.4)]).unwrap();
            let j = f.jet(&z).unwrap();
            let dphi = phi.jet(&CVector::new(vec![z[0]]).unwrap()).d1[(0, 0)];
            let expected = CMatrix::from_fn(2, |i, k| if (i, k) == (1, 0) { dphi } else { ZERO });
            assert!(j.omega.max_diff(&expected) < 1e-15);
            assert!(j.u_operator().max_diff(&CMatrix::identity(2)) < 1e-15);
            assert!(j.pre_schwarzian().unwrap().max_abs() < 1e-13);
            assert!(f.dbar_pre_schwarzian_norm(&z, DBAR_STEP).unwrap() < 1e-6);
        }
    }

    #[test]
    fn jacobian_matches_real_block_determinant() {
        for seed in 0..30 {
            let n = 1 + (seed as usize % 3);
            let (f, z) = instance(100 + seed, n);
            let j = f.jet(&z).unwrap();
            // real 2n x 2n Jacobian in coordinates (x_1..x_n, y_1..y_n)
            let mut m = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
            for col in 0..n {
                let dx = &j.h.d1.column(col) + &j.g.d1.column(col).conj();
                let i = c(0.0, 1.0);
                let dy = &j.h.d1.column(col).scale(i) + &j.g.d1.column(col).scale(i).conj();
                for row in 0..n {
                    m[(row, col)] = dx[row].re;
                    m[(row + n, col)] = dx[row].im;
                    m[(row, col + n)] = dy[row].re;
                    m[(row + n, col + n)] = dy[row].im;
                }
            }
            let block = m.determinant();
            let jf = j.jacobian();
            assert!((block - jf).abs() < 1e-9 * jf.abs().max(1.0), "{block} vs {jf}");
        }
    }

    #[test]
    fn rotation_dilatation_is_not_norm_bounded() {
        for t in [1.0, 2.0, 10.0] {
            let w = CMatrix::from_real_rows(&[&[0.0, t], &[-1.0, 0.0]]).unwrap();
            let h = PolyMap::new(
                2,
                vec![
                    (vec![1, 0], CVector::from_real(&[1.0, 0.0])),
                    (vec![0, 1], CVector::from_real(&[0.0, 1.0])),
                    (vec![0, 2], CVector::from_real(&[1.0, 0.0])),
                ],
            )
            .unwrap();
            let f = PluriMap::new(HoloMap::Poly(h.clone()), HoloMap::Poly(h.left_mul(&w))).unwrap();
            let z = CVector::new(vec![c(0.2, 0.1), c(-0.3, 0.2)]).unwrap();
            let sb = f.sense_preserving_bound(&z).unwrap();
            let det_dh = h.jet(&z).d1.det().norm_sqr();
            assert!((sb.norm - t).abs() < 1e-10);
            assert!((sb.jacobian - det_dh * (1.0 + t).powi(2)).abs() < 1e-10 * sb.jacobian);
            assert_eq!(sb.certified, t < 1.0);
        }
    }

    #[test]
    fn sense_preservation_certified_for_contractive_instances() {
        for seed in 0..100 {
            let (f, z) = instance(200 + seed, 1 + (seed as usize % 3));
            let sb = f.sense_preserving_bound(&z).unwrap();
            assert!(sb.certified && sb.jacobian > 0.0);
        }
    }

    #[test]
    fn pre_schwarzian_matches_u_inverse_du() {
        for seed in 0..20 {
            let (f, z) = instance(300 + seed, 1 + (seed as usize % 3));
            let p = f.pre_schwarzian(&z).unwrap();
            let u = f.u_operator(&z).unwrap();
            let u_inv = mat_inverse(&u).unwrap();
            let n = z.dim();
            for k in 0..n {
                let du: CMatrix =
                    wirtinger_diff(|w| f.u_operator(w), &z, k, Wirtinger::Holo, 1e-5).unwrap();
                let fd = &u_inv * &du;
                let exact = p.slot_matrix(&CVector::basis(n, k));
                assert!(fd.max_diff(&exact) < 1e-6 * exact.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn frozen_equals_direct() {
        for seed in 0..20 {
            let (f, z) = instance(400 + seed, 1 + (seed as usize % 3));
            let a = f.pre_schwarzian(&z).unwrap();
            let b = f.pre_schwarzian_frozen(&z).unwrap();
            assert!(a.max_diff(&b) < 1e-11 * a.max_abs().max(1.0));
        }
    }

    #[test]
    fn planar_formulas() {
        for seed in 0..20 {
            let (f, z) = instance(500 + seed, 1);
            let j = f.jet(&z).unwrap();
            let h1 = j.h.d1[(0, 0)];
            let h2 = j.h.d2.get(0, 0, 0);
            let g1 = j.g.d1[(0, 0)];
            let g2 = j.g.d2.get(0, 0, 0);
            let w = g1 / h1;
            let dw = (g2 * h1 - g1 * h2) / (h1 * h1);
            let expected = h2 / h1 - w.conj() * dw / (1.0 - w.norm_sqr());
            let p = j.pre_schwarzian().unwrap().get(0, 0, 0);
            assert!((p - expected).norm() < 1e-12 * expected.norm().max(1.0));
            let u = (1.0 - w.norm_sqr()) * h1;
            assert!((j.u_operator()[(0, 0)] - u).norm() < 1e-12 * u.norm().max(1.0));
            // the planar Schwarzian operator is trivial in dimension 1
            assert!(j.schwarzian().unwrap().max_abs() < 1e-12 * p.norm().max(1.0));
        }
    }

    #[test]
    fn multiplicative_invariance() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 3);
            let (f, z) = instance(600 + seed, n);
            let b = random_invertible(&mut trial_rng(600 + seed, 1), n);
            let p = f.pre_schwarzian(&z).unwrap();
            let pb = f.left_mul(&b).pre_schwarzian(&z).unwrap();
            assert!(pb.max_diff(&p) < 1e-10);
            let s = f.schwarzian(&z).unwrap();
            let sb = f.left_mul(&b).schwarzian(&z).unwrap();
            assert!(sb.max_diff(&s) < 1e-10);
        }
    }

    #[test]
    fn rotation_stability() {
        for seed in 0..10 {
            let n = 1 + (seed as usize % 3);
            let (f, z) = instance(700 + seed, n);
            let p = f.pre_schwarzian(&z).unwrap();
            for lam in [ONE, c(0.0, 1.0), C64::from_polar(1.0, std::f64::consts::PI / 5.0)] {
                let a = CMatrix::identity(n).scale(lam);
                let pl = f.stable_twist(&a).pre_schwarzian(&z).unwrap();
                assert!(pl.max_diff(&p) < 1e-11);
            }
        }
    }

    #[test]
    fn schwarzian_of_mobius_vanishes_and_constant_dilatation_gives_sh() {
        let a = CMatrix::from_fn(3, |i, j| {
            if i == j { c(1.0, 0.0) } else { c(0.1 * (i as f64), 0.05 * (j as f64)) }
        });
        let t = crate::holomap::MobiusMap::new(a).unwrap();
        let f = PluriMap::holomorphic(HoloMap::Mobius(t.clone()));
        let z = CVector::new(vec![c(0.1, 0.2), c(-0.2, 0.1)]).unwrap();
        assert!(f.schwarzian(&z).unwrap().max_abs() < 1e-12);

        let mut rng = trial_rng(8, 0);
        let h = HoloMap::Poly(random_poly(&mut rng, 2, 3, 1.0));
        let w = CMatrix::from_fn(2, |i, j| c(0.2 * i as f64, 0.1 * j as f64 - 0.1));
        let f = PluriMap::new(h.clone(), h.left_mul(&w)).unwrap();
        let sh = h.schwarzian(&z).unwrap();
        assert!(f.schwarzian(&z).unwrap().max_diff(&sh) < 1e-12 * sh.max_abs().max(1.0));
    }

    #[test]
    fn schwarzian_frozen_and_gradient_forms_agree() {
        for seed in 0..10 {
            let (f, z) = instance(800 + seed, 1 + (seed as usize % 3));
            let j = f.jet(&z).unwrap();
            let s = j.schwarzian().unwrap();
            let frozen = schwarzian_holo(&j.frozen_jet().unwrap()).unwrap();
            assert!(s.max_diff(&frozen) < 1e-10 * s.max_abs().max(1.0));
            let grad_form = f.schwarzian_gradient_form(&z, 1e-5).unwrap();
            assert!(s.max_diff(&grad_form) < 1e-6 * s.max_abs().max(1.0));
        }
    }

    #[test]
    fn chain_rule_identity_and_linear() {
        let (f, z) = instance(900, 2);
        let id = HoloMap::Poly(PolyMap::identity(2));
        assert!(f.chain_rule_check(&id, &z).unwrap().defect < 1e-13);
        let m = CMatrix::from_real_rows(&[&[1.0, 0.2], &[0.0, 0.8]]).unwrap();
        let lin = HoloMap::Poly(PolyMap::affine(&m, &CVector::zeros(2)));
        assert!(f.chain_rule_check(&lin, &z).unwrap().defect < 1e-11);
    }

    #[test]
    fn chain_rule_random() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 3);
            let (f, z) = instance(1000 + seed, n);
            let mut rng = trial_rng(1000 + seed, 7);
            // phi fixes z to first order up to a small quadratic perturbation
            let quad = random_poly(&mut rng, n, 2, 0.2);
            let phi = PolyMap::identity(n).add(&quad).unwrap();
            let shift = &phi.eval(&z) - &z;
            let phi = phi.add(&PolyMap::affine(&CMatrix::zeros(n), &shift.scale(-ONE))).unwrap();
            let phi = HoloMap::Poly(phi);
            let check = f.chain_rule_check(&phi, &z).unwrap();
            assert!(check.defect < 1e-9, "seed {seed}: {}", check.defect);
            let by_jets = pre_schwarzian_of_composition(&f, &phi, &z).unwrap();
            assert!(by_jets.max_diff(&check.p_lhs) < 1e-10);
        }
    }

    #[test]
    fn degenerate_dilatation_is_reported() {
        // w = I on the nose: I - conj(w) w = 0
        let h = HoloMap::Poly(PolyMap::identity(2));
        let f = PluriMap::new(h.clone(), h).unwrap();
        let z = CVector::from_real(&[0.1, 0.1]);
        assert!(matches!(f.pre_schwarzian(&z), Err(Error::DegenerateDilatation(_))));
        let h = HoloMap::Poly(PolyMap::zero(2));
        let f = PluriMap::holomorphic(h);
        assert!(matches!(f.jet(&z), Err(Error::SingularDerivative(_))));
    }

    #[test]
    fn affine_twist_matches_dilatation_formula() {
        let (f, z) = instance(1100, 2);
        let a = CMatrix::from_real_rows(&[&[0.2, -0.1], &[0.3, 0.1]]).unwrap();
        let jf = f.jet(&z).unwrap();
        let jt = f.affine_twist(&a).jet(&z).unwrap();
        let id = CMatrix::identity(2);
        let expected = &(&jf.omega + &a.conj()) * &mat_inverse(&(&id + &(&a * &jf.omega))).unwrap();
        assert!(jt.omega.max_diff(&expected) < 1e-12);
    }
}
