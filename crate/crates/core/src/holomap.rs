//! Holomorphic maps `C^n -> C^n`: polynomial maps and Moebius
//! (linear-fractional) maps with exact order-2 jets, and the holomorphic
//! pre-Schwarzian, Oda components and Schwarzian built from those jets.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lincomplex::{
    left_mat_apply, mat_inverse, BilinearOp, CMatrix, CVector, C64, ONE, ZERO,
};

/// Value, Jacobian matrix and (symmetric) second derivative of a map at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub point: CVector,
    pub value: CVector,
    pub d1: CMatrix,
    pub d2: BilinearOp,
}

impl Jet2 {
    pub fn new(point: CVector, value: CVector, d1: CMatrix, d2: BilinearOp) -> Result<Self> {
        let n = point.dim();
        for found in [value.dim(), d1.dim(), d2.dim()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        Ok(Self {
            point,
            value,
            d1,
            d2: d2.symmetric()?,
        })
    }

    /// Jet of the identity map at `z`.
    pub fn identity(z: &CVector) -> Self {
        let n = z.dim();
        Self {
            point: z.clone(),
            value: z.clone(),
            d1: CMatrix::identity(n),
            d2: BilinearOp::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// Jet of `z -> m f(z)`.
    pub fn left_mul(&self, m: &CMatrix) -> Jet2 {
        Jet2 {
            point: self.point.clone(),
            value: m.mul_vec(&self.value),
            d1: m * &self.d1,
            d2: left_mat_apply(m, &self.d2).expect("dimension checked by construction"),
        }
    }

    /// Jet of `z -> self(z) + m other(z)`. Both jets must sit at the same point.
    pub fn plus_mul(&self, m: &CMatrix, other: &Jet2) -> Result<Jet2> {
        let gap = (&self.point - &other.point).max_abs();
        if gap > 0.0 {
            return Err(Error::PointMismatch(gap));
        }
        let o = other.left_mul(m);
        Ok(Jet2 {
            point: self.point.clone(),
            value: &self.value + &o.value,
            d1: &self.d1 + &o.d1,
            d2: &self.d2 + &o.d2,
        })
    }

    /// Linear combination `sum_k m_k f_k` of jets at one point.
    pub fn combination(parts: &[(CMatrix, Jet2)]) -> Result<Jet2> {
        let (first_m, first) = parts
            .first()
            .ok_or(Error::EmptyDimension)?;
        let mut acc = first.left_mul(first_m);
        for (m, j) in &parts[1..] {
            acc = acc.plus_mul(m, j)?;
        }
        Ok(acc)
    }
}

/// Second-order chain rule for `outer ∘ inner`; `outer` must be the jet at
/// `inner.value`.
pub fn jet_compose(outer: &Jet2, inner: &Jet2) -> Result<Jet2> {
    let gap = (&inner.value - &outer.point).max_abs();
    if gap > 1e-12 * outer.point.max_abs().max(1.0) {
        return Err(Error::PointMismatch(gap));
    }
    let d2 = &outer.d2.pullback(&inner.d1)? + &left_mat_apply(&outer.d1, &inner.d2)?;
    Ok(Jet2 {
        point: inner.point.clone(),
        value: outer.value.clone(),
        d1: &outer.d1 * &inner.d1,
        d2,
    })
}

// ---------------------------------------------------------------------------
// Polynomial maps
// ---------------------------------------------------------------------------

/// A polynomial map in canonical merged form: one coefficient vector per
/// multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    n: usize,
    terms: BTreeMap<Vec<u32>, CVector>,
}

type ScalarPoly = BTreeMap<Vec<u32>, C64>;

impl PolyMap {
    /// Builds a map from `(multi-index, coefficient)` pairs, merging repeated
    /// multi-indices and dropping zero coefficients.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, CVector)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut merged: BTreeMap<Vec<u32>, CVector> = BTreeMap::new();
        for (idx, (alpha, coeff)) in terms.into_iter().enumerate() {
            if alpha.len() != n {
                return Err(Error::InvalidMap(format!(
                    "term {idx}: multi-index has length {}, expected {n}",
                    alpha.len()
                )));
            }
            if coeff.dim() != n {
                return Err(Error::InvalidMap(format!(
                    "term {idx}: coefficient has length {}, expected {n}",
                    coeff.dim()
                )));
            }
            match merged.get_mut(&alpha) {
                Some(existing) => *existing = &*existing + &coeff,
                None => {
                    merged.insert(alpha, coeff);
                }
            }
        }
        merged.retain(|_, c| c.max_abs() != 0.0);
        Ok(Self { n, terms: merged })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::affine(&CMatrix::identity(n), &CVector::zeros(n))
    }

    /// `z -> m z + b`.
    pub fn affine(m: &CMatrix, b: &CVector) -> Self {
        let n = m.dim();
        let mut terms = vec![(vec![0; n], b.clone())];
        for j in 0..n {
            let mut alpha = vec![0; n];
            alpha[j] = 1;
            terms.push((alpha, m.column(j)));
        }
        Self::new(n, terms).expect("well-formed affine terms")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &CVector)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn powers(&self, z: &CVector) -> Vec<Vec<C64>> {
        let max_deg = self.degree() as usize;
        (0..self.n)
            .map(|i| {
                let mut p = Vec::with_capacity(max_deg + 1);
                p.push(ONE);
                for e in 1..=max_deg {
                    let prev = p[e - 1];
                    p.push(prev * z[i]);
                }
                p
            })
            .collect()
    }

    pub fn eval(&self, z: &CVector) -> CVector {
        let pw = self.powers(z);
        let mut out = CVector::zeros(self.n);
        for (alpha, coeff) in &self.terms {
            let m: C64 = alpha
                .iter()
                .enumerate()
                .map(|(i, &a)| pw[i][a as usize])
                .product();
            for l in 0..self.n {
                out[l] += coeff[l] * m;
            }
        }
        out
    }

    pub fn jet(&self, z: &CVector) -> Jet2 {
        poly_jet(self, z)
    }

    /// `z -> m f(z)`.
    pub fn left_mul(&self, m: &CMatrix) -> PolyMap {
        PolyMap::new(
            self.n,
            self.terms.iter().map(|(a, c)| (a.clone(), m.mul_vec(c))),
        )
        .expect("dimensions preserved")
    }

    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        PolyMap::new(
            self.n,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(a, c)| (a.clone(), c.clone())),
        )
    }

    fn component(&self, l: usize) -> ScalarPoly {
        self.terms
            .iter()
            .map(|(a, c)| (a.clone(), c[l]))
            .filter(|(_, c)| *c != ZERO)
            .collect()
    }

    /// Explicit polynomial composition `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: inner.n,
            });
        }
        let n = self.n;
        let comps: Vec<ScalarPoly> = (0..n).map(|l| inner.component(l)).collect();
        let mut one = ScalarPoly::new();
        one.insert(vec![0; n], ONE);
        // power cache per variable
        let max_deg = self.degree() as usize;
        let pow_cache: Vec<Vec<ScalarPoly>> = comps
            .iter()
            .map(|c| {
                let mut p = vec![one.clone()];
                for e in 1..=max_deg {
                    let next = scalar_mul(&p[e - 1], c);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out: Vec<(Vec<u32>, CVector)> = Vec::new();
        for (alpha, coeff) in &self.terms {
            let mut mono = one.clone();
            for (i, &a) in alpha.iter().enumerate() {
                if a > 0 {
                    mono = scalar_mul(&mono, &pow_cache[i][a as usize]);
                }
            }
            for (beta, s) in mono {
                out.push((beta, coeff.scale(s)));
            }
        }
        PolyMap::new(n, out)
    }
}

fn scalar_mul(a: &ScalarPoly, b: &ScalarPoly) -> ScalarPoly {
    let mut out = ScalarPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(ZERO) += ca * cb;
        }
    }
    out
}

/// Exact jet of a polynomial map by term-wise differentiation.
pub fn poly_jet(f: &PolyMap, z: &CVector) -> Jet2 {
    let n = f.n;
    assert_eq!(z.dim(), n, "point dimension mismatch");
    let pw = f.powers(z);
    let mut value = CVector::zeros(n);
    let mut d1 = CMatrix::zeros(n);
    let mut d2 = vec![ZERO; n * n * n];
    let mono = |alpha: &[u32], skip: &[usize]| -> C64 {
        let mut e: Vec<u32> = alpha.to_vec();
        for &s in skip {
            e[s] -= 1;
        }
        e.iter()
            .enumerate()
            .map(|(i, &a)| pw[i][a as usize])
            .product()
    };
    for (alpha, coeff) in &f.terms {
        let m = mono(alpha, &[]);
        for l in 0..n {
            value[l] += coeff[l] * m;
        }
        for i in 0..n {
            if alpha[i] == 0 {
                continue;
            }
            let gi = C64::new(alpha[i] as f64, 0.0) * mono(alpha, &[i]);
            for l in 0..n {
                d1[(l, i)] += coeff[l] * gi;
            }
            for j in i..n {
                let mult = if i == j {
                    alpha[i] as i64 * (alpha[i] as i64 - 1)
                } else {
                    alpha[i] as i64 * alpha[j] as i64
                };
                if mult == 0 {
                    continue;
                }
                let hij = C64::new(mult as f64, 0.0) * mono(alpha, &[i, j]);
                for l in 0..n {
                    let t = coeff[l] * hij;
                    d2[(l * n + i) * n + j] += t;
                    if i != j {
                        d2[(l * n + j) * n + i] += t;
                    }
                }
            }
        }
    }
    Jet2 {
        point: z.clone(),
        value,
        d1,
        d2: BilinearOp::from_coefficients(n, d2).expect("sized above"),
    }
}

// ---------------------------------------------------------------------------
// Moebius maps
// ---------------------------------------------------------------------------

/// `T(z) = (l_1(z)/l_0(z), ..., l_n(z)/l_0(z))` with
/// `l_i(z) = a[i][0] + sum_j a[i][j] z_j` and `det a != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMap {
    a: CMatrix,
}

impl MobiusMap {
    /// `a` is the `(n+1) x (n+1)` coefficient matrix.
    pub fn new(a: CMatrix) -> Result<Self> {
        if a.dim() < 2 {
            return Err(Error::InvalidMap(
                "Moebius coefficient matrix must be at least 2x2".into(),
            ));
        }
        mat_inverse(&a).map_err(|_| {
            Error::InvalidMap("Moebius coefficient matrix is singular".into())
        })?;
        Ok(Self { a })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: CMatrix::identity(n + 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim() - 1
    }

    pub fn coefficients(&self) -> &CMatrix {
        &self.a
    }

    fn affine_form(&self, i: usize, z: &CVector) -> C64 {
        let row = self.a.row(i);
        row[0] + (0..self.dim()).map(|j| row[j + 1] * z[j]).sum::<C64>()
    }

    fn denominator(&self, z: &CVector) -> Result<C64> {
        let l0 = self.affine_form(0, z);
        let row = self.a.row(0);
        let scale = row[0].norm()
            + (0..self.dim())
                .map(|j| (row[j + 1] * z[j]).norm())
                .sum::<f64>();
        if !(l0.norm() > 1e-13 * scale) {
            return Err(Error::PoleAtPoint(l0.norm()));
        }
        Ok(l0)
    }

    pub fn eval(&self, z: &CVector) -> Result<CVector> {
        let l0 = self.denominator(z)?;
        Ok(CVector::new((1..=self.dim()).map(|i| self.affine_form(i, z) / l0).collect())?)
    }

    pub fn jet(&self, z: &CVector) -> Result<Jet2> {
        mobius_jet(self, z)
    }

    /// `z -> m T(z)`, again a Moebius map when `m` is invertible.
    pub fn left_mul(&self, m: &CMatrix) -> Result<MobiusMap> {
        let n = self.dim();
        let lifted = CMatrix::from_fn(n + 1, |i, j| match (i, j) {
            (0, 0) => ONE,
            (0, _) | (_, 0) => ZERO,
            _ => m[(i - 1, j - 1)],
        });
        MobiusMap::new(&lifted * &self.a)
    }
}

/// Exact jet of a Moebius map by the quotient rule:
/// `DT_ij = (a_ij - T_i b_j) / l_0` and
/// `D2T_i<e_j, e_k> = -(DT_ik b_j + DT_ij b_k) / l_0`, where `b` is the
/// gradient of `l_0`.
pub fn mobius_jet(t: &MobiusMap, z: &CVector) -> Result<Jet2> {
    let n = t.dim();
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.dim(),
        });
    }
    let l0 = t.denominator(z)?;
    let b: Vec<C64> = (0..n).map(|j| t.a[(0, j + 1)]).collect();
    let value = CVector::new((1..=n).map(|i| t.affine_form(i, z) / l0).collect())?;
    let d1 = CMatrix::from_fn(n, |i, j| (t.a[(i + 1, j + 1)] - value[i] * b[j]) / l0);
    let d2 = BilinearOp::from_fn(n, |i, j, k| -(d1[(i, k)] * b[j] + d1[(i, j)] * b[k]) / l0);
    Ok(Jet2 {
        point: z.clone(),
        value,
        d1,
        d2,
    })
}

// ---------------------------------------------------------------------------
// HoloMap
// ---------------------------------------------------------------------------

/// A holomorphic map. `Combination` and `Composition` are built by the
/// affine, multiplicative and chain-rule transformations; only `Poly` and
/// `Mobius` have a map-file representation.
#[derive(Clone, Debug, PartialEq)]
pub enum HoloMap {
    Poly(PolyMap),
    Mobius(MobiusMap),
    /// `z -> sum_k m_k f_k(z)`.
    Combination(Vec<(CMatrix, HoloMap)>),
    /// `z -> outer(inner(z))`.
    Composition(Box<HoloMap>, Box<HoloMap>),
}

impl From<PolyMap> for HoloMap {
    fn from(p: PolyMap) -> Self {
        HoloMap::Poly(p)
    }
}

impl From<MobiusMap> for HoloMap {
    fn from(m: MobiusMap) -> Self {
        HoloMap::Mobius(m)
    }
}

impl HoloMap {
    pub fn dim(&self) -> usize {
        match self {
            HoloMap::Poly(p) => p.dim(),
            HoloMap::Mobius(m) => m.dim(),
            HoloMap::Combination(parts) => parts[0].1.dim(),
            HoloMap::Composition(outer, _) => outer.dim(),
        }
    }

    pub fn jet(&self, z: &CVector) -> Result<Jet2> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        match self {
            HoloMap::Poly(p) => Ok(poly_jet(p, z)),
            HoloMap::Mobius(m) => mobius_jet(m, z),
            HoloMap::Combination(parts) => {
                let jets = parts
                    .iter()
                    .map(|(m, f)| Ok((m.clone(), f.jet(z)?)))
                    .collect::<Result<Vec<_>>>()?;
                Jet2::combination(&jets)
            }
            HoloMap::Composition(outer, inner) => {
                let inner_jet = inner.jet(z)?;
                let outer_jet = outer.jet(&inner_jet.value)?;
                jet_compose(&outer_jet, &inner_jet)
            }
        }
    }

    pub fn eval(&self, z: &CVector) -> Result<CVector> {
        match self {
            HoloMap::Poly(p) => Ok(p.eval(z)),
            HoloMap::Mobius(m) => m.eval(z),
            _ => Ok(self.jet(z)?.value),
        }
    }

    /// `z -> m f(z)`.
    pub fn left_mul(&self, m: &CMatrix) -> HoloMap {
        match self {
            HoloMap::Poly(p) => HoloMap::Poly(p.left_mul(m)),
            other => HoloMap::Combination(vec![(m.clone(), other.clone())]),
        }
    }

    /// `z -> self(z) + m other(z)`.
    pub fn plus_mul(&self, m: &CMatrix, other: &HoloMap) -> HoloMap {
        match (self, other) {
            (HoloMap::Poly(a), HoloMap::Poly(b)) => {
                HoloMap::Poly(a.add(&b.left_mul(m)).expect("equal dimensions"))
            }
            _ => HoloMap::Combination(vec![
                (CMatrix::identity(self.dim()), self.clone()),
                (m.clone(), other.clone()),
            ]),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &HoloMap) -> HoloMap {
        match (self, inner) {
            (HoloMap::Poly(a), HoloMap::Poly(b)) => {
                HoloMap::Poly(a.compose(b).expect("equal dimensions"))
            }
            _ => HoloMap::Composition(Box::new(self.clone()), Box::new(inner.clone())),
        }
    }

    pub fn pre_schwarzian(&self, z: &CVector) -> Result<BilinearOp> {
        pre_schwarzian_holo(&self.jet(z)?)
    }

    pub fn schwarzian(&self, z: &CVector) -> Result<BilinearOp> {
        schwarzian_holo(&self.jet(z)?)
    }

    pub fn grad_log_jacobian(&self, z: &CVector) -> Result<CVector> {
        grad_log_jacobian(&self.jet(z)?)
    }

    pub fn oda_components(&self, z: &CVector) -> Result<OdaComponents> {
        oda_components(&self.jet(z)?)
    }
}

pub(crate) fn invert_derivative(d1: &CMatrix, what: &str) -> Result<CMatrix> {
    mat_inverse(d1).map_err(|e| Error::SingularDerivative(format!("{what}: {e}")))
}

/// `Pf = Df^{-1} D^2 f`.
pub fn pre_schwarzian_holo(j: &Jet2) -> Result<BilinearOp> {
    let inv = invert_derivative(&j.d1, "Df")?;
    left_mat_apply(&inv, &j.d2)
}

/// Gradient of `log det Df` by Jacobi's formula:
/// component `k` is `Tr(Df^{-1} D^2 f<e_k, .>)`. The logarithm itself is
/// never formed.
pub fn grad_log_jacobian(j: &Jet2) -> Result<CVector> {
    let n = j.dim();
    let inv = invert_derivative(&j.d1, "Df")?;
    CVector::new(
        (0..n)
            .map(|k| {
                let mut tr = ZERO;
                for i in 0..n {
                    for l in 0..n {
                        tr += inv[(i, l)] * j.d2.get(l, k, i);
                    }
                }
                tr
            })
            .collect(),
    )
}

/// `S<u,v> = P<u,v> - ((tau . u) v + (tau . v) u) / (n+1)` with the
/// bilinear (unconjugated) pairing.
pub(crate) fn trace_corrected(p: &BilinearOp, tau: &CVector) -> BilinearOp {
    let n = p.dim();
    let w = C64::new(1.0 / (n as f64 + 1.0), 0.0);
    BilinearOp::from_fn(n, |k, i, j| {
        let mut corr = ZERO;
        if k == j {
            corr += tau[i];
        }
        if k == i {
            corr += tau[j];
        }
        p.get(k, i, j) - w * corr
    })
}

/// Holomorphic Schwarzian operator.
pub fn schwarzian_holo(j: &Jet2) -> Result<BilinearOp> {
    let p = pre_schwarzian_holo(j)?;
    let tau = grad_log_jacobian(j)?;
    Ok(trace_corrected(&p, &tau))
}

/// The `n^3` scalar Schwarzians `S^k_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdaComponents {
    n: usize,
    s: Vec<C64>,
}

impl OdaComponents {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> C64 {
        self.s[(k * self.n + i) * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.s.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `S<u,v>_k = u^t S^k v`.
    pub fn to_bilinear(&self) -> BilinearOp {
        BilinearOp::from_coefficients(self.n, self.s.clone()).expect("n^3 entries")
    }
}

/// `S^k_ij = sum_l (d^2 f_l / dz_i dz_j) (Df^{-1})_{kl}
///           - (delta_ik d_j + delta_jk d_i) log J_f / (n+1)`.
pub fn oda_components(j: &Jet2) -> Result<OdaComponents> {
    let n = j.dim();
    let inv = invert_derivative(&j.d1, "Df")?;
    let grad = grad_log_jacobian(j)?;
    let w = 1.0 / (n as f64 + 1.0);
    let mut s = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut v = ZERO;
                for l in 0..n {
                    v += j.d2.get(l, a, b) * inv[(k, l)];
                }
                let mut corr = ZERO;
                if a == k {
                    corr += grad[b];
                }
                if b == k {
                    corr += grad[a];
                }
                s.push(v - corr * w);
            }
        }
    }
    Ok(OdaComponents { n, s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rvec(n: usize, r: f64, rng: &mut ChaCha8Rng) -> CVector {
        CVector::new(
            (0..n)
                .map(|_| c(rng.gen_range(-r..r), rng.gen_range(-r..r)))
                .collect(),
        )
        .unwrap()
    }

    fn random_poly(n: usize, deg: u32, rng: &mut ChaCha8Rng) -> PolyMap {
        let mut terms = Vec::new();
        let mut alpha = vec![0u32; n];
        loop {
            let d: u32 = alpha.iter().sum();
            if d <= deg {
                let scale = if d == 1 { 1.0 } else { 0.5 / (1.0 + d as f64) };
                let mut coeff = rvec(n, scale, rng);
                if d == 1 {
                    let j = alpha.iter().position(|&a| a == 1).unwrap();
                    coeff[j] += c(2.0, 0.0);
                }
                terms.push((alpha.clone(), coeff));
            }
            let mut i = 0;
            loop {
                if i == n {
                    return PolyMap::new(n, terms).unwrap();
                }
                alpha[i] += 1;
                if alpha[i] <= deg {
                    break;
                }
                alpha[i] = 0;
                i += 1;
            }
        }
    }

    fn random_mobius(n: usize, rng: &mut ChaCha8Rng) -> MobiusMap {
        let mut a = CMatrix::identity(n + 1);
        for i in 0..=n {
            for j in 0..=n {
                a[(i, j)] += c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
            }
        }
        MobiusMap::new(a).unwrap()
    }

    /// Central differences of the value (and Jacobian) along real coordinate directions.
    fn fd_d1(f: &dyn Fn(&CVector) -> CVector, z: &CVector, h: f64) -> CMatrix {
        let n = z.dim();
        let mut m = CMatrix::zeros(n);
        for j in 0..n {
            let p = f(&z.shifted(j, c(h, 0.0)));
            let q = f(&z.shifted(j, c(-h, 0.0)));
            for i in 0..n {
                m[(i, j)] = (p[i] - q[i]) / (2.0 * h);
            }
        }
        m
    }

    fn rel_err(a: f64, scale: f64) -> f64 {
        a / scale.max(1.0)
    }

    #[test]
    fn identity_poly_jet() {
        let id = PolyMap::identity(3);
        let z = CVector::new(vec![c(0.1, 0.2), c(-1.0, 0.5), c(2.0, 0.0)]).unwrap();
        let j = id.jet(&z);
        assert_eq!(j.value, z);
        assert_eq!(j.d1, CMatrix::identity(3));
        assert_eq!(j.d2.max_abs(), 0.0);
        let j0 = PolyMap::identity(2).jet(&CVector::zeros(2));
        assert_eq!(j0.d1, CMatrix::identity(2));
    }

    #[test]
    fn poly_jet_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let f = random_poly(n, 3, &mut rng);
            let z = rvec(n, 0.5, &mut rng);
            let j = f.jet(&z);
            let fd = fd_d1(&|x| f.eval(x), &z, 1e-5);
            assert!(rel_err(fd.max_diff(&j.d1), j.d1.max_abs()) < 1e-6);
            // second derivative from differences of the exact Jacobian
            let h = 1e-3;
            for i in 0..n {
                let p = f.jet(&z.shifted(i, c(h, 0.0))).d1;
                let q = f.jet(&z.shifted(i, c(-h, 0.0))).d1;
                for k in 0..n {
                    for jj in 0..n {
                        let fd = (p[(k, jj)] - q[(k, jj)]) / (2.0 * h);
                        assert!(rel_err((fd - j.d2.get(k, i, jj)).norm(), j.d2.max_abs()) < 1e-4);
                    }
                }
            }
            assert!(j.d2.is_symmetric(0.0));
        }
    }

    #[test]
    fn mobius_identity_and_inversion() {
        let z = CVector::new(vec![c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
        let j = MobiusMap::identity(2).jet(&z).unwrap();
        assert!((&j.value - &z).max_abs() < 1e-15);
        assert!(j.d1.max_diff(&CMatrix::identity(2)) < 1e-15);
        assert_eq!(j.d2.max_abs(), 0.0);

        // 1/z: l0 = z, l1 = 1
        let inv = MobiusMap::new(CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())
            .unwrap();
        let j = inv.jet(&CVector::from_real(&[2.0])).unwrap();
        assert!((j.value[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((j.d1[(0, 0)] - c(-0.25, 0.0)).norm() < 1e-15);
        assert!((j.d2.get(0, 0, 0) - c(0.25, 0.0)).norm() < 1e-15);

        assert!(matches!(
            inv.jet(&CVector::from_real(&[0.0])),
            Err(Error::PoleAtPoint(_))
        ));
    }

    #[test]
    fn mobius_jet_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            let t = random_mobius(n, &mut rng);
            let z = rvec(n, 0.3, &mut rng);
            let j = t.jet(&z).unwrap();
            let fd = fd_d1(&|x| t.eval(x).unwrap(), &z, 1e-5);
            assert!(rel_err(fd.max_diff(&j.d1), j.d1.max_abs()) < 1e-6);
            let h = 1e-5;
            for i in 0..n {
                let p = t.jet(&z.shifted(i, c(h, 0.0))).unwrap().d1;
                let q = t.jet(&z.shifted(i, c(-h, 0.0))).unwrap().d1;
                for k in 0..n {
                    for jj in 0..n {
                        let fd = (p[(k, jj)] - q[(k, jj)]) / (2.0 * h);
                        assert!(rel_err((fd - j.d2.get(k, i, jj)).norm(), j.d2.max_abs()) < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn singular_mobius_is_rejected() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(MobiusMap::new(a), Err(Error::InvalidMap(_))));
    }

    #[test]
    fn compose_with_identity_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_poly(2, 3, &mut rng);
        let z = rvec(2, 0.5, &mut rng);
        let jf = f.jet(&z);
        let left = jet_compose(&jf, &Jet2::identity(&z)).unwrap();
        assert_eq!(left, jf);
        let right = jet_compose(&Jet2::identity(&jf.value), &jf).unwrap();
        assert!(right.d1.max_diff(&jf.d1) == 0.0 && right.d2.max_diff(&jf.d2) == 0.0);
    }

    #[test]
    fn jet_compose_matches_explicit_polynomial_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            let outer = random_poly(n, 2, &mut rng);
            let inner = random_poly(n, 2, &mut rng);
            let z = rvec(n, 0.4, &mut rng);
            let ji = inner.jet(&z);
            let jo = outer.jet(&ji.value);
            let composed = jet_compose(&jo, &ji).unwrap();
            let explicit = outer.compose(&inner).unwrap().jet(&z);
            let scale = explicit.d2.max_abs().max(1.0);
            assert!((&composed.value - &explicit.value).max_abs() < 1e-12 * scale);
            assert!(composed.d1.max_diff(&explicit.d1) < 1e-12 * scale);
            assert!(composed.d2.max_diff(&explicit.d2) < 1e-12 * scale);
        }
    }

    #[test]
    fn jet_compose_rejects_point_mismatch() {
        let z = CVector::from_real(&[0.0, 0.0]);
        let w = CVector::from_real(&[1.0, 0.0]);
        assert!(matches!(
            jet_compose(&Jet2::identity(&w), &Jet2::identity(&z)),
            Err(Error::PointMismatch(_))
        ));
    }

    #[test]
    fn pre_schwarzian_of_affine_map_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = CMatrix::from_fn(3, |i, j| {
            if i == j { c(2.0, 0.0) } else { c(rng.gen_range(-0.5..0.5), 0.3) }
        });
        let f = PolyMap::affine(&m, &rvec(3, 1.0, &mut rng));
        let p = pre_schwarzian_holo(&f.jet(&rvec(3, 1.0, &mut rng))).unwrap();
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn univariate_pre_schwarzian_is_f2_over_f1() {
        // f(z) = z + z^2 / 2 + z^3 / 3
        let f = PolyMap::new(
            1,
            vec![
                (vec![1], CVector::from_real(&[1.0])),
                (vec![2], CVector::from_real(&[0.5])),
                (vec![3], CVector::from_real(&[1.0 / 3.0])),
            ],
        )
        .unwrap();
        let z = c(0.3, 0.2);
        let p = pre_schwarzian_holo(&f.jet(&CVector::new(vec![z]).unwrap())).unwrap();
        let expected = (ONE + 2.0 * z) / (ONE + z + z * z);
        assert!((p.get(0, 0, 0) - expected).norm() < 1e-14);
    }

    #[test]
    fn holomorphic_pre_schwarzian_is_multiplicatively_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=3 {
            let f = random_poly(n, 3, &mut rng);
            let a = CMatrix::from_fn(n, |i, j| {
                let d = if i == j { 1.5 } else { 0.0 };
                c(d + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
            });
            let z = rvec(n, 0.5, &mut rng);
            let p = pre_schwarzian_holo(&f.jet(&z)).unwrap();
            let pa = pre_schwarzian_holo(&f.left_mul(&a).jet(&z)).unwrap();
            assert!(pa.max_diff(&p) < 1e-12 * p.max_abs().max(1.0));
        }
    }

    #[test]
    fn singular_derivative_is_reported() {
        let f = PolyMap::new(
            2,
            vec![
                (vec![2, 0], CVector::from_real(&[1.0, 0.0])),
                (vec![0, 1], CVector::from_real(&[0.0, 1.0])),
            ],
        )
        .unwrap();
        let at_origin = f.jet(&CVector::zeros(2));
        assert!(matches!(pre_schwarzian_holo(&at_origin), Err(Error::SingularDerivative(_))));
        assert!(matches!(schwarzian_holo(&at_origin), Err(Error::SingularDerivative(_))));
    }

    #[test]
    fn grad_log_jacobian_of_linear_map_is_zero() {
        let f = PolyMap::affine(&CMatrix::identity(2).scale(c(3.0, 1.0)), &CVector::zeros(2));
        let g = grad_log_jacobian(&f.jet(&CVector::from_real(&[0.4, -0.2]))).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn grad_log_jacobian_of_truncated_exponential() {
        // Truncated (e^{az} - 1)/a: the z^k coefficient is a^{k-1}/k!, and f''/f' = a at 0.
        for a in [c(0.5, 0.0), c(-1.0, 0.0), c(0.3, -0.7)] {
            let mut terms = Vec::new();
            let mut fact = 1.0;
            for k in 1..=8u32 {
                fact *= k as f64;
                terms.push((vec![k], CVector::new(vec![a.powu(k - 1) / fact]).unwrap()));
            }
            let f = PolyMap::new(1, terms).unwrap();
            let g = grad_log_jacobian(&f.jet(&CVector::zeros(1))).unwrap();
            assert!((g[0] - a).norm() < 1e-10);
        }
    }

    #[test]
    fn grad_log_jacobian_matches_finite_differences_of_log_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            let f = random_poly(n, 3, &mut rng);
            let z = rvec(n, 0.4, &mut rng);
            let g = grad_log_jacobian(&f.jet(&z)).unwrap();
            let det0 = f.jet(&z).d1.det();
            let h = 1e-5;
            for k in 0..n {
                // log of the ratio keeps the branch consistent over the small step
                let dp = f.jet(&z.shifted(k, c(h, 0.0))).d1.det();
                let dm = f.jet(&z.shifted(k, c(-h, 0.0))).d1.det();
                let fd = ((dp / det0).ln() - (dm / det0).ln()) / (2.0 * h);
                assert!((fd - g[k]).norm() < 1e-6 * g.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn schwarzian_of_mobius_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=4 {
            for _ in 0..10 {
                let t = random_mobius(n, &mut rng);
                let z = rvec(n, 0.3, &mut rng);
                let j = t.jet(&z).unwrap();
                assert!(schwarzian_holo(&j).unwrap().max_abs() < 1e-10);
                assert!(oda_components(&j).unwrap().max_abs() < 1e-10);
            }
        }
        let lin = PolyMap::affine(&CMatrix::identity(2).scale(c(2.0, 0.0)), &CVector::zeros(2));
        assert_eq!(schwarzian_holo(&lin.jet(&CVector::zeros(2))).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn oda_components_of_identity_vanish() {
        let o = oda_components(&Jet2::identity(&CVector::from_real(&[0.1, 0.2, 0.3]))).unwrap();
        assert_eq!(o.max_abs(), 0.0);
    }

    #[test]
    fn oda_components_symmetry_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=4 {
            let f = random_poly(n, 3, &mut rng);
            let j = f.jet(&rvec(n, 0.5, &mut rng));
            let o = oda_components(&j).unwrap();
            for k in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(o.get(k, a, b), o.get(k, b, a));
                    }
                }
            }
            for a in 0..n {
                let s: C64 = (0..n).map(|b| o.get(b, a, b)).sum();
                assert!(s.norm() < 1e-11);
            }
        }
    }

    #[test]
    fn schwarzian_operator_equals_oda_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 2..=3 {
            for _ in 0..10 {
                let f = random_poly(n, 3, &mut rng);
                let j = f.jet(&rvec(n, 0.5, &mut rng));
                let s = schwarzian_holo(&j).unwrap();
                let o = oda_components(&j).unwrap();
                for a in 0..n {
                    for b in 0..n {
                        let v = s
                            .apply(&CVector::basis(n, a), &CVector::basis(n, b))
                            .unwrap();
                        for k in 0..n {
                            assert!((v[k] - o.get(k, a, b)).norm() < 1e-11);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn holomorphic_pre_schwarzian_chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            let g = random_poly(n, 3, &mut rng);
            let f = random_poly(n, 2, &mut rng);
            let z = rvec(n, 0.3, &mut rng);
            let jf = f.jet(&z);
            let jg = g.jet(&jf.value);
            let lhs = pre_schwarzian_holo(&jet_compose(&jg, &jf).unwrap()).unwrap();
            let inv = jf.d1.inverse().unwrap();
            let pulled = left_mat_apply(&inv, &pre_schwarzian_holo(&jg).unwrap().pullback(&jf.d1).unwrap())
                .unwrap();
            let rhs = &pulled + &pre_schwarzian_holo(&jf).unwrap();
            assert!(lhs.max_diff(&rhs) < 1e-10 * rhs.max_abs().max(1.0));
        }
    }

    #[test]
    fn schwarzian_is_mobius_invariant_on_the_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=3 {
            let f = HoloMap::Poly(random_poly(n, 3, &mut rng));
            let t = HoloMap::Mobius(random_mobius(n, &mut rng));
            let z = rvec(n, 0.2, &mut rng);
            let tf = t.compose(&f);
            let (Ok(s_tf), Ok(s_f)) = (tf.schwarzian(&z), f.schwarzian(&z)) else {
                continue;
            };
            assert!(s_tf.max_diff(&s_f) < 1e-9 * s_f.max_abs().max(1.0));
        }
    }

    #[test]
    fn mobius_left_mul_stays_mobius() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = random_mobius(2, &mut rng);
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        let z = rvec(2, 0.2, &mut rng);
        let lm = t.left_mul(&m).unwrap();
        let expect = m.mul_vec(&t.eval(&z).unwrap());
        assert!((&lm.eval(&z).unwrap() - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn poly_constructor_validates_and_merges() {
        let e = PolyMap::new(2, vec![(vec![1], CVector::from_real(&[1.0, 0.0]))]).unwrap_err();
        assert!(matches!(e, Error::InvalidMap(m) if m.contains("term 0")));
        let p = PolyMap::new(
            1,
            vec![
                (vec![2], CVector::from_real(&[1.0])),
                (vec![2], CVector::from_real(&[2.0])),
            ],
        )
        .unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.terms().next().unwrap().1[0], c(3.0, 0.0));
    }
}
