//! Named fixtures: exact coefficient instantiations of the worked examples
//! and counterexamples, parameterized where the construction allows it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::holomap::{HoloMap, PolyMap};
use crate::lincomplex::{CMatrix, CVector, C64, ONE, ZERO};
use crate::oracles::shear::ShearMap;
use crate::plurimap::PluriMap;

pub const FIXTURE_NAMES: [&str; 7] = [
    "example-2.5",
    "example-4.1",
    "counter-omega",
    "counter-det",
    "stable-offdiag",
    "stable-diag",
    "shear",
];

/// Numeric `key=value` parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FixtureParams(BTreeMap<String, f64>);

impl FixtureParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn insert(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }

    /// Parses `key=value`.
    pub fn parse_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidMap(format!("parameter `{pair}` is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidMap(format!("parameter `{k}` has non-numeric value `{v}`")))?;
        self.insert(k.trim(), v);
        Ok(())
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::InvalidMap(format!(
                "parameter `{key}` must be a positive integer, got {v}"
            )));
        }
        Ok(v as usize)
    }

    fn get_in(&self, key: &str, default: f64, lo: f64, hi: f64) -> Result<f64> {
        let v = self.get(key, default);
        if !(v > lo && v < hi) {
            return Err(Error::InvalidMap(format!(
                "parameter `{key}` = {v} must lie in ({lo}, {hi})"
            )));
        }
        Ok(v)
    }
}

/// A concrete map with a default evaluation point. `twist` is the matrix `A`
/// the example pairs with the map (affine or stable twist), if any.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFixture {
    pub name: &'static str,
    pub map: PluriMap,
    pub point: CVector,
    pub twist: Option<CMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Map(MapFixture),
    CounterOmega(CounterOmega),
    Shear(ShearMap),
}

pub fn fixture(name: &str, params: &FixtureParams) -> Result<Fixture> {
    match name {
        "example-2.5" => {
            let k = params.get_usize("phi", 2)?;
            if k < 2 {
                return Err(Error::InvalidMap("phi degree must be at least 2".into()));
            }
            let phi = vec![(k as u32, ONE)];
            Ok(Fixture::Map(MapFixture {
                name: "example-2.5",
                map: example_25(&phi)?,
                point: default_point(2),
                twist: None,
            }))
        }
        "example-4.1" => {
            let t = params.get_in("t", 2.0, 0.0, f64::INFINITY)?;
            let n = params.get_usize("n", 2)?;
            Ok(Fixture::Map(MapFixture {
                name: "example-4.1",
                map: example_41(t, n)?,
                point: default_point(n),
                twist: None,
            }))
        }
        "counter-omega" => {
            let alpha = params.get_in("alpha", 0.5, 0.0, 1.0)?;
            let n = params.get_usize("n", 2)?;
            Ok(Fixture::CounterOmega(CounterOmega::new(alpha, n)?))
        }
        "counter-det" => {
            let t = params.get_in("t", 0.5, 0.0, 1.0)?;
            let (map, a) = counter_det(t);
            Ok(Fixture::Map(MapFixture {
                name: "counter-det",
                map,
                point: default_point(2),
                twist: Some(a),
            }))
        }
        "stable-offdiag" => {
            let n = params.get_usize("n", 2)?;
            let (i, j) = index_pair(params, n)?;
            let theta = params.get("theta", PI / 4.0);
            let (map, a) = stable_offdiag(n, i, j, theta)?;
            Ok(Fixture::Map(MapFixture {
                name: "stable-offdiag",
                map,
                point: default_point(n),
                twist: Some(a),
            }))
        }
        "stable-diag" => {
            let n = params.get_usize("n", 2)?;
            let (i, j) = index_pair(params, n)?;
            let lam_i = C64::from_polar(1.0, params.get("theta_i", PI / 3.0));
            let lam_j = C64::from_polar(1.0, params.get("theta_j", -PI / 4.0));
            let (map, a) = stable_diag(n, i, j, lam_i, lam_j)?;
            Ok(Fixture::Map(MapFixture {
                name: "stable-diag",
                map,
                point: default_point(n),
                twist: Some(a),
            }))
        }
        "shear" => Ok(Fixture::Shear(ShearMap::new(params.get_in(
            "eps",
            0.1,
            0.0,
            f64::INFINITY,
        )?))),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// One-based `i`, `j` parameters, returned zero-based.
fn index_pair(params: &FixtureParams, n: usize) -> Result<(usize, usize)> {
    if n < 2 {
        return Err(Error::InvalidMap("stability fixtures need n >= 2".into()));
    }
    let i = params.get_usize("i", 1)?;
    let j = params.get_usize("j", 2)?;
    if i == j || i > n || j > n {
        return Err(Error::InvalidMap(format!(
            "indices i={i}, j={j} must be distinct and at most n={n}"
        )));
    }
    Ok((i - 1, j - 1))
}

/// A generic point inside the unit polydisk.
pub fn default_point(n: usize) -> CVector {
    CVector::new(
        (0..n)
            .map(|k| C64::new(0.3 - 0.1 * k as f64, 0.2 - 0.15 * k as f64))
            .collect(),
    )
    .expect("n >= 1")
}

fn mono(n: usize, powers: &[(usize, u32)]) -> Vec<u32> {
    let mut a = vec![0; n];
    for &(i, p) in powers {
        a[i] += p;
    }
    a
}

/// `h = id`, `g = (0, phi(z_1))` with `phi(z) = sum c_k z^k`.
pub fn example_25(phi: &[(u32, C64)]) -> Result<PluriMap> {
    let g = PolyMap::new(
        2,
        phi.iter().map(|&(k, c)| (mono(2, &[(0, k)]), CVector::new(vec![ZERO, c]).expect("len 2"))),
    )?;
    PluriMap::new(HoloMap::Poly(PolyMap::identity(2)), HoloMap::Poly(g))
}

/// Constant dilatation with `t` in the corner `(0, n-1)` and `-1` in the
/// corner `(n-1, 0)`.
pub fn rotation_dilatation(t: f64, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |i, j| {
        if (i, j) == (0, n - 1) {
            C64::new(t, 0.0)
        } else if (i, j) == (n - 1, 0) {
            -ONE
        } else {
            ZERO
        }
    })
}

/// `h = z + z_n^2 e_1`, `g = w h` with [`rotation_dilatation`].
pub fn example_41(t: f64, n: usize) -> Result<PluriMap> {
    if n < 2 {
        return Err(Error::InvalidMap("example-4.1 needs n >= 2".into()));
    }
    let h = PolyMap::identity(n).add(&PolyMap::new(
        n,
        vec![(mono(n, &[(n - 1, 2)]), CVector::basis(n, 0))],
    )?)?;
    let g = h.left_mul(&rotation_dilatation(t, n));
    PluriMap::new(HoloMap::Poly(h), HoloMap::Poly(g))
}

/// `f(z, w) = (z + conj(w)/t^2, w - conj(z))` and `A = diag(t, -t)`.
pub fn counter_det(t: f64) -> (PluriMap, CMatrix) {
    let w = CMatrix::from_real_rows(&[&[0.0, 1.0 / (t * t)], &[-1.0, 0.0]]).expect("2x2");
    let g = PolyMap::affine(&w, &CVector::zeros(2));
    let a = CMatrix::diag(&[C64::new(t, 0.0), C64::new(-t, 0.0)]);
    let map = PluriMap::new(HoloMap::Poly(PolyMap::identity(2)), HoloMap::Poly(g))
        .expect("equal dimensions");
    (map, a)
}

/// `h = id`, `g = z_i^2 e_j / 2`, and a unitary `A` rotating the `(i, j)`
/// plane by `theta`, so `a_ij != 0` for generic `theta`.
pub fn stable_offdiag(n: usize, i: usize, j: usize, theta: f64) -> Result<(PluriMap, CMatrix)> {
    let g = PolyMap::new(n, vec![(mono(n, &[(i, 2)]), CVector::basis(n, j).scale(C64::new(0.5, 0.0)))])?;
    let (s, c) = theta.sin_cos();
    let a = CMatrix::from_fn(n, |r, k| match (r, k) {
        _ if r == i && k == i => C64::new(c, 0.0),
        _ if r == i && k == j => C64::new(-s, 0.0),
        _ if r == j && k == i => C64::new(s, 0.0),
        _ if r == j && k == j => C64::new(c, 0.0),
        _ if r == k => ONE,
        _ => ZERO,
    });
    Ok((PluriMap::new(HoloMap::Poly(PolyMap::identity(n)), HoloMap::Poly(g))?, a))
}

/// `h = id`, `g = (z_i^2 e_j + z_j^2 e_i) / 2`, and
/// `A = diag(.., lam_i, .., lam_j, ..)` with ones elsewhere.
pub fn stable_diag(
    n: usize,
    i: usize,
    j: usize,
    lam_i: C64,
    lam_j: C64,
) -> Result<(PluriMap, CMatrix)> {
    let half = C64::new(0.5, 0.0);
    let g = PolyMap::new(
        n,
        vec![
            (mono(n, &[(i, 2)]), CVector::basis(n, j).scale(half)),
            (mono(n, &[(j, 2)]), CVector::basis(n, i).scale(half)),
        ],
    )?;
    let diag: Vec<C64> = (0..n)
        .map(|k| if k == i { lam_i } else if k == j { lam_j } else { ONE })
        .collect();
    Ok((
        PluriMap::new(HoloMap::Poly(PolyMap::identity(n)), HoloMap::Poly(g))?,
        CMatrix::diag(&diag),
    ))
}

/// Closed form of the stability defect `D<u, .>` for [`stable_diag`] at `z`:
/// nonzero only at `(i, i)` and `(j, j)`.
pub fn stable_diag_defect(z: &CVector, u: &CVector, i: usize, j: usize, lam_i: C64, lam_j: C64) -> CMatrix {
    CMatrix::from_fn(z.dim(), |r, k| {
        if (r, k) == (i, i) {
            (lam_i * lam_j.conj() - 1.0) * u[i] * z[j].conj() / (1.0 - z[i] * z[j].conj())
        } else if (r, k) == (j, j) {
            (lam_i.conj() * lam_j - 1.0) * u[j] * z[i].conj() / (1.0 - z[i].conj() * z[j])
        } else {
            ZERO
        }
    })
}

/// Matrix scenario `w(z) = phi(z_1) B / sqrt(n)` with `B` the all-ones first
/// row, `phi(z) = (alpha + z) / (1 + alpha z)`, and `A = -conj(w(0))`.
/// Only `z_1` enters, so the scenario is a function on the unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterOmega {
    pub alpha: f64,
    pub n: usize,
}

impl CounterOmega {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || n < 2 {
            return Err(Error::InvalidMap(format!(
                "counter-omega needs alpha in (0, 1) and n >= 2 (got {alpha}, {n})"
            )));
        }
        Ok(Self { alpha, n })
    }

    fn b(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, _| if i == 0 { ONE } else { ZERO })
    }

    pub fn phi(&self, z: C64) -> C64 {
        (self.alpha + z) / (1.0 + self.alpha * z)
    }

    pub fn omega(&self, z: C64) -> CMatrix {
        self.b().scale(self.phi(z) / (self.n as f64).sqrt())
    }

    pub fn twist(&self) -> CMatrix {
        self.omega(ZERO).conj().scale(-ONE)
    }

    /// `n (1 - alpha^2) |z| / |n - alpha^2 + (n - 1) alpha z|`.
    pub fn closed_form_norm(&self, z: C64) -> f64 {
        let (a, n) = (self.alpha, self.n as f64);
        n * (1.0 - a * a) * z.norm() / (n - a * a + (n - 1.0) * a * z).norm()
    }

    /// `n (alpha + 1) / (alpha + n)`.
    pub fn closed_form_sup(&self) -> f64 {
        let n = self.n as f64;
        n * (self.alpha + 1.0) / (self.alpha + n)
    }
}
