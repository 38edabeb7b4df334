//! Seeded random instances. Every trial owns its own generator derived from
//! `(seed, trial index)`, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::holomap::{HoloMap, MobiusMap, PolyMap};
use crate::lincomplex::{op_norm_linear, CMatrix, CVector, C64};
use crate::plurimap::PluriMap;

pub const MAX_ATTEMPTS: usize = 10_000;
pub const MAX_CONDITION: f64 = 100.0;
pub const PROBE_RADIUS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomInstanceConfig {
    pub seed: u64,
    pub n: usize,
    pub degree: u32,
    /// Coefficients of total degree `d` lie in the disk of radius
    /// `magnitude / (1 + d)`.
    pub magnitude: f64,
    /// Required bound `|w(z)| < rho` at the probe point.
    pub rho: f64,
}

impl Default for RandomInstanceConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n: 2,
            degree: 3,
            magnitude: 1.0,
            rho: 0.9,
        }
    }
}

/// A random map with a probe point at which it is well inside the class.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub map: PluriMap,
    pub point: CVector,
    pub attempts: usize,
}

/// SplitMix64 finalizer applied to `seed + index * golden`.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split_seed(seed, index))
}

/// Uniform in the closed disk of radius `r`.
pub fn random_complex(rng: &mut impl Rng, r: f64) -> C64 {
    let rad = r * rng.gen::<f64>().sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(rad, theta)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, r: f64) -> CMatrix {
    CMatrix::from_fn(n, |_, _| random_complex(rng, r))
}

/// Random matrix with operator norm uniform in `[0, bound)`.
pub fn random_contraction(rng: &mut impl Rng, n: usize, bound: f64) -> CMatrix {
    let m = random_matrix(rng, n, 1.0);
    let norm = op_norm_linear(&m).max(f64::MIN_POSITIVE);
    let target = bound * rng.gen::<f64>();
    m.scale(C64::new(target / norm, 0.0))
}

/// Random matrix with condition number below [`MAX_CONDITION`].
pub fn random_invertible(rng: &mut impl Rng, n: usize) -> CMatrix {
    loop {
        let m = random_matrix(rng, n, 1.0);
        if m.condition_number() < MAX_CONDITION {
            return m;
        }
    }
}

/// Uniform in the Euclidean ball of radius `r` in C^n (by rejection from the
/// cube).
pub fn random_point(rng: &mut impl Rng, n: usize, r: f64) -> CVector {
    loop {
        let v = CVector::new(
            (0..n)
                .map(|_| C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r)))
                .collect(),
        )
        .expect("n >= 1");
        if v.norm() <= r {
            return v;
        }
    }
}

/// All multi-indices of length `n` and total degree at most `degree`, in
/// graded lexicographic order.
pub fn multi_indices(n: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(prefix, n, left - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, degree, &mut out);
    out.sort_by_key(|a| a.iter().sum::<u32>());
    out
}

/// Dense random polynomial map with degree-graded damping.
pub fn random_poly(rng: &mut impl Rng, n: usize, degree: u32, magnitude: f64) -> PolyMap {
    let terms: Vec<(Vec<u32>, CVector)> = multi_indices(n, degree)
        .into_iter()
        .map(|alpha| {
            let d: u32 = alpha.iter().sum();
            let r = magnitude / (1.0 + d as f64);
            let coeff = CVector::new((0..n).map(|_| random_complex(rng, r)).collect())
                .expect("n >= 1");
            (alpha, coeff)
        })
        .collect();
    PolyMap::new(n, terms).expect("well-formed random terms")
}

/// Random Moebius map with coefficient matrix near the identity; `l_0`
/// stays away from zero on the ball of radius 1/2.
pub fn random_mobius(rng: &mut impl Rng, n: usize) -> MobiusMap {
    loop {
        let pert = random_matrix(rng, n + 1, 0.4 / (n as f64 + 1.0).sqrt());
        let a = &CMatrix::identity(n + 1) + &pert;
        if a.condition_number() < MAX_CONDITION {
            if let Ok(m) = MobiusMap::new(a) {
                return m;
            }
        }
    }
}

/// Near-identity polynomial map, locally biholomorphic on the ball of
/// radius 1/2.
pub fn random_biholomorphic(rng: &mut impl Rng, n: usize, degree: u32) -> PolyMap {
    let lin = &CMatrix::identity(n) + &random_matrix(rng, n, 0.3 / n as f64);
    random_poly(rng, n, degree, 0.3)
        .add(&PolyMap::affine(&lin, &CVector::zeros(n)))
        .expect("equal dimensions")
}

/// Random `(h, g)` and probe point with `cond(Dh) < 100` and `|w| < rho`.
///
/// `Dh` is rejection-sampled. Independent draws of `g` almost never give
/// `|w| < rho` once `n >= 3`, so when the drawn `g` is too large it is scaled
/// down to `|w| = rho u` with `u` uniform in `[0, 1)`.
pub fn gen_plurimap(cfg: &RandomInstanceConfig) -> Result<Instance> {
    gen_plurimap_with(&mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg)
}

pub fn gen_plurimap_with(rng: &mut impl Rng, cfg: &RandomInstanceConfig) -> Result<Instance> {
    if cfg.n == 0 {
        return Err(Error::EmptyDimension);
    }
    for attempt in 1..=MAX_ATTEMPTS {
        let h = random_poly(rng, cfg.n, cfg.degree, cfg.magnitude);
        let mut g = random_poly(rng, cfg.n, cfg.degree, cfg.magnitude);
        let z = random_point(rng, cfg.n, PROBE_RADIUS);
        let u: f64 = rng.gen();
        let dh = h.jet(&z).d1;
        if !(dh.condition_number() < MAX_CONDITION) {
            continue;
        }
        let Ok(dh_inv) = dh.inverse() else { continue };
        let norm = op_norm_linear(&(&g.jet(&z).d1 * &dh_inv));
        if norm >= cfg.rho {
            g = g.left_mul(&CMatrix::identity(cfg.n).scale(C64::new(cfg.rho * u / norm, 0.0)));
        }
        let map = PluriMap::new(HoloMap::Poly(h), HoloMap::Poly(g))?;
        let Ok(j) = map.jet(&z) else { continue };
        if op_norm_linear(&j.omega) < cfg.rho && j.pre_schwarzian().is_ok() {
            return Ok(Instance {
                map,
                point: z,
                attempts: attempt,
            });
        }
    }
    Err(Error::RejectionExhausted(MAX_ATTEMPTS))
}
