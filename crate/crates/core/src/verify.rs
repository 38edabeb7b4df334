//! Seeded property suites. Each suite draws its random instances from
//! per-trial generators and emits one [`CheckRecord`] per check, so a run is
//! reproducible from `(seed, trials, dims)` alone.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::affine::{
    affine_invariance_check, affine_transform, best_affine_deviation, dilatation_affine,
    dilatation_recover, factorization_check, stability_defect, AffineTwist,
};
use crate::error::{Error, Result};
use crate::holomap::{pre_schwarzian_holo, schwarzian_holo, HoloMap, PolyMap};
use crate::lincomplex::{mat_inverse, op_norm_linear, BilinearOp, CMatrix, CVector, C64, ONE};
use crate::oracles::fixtures::{
    counter_det, default_point, example_25, stable_diag, stable_diag_defect, stable_offdiag,
    CounterOmega,
};
use crate::oracles::random::{
    gen_plurimap_with, random_complex, random_contraction, random_invertible, random_mobius,
    random_point, random_poly, split_seed, trial_rng, PROBE_RADIUS,
};
use crate::oracles::{real_jacobian_determinant, wirtinger_diff, RandomInstanceConfig, Wirtinger};
use crate::plurimap::{dilatation_derivative_fd, PluriMap, DBAR_STEP};

/// Finite-difference step for first-derivative oracles.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pre,
    Schwarzian,
    Affine,
    Stability,
    Holo,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Pre,
        Suite::Schwarzian,
        Suite::Affine,
        Suite::Stability,
        Suite::Holo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pre => "pre",
            Suite::Schwarzian => "schwarzian",
            Suite::Affine => "affine",
            Suite::Stability => "stability",
            Suite::Holo => "holo",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// A counterexample produced the nonzero defect it is supposed to.
    ExpectedFailPass,
}

/// How a defect is judged against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Below,
    Exact,
    Above,
    /// A counterexample: the defect must exceed the tolerance.
    Nonzero,
}

impl Expect {
    pub fn judge(self, defect: f64, tolerance: f64) -> Status {
        let ok = match self {
            Expect::Below => defect < tolerance,
            Expect::Exact => defect == 0.0,
            Expect::Above | Expect::Nonzero => defect > tolerance,
        };
        match (ok, self) {
            (false, _) => Status::Fail,
            (true, Expect::Nonzero) => Status::ExpectedFailPass,
            (true, _) => Status::Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    /// `None` for fixed (non-random) cases, which sort first.
    pub trial: Option<usize>,
    pub name: &'static str,
    pub anchor: &'static str,
    pub status: Status,
    pub defect: Option<f64>,
    pub tolerance: f64,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 20,
            dims: vec![1, 2, 3],
        }
    }
}

struct Recorder {
    suite: Suite,
    trial: Option<usize>,
    out: Vec<CheckRecord>,
}

impl Recorder {
    fn check(
        &mut self,
        name: &'static str,
        anchor: &'static str,
        expect: Expect,
        tolerance: f64,
        f: impl FnOnce() -> Result<f64>,
    ) {
        let start = Instant::now();
        let outcome = f();
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let (status, defect, error) = match outcome {
            Ok(d) => (expect.judge(d, tolerance), Some(d), None),
            Err(e) => (Status::Fail, None, Some(e.to_string())),
        };
        self.out.push(CheckRecord {
            suite: self.suite,
            trial: self.trial,
            name,
            anchor,
            status,
            defect,
            tolerance,
            runtime_ms,
            error,
        });
    }
}

/// Runs one suite. Records are sorted by trial (fixed cases first).
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    if cfg.dims.is_empty() {
        return Err(Error::ContractViolation("no dimensions given".into()));
    }
    if let Some(&n) = cfg.dims.iter().find(|&&n| n == 0) {
        return Err(Error::ContractViolation(format!("dimension {n} is not allowed")));
    }
    let suite_seed = split_seed(cfg.seed, suite.salt() << 32);
    let mut rec = Recorder {
        suite,
        trial: None,
        out: Vec::new(),
    };
    match suite {
        Suite::Affine => affine_fixed(&mut rec),
        Suite::Stability => stability_fixed(&mut rec, cfg, suite_seed),
        Suite::Holo => holo_fixed(&mut rec, suite_seed),
        _ => {}
    }
    for t in 0..cfg.trials {
        rec.trial = Some(t);
        let n = cfg.dims[t % cfg.dims.len()];
        let mut rng = trial_rng(suite_seed, t as u64);
        match suite {
            Suite::Pre => pre_trial(&mut rec, &mut rng, n),
            Suite::Schwarzian => schwarzian_trial(&mut rec, &mut rng, n),
            Suite::Affine => affine_trial(&mut rec, &mut rng, n),
            Suite::Stability => stability_trial(&mut rec, &mut rng, n),
            Suite::Holo => holo_trial(&mut rec, &mut rng, n),
        }
    }
    let mut out = rec.out;
    out.sort_by_key(|r| r.trial);
    Ok(out)
}

/// Runs several suites in the given order.
pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let mut all = Vec::new();
    for &s in suites {
        all.extend(run_suite(s, cfg)?);
    }
    all.sort_by_key(|r| (r.suite, r.trial));
    Ok(all)
}

fn instance(rng: &mut impl Rng, n: usize) -> Result<(PluriMap, CVector)> {
    let cfg = RandomInstanceConfig {
        n,
        ..RandomInstanceConfig::default()
    };
    let inst = gen_plurimap_with(rng, &cfg)?;
    Ok((inst.map, inst.point))
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn unimodular() -> [C64; 3] {
    [ONE, C64::new(0.0, 1.0), C64::from_polar(1.0, PI / 5.0)]
}

/// Degree-2 map `phi` with `phi(z) = z`, `D phi(z)` near the identity.
fn chain_map(rng: &mut impl Rng, n: usize, z: &CVector) -> Result<HoloMap> {
    let lin = &CMatrix::identity(n) + &random_contraction(rng, n, 0.3);
    let quad = random_poly(rng, n, 2, 0.2);
    let quad = quad.add(&PolyMap::affine(&CMatrix::zeros(n), &quad.eval(z).scale(-ONE)))?;
    let shift = &lin.mul_vec(z) - z;
    let phi = PolyMap::affine(&lin, &shift.scale(-ONE)).add(&quad)?;
    Ok(HoloMap::Poly(phi))
}

fn pre_trial(rec: &mut Recorder, rng: &mut impl Rng, n: usize) {
    let drawn = instance(rng, n);
    let b = random_invertible(rng, n);
    let (f, z) = match drawn {
        Ok(x) => x,
        Err(e) => {
            rec.check("instance", "Random instance generation", Expect::Below, 0.0, || Err(e));
            return;
        }
    };
    let phi = chain_map(rng, n, &z);

    rec.check(
        "domega-fd",
        "Derivative of the dilatation by the product rule",
        Expect::Below,
        1e-6,
        || {
            let j = f.jet(&z)?;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let fd = dilatation_derivative_fd(&f, &z, k, FD_STEP)?;
                let exact = j.domega.slot_matrix(&CVector::basis(n, k));
                worst = worst.max(rel(fd.max_diff(&exact), exact.max_abs()));
            }
            Ok(worst)
        },
    );
    rec.check(
        "pre-u-inverse-du",
        "Pre-Schwarzian as U^-1 DU",
        Expect::Below,
        1e-6,
        || {
            let p = f.pre_schwarzian(&z)?;
            let u_inv = mat_inverse(&f.u_operator(&z)?)?;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let du: CMatrix =
                    wirtinger_diff(|w| f.u_operator(w), &z, k, Wirtinger::Holo, FD_STEP)?;
                let exact = p.slot_matrix(&CVector::basis(n, k));
                worst = worst.max(rel((&u_inv * &du).max_diff(&exact), exact.max_abs()));
            }
            Ok(worst)
        },
    );
    rec.check(
        "pre-frozen",
        "P_f(z0) equals the pre-Schwarzian of h - conj(w(z0)) g",
        Expect::Below,
        1e-11,
        || {
            let a = f.pre_schwarzian(&z)?;
            Ok(rel(a.max_diff(&f.pre_schwarzian_frozen(&z)?), a.max_abs()))
        },
    );
    rec.check(
        "pre-multiplicative",
        "Multiplicative invariance for P_f",
        Expect::Below,
        1e-10,
        || Ok(f.left_mul(&b).pre_schwarzian(&z)?.max_diff(&f.pre_schwarzian(&z)?)),
    );
    rec.check("pre-chain-rule", "Chain rule for P_f", Expect::Below, 1e-9, || {
        let c = f.chain_rule_check(&phi.clone()?, &z)?;
        Ok(c.p_lhs.max_diff(&c.p_rhs))
    });
    rec.check(
        "jacobian-block-det",
        "Jacobian factorization |det Dh|^2 det(I - w conj(w))",
        Expect::Below,
        1e-9,
        || {
            let j = f.jet(&z)?;
            let jf = j.jacobian();
            Ok(rel((real_jacobian_determinant(&j) - jf).abs(), jf.abs()))
        },
    );
    rec.check(
        "sense-preserving",
        "|w| < 1 implies sense-preserving",
        Expect::Exact,
        0.0,
        || {
            let sb = f.sense_preserving_bound(&z)?;
            Ok(if sb.certified && sb.jacobian > 0.0 { 0.0 } else { 1.0 })
        },
    );
    if n == 1 {
        rec.check(
            "planar-pre-schwarzian",
            "Planar harmonic pre-Schwarzian h''/h' - conj(w) w'/(1 - |w|^2)",
            Expect::Below,
            1e-12,
            || {
                let j = f.jet(&z)?;
                let (h1, h2) = (j.h.d1[(0, 0)], j.h.d2.get(0, 0, 0));
                let (g1, g2) = (j.g.d1[(0, 0)], j.g.d2.get(0, 0, 0));
                let w = g1 / h1;
                let dw = (g2 * h1 - g1 * h2) / (h1 * h1);
                let expected = h2 / h1 - w.conj() * dw / (1.0 - w.norm_sqr());
                let p = j.pre_schwarzian()?.get(0, 0, 0);
                Ok(rel((p - expected).norm(), expected.norm()))
            },
        );
        rec.check(
            "planar-u-operator",
            "Planar U operator (1 - |w|^2) h'",
            Expect::Below,
            1e-12,
            || {
                let j = f.jet(&z)?;
                let h1 = j.h.d1[(0, 0)];
                let w = j.g.d1[(0, 0)] / h1;
                let u = (1.0 - w.norm_sqr()) * h1;
                Ok(rel((j.u_operator()[(0, 0)] - u).norm(), u.norm()))
            },
        );
    }
}

fn schwarzian_trial(rec: &mut Recorder, rng: &mut impl Rng, n: usize) {
    let drawn = instance(rng, n);
    let a = random_contraction(rng, n, 1.0);
    let b = random_invertible(rng, n);
    let mob = random_mobius(rng, n);
    let mob_point = random_point(rng, n, PROBE_RADIUS);
    let (f, z) = match drawn {
        Ok(x) => x,
        Err(e) => {
            rec.check("instance", "Random instance generation", Expect::Below, 0.0, || Err(e));
            return;
        }
    };
    let phi = chain_map(rng, n, &z);

    rec.check("schwarzian-affine", "Affine invariance for S_f", Expect::Below, 1e-10, || {
        Ok(affine_invariance_check(&f, &AffineTwist::new(a.clone())?, &z)?.schwarzian)
    });
    rec.check(
        "schwarzian-multiplicative",
        "Multiplicative invariance for S_f",
        Expect::Below,
        1e-10,
        || Ok(f.left_mul(&b).schwarzian(&z)?.max_diff(&f.schwarzian(&z)?)),
    );
    rec.check(
        "schwarzian-rotation",
        "S_f unchanged when g is rotated by a unimodular scalar",
        Expect::Below,
        1e-10,
        || {
            let s = f.schwarzian(&z)?;
            let mut worst: f64 = 0.0;
            for lam in unimodular() {
                let twisted = f.stable_twist(&CMatrix::identity(n).scale(lam));
                worst = worst.max(twisted.schwarzian(&z)?.max_diff(&s));
            }
            Ok(worst)
        },
    );
    rec.check(
        "schwarzian-frozen",
        "S_f(z0) equals the Schwarzian of h - conj(w(z0)) g",
        Expect::Below,
        1e-10,
        || {
            let j = f.jet(&z)?;
            let s = j.schwarzian()?;
            Ok(s.max_diff(&schwarzian_holo(&j.frozen_jet()?)?))
        },
    );
    rec.check(
        "schwarzian-gradient-form",
        "S_f through the gradient of log det(I - w conj(w))",
        Expect::Below,
        1e-6,
        || {
            let s = f.schwarzian(&z)?;
            Ok(rel(s.max_diff(&f.schwarzian_gradient_form(&z, FD_STEP)?), s.max_abs()))
        },
    );
    rec.check("schwarzian-chain-rule", "Chain rule for S_f", Expect::Below, 1e-9, || {
        let c = f.chain_rule_check(&phi.clone()?, &z)?;
        Ok(c.s_lhs.max_diff(&c.s_rhs))
    });

    let h = f.h().clone();
    rec.check("oda-symmetry", "Oda components S^k_ij = S^k_ji", Expect::Exact, 0.0, || {
        let s = h.oda_components(&z)?;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((s.get(k, i, j) - s.get(k, j, i)).norm());
                }
            }
        }
        Ok(worst)
    });
    rec.check("oda-trace", "Oda trace identity sum_j S^j_ij = 0", Expect::Below, 1e-11, || {
        let s = h.oda_components(&z)?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let t: C64 = (0..n).map(|j| s.get(j, i, j)).sum();
            worst = worst.max(t.norm());
        }
        Ok(worst)
    });
    rec.check(
        "oda-operator",
        "Oda components assemble the Schwarzian operator",
        Expect::Below,
        1e-11,
        || {
            let oda = h.oda_components(&z)?.to_bilinear();
            let op = h.schwarzian(&z)?;
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let (ei, ej) = (CVector::basis(n, i), CVector::basis(n, j));
                    worst = worst.max((&oda.apply(&ei, &ej)? - &op.apply(&ei, &ej)?).max_abs());
                }
            }
            Ok(worst)
        },
    );
    rec.check(
        "mobius-oda-vanish",
        "Oda components vanish for Moebius maps",
        Expect::Below,
        1e-10,
        || Ok(HoloMap::Mobius(mob.clone()).oda_components(&mob_point)?.max_abs()),
    );
    // subtract the linear part of g at z so that w(z) = 0
    let flat = f.g().jet(&z).and_then(|j| {
        let lin = PolyMap::affine(&j.d1.scale(-ONE), &j.d1.mul_vec(&z));
        let g0 = f.g().plus_mul(&CMatrix::identity(n), &HoloMap::Poly(lin));
        PluriMap::new(h.clone(), g0)
    });
    rec.check(
        "analytic-zeroth-order",
        "S_f = Sh where w vanishes",
        Expect::Below,
        1e-10,
        || Ok(flat.clone()?.schwarzian(&z)?.max_diff(&h.schwarzian(&z)?)),
    );
    rec.check(
        "analytic-first-order",
        "DS_f = DSh where w vanishes",
        Expect::Below,
        1e-5,
        || {
            let f0 = flat.clone()?;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let ds: BilinearOp =
                    wirtinger_diff(|w| f0.schwarzian(w), &z, k, Wirtinger::Holo, FD_STEP)?;
                let dsh: BilinearOp =
                    wirtinger_diff(|w| h.schwarzian(w), &z, k, Wirtinger::Holo, FD_STEP)?;
                worst = worst.max(rel(ds.max_diff(&dsh), dsh.max_abs()));
            }
            Ok(worst)
        },
    );
}

fn affine_fixed(rec: &mut Recorder) {
    rec.check(
        "counter-det-singular",
        "I + A w singular although det(I - w conj(w)) > 0",
        Expect::Exact,
        0.0,
        || {
            for t in [0.1, 0.5, 0.9] {
                let (map, a) = counter_det(t);
                let j = map.jet(&CVector::from_real(&[0.1, 0.2]))?;
                match affine_transform(&j, &AffineTwist::new(a)?) {
                    Err(Error::SingularTwistedDerivative) => {}
                    Err(e) => return Err(e),
                    Ok(_) => {
                        return Err(Error::ContractViolation(format!(
                            "twisted derivative invertible at t = {t}"
                        )))
                    }
                }
            }
            Ok(0.0)
        },
    );
    rec.check(
        "counter-omega-det",
        "det(I - w_F conj(w_F)) > 0 although |w_F| > 1",
        Expect::Exact,
        0.0,
        || {
            let s = CounterOmega::new(0.5, 2)?;
            let mut bad = 0.0;
            let mut exceeded = false;
            for k in 0..64 {
                let z = C64::from_polar(0.99, 2.0 * PI * k as f64 / 64.0);
                let fc = factorization_check(&s.omega(z), &s.twist())?;
                let wf = dilatation_affine(&s.omega(z), &s.twist())?;
                exceeded |= op_norm_linear(&wf) > 1.0;
                if fc.det <= 0.0 {
                    bad += 1.0;
                }
            }
            if !exceeded {
                return Err(Error::ContractViolation("|w_F| never exceeded 1".into()));
            }
            Ok(bad)
        },
    );
}

fn affine_trial(rec: &mut Recorder, rng: &mut impl Rng, n: usize) {
    let w = random_contraction(rng, n, 1.0);
    let a = random_contraction(rng, n, 1.0);
    let drawn = instance(rng, n);
    let twist = random_contraction(rng, n, 1.0);

    rec.check(
        "factorization",
        "Determinant factorization of I - w_F conj(w_F)",
        Expect::Below,
        1e-12,
        || {
            let fc = factorization_check(&w, &a)?;
            Ok(if fc.det > 0.0 { fc.residual } else { f64::INFINITY })
        },
    );
    rec.check(
        "dilatation-round-trip",
        "Dilatation recovered from w_F",
        Expect::Below,
        1e-12,
        || Ok(dilatation_recover(&dilatation_affine(&w, &a)?, &a)?.max_diff(&w)),
    );
    let (f, z) = match drawn {
        Ok(x) => x,
        Err(e) => {
            rec.check("instance", "Random instance generation", Expect::Below, 0.0, || Err(e));
            return;
        }
    };
    rec.check("affine-invariance-pre", "Affine invariance for P_f", Expect::Below, 1e-10, || {
        Ok(affine_invariance_check(&f, &AffineTwist::new(twist.clone())?, &z)?.pre_schwarzian)
    });
    rec.check(
        "twisted-derivative",
        "DH = (I + A w) Dh",
        Expect::Below,
        1e-12,
        || {
            let j = f.jet(&z)?;
            let t = affine_transform(&j, &AffineTwist::new(twist.clone())?)?;
            let expected = &(&CMatrix::identity(n) + &(&twist * &j.omega)) * &j.h.d1;
            Ok(rel(t.h.d1.max_diff(&expected), expected.max_abs()))
        },
    );
    rec.check(
        "best-affine",
        "Best affine approximation: P_f(a) = D^2 H_a(0)",
        Expect::Below,
        1e-10,
        || {
            let b = best_affine_deviation(&f, &z)?;
            let p = f.pre_schwarzian(&z)?;
            Ok(b.p_check
                .max_diff(&p)
                .max(b.h_a_jet.d1.max_diff(&CMatrix::identity(n))))
        },
    );
}

fn stability_fixed(rec: &mut Recorder, cfg: &VerifyConfig, seed: u64) {
    let mut dims: Vec<usize> = cfg.dims.iter().copied().filter(|&n| n >= 2).collect();
    dims.sort_unstable();
    dims.dedup();
    if dims.is_empty() {
        dims.push(2);
    }
    for n in dims {
        let z = default_point(n);
        rec.check(
            "offdiag-counterexample",
            "Non-scalar unitary twist changes P_f",
            Expect::Nonzero,
            1e-3,
            || {
                let (f, a) = stable_offdiag(n, 0, n - 1, PI / 4.0)?;
                let j = f.jet(&z)?;
                let d = stability_defect(&j.omega, &j.domega, &a)?.max_abs();
                let p_gap = f.stable_twist(&a).pre_schwarzian(&z)?.max_diff(&j.pre_schwarzian()?);
                Ok(d.min(p_gap))
            },
        );
        rec.check(
            "diag-closed-form",
            "Closed-form stability defect for a diagonal twist",
            Expect::Below,
            1e-12,
            || {
                let (li, lj) = (C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, -PI / 4.0));
                let (f, a) = stable_diag(n, 0, n - 1, li, lj)?;
                let mut rng = trial_rng(seed, u64::MAX - n as u64);
                let mut worst: f64 = 0.0;
                for _ in 0..20 {
                    let z = CVector::new((0..n).map(|_| random_complex(&mut rng, 0.9)).collect())?;
                    let u = CVector::new((0..n).map(|_| random_complex(&mut rng, 1.0)).collect())?;
                    let j = f.jet(&z)?;
                    let d = stability_defect(&j.omega, &j.domega, &a)?.slot_matrix(&u);
                    worst = worst.max(d.max_diff(&stable_diag_defect(&z, &u, 0, n - 1, li, lj)));
                }
                Ok(worst)
            },
        );
    }
}

fn stability_trial(rec: &mut Recorder, rng: &mut impl Rng, n: usize) {
    let (f, z) = match instance(rng, n) {
        Ok(x) => x,
        Err(e) => {
            rec.check("instance", "Random instance generation", Expect::Below, 0.0, || Err(e));
            return;
        }
    };
    rec.check(
        "rotation-pre",
        "Stability of P_f under unimodular scalars",
        Expect::Below,
        1e-11,
        || {
            let p = f.pre_schwarzian(&z)?;
            let mut worst: f64 = 0.0;
            for lam in unimodular() {
                let twisted = f.stable_twist(&CMatrix::identity(n).scale(lam));
                worst = worst.max(twisted.pre_schwarzian(&z)?.max_diff(&p));
            }
            Ok(worst)
        },
    );
    rec.check(
        "rotation-defect",
        "Stability defect vanishes for lambda I",
        Expect::Below,
        1e-12,
        || {
            let j = f.jet(&z)?;
            let mut worst: f64 = 0.0;
            for lam in unimodular() {
                let a = CMatrix::identity(n).scale(lam);
                worst = worst.max(stability_defect(&j.omega, &j.domega, &a)?.max_abs());
            }
            Ok(worst)
        },
    );
}

fn example_25_phis() -> [Vec<(u32, C64)>; 3] {
    [
        vec![(2, ONE)],
        vec![(3, C64::new(0.5, 0.0)), (2, C64::new(0.0, 1.0))],
        vec![(4, C64::new(0.2, 0.1)), (1, C64::new(0.3, 0.0))],
    ]
}

fn holo_fixed(rec: &mut Recorder, seed: u64) {
    let z = default_point(2);
    for phi in example_25_phis() {
        rec.check(
            "example-2.5-zero",
            "Vanishing pre-Schwarzian for h = id, g = (0, phi(z_1))",
            Expect::Below,
            1e-13,
            || Ok(example_25(&phi)?.pre_schwarzian(&z)?.max_abs()),
        );
        rec.check(
            "example-2.5-dbar",
            "P_f is holomorphic when w conj(w) = 0",
            Expect::Below,
            1e-6,
            || example_25(&phi)?.dbar_pre_schwarzian_norm(&z, DBAR_STEP),
        );
        rec.check(
            "example-2.5-nilpotent",
            "w conj(w) vanishes identically",
            Expect::Below,
            1e-12,
            || {
                let f = example_25(&phi)?;
                let mut rng = trial_rng(seed, u64::MAX);
                let mut worst: f64 = 0.0;
                for _ in 0..32 {
                    let w = f.jet(&random_point(&mut rng, 2, 0.9))?.omega;
                    worst = worst.max((&w * &w.conj()).max_abs());
                }
                Ok(worst)
            },
        );
    }
    rec.check(
        "twisted-dbar",
        "P_f is not holomorphic after a non-scalar unitary twist",
        Expect::Nonzero,
        1e-3,
        || {
            let (f, a) = stable_diag(
                2,
                0,
                1,
                C64::from_polar(1.0, PI / 3.0),
                C64::from_polar(1.0, -PI / 4.0),
            )?;
            f.stable_twist(&a).dbar_pre_schwarzian_norm(&z, DBAR_STEP)
        },
    );
}

fn holo_trial(rec: &mut Recorder, rng: &mut impl Rng, n: usize) {
    let h = random_poly(rng, n, 3, 0.3)
        .add(&PolyMap::identity(n))
        .map(HoloMap::Poly);
    let z = random_point(rng, n, 0.3);
    rec.check(
        "holomorphic-dbar",
        "P_f = Ph is holomorphic when g = 0",
        Expect::Below,
        1e-8,
        || PluriMap::holomorphic(h.clone()?).dbar_pre_schwarzian_norm(&z, DBAR_STEP),
    );
    rec.check(
        "holomorphic-reduction",
        "P_f reduces to Ph when g = 0",
        Expect::Below,
        1e-14,
        || {
            let h = h.clone()?;
            let ph = pre_schwarzian_holo(&h.jet(&z)?)?;
            let f = PluriMap::holomorphic(h);
            Ok(rel(f.pre_schwarzian(&z)?.max_diff(&ph), ph.max_abs()))
        },
    );
}
