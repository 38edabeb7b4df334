use std::f64::consts::PI;
use std::time::Instant;

use serde_json::{json, Value};

use plurischwarz::affine::{
    affine_transform, dilatation_affine, factorization_check, stability_defect, sup_twisted_norm,
    AffineTwist,
};
use plurischwarz::lincomplex::{op_norm_linear, ZERO};
use plurischwarz::oracles::fixtures::{default_point, stable_diag, stable_diag_defect, stable_offdiag};
use plurischwarz::oracles::random::{random_complex, trial_rng};
use plurischwarz::oracles::{fixture, shear_demo, Fixture, FixtureParams};
use plurischwarz::plurimap::DBAR_STEP;
use plurischwarz::verify::{Expect, Status};
use plurischwarz::{CMatrix, CVector, Error, Result, C64};

use super::parse_params;
use crate::report::{matrix, CliResult, Record, Report};
use crate::Example;

struct Claims {
    records: Vec<Record>,
}

impl Claims {
    /// `f` returns the computed value and the defect against the claim.
    fn claim(
        &mut self,
        name: &str,
        anchor: &str,
        claimed: Value,
        expect: Expect,
        tolerance: f64,
        f: impl FnOnce() -> Result<(Value, f64)>,
    ) {
        let start = Instant::now();
        let outcome = f();
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let (status, computed, defect, error) = match outcome {
            Ok((v, d)) => (expect.judge(d, tolerance), Some(v), Some(d), None),
            Err(e) => (Status::Fail, None, None, Some(e.to_string())),
        };
        self.records.push(Record {
            name: name.to_string(),
            suite: None,
            trial: None,
            anchor: anchor.to_string(),
            status,
            claimed: Some(claimed),
            computed,
            defect,
            tolerance,
            runtime_ms,
            error,
        });
    }
}

fn allowed(example: Example) -> &'static [&'static str] {
    match example {
        Example::E25 => &["phi"],
        Example::E41 => &["t", "n"],
        Example::CounterOmega => &["alpha", "n"],
        Example::CounterDet => &["t"],
        Example::Stable => &["n", "i", "j", "theta", "theta_i", "theta_j"],
        Example::Shear => &["eps"],
    }
}

fn map_fixture(name: &str, params: &FixtureParams) -> Result<plurischwarz::oracles::fixtures::MapFixture> {
    match fixture(name, params)? {
        Fixture::Map(m) => Ok(m),
        _ => unreachable!("{name} is a map fixture"),
    }
}

pub fn reproduce(echo: Vec<String>, example: Example, pairs: &[String]) -> CliResult<Report> {
    let params = parse_params(pairs, allowed(example))?;
    let mut c = Claims {
        records: Vec::new(),
    };
    match example {
        Example::E25 => example_25(&mut c, &params)?,
        Example::E41 => example_41(&mut c, &params)?,
        Example::CounterOmega => counter_omega(&mut c, &params)?,
        Example::CounterDet => counter_det(&mut c, &params)?,
        Example::Stable => stable(&mut c, &params)?,
        Example::Shear => shear(&mut c, &params)?,
    }
    print_table(&c.records);
    let mut report = Report::new(echo, None);
    for r in c.records {
        report.push(r);
    }
    Ok(report)
}

fn example_25(c: &mut Claims, params: &FixtureParams) -> Result<()> {
    let fx = map_fixture("example-2.5", params)?;
    let k = params.get("phi", 2.0);
    let (f, z) = (fx.map, fx.point);
    let anchor = "Vanishing pre-Schwarzian for h = id, g = (0, phi(z_1))";
    c.claim("dilatation", anchor, json!("phi'(z_1) E_21"), Expect::Below, 1e-14, || {
        let w = f.jet(&z)?.omega;
        let dphi = C64::new(k, 0.0) * z[0].powf(k - 1.0);
        let expected = CMatrix::from_fn(2, |i, j| if (i, j) == (1, 0) { dphi } else { ZERO });
        Ok((matrix(&w), w.max_diff(&expected)))
    });
    c.claim("u-operator", anchor, json!("I_2"), Expect::Below, 1e-15, || {
        let u = f.u_operator(&z)?;
        Ok((matrix(&u), u.max_diff(&CMatrix::identity(2))))
    });
    c.claim("pre-schwarzian", anchor, json!(0.0), Expect::Below, 1e-13, || {
        let d = f.pre_schwarzian(&z)?.max_abs();
        Ok((json!(d), d))
    });
    c.claim(
        "dbar-pre-schwarzian",
        "P_f is holomorphic when w conj(w) = 0",
        json!(0.0),
        Expect::Below,
        1e-6,
        || {
            let d = f.dbar_pre_schwarzian_norm(&z, DBAR_STEP)?;
            Ok((json!(d), d))
        },
    );
    Ok(())
}

fn example_41(c: &mut Claims, params: &FixtureParams) -> Result<()> {
    let fx = map_fixture("example-4.1", params)?;
    let t = params.get("t", 2.0);
    let (f, z) = (fx.map, fx.point);
    let anchor = "Sense-preserving maps with dilatation of arbitrary norm";
    c.claim("dilatation-norm", anchor, json!(t), Expect::Exact, 0.0, || {
        let norm = op_norm_linear(&f.jet(&z)?.omega);
        Ok((json!(norm), (norm - t).abs()))
    });
    let factor = (1.0 + t) * (1.0 + t);
    c.claim("det-factor", anchor, json!(factor), Expect::Exact, 0.0, || {
        let j = f.jet(&z)?;
        let d = (&CMatrix::identity(j.dim()) - &(&j.omega * &j.omega.conj())).det();
        Ok((json!([d.re, d.im]), (d - factor).norm()))
    });
    c.claim("jacobian", anchor, json!("|det Dh|^2 (1 + t)^2"), Expect::Below, 1e-12, || {
        let j = f.jet(&z)?;
        let expected = j.h.d1.det().norm_sqr() * factor;
        let jf = j.jacobian();
        Ok((json!(jf), (jf - expected).abs() / expected))
    });
    c.claim(
        "sense-preserving",
        "|w| < 1 is sufficient but not necessary",
        json!({"certified": t < 1.0, "jacobian_positive": true}),
        Expect::Exact,
        0.0,
        || {
            let sb = f.sense_preserving_bound(&z)?;
            let ok = sb.certified == (t < 1.0) && sb.jacobian > 0.0;
            Ok((
                json!({"certified": sb.certified, "jacobian_positive": sb.jacobian > 0.0}),
                if ok { 0.0 } else { 1.0 },
            ))
        },
    );
    Ok(())
}

fn counter_omega(c: &mut Claims, params: &FixtureParams) -> Result<()> {
    let Fixture::CounterOmega(s) = fixture("counter-omega", params)? else {
        unreachable!("counter-omega is a scenario fixture")
    };
    let anchor = "|w| < 1 does not imply |w_F| < 1";
    let closed = s.closed_form_sup();
    c.claim("sup-norm", anchor, json!(closed), Expect::Below, 1e-3, || {
        let est = sup_twisted_norm(&s, 100, 100)?;
        Ok((
            json!({"grid_max": est.grid_max, "refined": est.refined,
                   "argmax": [est.argmax.re, est.argmax.im], "grid_points": est.grid_points}),
            (est.refined - closed).abs(),
        ))
    });
    c.claim("exceeds-one", anchor, json!("sup > 1"), Expect::Above, 1.0, || {
        let est = sup_twisted_norm(&s, 100, 100)?;
        Ok((json!(est.refined), est.refined))
    });
    c.claim(
        "det-positive",
        "det(I - w_F conj(w_F)) > 0 whenever |w| < 1 and |A| < 1",
        json!("det > 0 on the disk of radius 0.99"),
        Expect::Exact,
        0.0,
        || {
            let mut min_det = f64::INFINITY;
            let mut bad = 0.0;
            for ir in 1..=20 {
                for it in 0..64 {
                    let z = C64::from_polar(0.99 * ir as f64 / 20.0, 2.0 * PI * it as f64 / 64.0);
                    let fc = factorization_check(&s.omega(z), &s.twist())?;
                    min_det = min_det.min(fc.det);
                    if !fc.holds(1e-12) {
                        bad += 1.0;
                    }
                }
            }
            Ok((json!({"min_det": min_det}), bad))
        },
    );
    Ok(())
}

fn counter_det(c: &mut Claims, params: &FixtureParams) -> Result<()> {
    let fx = map_fixture("counter-det", params)?;
    let t = params.get("t", 0.5);
    let (f, z) = (fx.map, fx.point);
    let a = fx.twist.expect("counter-det carries its twist");
    let anchor = "det(I - w conj(w)) > 0 does not make f + A conj(f) a map of the class";
    let expected = (1.0 + 1.0 / (t * t)).powi(2);
    c.claim("det-positive", anchor, json!(expected), Expect::Below, 1e-12, || {
        let j = f.jet(&z)?;
        let d = (&CMatrix::identity(2) - &(&j.omega * &j.omega.conj())).det();
        Ok((json!([d.re, d.im]), (d - expected).norm() / expected))
    });
    c.claim(
        "singular-twist",
        anchor,
        json!("I + A w singular"),
        Expect::Exact,
        0.0,
        || {
            let j = f.jet(&z)?;
            let twist = AffineTwist::new(a.clone())?;
            match (affine_transform(&j, &twist), dilatation_affine(&j.omega, &a)) {
                (Err(Error::SingularTwistedDerivative), Err(Error::SingularTwistedDerivative)) => {
                    Ok((json!("SingularTwistedDerivative"), 0.0))
                }
                (Err(e), _) | (_, Err(e)) => Err(e),
                _ => Ok((json!("invertible"), 1.0)),
            }
        },
    );
    Ok(())
}

fn stable(c: &mut Claims, params: &FixtureParams) -> Result<()> {
    // validates n, i, j the same way the fixtures do
    let off = map_fixture("stable-offdiag", params)?;
    map_fixture("stable-diag", params)?;
    let n = params.get("n", 2.0) as usize;
    let (i, j) = (params.get("i", 1.0) as usize - 1, params.get("j", 2.0) as usize - 1);
    let z = default_point(n);
    c.claim(
        "rotation-defect",
        "Stability defect vanishes for lambda I",
        json!(0.0),
        Expect::Below,
        1e-12,
        || {
            let jet = off.map.jet(&z)?;
            let mut worst: f64 = 0.0;
            for lam in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::from_polar(1.0, PI / 5.0)] {
                let a = CMatrix::identity(n).scale(lam);
                worst = worst.max(stability_defect(&jet.omega, &jet.domega, &a)?.max_abs());
            }
            Ok((json!(worst), worst))
        },
    );
    c.claim(
        "offdiag-defect",
        "Non-scalar unitary twist changes P_f",
        json!("nonzero"),
        Expect::Nonzero,
        1e-3,
        || {
            let theta = params.get("theta", PI / 4.0);
            let (f, a) = stable_offdiag(n, i, j, theta)?;
            let jet = f.jet(&z)?;
            let d = stability_defect(&jet.omega, &jet.domega, &a)?.max_abs();
            let gap = f.stable_twist(&a).pre_schwarzian(&z)?.max_diff(&jet.pre_schwarzian()?);
            Ok((json!({"defect": d, "pre_schwarzian_change": gap}), d.min(gap)))
        },
    );
    c.claim(
        "diag-closed-form",
        "Closed-form stability defect for a diagonal twist",
        json!("(l_i conj(l_j) - 1) u_i conj(z_j) / (1 - z_i conj(z_j)) at (i, i)"),
        Expect::Below,
        1e-12,
        || {
            let li = C64::from_polar(1.0, params.get("theta_i", PI / 3.0));
            let lj = C64::from_polar(1.0, params.get("theta_j", -PI / 4.0));
            let (f, a) = stable_diag(n, i, j, li, lj)?;
            let mut rng = trial_rng(0, 0);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let z = CVector::new((0..n).map(|_| random_complex(&mut rng, 0.9)).collect())?;
                let u = CVector::new((0..n).map(|_| random_complex(&mut rng, 1.0)).collect())?;
                let jet = f.jet(&z)?;
                let d = stability_defect(&jet.omega, &jet.domega, &a)?.slot_matrix(&u);
                let expected = stable_diag_defect(&z, &u, i, j, li, lj);
                worst = worst.max(d.max_diff(&expected));
            }
            Ok((json!({"points": 20, "max_gap": worst}), worst))
        },
    );
    Ok(())
}

fn shear(c: &mut Claims, params: &FixtureParams) -> Result<()> {
    let Fixture::Shear(q) = fixture("shear", params)? else {
        unreachable!("shear is a real-map fixture")
    };
    let demo = shear_demo(q.eps);
    let anchor = "Locally injective harmonic-type map that is not injective";
    let (a, b, v) = demo.collision;
    c.claim("collision", anchor, json!([-1.0, 0.0, 0.0, 0.0]), Expect::Below, 1e-15, || {
        let d = (v[0] + 1.0).abs().max(v[1].abs()).max(v[2].abs()).max(v[3].abs());
        Ok((json!({"from": [a, b], "image": v}), d))
    });
    c.claim("jacobian-origin", anchor, json!(1.0), Expect::Exact, 0.0, || {
        Ok((json!(demo.jacobian_at_origin), (demo.jacobian_at_origin - 1.0).abs()))
    });
    c.claim("jacobian-fd", anchor, json!("e^(2 x_1)"), Expect::Below, 1e-6, || {
        Ok((json!({"grid_points": demo.grid_points}), demo.grid_max_fd_error))
    });
    c.claim("jacobian-positive", anchor, json!("J > 0"), Expect::Above, 0.0, || {
        Ok((json!({"min_jacobian": demo.grid_min_jacobian}), demo.grid_min_jacobian))
    });
    Ok(())
}

fn print_table(records: &[Record]) {
    eprintln!("{:<22} {:<10} {:>14} {:>10}  claimed / computed", "claim", "status", "defect", "tol");
    for r in records {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::ExpectedFailPass => "expected",
        };
        let defect = r.defect.map_or("-".to_string(), |d| format!("{d:.3e}"));
        eprintln!(
            "{:<22} {:<10} {:>14} {:>10.1e}  {} / {}",
            r.name,
            status,
            defect,
            r.tolerance,
            r.claimed.as_ref().map_or(String::new(), Value::to_string),
            r.computed
                .as_ref()
                .map_or_else(|| r.error.clone().unwrap_or_default(), Value::to_string),
        );
    }
}
