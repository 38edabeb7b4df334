use std::path::Path;

use serde_json::json;

use plurischwarz::holomap::oda_components;
use plurischwarz::lincomplex::{op_norm_bilinear, op_norm_linear, DEFAULT_RESTARTS};
use plurischwarz::{mapfile, Error};

use crate::report::{bilinear, matrix, parse_point, vector, CliError, CliResult, Report};
use crate::What;

pub fn eval(echo: Vec<String>, path: &Path, point: &str, what: What) -> CliResult<Report> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let map = mapfile::from_json(&text)?;
    let z = parse_point(point)?;
    if z.dim() != map.dim() {
        return Err(CliError::Parse(format!(
            "--point: {} coordinates but the map has n = {}",
            z.dim(),
            map.dim()
        )));
    }
    let jet = map.jet(&z)?;
    let value = match what {
        What::Omega => matrix(&jet.omega),
        What::Jacobian => json!(jet.jacobian()),
        What::Preschwarzian => bilinear(&jet.pre_schwarzian()?),
        What::Schwarzian => bilinear(&jet.schwarzian()?),
        What::Oda => {
            // components of the holomorphic map h - conj(w(z)) g, which
            // carries S_f at z
            jet.pre_schwarzian()?;
            bilinear(&oda_components(&jet.frozen_jet()?)?.to_bilinear())
        }
        What::NormBall => {
            let r2 = z.norm().powi(2);
            if r2 >= 1.0 {
                return Err(CliError::Numerical(Error::ContractViolation(format!(
                    "norm-ball needs |z| < 1, got |z| = {}",
                    z.norm()
                ))));
            }
            let p = jet.pre_schwarzian()?;
            let norm = op_norm_bilinear(&p, DEFAULT_RESTARTS);
            json!({
                "weighted_norm": (1.0 - r2) * norm,
                "operator_norm": norm,
                "dilatation_norm": op_norm_linear(&jet.omega),
                "estimate": "lower bound by alternating maximization",
            })
        }
    };
    let mut report = Report::new(echo, None);
    report.result = Some(json!({
        "what": what_name(what),
        "n": map.dim(),
        "point": vector(&z),
        "value": value,
    }));
    Ok(report)
}

fn what_name(w: What) -> &'static str {
    match w {
        What::Omega => "omega",
        What::Jacobian => "jacobian",
        What::Preschwarzian => "preschwarzian",
        What::Schwarzian => "schwarzian",
        What::Oda => "oda",
        What::NormBall => "norm-ball",
    }
}
