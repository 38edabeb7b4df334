use plurischwarz::mapfile;
use plurischwarz::oracles::{fixture, gen_plurimap, Fixture, RandomInstanceConfig};

use super::{check_dim, parse_params, MAX_DEGREE};
use crate::report::{format_point, CliError, CliResult};

const FIXTURE_KEYS: &[&str] = &["phi", "t", "n", "alpha", "i", "j", "theta", "theta_i", "theta_j", "eps"];

/// Map file text, and the evaluation point that goes with it.
pub fn gen(
    name: Option<&str>,
    params: &[String],
    seed: u64,
    n: usize,
    degree: u32,
) -> CliResult<(String, String)> {
    match name {
        Some(name) => {
            let params = parse_params(params, FIXTURE_KEYS)?;
            match fixture(name, &params)? {
                Fixture::Map(f) => Ok((mapfile::to_json(&f.map)?, format_point(&f.point))),
                _ => Err(CliError::Parse(format!(
                    "--fixture {name}: not a pluriharmonic map; use `reproduce` instead"
                ))),
            }
        }
        None => {
            if !params.is_empty() {
                return Err(CliError::Parse("--param needs --fixture".into()));
            }
            check_dim(n, "--n")?;
            if degree > MAX_DEGREE {
                return Err(CliError::Parse(format!("--degree: {degree} exceeds {MAX_DEGREE}")));
            }
            let inst = gen_plurimap(&RandomInstanceConfig {
                seed,
                n,
                degree,
                ..RandomInstanceConfig::default()
            })?;
            Ok((mapfile::to_json(&inst.map)?, format_point(&inst.point)))
        }
    }
}
