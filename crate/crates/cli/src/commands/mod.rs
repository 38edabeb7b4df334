mod eval;
mod gen;
mod reproduce;
mod verify;

pub use eval::eval;
pub use gen::gen;
pub use reproduce::reproduce;
pub use verify::verify;

use plurischwarz::oracles::FixtureParams;

use crate::report::{CliError, CliResult};

/// Largest dimension and polynomial degree accepted on the command line.
pub const MAX_DIM: usize = 6;
pub const MAX_DEGREE: u32 = 10;

pub fn check_dim(n: usize, flag: &str) -> CliResult<()> {
    if n == 0 || n > MAX_DIM {
        return Err(CliError::Parse(format!("{flag}: dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

/// Parses `key=value` pairs, rejecting keys outside `allowed`.
pub fn parse_params(pairs: &[String], allowed: &[&str]) -> CliResult<FixtureParams> {
    let mut params = FixtureParams::new();
    for p in pairs {
        params.parse_pair(p)?;
        let key = p.split_once('=').map_or(p.as_str(), |(k, _)| k.trim());
        if !allowed.contains(&key) {
            return Err(CliError::Parse(format!(
                "--param {key}: unknown parameter (expected one of: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(params)
}
