use plurischwarz::verify::{run_suites, Suite, VerifyConfig};

use super::check_dim;
use crate::report::{CliError, CliResult, Report};
use crate::SuiteArg;

pub fn verify(
    echo: Vec<String>,
    suite: SuiteArg,
    trials: usize,
    seed: u64,
    dims: Vec<usize>,
) -> CliResult<Report> {
    if dims.is_empty() {
        return Err(CliError::Parse("--n: no dimensions given".into()));
    }
    for &n in &dims {
        check_dim(n, "--n")?;
    }
    let suites: Vec<Suite> = match suite {
        SuiteArg::Pre => vec![Suite::Pre],
        SuiteArg::Schwarzian => vec![Suite::Schwarzian],
        SuiteArg::Affine => vec![Suite::Affine],
        SuiteArg::Stability => vec![Suite::Stability],
        SuiteArg::Holo => vec![Suite::Holo],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let cfg = VerifyConfig { seed, trials, dims };
    let mut report = Report::new(echo, Some(seed));
    for r in run_suites(&suites, &cfg)? {
        report.push(r.into());
    }
    Ok(report)
}
