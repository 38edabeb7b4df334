use serde::Serialize;
use serde_json::{json, Value};

use plurischwarz::verify::{CheckRecord, Status};
use plurischwarz::{BilinearOp, CMatrix, CVector, Error, C64};

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Numerical(Error::SingularDerivative(_)) => "singular-derivative",
            CliError::Numerical(Error::DegenerateDilatation(_)) => "degenerate-dilatation",
            CliError::Numerical(Error::SingularTwistedDerivative) => "singular-twisted-derivative",
            CliError::Numerical(Error::PoleAtPoint(_)) => "pole-at-point",
            CliError::Numerical(_) => "numerical",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Parse(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// One line of a report. Verification records carry `suite` and `trial`;
/// reproduction records carry `claimed` and `computed`.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<Value>,
    pub defect: Option<f64>,
    pub tolerance: f64,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<CheckRecord> for Record {
    fn from(r: CheckRecord) -> Self {
        Record {
            name: r.name.to_string(),
            suite: Some(r.suite.name()),
            trial: r.trial,
            anchor: r.anchor.to_string(),
            status: r.status,
            claimed: None,
            computed: None,
            defect: r.defect,
            tolerance: r.tolerance,
            runtime_ms: r.runtime_ms,
            error: r.error,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: Vec<String>, seed: Option<u64>) -> Self {
        Report {
            command,
            seed,
            result: None,
            records: Vec::new(),
            summary: Summary {
                passed: 0,
                failed: 0,
            },
        }
    }

    pub fn push(&mut self, r: Record) {
        if r.status == Status::Fail {
            self.summary.failed += 1;
        } else {
            self.summary.passed += 1;
        }
        self.records.push(r);
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn strip_timing(&mut self) {
        for r in &mut self.records {
            r.runtime_ms = 0.0;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array(
        m.rows()
            .map(|r| Value::Array(r.iter().map(|&z| complex(z)).collect()))
            .collect(),
    )
}

/// `coefficients[k][i][j]` is component `k` of `T<e_i, e_j>`.
pub fn bilinear(t: &BilinearOp) -> Value {
    let n = t.dim();
    let coefficients: Vec<Value> = (0..n)
        .map(|k| {
            Value::Array(
                (0..n)
                    .map(|i| Value::Array((0..n).map(|j| complex(t.get(k, i, j))).collect()))
                    .collect(),
            )
        })
        .collect();
    json!({
        "coefficients": coefficients,
        "symmetric": t.is_symmetric(plurischwarz::lincomplex::SYMMETRY_TOL),
    })
}

/// Parses `"re,im;re,im;..."`.
pub fn parse_point(text: &str) -> CliResult<CVector> {
    let coords = text
        .split(';')
        .enumerate()
        .map(|(idx, part)| {
            let bad = || CliError::Parse(format!("--point coordinate {idx}: expected `re,im`, got `{part}`"));
            let (re, im) = part.split_once(',').ok_or_else(bad)?;
            let re: f64 = re.trim().parse().map_err(|_| bad())?;
            let im: f64 = im.trim().parse().map_err(|_| bad())?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(bad());
            }
            Ok(C64::new(re, im))
        })
        .collect::<CliResult<Vec<_>>>()?;
    CVector::new(coords).map_err(|e| CliError::Parse(format!("--point: {e}")))
}

pub fn format_point(z: &CVector) -> String {
    z.iter()
        .map(|c| format!("{},{}", c.re, c.im))
        .collect::<Vec<_>>()
        .join(";")
}
