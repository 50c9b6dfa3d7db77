//! Scenario files.
//!
//! ```toml
//! name = "four-step"
//! task = "flow"            # solve | flow | attainment | threshold | counterexample | suite
//! phi = [-1.0, 1.0]
//! lambda = 0.25            # solve, attainment, counterexample; optional for threshold
//!
//! [f]
//! length = 2.0
//! breakpoints = [0.5, 1.0, 1.5]
//! values = [0.0, -4.0, 4.0, 0.0]
//!
//! [options]
//! rational = false         # exact arithmetic for the flow
//! oracle = false           # cross-check solve with the iterative oracle
//! oracle_grid = 2048
//! oracle_tol = 1e-9
//! kind = "large-gap"       # counterexample: large-gap | instability-a | instability-b
//! epsilons = [0.25, 0.125, 0.0625]
//! seed = 1                 # suite
//! count = 100              # suite
//! ```

use serde::Deserialize;

use rof1d::{BoundaryPair, StepFunction};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Solve,
    Flow,
    Attainment,
    Threshold,
    Counterexample,
    Suite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Counterexample {
    LargeGap,
    InstabilityA,
    InstabilityB,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub length: f64,
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub rational: bool,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "default_grid")]
    pub oracle_grid: usize,
    #[serde(default = "default_tol")]
    pub oracle_tol: f64,
    pub kind: Option<Counterexample>,
    pub epsilons: Option<Vec<f64>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_grid() -> usize {
    2048
}

fn default_tol() -> f64 {
    1e-9
}

fn default_seed() -> u64 {
    1
}

fn default_count() -> usize {
    100
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rational: false,
            oracle: false,
            oracle_grid: default_grid(),
            oracle_tol: default_tol(),
            kind: None,
            epsilons: None,
            seed: default_seed(),
            count: default_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub name: String,
    pub task: Task,
    pub f: Option<StepSpec>,
    pub phi: Option<[f64; 2]>,
    pub lambda: Option<f64>,
    #[serde(default)]
    pub options: Options,
}

/// A scenario whose fields have been checked against its task.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub task: Task,
    pub f: Option<StepFunction>,
    pub phi: Option<BoundaryPair>,
    pub lambda: Option<f64>,
    pub options: Options,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("field `{field}`: {msg}"))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::Parse("scenario file is empty".into()));
        }
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        Self::validate(raw)
    }

    pub fn validate(raw: RawScenario) -> Result<Self, CliError> {
        if raw.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        let f = raw
            .f
            .map(|s| StepFunction::new(s.length, s.breakpoints, s.values).map_err(|e| invalid("f", e)))
            .transpose()?;
        let phi = raw.phi.map(|[a, b]| BoundaryPair::new(a, b).map_err(|e| invalid("phi", e))).transpose()?;
        if let Some(l) = raw.lambda {
            if !(l.is_finite() && l > 0.0) {
                return Err(invalid("lambda", format!("{l} must be positive and finite")));
            }
        }
        let opts = &raw.options;
        if opts.oracle_grid == 0 {
            return Err(invalid("options.oracle_grid", "must be at least 1"));
        }
        if !(opts.oracle_tol.is_finite() && opts.oracle_tol > 0.0) {
            return Err(invalid("options.oracle_tol", "must be positive"));
        }

        let need_f = matches!(raw.task, Task::Solve | Task::Flow | Task::Attainment | Task::Threshold)
            || (raw.task == Task::Counterexample && opts.kind == Some(Counterexample::LargeGap));
        let need_phi = matches!(raw.task, Task::Solve | Task::Flow | Task::Attainment | Task::Threshold);
        let need_lambda = matches!(raw.task, Task::Solve | Task::Attainment)
            || (raw.task == Task::Counterexample && opts.kind == Some(Counterexample::LargeGap));
        let missing = |field: &str| invalid(field, format!("required for task {:?}", raw.task));
        if need_f && f.is_none() {
            return Err(missing("f"));
        }
        if need_phi && phi.is_none() {
            return Err(missing("phi"));
        }
        if need_lambda && raw.lambda.is_none() {
            return Err(missing("lambda"));
        }
        if raw.task == Task::Counterexample && opts.kind.is_none() {
            return Err(missing("options.kind"));
        }
        Ok(Self { name: raw.name, task: raw.task, f, phi, lambda: raw.lambda, options: raw.options })
    }
}
