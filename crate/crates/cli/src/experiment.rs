//! Experiment files and their resolution against command-line overrides.
//!
//! The file is one JSON object. `command` is optional and, when present,
//! must match the invoked subcommand. `algebra` is the base algebra,
//! `space` the point space, `test_functions` the generator recipe;
//! `base_diagonal` optionally replaces the built-in exact diagonal with an
//! explicit term list so imperfect diagonals can be pushed through the
//! schedule checks. Command-line flags win over file fields.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use banachlab::{AlgebraSpec, Error, FunctionSpec, ScalarField, SpaceSpec};
use serde::Deserialize;
use serde_json::Value;

/// Error carrying its process exit code: 2 for anything wrong with the
/// input, 3 when a library precondition blocked the requested run.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }

    pub fn from_lib(e: Error) -> Self {
        let code = match &e {
            Error::SchedulePrecondition { .. }
            | Error::NotCentral(_)
            | Error::ElementaryMismatch(_)
            | Error::InvalidCover(_) => 3,
            _ => 2,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    BuildDiagonal,
    Certify,
    GrothendieckCheck,
    Derivations,
    TransferCheck,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::BuildDiagonal => "build-diagonal",
            CommandKind::Certify => "certify",
            CommandKind::GrothendieckCheck => "grothendieck-check",
            CommandKind::Derivations => "derivations",
            CommandKind::TransferCheck => "transfer-check",
        }
    }
}

#[derive(Deserialize)]
struct ExperimentFile {
    command: Option<String>,
    algebra: Value,
    space: Option<Value>,
    eps: Option<f64>,
    test_functions: Option<Value>,
    field: Option<String>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    central: Option<bool>,
    count: Option<usize>,
    base_diagonal: Option<Vec<Value>>,
    base_residual: Option<f64>,
}

/// A fully resolved run: file fields merged with flag overrides.
pub struct Experiment {
    pub command: CommandKind,
    pub algebra_raw: Value,
    pub algebra: AlgebraSpec,
    pub space_raw: Option<Value>,
    pub space: Option<SpaceSpec>,
    pub eps: Option<f64>,
    pub field: ScalarField,
    pub functions: Option<FunctionSpec>,
    pub central: bool,
    pub count: Option<usize>,
    pub seed_override: Option<u64>,
    pub base_diagonal: Option<Vec<Value>>,
    pub base_residual: f64,
    pub out_dir: PathBuf,
}

fn parse_field(name: &str) -> Result<ScalarField, CliError> {
    match name {
        "real" => Ok(ScalarField::Real),
        "complex" => Ok(ScalarField::Complex),
        other => Err(CliError::input(format!("unknown field {other:?}"))),
    }
}

impl Experiment {
    pub fn load(
        command: CommandKind,
        spec_path: Option<&Path>,
        out_flag: Option<&Path>,
        seed_flag: Option<u64>,
        field_flag: Option<&str>,
        eps_flag: Option<f64>,
    ) -> Result<Self, CliError> {
        let path = spec_path.ok_or_else(|| CliError::input("no experiment file given (--spec)"))?;
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let raw: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let file: ExperimentFile = serde_json::from_value(raw.clone())
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;

        if let Some(named) = &file.command {
            let second_stage = command == CommandKind::Certify && named == "build-diagonal";
            if named != command.name() && !second_stage {
                return Err(CliError::input(format!(
                    "experiment file is for {named:?} but {:?} was invoked",
                    command.name()
                )));
            }
        }

        let algebra: AlgebraSpec = serde_json::from_value(file.algebra.clone())
            .map_err(|e| CliError::input(format!("algebra spec: {e}")))?;
        let space: Option<SpaceSpec> = match &file.space {
            Some(v) => Some(
                serde_json::from_value(v.clone())
                    .map_err(|e| CliError::input(format!("space spec: {e}")))?,
            ),
            None => None,
        };

        let field = match field_flag.or(file.field.as_deref()) {
            Some(name) => parse_field(name)?,
            None => ScalarField::Real,
        };

        let eps = eps_flag.or(file.eps);
        if let Some(e) = eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(CliError::input(format!(
                    "eps must be positive and finite, got {e}"
                )));
            }
        }

        let seed_override = seed_flag.or(file.seed);
        let functions: Option<FunctionSpec> = match &file.test_functions {
            Some(v) => {
                let mut f: FunctionSpec = serde_json::from_value(v.clone())
                    .map_err(|e| CliError::input(format!("test_functions spec: {e}")))?;
                if let Some(seed) = seed_override {
                    f.override_seed(seed);
                }
                Some(f)
            }
            None => None,
        };

        let out_dir = out_flag
            .map(Path::to_path_buf)
            .or(file.output)
            .ok_or_else(|| {
                CliError::input("no output directory given (--out or \"output\" in the file)")
            })?;

        let base_residual = file.base_residual.unwrap_or(0.0);
        if !(base_residual >= 0.0 && base_residual.is_finite()) {
            return Err(CliError::input(format!(
                "base_residual must be finite and nonnegative, got {base_residual}"
            )));
        }

        Ok(Experiment {
            command,
            algebra_raw: file.algebra,
            algebra,
            space_raw: file.space,
            space,
            eps,
            field,
            functions,
            central: file.central.unwrap_or(false),
            count: file.count,
            seed_override,
            base_diagonal: file.base_diagonal,
            base_residual,
            out_dir,
        })
    }

    pub fn require_eps(&self) -> Result<f64, CliError> {
        self.eps
            .ok_or_else(|| CliError::input("this command needs a target accuracy (--eps or \"eps\")"))
    }
}
