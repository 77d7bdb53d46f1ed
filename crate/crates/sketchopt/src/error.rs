use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
    /// A document does not match its schema.
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Service(String),
    #[error(transparent)]
    Core(#[from] sketchopt_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Stable name of the error class, used in diagnostics.
    pub fn kind(&self) -> &'static str {
        use sketchopt_core::Error as C;
        match self {
            Error::Io { .. } => "IoError",
            Error::Format(_) => "FormatError",
            Error::Schema(_) => "SchemaError",
            Error::Config(_) => "ConfigError",
            Error::Service(_) => "ServiceError",
            Error::Core(e) => match e {
                C::Param(_) => "ParamError",
                C::Format(_) => "FormatError",
                C::EmptyScene => "EmptySceneError",
                C::NotFound(_) => "NotFoundError",
                C::Range { .. } => "RangeError",
                C::DegenerateLayout(_) => "DegenerateLayoutError",
                C::Objective { .. } => "ObjectiveError",
                C::InfeasibleProblem { .. } => "InfeasibleProblemError",
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Vectorize,
    Parametrize,
    Optimize,
    Render,
    Serve,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Vectorize => "vectorize",
            Stage::Parametrize => "parametrize",
            Stage::Optimize => "optimize",
            Stage::Render => "render",
            Stage::Serve => "serve",
        })
    }
}

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {}: {source}", source.kind())]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError { stage, source: e.into() })
    }
}
