use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter or input violates an operation's precondition.
    Param(String),
    /// Malformed raster data (zero dimension, wrong sample count, ...).
    Format(String),
    /// The vector scene holds no usable segments.
    EmptyScene,
    /// A referenced id does not exist.
    NotFound(String),
    /// A design-variable value lies outside its range.
    Range { variable: u32, value: f64, lo: f64, hi: f64 },
    /// A translation produced a collapsed or self-intersecting layout.
    DegenerateLayout(String),
    /// A registered objective failed to produce a finite value.
    Objective { label: String, message: String },
    /// Every sampled individual was infeasible.
    InfeasibleProblem { attempts: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Param(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::EmptyScene => f.write_str("scene contains no segments"),
            Error::NotFound(what) => write!(f, "not found: {what}"),
            Error::Range { variable, value, lo, hi } => {
                write!(f, "variable {variable} value {value} outside range [{lo}, {hi}]")
            }
            Error::DegenerateLayout(msg) => write!(f, "degenerate layout: {msg}"),
            Error::Objective { label, message } => {
                write!(f, "objective '{label}' failed: {message}")
            }
            Error::InfeasibleProblem { attempts } => write!(
                f,
                "every individual was infeasible after {attempts} initialization attempts"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Param(msg.into())
}
