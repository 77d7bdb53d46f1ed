//! File formats, pipeline stages, SVG output and the local exploration
//! service around `sketchopt-core`.

pub mod docs;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod serve;
pub mod svg;
pub mod synth;

pub use error::{Error, PipelineError, Result, Stage};
