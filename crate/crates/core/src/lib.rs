//! Core algorithms for turning annotated floorplan sketches into
//! parametric models and optimizing them.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! HTTP service live in the `sketchopt` crate.
//!
//! Pipeline stages, in order:
//!
//! 1. [`raster`]: normalized grayscale images and the resolution pyramid.
//! 2. [`vectorizer`]: oriented line detection, cross-resolution merge and
//!    segment tracing.
//! 3. [`parametrizer`]: node/edge graph, collinear wall axes, translations.
//! 4. [`annotation`]: I-shaped marks bound to wall axes as design variables.
//! 5. [`objective`]: structural proxy objectives.
//! 6. [`nsga2`]: the multi-objective optimizer.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotation;
pub mod error;
pub mod geom;
pub(crate) mod math;
pub mod nsga2;
pub mod objective;
pub mod parametrizer;
pub mod raster;
pub mod vectorizer;

pub use error::{Error, Result};
pub use geom::Point;
