//! Raster-to-vector line extraction.
//!
//! [`detect_linearity`] runs an oriented line filter bank over every pyramid
//! level, [`merge_resolutions`] fuses the per-level answers into one field at
//! native resolution, [`trace_segments`] walks that field into
//! [`LineSegment`]s and [`snap_orthogonal`] squares up near-axis segments.

mod detect;
mod junction;
mod merge;
mod snap;
mod trace;

use alloc::string::String;
use alloc::vec::Vec;

pub use detect::{detect_linearity, DetectorParams, LevelResponse, LinearityResponses};
pub use merge::{merge_resolutions, LinearityField, NodeResponse};
pub use snap::snap_orthogonal;
pub use trace::{trace_segments, TracerParams};

use crate::error::Result;
use crate::geom::Point;
use crate::raster::{build_pyramid, RasterImage};

#[derive(Debug, Clone, PartialEq)]
pub struct LineSegment {
    pub p0: Point,
    pub p1: Point,
    /// Mean merged gain of the member pixels.
    pub gain: f64,
    /// Stroke width estimate in pixels.
    pub width_estimate: f64,
}

impl LineSegment {
    pub fn new(p0: Point, p1: Point) -> Self {
        Self { p0, p1, gain: 1.0, width_estimate: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.p0.distance(self.p1)
    }

    pub fn direction(&self) -> Option<Point> {
        (self.p1 - self.p0).normalized()
    }

    /// Orientation in `[0, pi)`.
    pub fn orientation(&self) -> f64 {
        (self.p1 - self.p0).orientation()
    }

    pub fn midpoint(&self) -> Point {
        self.p0.midpoint(self.p1)
    }
}

/// How a scene was produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub source: String,
    pub detector: DetectorParams,
    pub tracer: TracerParams,
    /// Orthogonal snapping tolerance in degrees, when snapping ran.
    pub snap_tol_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorScene {
    pub segments: Vec<LineSegment>,
    pub width: usize,
    pub height: usize,
    pub luminosity_range: f64,
    pub provenance: Provenance,
}

impl VectorScene {
    pub fn new(width: usize, height: usize, segments: Vec<LineSegment>) -> Self {
        Self { segments, width, height, luminosity_range: 1.0, provenance: Provenance::default() }
    }

    /// Same metadata, different segment list.
    pub fn with_segments(&self, segments: Vec<LineSegment>) -> Self {
        Self { segments, ..self.clone() }
    }
}

/// Full vectorization of one raster: pyramid, detection, merge, tracing.
pub fn vectorize(
    img: &RasterImage,
    detector: &DetectorParams,
    tracer: &TracerParams,
) -> Result<VectorScene> {
    let stack = build_pyramid(img, detector.levels.min(crate::raster::max_levels(img.width(), img.height())))?;
    let responses = detect_linearity(&stack, detector)?;
    let field = merge_resolutions(responses);
    let mut scene = trace_segments(&field, tracer);
    scene.provenance.detector = detector.clone();
    Ok(scene)
}
