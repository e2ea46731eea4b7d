//! Shortcut Fréchet distance: exact and approximate deciders over the
//! free-space diagram, the supporting stabbing geometry, simplification for
//! c-packed inputs, and generators for hard instances.

pub mod cpacked;
pub mod decider_apx;
pub mod decider_exact;
pub mod freespace;
pub mod geometry;
pub mod hardness;
pub mod scalar;
pub mod stabbing;
pub mod testkit;

pub use geometry::{CurveLocation, GeometryError, Point2, PolygonalCurve, Segment};
pub use scalar::Scalar;

pub type Point2f = Point2<f32>;
pub type Point2d = Point2<f64>;
pub type Curve2f = PolygonalCurve<f32>;
pub type Curve2d = PolygonalCurve<f64>;
pub type Segment2f = Segment<f32>;
pub type Segment2d = Segment<f64>;
