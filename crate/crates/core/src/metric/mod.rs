//! Conformal metrics with bounded curvature and their comparison functions.

mod annulus;
mod bound;
mod density;
mod file;
mod rot;
mod table;

pub use annulus::GeodesicAnnulus;
pub use bound::{CurvatureBound, CurvatureSign};
pub use density::{Density, DensityFn};
pub use file::{metric_from_json, MetricSpec};
pub use rot::{constant_curvature_metric, RotMetric};
pub use table::DEFAULT_KNOTS;
