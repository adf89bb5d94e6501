//! Metric surfaces over the base contingency space and the class-imbalance
//! sensitivity of deterministic binary classification metrics.
//!
//! A confusion matrix is reduced to its relative form `(tpr, tnr)` at an
//! imbalance ratio `1:r`. Each metric then becomes a surface over the unit
//! square (`x = tnr`, `y = tpr`), and its sensitivity to imbalance is the
//! volume between the balanced surface and the surface at `1:r`.
//!
//! ```
//! use contingency::{sensitivity, GridSpec, Metric};
//!
//! let grid = GridSpec::new(64).unwrap();
//! let s_precision = sensitivity(Metric::Precision, 49.0, grid).unwrap();
//! let s_recall = sensitivity(Metric::Recall, 49.0, grid).unwrap();
//! assert!(s_precision > 0.4);
//! assert_eq!(s_recall, 0.0);
//! ```

pub mod error;
pub mod formats;
pub mod metrics;
pub mod render;
pub mod sensitivity;
pub mod surface;

pub use error::{Error, Result};
pub use metrics::{list_metrics, studied_metrics, CountConfusion, Metric, RelativePerformance, RescaleInterval};
pub use render::{
    extract_contours, render_curves_svg, render_surface_svg, render_surfaces_svg, ContourSet, FillMode, RenderSpec,
};
pub use sensitivity::{
    is_agnostic, log_growth_check, rank_by_sensitivity, sensitivity, sensitivity_curve, GrowthReport,
    RatioSchedule, SensitivityCurve, SensitivitySample,
};
pub use surface::{build_surface, surface_delta, GridSpec, Matrix, MetricSurface};
