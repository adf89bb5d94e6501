//! WebAssembly bindings for the static demo page in `www/`.
//!
//! The `*_impl` functions hold the logic and return plain `Result<_, String>`
//! so they can be tested natively; the exported wrappers only convert errors.

use contingency::{
    build_surface, list_metrics, render_curves_svg, render_surface_svg, sensitivity, sensitivity_curve, FillMode,
    GridSpec, Metric, RatioSchedule, RelativePerformance, RenderSpec,
};
use wasm_bindgen::prelude::*;

/// Upper bound on the grid the page may request.
const MAX_RESOLUTION: usize = 512;

fn grid(resolution: usize) -> Result<GridSpec, String> {
    if resolution > MAX_RESOLUTION {
        return Err(format!("resolution {resolution} exceeds {MAX_RESOLUTION}"));
    }
    GridSpec::new(resolution).map_err(|e| e.to_string())
}

fn metric(id: &str) -> Result<Metric, String> {
    id.parse().map_err(|e: contingency::Error| e.to_string())
}

pub fn metric_ids_impl() -> Vec<String> {
    list_metrics().iter().map(Metric::id).collect()
}

pub fn surface_svg_impl(id: &str, ratio: f64, resolution: usize, levels: usize, cells: bool) -> Result<String, String> {
    let surface = build_surface(metric(id)?, ratio, grid(resolution)?).map_err(|e| e.to_string())?;
    let mut spec = RenderSpec::default().with_level_count(levels).map_err(|e| e.to_string())?;
    if cells {
        spec.fill = FillMode::Cells;
    }
    render_surface_svg(&surface, &spec).map_err(|e| e.to_string())
}

pub fn sensitivity_svg_impl(ids: &str, max_ratio: f64, resolution: usize) -> Result<String, String> {
    let metrics = ids
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(metric)
        .collect::<Result<Vec<_>, _>>()?;
    if metrics.is_empty() {
        return Err("select at least one metric".into());
    }
    let schedule = RatioSchedule::geometric(1.0, max_ratio, 2.0).map_err(|e| e.to_string())?;
    let grid = grid(resolution)?;
    let curves = metrics
        .into_iter()
        .map(|m| sensitivity_curve(m, &schedule, grid))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    render_curves_svg(&curves, &RenderSpec::curves()).map_err(|e| e.to_string())
}

pub fn sensitivity_impl(id: &str, ratio: f64, resolution: usize) -> Result<f64, String> {
    sensitivity(metric(id)?, ratio, grid(resolution)?).map_err(|e| e.to_string())
}

pub fn evaluate_impl(id: &str, tpr: f64, tnr: f64, ratio: f64) -> Result<f64, String> {
    let x = RelativePerformance::new(tpr, tnr, ratio).map_err(|e| e.to_string())?;
    Ok(metric(id)?.evaluate(&x))
}

#[wasm_bindgen(js_name = metricIds)]
pub fn metric_ids() -> Vec<String> {
    metric_ids_impl()
}

/// Contour plot of one metric surface.
#[wasm_bindgen(js_name = surfaceSvg)]
pub fn surface_svg(metric: &str, ratio: f64, resolution: usize, levels: usize, cells: bool) -> Result<String, JsError> {
    surface_svg_impl(metric, ratio, resolution, levels, cells).map_err(|e| JsError::new(&e))
}

/// Sensitivity curves over `r = 1, 2, 4, ...` up to `max_ratio`.
#[wasm_bindgen(js_name = sensitivitySvg)]
pub fn sensitivity_svg(metrics: &str, max_ratio: f64, resolution: usize) -> Result<String, JsError> {
    sensitivity_svg_impl(metrics, max_ratio, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sensitivity)]
pub fn sensitivity_at(metric: &str, ratio: f64, resolution: usize) -> Result<f64, JsError> {
    sensitivity_impl(metric, ratio, resolution).map_err(|e| JsError::new(&e))
}

/// Raw metric value at one point of the base contingency space.
#[wasm_bindgen]
pub fn evaluate(metric: &str, tpr: f64, tnr: f64, ratio: f64) -> Result<f64, JsError> {
    evaluate_impl(metric, tpr, tnr, ratio).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_catalog() {
        let ids = metric_ids_impl();
        assert_eq!(ids.first().map(String::as_str), Some("accuracy"));
        assert_eq!(ids.len(), 9);
    }

    #[test]
    fn surface_plot() {
        let svg = surface_svg_impl("f1", 49.0, 32, 11, false).unwrap();
        assert!(svg.contains("f1 surface, r = 1:49"));
        assert!(surface_svg_impl("f1", 49.0, 4096, 11, false).is_err());
        assert!(surface_svg_impl("nosuch", 1.0, 32, 11, false).unwrap_err().contains("nosuch"));
        assert!(surface_svg_impl("f1", -1.0, 32, 11, false).is_err());
    }

    #[test]
    fn sensitivity_plot() {
        let svg = sensitivity_svg_impl("precision, recall", 64.0, 16).unwrap();
        assert_eq!(svg.matches("data-metric=").count(), 2);
        assert!(sensitivity_svg_impl("", 64.0, 16).is_err());
        assert!(sensitivity_svg_impl("f1", 0.5, 16).is_err());
    }

    #[test]
    fn point_queries() {
        assert_eq!(sensitivity_impl("recall", 49.0, 16).unwrap(), 0.0);
        assert!(sensitivity_impl("precision", 49.0, 16).unwrap() > 0.4);
        assert!((evaluate_impl("accuracy", 0.0, 1.0, 49.0).unwrap() - 0.98).abs() < 1e-15);
        assert!(evaluate_impl("accuracy", 2.0, 1.0, 49.0).is_err());
    }
}
