//! Contour extraction and self-contained SVG plots of surfaces and curves.

mod contour;
mod svg;

pub use contour::{extract_contours, ContourLevel, ContourSet, Point, Polyline};
pub use svg::{render_curves_svg, render_surface_svg, render_surfaces_svg};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillMode {
    /// Cells quantized into the bands between contour levels.
    #[default]
    Bands,
    /// One rectangle per cell, colored by its own value.
    Cells,
}

/// Sequential light-to-dark ramp over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ColorMap;

const RAMP: [[f64; 3]; 6] = [
    [255.0, 247.0, 236.0],
    [253.0, 212.0, 158.0],
    [252.0, 141.0, 89.0],
    [215.0, 48.0, 31.0],
    [153.0, 0.0, 0.0],
    [64.0, 0.0, 0.0],
];

impl ColorMap {
    pub fn rgb(&self, v: f64) -> [u8; 3] {
        let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        let pos = v * (RAMP.len() - 1) as f64;
        let k = (pos.floor() as usize).min(RAMP.len() - 2);
        let f = pos - k as f64;
        let mut out = [0u8; 3];
        for (c, o) in out.iter_mut().enumerate() {
            *o = (RAMP[k][c] + f * (RAMP[k + 1][c] - RAMP[k][c])).round() as u8;
        }
        out
    }

    pub fn hex(&self, v: f64) -> String {
        let [r, g, b] = self.rgb(v);
        format!("#{r:02x}{g:02x}{b:02x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub contour_levels: Vec<f64>,
    pub color_map: ColorMap,
    pub width: f64,
    pub height: f64,
    pub x_label: String,
    pub y_label: String,
    pub fill: FillMode,
    /// Logarithmic ratio axis for curve plots.
    pub log_x: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            contour_levels: (0..=10).map(|k| k as f64 / 10.0).collect(),
            color_map: ColorMap,
            width: 480.0,
            height: 480.0,
            x_label: "tnr".into(),
            y_label: "tpr".into(),
            fill: FillMode::Bands,
            log_x: false,
        }
    }
}

impl RenderSpec {
    /// Defaults for sensitivity curve plots.
    pub fn curves() -> Self {
        Self {
            width: 640.0,
            height: 420.0,
            x_label: "imbalance ratio r".into(),
            y_label: "sensitivity".into(),
            log_x: true,
            ..Self::default()
        }
    }

    /// `count` evenly spaced levels covering `[0, 1]`.
    pub fn with_level_count(mut self, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidRenderSpec(format!("need at least 2 levels, got {count}")));
        }
        self.contour_levels = (0..count).map(|k| k as f64 / (count - 1) as f64).collect();
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.contour_levels.is_empty() {
            return Err(Error::EmptyLevels);
        }
        if self.contour_levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidRenderSpec("contour levels must lie in [0, 1]".into()));
        }
        if self.contour_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRenderSpec("contour levels must be strictly increasing".into()));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.width) || !positive(self.height) {
            return Err(Error::InvalidRenderSpec(format!(
                "canvas must be positive, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn luminance([r, g, b]: [u8; 3]) -> f64 {
        0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64
    }

    #[test]
    fn ramp_darkens_monotonically() {
        let cm = ColorMap;
        let mut last = f64::INFINITY;
        for k in 0..=100 {
            let l = luminance(cm.rgb(k as f64 / 100.0));
            assert!(l <= last, "k={k}");
            last = l;
        }
        assert_eq!(cm.hex(0.0), "#fff7ec");
        assert_eq!(cm.hex(1.0), "#400000");
    }

    #[test]
    fn spec_validation() {
        assert!(RenderSpec::default().validate().is_ok());
        assert_eq!(RenderSpec::default().contour_levels.len(), 11);
        let mut s = RenderSpec::default();
        s.contour_levels = vec![0.2, 0.1];
        assert!(s.validate().is_err());
        s.contour_levels = vec![];
        assert_eq!(s.validate(), Err(Error::EmptyLevels));
        let s = RenderSpec { width: 0.0, ..RenderSpec::default() };
        assert!(s.validate().is_err());
        assert_eq!(RenderSpec::default().with_level_count(5).unwrap().contour_levels, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
