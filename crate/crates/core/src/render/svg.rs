use std::fmt::Write;

use super::contour::extract_contours;
use super::{FillMode, RenderSpec};
use crate::error::{Error, Result};
use crate::formats::format_sig9;
use crate::sensitivity::SensitivityCurve;
use crate::surface::MetricSurface;

const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";
const TICKS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const PALETTE: [&str; 10] = [
    "#d62728", "#ff7f0e", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
];

/// Plot area inside a panel, in canvas pixels.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn x(&self, u: f64) -> f64 {
        self.left + u * self.width
    }

    /// `v = 0` is the bottom edge.
    fn y(&self, v: f64) -> f64 {
        self.top + (1.0 - v) * self.height
    }

    fn bottom(&self) -> f64 {
        self.top + self.height
    }
}

fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn open_document(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = px(width),
        h = px(height)
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, px(width), px(height));
}

fn text(out: &mut String, x: f64, y: f64, size: u32, anchor: &str, extra: &str, body: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="{size}" text-anchor="{anchor}" {FONT}{extra}>{}</text>"#,
        px(x),
        px(y),
        escape(body)
    );
}

fn surface_title(surface: &MetricSurface) -> String {
    format!("{} surface, r = 1:{}", surface.metric(), format_sig9(surface.ratio()))
}

/// One surface as a filled contour plot.
pub fn render_surface_svg(surface: &MetricSurface, spec: &RenderSpec) -> Result<String> {
    render_surfaces_svg(&[surface], spec)
}

/// Surfaces side by side, each in a `spec.width x spec.height` panel.
pub fn render_surfaces_svg(surfaces: &[&MetricSurface], spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    if surfaces.is_empty() {
        return Err(Error::InvalidRenderSpec("no surfaces to render".into()));
    }
    let title = surfaces.iter().map(|s| surface_title(s)).collect::<Vec<_>>().join(" | ");
    let mut out = String::new();
    open_document(&mut out, spec.width * surfaces.len() as f64, spec.height, &title);
    for (k, surface) in surfaces.iter().enumerate() {
        let _ = writeln!(out, r#"<g class="panel" transform="translate({} 0)">"#, px(k as f64 * spec.width));
        surface_panel(&mut out, surface, spec)?;
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn surface_panel(out: &mut String, surface: &MetricSurface, spec: &RenderSpec) -> Result<()> {
    let frame = Frame { left: 56.0, top: 36.0, width: spec.width - 72.0, height: spec.height - 84.0 };
    if frame.width <= 0.0 || frame.height <= 0.0 {
        return Err(Error::InvalidRenderSpec("canvas too small for the plot margins".into()));
    }
    let t = surface.grid().resolution();

    text(out, spec.width / 2.0, 22.0, 14, "middle", "", &surface_title(surface));

    let _ = writeln!(out, r#"<g class="fill" shape-rendering="crispEdges">"#);
    let mut edges = vec![0.0];
    edges.extend(spec.contour_levels.iter().copied().filter(|&l| l > 0.0 && l < 1.0));
    edges.push(1.0);
    let band_colors: Vec<String> = edges.windows(2).map(|w| spec.color_map.hex((w[0] + w[1]) / 2.0)).collect();
    let band_of = |v: f64| edges[1..edges.len() - 1].iter().filter(|&&e| e <= v).count();

    for (i, row) in surface.values().rows().enumerate() {
        let y = frame.y((i + 1) as f64 / t as f64);
        let h = frame.y(i as f64 / t as f64) - y;
        let mut rect = |j0: usize, j1: usize, color: &str| {
            let x = frame.x(j0 as f64 / t as f64);
            let w = frame.x(j1 as f64 / t as f64) - x;
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"/>"#,
                px(x),
                px(y),
                px(w),
                px(h)
            );
        };
        match spec.fill {
            FillMode::Cells => {
                for (j, &v) in row.iter().enumerate() {
                    rect(j, j + 1, &spec.color_map.hex(v));
                }
            }
            FillMode::Bands => {
                let mut start = 0;
                for j in 1..=t {
                    if j == t || band_of(row[j]) != band_of(row[start]) {
                        rect(start, j, &band_colors[band_of(row[start])]);
                        start = j;
                    }
                }
            }
        }
    }
    out.push_str("</g>\n");

    let contours = extract_contours(surface, &spec.contour_levels)?;
    let _ = writeln!(
        out,
        r##"<g class="contours" fill="none" stroke="#1a1a1a" stroke-width="0.8" stroke-opacity="0.85">"##
    );
    for level in &contours.levels {
        for line in &level.polylines {
            let points: Vec<String> =
                line.points.iter().map(|&(x, y)| format!("{},{}", px(frame.x(x)), px(frame.y(y)))).collect();
            let _ = writeln!(
                out,
                r#"<polyline data-level="{}" points="{}"/>"#,
                format_sig9(level.level),
                points.join(" ")
            );
        }
    }
    out.push_str("</g>\n");

    let _ = writeln!(out, r##"<g class="axes" stroke="#000000" stroke-width="1">"##);
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none"/>"#,
        px(frame.left),
        px(frame.top),
        px(frame.width),
        px(frame.height)
    );
    for &tick in &TICKS {
        let (x, y) = (frame.x(tick), frame.y(tick));
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{b}" x2="{x}" y2="{b5}"/><line x1="{l5}" y1="{y}" x2="{l}" y2="{y}"/>"#,
            x = px(x),
            y = px(y),
            b = px(frame.bottom()),
            b5 = px(frame.bottom() + 5.0),
            l = px(frame.left),
            l5 = px(frame.left - 5.0)
        );
    }
    out.push_str("</g>\n");
    for &tick in &TICKS {
        let label = format_sig9(tick);
        text(out, frame.x(tick), frame.bottom() + 18.0, 11, "middle", "", &label);
        text(out, frame.left - 8.0, frame.y(tick) + 4.0, 11, "end", "", &label);
    }
    text(out, frame.x(0.5), frame.bottom() + 38.0, 13, "middle", "", &spec.x_label);
    let (lx, ly) = (frame.left - 40.0, frame.y(0.5));
    let rotate = format!(r#" transform="rotate(-90 {} {})""#, px(lx), px(ly));
    text(out, lx, ly, 13, "middle", &rotate, &spec.y_label);
    Ok(())
}

/// Axis mapping for the ratio axis of a curve plot.
struct RatioAxis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl RatioAxis {
    fn new(lo: f64, hi: f64, log: bool) -> Self {
        let (lo, hi) = if lo == hi { (lo / 2.0, hi * 2.0) } else { (lo, hi) };
        Self { lo, hi, log }
    }

    fn unit(&self, r: f64) -> f64 {
        if self.log {
            (r / self.lo).ln() / (self.hi / self.lo).ln()
        } else {
            (r - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let first = self.lo.log10().ceil() as i32;
            let last = self.hi.log10().floor() as i32;
            let decades: Vec<f64> = (first..=last).map(|k| 10f64.powi(k)).collect();
            if decades.len() >= 2 {
                return decades;
            }
            vec![self.lo, self.hi]
        } else {
            (0..5).map(|k| self.lo + k as f64 * (self.hi - self.lo) / 4.0).collect()
        }
    }
}

/// Sensitivity curves sharing one ratio schedule, as a multi-series line plot.
pub fn render_curves_svg(curves: &[SensitivityCurve], spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    let first = curves.first().ok_or_else(|| Error::InvalidRenderSpec("no curves to render".into()))?;
    let ratios: Vec<f64> = first.ratios().collect();
    if ratios.is_empty() {
        return Err(Error::InvalidRenderSpec("curves have no samples".into()));
    }
    if curves.iter().any(|c| !c.ratios().eq(ratios.iter().copied())) {
        return Err(Error::Mismatch("ratio schedule"));
    }

    let frame = Frame { left: 64.0, top: 40.0, width: spec.width - 214.0, height: spec.height - 92.0 };
    if frame.width <= 0.0 || frame.height <= 0.0 {
        return Err(Error::InvalidRenderSpec("canvas too small for the plot margins".into()));
    }
    let axis = RatioAxis::new(ratios[0], ratios[ratios.len() - 1], spec.log_x);
    let s_max = curves.iter().flat_map(|c| c.samples()).map(|s| s.sensitivity).fold(0.0, f64::max);
    let y_top = ((s_max * 10.0).ceil() / 10.0).clamp(0.1, 1.0);

    let title = "class-imbalance sensitivity";
    let mut out = String::new();
    open_document(&mut out, spec.width, spec.height, title);
    text(&mut out, frame.x(0.5), 24.0, 14, "middle", "", title);

    let _ = writeln!(out, r##"<g class="axes" stroke="#000000" stroke-width="1">"##);
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none"/>"#,
        px(frame.left),
        px(frame.top),
        px(frame.width),
        px(frame.height)
    );
    let x_ticks = axis.ticks();
    for &r in &x_ticks {
        let x = px(frame.x(axis.unit(r)));
        let _ = writeln!(out, r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#, px(frame.bottom()), px(frame.bottom() + 5.0));
    }
    for &tick in &TICKS {
        let y = px(frame.y(tick));
        let _ = writeln!(out, r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#, px(frame.left - 5.0), px(frame.left));
    }
    out.push_str("</g>\n");
    for &r in &x_ticks {
        text(&mut out, frame.x(axis.unit(r)), frame.bottom() + 18.0, 11, "middle", "", &format_sig9(r));
    }
    for &tick in &TICKS {
        let label = format_sig9((tick * y_top * 1e6).round() / 1e6);
        text(&mut out, frame.left - 8.0, frame.y(tick) + 4.0, 11, "end", "", &label);
    }
    let x_label = if spec.log_x { format!("{} (log scale)", spec.x_label) } else { spec.x_label.clone() };
    text(&mut out, frame.x(0.5), frame.bottom() + 38.0, 13, "middle", "", &x_label);
    let (lx, ly) = (frame.left - 46.0, frame.y(0.5));
    let rotate = format!(r#" transform="rotate(-90 {} {})""#, px(lx), px(ly));
    text(&mut out, lx, ly, 13, "middle", &rotate, &spec.y_label);

    let _ = writeln!(out, r#"<g class="series" fill="none" stroke-width="2">"#);
    for (k, curve) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<(f64, f64)> = curve
            .samples()
            .iter()
            .map(|s| (frame.x(axis.unit(s.ratio)), frame.y(s.sensitivity / y_top)))
            .collect();
        let id = escape(&curve.metric().id());
        if let [(x, y)] = points.as_slice() {
            let _ = writeln!(
                out,
                r#"<circle data-metric="{id}" cx="{}" cy="{}" r="3" fill="{color}" stroke="{color}"/>"#,
                px(*x),
                px(*y)
            );
        } else {
            let coords: Vec<String> = points.iter().map(|&(x, y)| format!("{},{}", px(x), px(y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline data-metric="{id}" stroke="{color}" points="{}"/>"#,
                coords.join(" ")
            );
        }
    }
    out.push_str("</g>\n");

    let _ = writeln!(out, r#"<g class="legend">"#);
    let legend_x = frame.left + frame.width + 16.0;
    for (k, curve) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = frame.top + 8.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            px(legend_x),
            px(legend_x + 22.0),
            y = px(y)
        );
        text(&mut out, legend_x + 28.0, y + 4.0, 12, "start", "", &curve.metric().id());
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
