//! Marching-squares iso-lines over a metric surface.
//!
//! The lattice nodes are the surface's cell-center samples, so contours live
//! inside `[0.5/t, 1 - 0.5/t]^2`; open polylines end on that lattice boundary.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::MetricSurface;

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourLevel {
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

/// Iso-lines per level, in the order the levels were requested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub levels: Vec<ContourLevel>,
}

/// A lattice edge. `Horizontal(i, j)` joins nodes `(i, j)` and `(i, j + 1)`,
/// `Vertical(i, j)` joins `(i, j)` and `(i + 1, j)`; `i` is the row (tpr).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    Horizontal(usize, usize),
    Vertical(usize, usize),
}

pub fn extract_contours(surface: &MetricSurface, levels: &[f64]) -> Result<ContourSet> {
    if levels.is_empty() {
        return Err(Error::EmptyLevels);
    }
    if let Some(bad) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidRenderSpec(format!("contour level {bad} outside [0, 1]")));
    }

    let trace = |&level: &f64| ContourLevel { level, polylines: trace_level(surface, level) };

    #[cfg(feature = "parallel")]
    let levels = {
        use rayon::prelude::*;
        levels.par_iter().map(trace).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let levels = levels.iter().map(trace).collect();

    Ok(ContourSet { levels })
}

fn trace_level(surface: &MetricSurface, level: f64) -> Vec<Polyline> {
    let segments = cell_segments(surface, level);
    stitch(&segments)
        .into_iter()
        .map(|(edges, closed)| Polyline {
            points: edges.iter().map(|&e| crossing(surface, e, level)).collect(),
            closed,
        })
        .collect()
}

fn cell_segments(surface: &MetricSurface, level: f64) -> Vec<(Edge, Edge)> {
    let t = surface.grid().resolution();
    let v = |i, j| surface.value(i, j);
    let mut segments = Vec::new();

    for i in 0..t - 1 {
        for j in 0..t - 1 {
            let corners = [v(i, j), v(i, j + 1), v(i + 1, j + 1), v(i + 1, j)];
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |acc, (bit, &c)| acc | (u8::from(c > level) << bit));

            let bottom = Edge::Horizontal(i, j);
            let right = Edge::Vertical(i, j + 1);
            let top = Edge::Horizontal(i + 1, j);
            let left = Edge::Vertical(i, j);

            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    // Saddle: the diagonal pair on the same side as the cell
                    // mean stays connected.
                    let center_above = corners.iter().sum::<f64>() / 4.0 > level;
                    let lower_left_above = case == 5;
                    if center_above == lower_left_above {
                        segments.push((bottom, right));
                        segments.push((left, top));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    segments
}

/// Joins segments that share an edge crossing. Each crossing belongs to at
/// most two cells, so the adjacency has degree at most two.
fn stitch(segments: &[(Edge, Edge)]) -> Vec<(Vec<Edge>, bool)> {
    let mut adjacency: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(k);
        adjacency.entry(b).or_default().push(k);
    }

    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut chain = vec![start];
        let mut at = start;
        while let Some(&k) = adjacency[&at].iter().find(|&&k| !used[k]) {
            used[k] = true;
            let (a, b) = segments[k];
            at = if a == at { b } else { a };
            chain.push(at);
        }
        chain
    };

    // Open polylines start at crossings owned by a single segment.
    let ends: Vec<Edge> = adjacency.iter().filter(|(_, s)| s.len() == 1).map(|(&e, _)| e).collect();
    for end in ends {
        let k = adjacency[&end][0];
        if !used[k] {
            lines.push((walk(end, &mut used), false));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let chain = walk(segments[k].0, &mut used);
            lines.push((chain, true));
        }
    }
    lines
}

fn crossing(surface: &MetricSurface, edge: Edge, level: f64) -> Point {
    let grid = surface.grid();
    let ((i0, j0), (i1, j1)) = match edge {
        Edge::Horizontal(i, j) => ((i, j), (i, j + 1)),
        Edge::Vertical(i, j) => ((i, j), (i + 1, j)),
    };
    let (a, b) = (surface.value(i0, j0), surface.value(i1, j1));
    let s = ((level - a) / (b - a)).clamp(0.0, 1.0);
    let lerp = |p: f64, q: f64| p + s * (q - p);
    (lerp(grid.coord(j0), grid.coord(j1)), lerp(grid.coord(i0), grid.coord(i1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;
    use crate::surface::{build_surface, GridSpec};

    fn surface(metric: Metric, ratio: f64, t: usize) -> MetricSurface {
        build_surface(metric, ratio, GridSpec::new(t).unwrap()).unwrap()
    }

    #[test]
    fn tss_midlevel_is_the_no_skill_line() {
        let t = 32;
        let s = surface(Metric::Tss, 1.0, t);
        let set = extract_contours(&s, &[0.5]).unwrap();
        let lines = &set.levels[0].polylines;
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        for &(x, y) in &lines[0].points {
            assert!((x + y - 1.0).abs() < 1.0 / t as f64);
        }
    }

    #[test]
    fn recall_midlevel_is_horizontal() {
        for t in [16, 17] {
            let s = surface(Metric::Recall, 7.0, t);
            let set = extract_contours(&s, &[0.5]).unwrap();
            let lines = &set.levels[0].polylines;
            assert_eq!(lines.len(), 1, "t={t}");
            assert_eq!(lines[0].points.len(), t);
            for &(_, y) in &lines[0].points {
                assert!((y - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn level_outside_range_is_empty() {
        let s = surface(Metric::Recall, 1.0, 8);
        let set = extract_contours(&s, &[0.0, 1.0]).unwrap();
        assert!(set.levels.iter().all(|l| l.polylines.is_empty()));
    }

    #[test]
    fn empty_levels_fail() {
        let s = surface(Metric::Recall, 1.0, 8);
        assert_eq!(extract_contours(&s, &[]), Err(Error::EmptyLevels));
        assert!(extract_contours(&s, &[1.5]).is_err());
    }

    #[test]
    fn closed_loop_around_a_peak() {
        let t = 12;
        let grid = GridSpec::new(t).unwrap();
        let mut values = Vec::new();
        for i in 0..t {
            for j in 0..t {
                let (x, y) = (grid.coord(j) - 0.5, grid.coord(i) - 0.5);
                values.push((1.0 - 4.0 * (x * x + y * y)).max(0.0));
            }
        }
        let s = MetricSurface::from_values(Metric::Recall, 1.0, grid, values).unwrap();
        let set = extract_contours(&s, &[0.5]).unwrap();
        let lines = &set.levels[0].polylines;
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        assert_eq!(lines[0].points.first(), lines[0].points.last());
    }
}
