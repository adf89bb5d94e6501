//! Metric surfaces over the base contingency space.
//!
//! The base contingency space is ROC space flipped horizontally: `x = tnr`,
//! `y = tpr`, the origin is `(0, 0)` and the perfect model sits at `(1, 1)`.
//! Surfaces are sampled at cell centers of a uniform `t x t` grid and stored
//! row-major with the row index running over `tpr`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{check_ratio, Metric, RescaleInterval};

pub const DEFAULT_RESOLUTION: usize = 256;

/// Uniform cell-center sampling of `[0, 1]` with `t` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GridSpec {
    resolution: usize,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidResolution(resolution));
        }
        Ok(Self { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Coordinate of sample `k`: `(k + 0.5) / t`.
    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.resolution as f64
    }

    pub fn coords(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.resolution).map(move |k| self.coord(k))
    }

    pub fn cells(&self) -> usize {
        self.resolution * self.resolution
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: DEFAULT_RESOLUTION }
    }
}

impl TryFrom<usize> for GridSpec {
    type Error = Error;

    fn try_from(t: usize) -> Result<Self> {
        Self::new(t)
    }
}

impl From<GridSpec> for usize {
    fn from(g: GridSpec) -> usize {
        g.resolution
    }
}

/// Square row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    size: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(size: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != size * size {
            return Err(Error::Parse(format!(
                "expected {} values for a {size}x{size} matrix, got {}",
                size * size,
                data.len()
            )));
        }
        Ok(Self { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.size + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.size..(row + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.size)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Sum in a fixed order: each row left to right, then rows top to bottom.
    pub fn sum(&self) -> f64 {
        self.rows().map(|r| r.iter().sum::<f64>()).sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A metric evaluated over the grid at one imbalance ratio, rescaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSurface {
    metric: Metric,
    ratio: f64,
    grid: GridSpec,
    values: Matrix,
}

impl MetricSurface {
    /// Wraps precomputed rescaled values, e.g. read back from a file.
    pub fn from_values(metric: Metric, ratio: f64, grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let ratio = check_ratio(ratio)?;
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Parse(format!("surface value {bad} outside [0, 1]")));
        }
        let values = Matrix::from_rows(grid.resolution(), values)?;
        Ok(Self { metric, ratio, grid, values })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn rescale_interval(&self) -> RescaleInterval {
        self.metric.theoretical_range()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    /// Rescaled value at row `i` (`tpr` sample) and column `j` (`tnr` sample).
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    /// Bilinear interpolation between sample points, at `x = tnr`, `y = tpr`.
    /// Points outside the sample lattice are clamped onto it.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let t = self.grid.resolution();
        let to_index = |v: f64| (v * t as f64 - 0.5).clamp(0.0, (t - 1) as f64);
        let (fx, fy) = (to_index(x), to_index(y));
        let j0 = (fx.floor() as usize).min(t - 2);
        let i0 = (fy.floor() as usize).min(t - 2);
        let (dx, dy) = (fx - j0 as f64, fy - i0 as f64);
        let v = |i, j| self.values.get(i, j);
        let bottom = v(i0, j0) * (1.0 - dx) + v(i0, j0 + 1) * dx;
        let top = v(i0 + 1, j0) * (1.0 - dx) + v(i0 + 1, j0 + 1) * dx;
        bottom * (1.0 - dy) + top * dy
    }
}

fn surface_row(metric: Metric, ratio: f64, grid: GridSpec, i: usize) -> Vec<f64> {
    let tpr = grid.coord(i);
    grid.coords().map(|tnr| metric.rescaled(tpr, tnr, ratio)).collect()
}

/// Evaluates `metric` at every cell center at imbalance `1:ratio`.
///
/// Rows may be computed in parallel; each value depends only on its own
/// coordinates, so the result is bit-identical for any schedule.
pub fn build_surface(metric: Metric, ratio: f64, grid: GridSpec) -> Result<MetricSurface> {
    let ratio = check_ratio(ratio)?;
    let t = grid.resolution();

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..t).into_par_iter().map(|i| surface_row(metric, ratio, grid, i)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..t).map(|i| surface_row(metric, ratio, grid, i)).collect();

    let values = Matrix::from_rows(t, rows.concat())?;
    Ok(MetricSurface { metric, ratio, grid, values })
}

/// Element-wise `|a - b|` of two surfaces of the same metric and grid.
pub fn surface_delta(a: &MetricSurface, b: &MetricSurface) -> Result<Matrix> {
    if a.grid != b.grid {
        return Err(Error::Mismatch("grid"));
    }
    if a.metric != b.metric {
        return Err(Error::Mismatch("metric"));
    }
    let data = a
        .values
        .as_slice()
        .iter()
        .zip(b.values.as_slice())
        .map(|(x, y)| (x - y).abs())
        .collect();
    Matrix::from_rows(a.grid.resolution(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t: usize) -> GridSpec {
        GridSpec::new(t).unwrap()
    }

    #[test]
    fn grid_rejects_small_resolution() {
        assert_eq!(GridSpec::new(1), Err(Error::InvalidResolution(1)));
        assert!(GridSpec::new(2).is_ok());
        assert_eq!(GridSpec::default().resolution(), 256);
    }

    #[test]
    fn samples_are_interior() {
        let g = grid(7);
        for c in g.coords() {
            assert!(c > 0.0 && c < 1.0);
        }
        assert_eq!(g.coord(0), 0.5 / 7.0);
    }

    #[test]
    fn recall_rows_are_constant() {
        let s = build_surface(Metric::Recall, 49.0, grid(4)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.value(i, j), (i as f64 + 0.5) / 4.0);
            }
        }
    }

    #[test]
    fn tss_rescales_from_symmetric_range() {
        let s = build_surface(Metric::Tss, 1.0, grid(2)).unwrap();
        assert_eq!(s.value(1, 1), 0.75);
    }

    #[test]
    fn balanced_accuracy_is_symmetric() {
        let s = build_surface(Metric::Accuracy, 1.0, grid(9)).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(s.value(i, j), s.value(j, i));
            }
        }
    }

    #[test]
    fn invalid_ratios_fail() {
        for r in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                build_surface(Metric::F1, r, grid(4)),
                Err(Error::InvalidRatio(_))
            ));
        }
    }

    #[test]
    fn delta_behaviour() {
        let g = grid(16);
        let s = build_surface(Metric::Precision, 1.0, g).unwrap();
        assert!(surface_delta(&s, &s).unwrap().as_slice().iter().all(|&d| d == 0.0));

        let r1 = build_surface(Metric::Recall, 1.0, g).unwrap();
        let r49 = build_surface(Metric::Recall, 49.0, g).unwrap();
        assert!(surface_delta(&r1, &r49).unwrap().as_slice().iter().all(|&d| d == 0.0));

        let p49 = build_surface(Metric::Precision, 49.0, g).unwrap();
        assert!(surface_delta(&s, &p49).unwrap().max() > 0.0);

        assert_eq!(surface_delta(&s, &r1), Err(Error::Mismatch("metric")));
        let coarse = build_surface(Metric::Precision, 1.0, grid(8)).unwrap();
        assert_eq!(surface_delta(&s, &coarse), Err(Error::Mismatch("grid")));
    }

    #[test]
    fn interpolation_hits_samples_and_is_linear_for_tss() {
        let s = build_surface(Metric::Tss, 1.0, grid(10)).unwrap();
        assert_eq!(s.interpolate(s.grid().coord(3), s.grid().coord(6)), s.value(6, 3));
        let (x, y) = (0.4321, 0.2468);
        let expected = (x + y - 1.0 + 1.0) / 2.0;
        assert!((s.interpolate(x, y) - expected).abs() < 1e-12);
    }

    #[test]
    fn rescaled_recall_spans_sample_range() {
        let s = build_surface(Metric::Recall, 3.0, grid(8)).unwrap();
        assert_eq!(s.values().min(), 0.5 / 8.0);
        assert_eq!(s.values().max(), 7.5 / 8.0);
    }
}
