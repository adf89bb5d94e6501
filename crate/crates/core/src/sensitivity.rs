//! Class-imbalance sensitivity.
//!
//! The sensitivity of a metric at ratio `r` is the volume between its
//! balanced surface and its surface at `1:r`. The volume is approximated with
//! a midpoint Riemann sum over the grid, weighted by the cell area `1/t^2`, so
//! it lies in `[0, 1)` whatever the resolution.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{check_ratio, Metric};
use crate::surface::{build_surface, surface_delta, GridSpec, MetricSurface};

/// Ratios used for the agnostic verdict when none are given.
pub const DEFAULT_AGNOSTIC_SCHEDULE: [f64; 6] = [2.0, 5.0, 10.0, 49.0, 100.0, 1000.0];
pub const DEFAULT_AGNOSTIC_TOLERANCE: f64 = 1e-12;
/// Slack used when comparing sensitivities and their increments.
pub const DEFAULT_GROWTH_SLACK: f64 = 1e-6;

const MAX_SCHEDULE_LEN: usize = 100_000;

/// Strictly increasing list of positive imbalance ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RatioSchedule(Vec<f64>);

impl RatioSchedule {
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidSchedule("no ratios".into()));
        }
        for &r in &ratios {
            check_ratio(r).map_err(|_| Error::InvalidSchedule(format!("ratio {r} is not a finite positive number")))?;
        }
        if let Some(w) = ratios.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule(format!(
                "ratios must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self(ratios))
    }

    /// `start, start*factor, start*factor^2, ...` up to `stop`; `stop` itself
    /// is included only if the progression hits it exactly.
    pub fn geometric(start: f64, stop: f64, factor: f64) -> Result<Self> {
        check_ratio(start).map_err(|_| Error::InvalidSchedule(format!("start {start} must be positive")))?;
        if !stop.is_finite() || stop < start {
            return Err(Error::InvalidSchedule(format!("stop {stop} must be finite and >= start {start}")));
        }
        if !factor.is_finite() || factor <= 1.0 {
            return Err(Error::InvalidSchedule(format!("factor {factor} must be > 1")));
        }
        let mut ratios = Vec::new();
        for k in 0.. {
            let r = start * factor.powi(k);
            if r > stop {
                break;
            }
            if ratios.len() == MAX_SCHEDULE_LEN {
                return Err(Error::InvalidSchedule(format!("more than {MAX_SCHEDULE_LEN} ratios")));
            }
            ratios.push(r);
        }
        Self::new(ratios)
    }

    pub fn ratios(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for RatioSchedule {
    fn default() -> Self {
        Self(DEFAULT_AGNOSTIC_SCHEDULE.to_vec())
    }
}

impl TryFrom<Vec<f64>> for RatioSchedule {
    type Error = Error;

    fn try_from(ratios: Vec<f64>) -> Result<Self> {
        Self::new(ratios)
    }
}

impl From<RatioSchedule> for Vec<f64> {
    fn from(s: RatioSchedule) -> Self {
        s.0
    }
}

/// Parses either `start:stop:factor` or a comma-separated list of ratios.
impl FromStr for RatioSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let number = |part: &str| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSchedule(format!("`{part}` is not a number")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, factor] => Self::geometric(number(start)?, number(stop)?, number(factor)?),
            [list] => Self::new(list.split(',').map(number).collect::<Result<_>>()?),
            _ => Err(Error::InvalidSchedule(format!("expected start:stop:factor or a list, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySample {
    #[serde(rename = "r")]
    pub ratio: f64,
    #[serde(rename = "s")]
    pub sensitivity: f64,
}

/// Sensitivity of one metric sampled over a ratio schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    metric: Metric,
    grid: GridSpec,
    samples: Vec<SensitivitySample>,
}

impl SensitivityCurve {
    /// Builds a curve from precomputed samples. Ratios must be positive and
    /// non-decreasing, sensitivities within `[0, 1)`.
    pub fn new(metric: Metric, grid: GridSpec, samples: Vec<SensitivitySample>) -> Result<Self> {
        for s in &samples {
            check_ratio(s.ratio)?;
            if !(0.0..1.0).contains(&s.sensitivity) {
                return Err(Error::Parse(format!("sensitivity {} outside [0, 1)", s.sensitivity)));
            }
        }
        if samples.windows(2).any(|w| w[0].ratio > w[1].ratio) {
            return Err(Error::Parse("curve samples must be sorted by ratio".into()));
        }
        Ok(Self { metric, grid, samples })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn samples(&self) -> &[SensitivitySample] {
        &self.samples
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.ratio)
    }
}

/// Mean absolute difference between two surfaces of the same metric and grid.
pub fn volume_between(a: &MetricSurface, b: &MetricSurface) -> Result<f64> {
    Ok(surface_delta(a, b)?.mean())
}

pub fn sensitivity(metric: Metric, ratio: f64, grid: GridSpec) -> Result<f64> {
    let ratio = check_ratio(ratio)?;
    let balanced = build_surface(metric, 1.0, grid)?;
    let skewed = build_surface(metric, ratio, grid)?;
    volume_between(&balanced, &skewed)
}

/// Sensitivity at each ratio of `schedule`, reusing one balanced surface.
pub fn sensitivity_curve(metric: Metric, schedule: &RatioSchedule, grid: GridSpec) -> Result<SensitivityCurve> {
    let balanced = build_surface(metric, 1.0, grid)?;
    let sample_at = |&ratio: &f64| -> Result<SensitivitySample> {
        let skewed = build_surface(metric, ratio, grid)?;
        Ok(SensitivitySample { ratio, sensitivity: volume_between(&balanced, &skewed)? })
    };

    #[cfg(feature = "parallel")]
    let samples: Result<Vec<_>> = {
        use rayon::prelude::*;
        schedule.ratios().par_iter().map(sample_at).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let samples: Result<Vec<_>> = schedule.ratios().iter().map(sample_at).collect();

    Ok(SensitivityCurve { metric, grid, samples: samples? })
}

/// Sampled rendering of "`s = 0` for every positive ratio": true when every
/// ratio of `schedule` gives a sensitivity of at most `tol`.
pub fn is_agnostic(metric: Metric, schedule: &RatioSchedule, grid: GridSpec, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let curve = sensitivity_curve(metric, schedule, grid)?;
    Ok(curve.samples().iter().all(|s| s.sensitivity <= tol))
}

/// Shape of a sensitivity curve against `log r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    /// `s` never decreases as `r` grows.
    pub monotone: bool,
    /// Increments per equal `log r` step never increase.
    pub concave: bool,
    /// Smallest ratio from which the curve is concave through its last sample.
    pub concave_from: f64,
    /// Whether the ratios form a geometric progression.
    pub geometric: bool,
    /// Increments of `s` normalized to the mean `log r` step.
    pub increments: Vec<f64>,
}

impl GrowthReport {
    /// Monotone and concave in `log r`.
    pub fn is_logarithmic_like(&self) -> bool {
        self.monotone && self.concave
    }
}

pub fn log_growth_check(curve: &SensitivityCurve) -> Result<GrowthReport> {
    log_growth_check_with_slack(curve, DEFAULT_GROWTH_SLACK)
}

pub fn log_growth_check_with_slack(curve: &SensitivityCurve, slack: f64) -> Result<GrowthReport> {
    let mut points: Vec<SensitivitySample> = Vec::new();
    for s in curve.samples().iter().filter(|s| s.ratio >= 1.0) {
        if points.last().is_none_or(|last| last.ratio < s.ratio) {
            points.push(*s);
        }
    }
    if points.len() < 3 {
        return Err(Error::InsufficientSamples(points.len()));
    }

    let log_steps: Vec<f64> = points.windows(2).map(|w| (w[1].ratio / w[0].ratio).ln()).collect();
    let mean_step = log_steps.iter().sum::<f64>() / log_steps.len() as f64;
    let increments: Vec<f64> = points
        .windows(2)
        .zip(&log_steps)
        .map(|(w, step)| (w[1].sensitivity - w[0].sensitivity) * mean_step / step)
        .collect();

    let monotone = points.windows(2).all(|w| w[1].sensitivity >= w[0].sensitivity - slack);
    let first_concave = increments
        .windows(2)
        .rposition(|w| w[1] > w[0] + slack)
        .map_or(0, |k| k + 1);
    let geometric = log_steps.iter().all(|step| (step - mean_step).abs() <= 1e-9 * mean_step.abs().max(1.0));

    Ok(GrowthReport {
        monotone,
        concave: first_concave == 0,
        concave_from: points[first_concave].ratio,
        geometric,
        increments,
    })
}

/// Metrics ordered by descending sensitivity at `ratio`; ties are broken
/// alphabetically by metric id.
pub fn rank_by_sensitivity(metrics: &[Metric], ratio: f64, grid: GridSpec) -> Result<Vec<(Metric, f64)>> {
    let mut ranked = metrics
        .iter()
        .map(|&m| Ok((m, sensitivity(m, ratio, grid)?)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|(ma, sa), (mb, sb)| sb.total_cmp(sa).then_with(|| ma.id().cmp(&mb.id())));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t: usize) -> GridSpec {
        GridSpec::new(t).unwrap()
    }

    #[test]
    fn geometric_schedule_syntax() {
        let s: RatioSchedule = "1:1000:10".parse().unwrap();
        assert_eq!(s.ratios(), &[1.0, 10.0, 100.0, 1000.0]);
        let s: RatioSchedule = "1:64:2".parse().unwrap();
        assert_eq!(s.len(), 7);
        let s: RatioSchedule = "1:50:2".parse().unwrap();
        assert_eq!(s.ratios().last(), Some(&32.0));
        let s: RatioSchedule = "1".parse().unwrap();
        assert_eq!(s.ratios(), &[1.0]);
        let s: RatioSchedule = "2, 5,49".parse().unwrap();
        assert_eq!(s.ratios(), &[2.0, 5.0, 49.0]);
    }

    #[test]
    fn bad_schedules_fail() {
        for bad in ["", "3,2", "1,1", "0:10:2", "1:10:1", "1:10:0.5", "10:1:2", "1:2", "a", "-1", "1:inf:2"] {
            assert!(matches!(bad.parse::<RatioSchedule>(), Err(Error::InvalidSchedule(_))), "{bad}");
        }
    }

    #[test]
    fn balanced_sensitivity_is_exactly_zero() {
        for m in crate::list_metrics() {
            assert_eq!(sensitivity(m, 1.0, grid(32)).unwrap(), 0.0, "{m}");
        }
    }

    #[test]
    fn single_sample_curve() {
        let c = sensitivity_curve(Metric::F1, &"1".parse().unwrap(), grid(8)).unwrap();
        assert_eq!(c.samples(), &[SensitivitySample { ratio: 1.0, sensitivity: 0.0 }]);
    }

    #[test]
    fn curve_matches_pointwise_sensitivity() {
        let schedule: RatioSchedule = "0.5,1,3,49".parse().unwrap();
        let c = sensitivity_curve(Metric::Hss, &schedule, grid(24)).unwrap();
        for s in c.samples() {
            assert_eq!(s.sensitivity, sensitivity(Metric::Hss, s.ratio, grid(24)).unwrap());
        }
    }

    #[test]
    fn agnostic_verdicts() {
        let schedule = RatioSchedule::new(vec![2.0, 10.0, 49.0, 100.0, 1000.0]).unwrap();
        let g = grid(64);
        assert!(is_agnostic(Metric::Recall, &schedule, g, 1e-12).unwrap());
        assert!(is_agnostic(Metric::YoudenJ, &schedule, g, 1e-12).unwrap());
        assert!(!is_agnostic(Metric::Accuracy, &schedule, g, 1e-12).unwrap());
        assert_eq!(
            is_agnostic(Metric::Recall, &schedule, g, 0.0),
            Err(Error::InvalidTolerance(0.0))
        );
    }

    #[test]
    fn growth_of_precision_is_logarithmic_like() {
        let schedule = RatioSchedule::geometric(1.0, 1024.0, 2.0).unwrap();
        let c = sensitivity_curve(Metric::Precision, &schedule, grid(64)).unwrap();
        let report = log_growth_check(&c).unwrap();
        assert!(report.monotone && report.concave && report.geometric);
        assert_eq!(report.concave_from, 1.0);
        assert_eq!(report.increments.len(), 10);
    }

    #[test]
    fn growth_of_recall_is_trivially_flat() {
        let schedule = RatioSchedule::geometric(1.0, 64.0, 2.0).unwrap();
        let c = sensitivity_curve(Metric::Recall, &schedule, grid(16)).unwrap();
        let report = log_growth_check(&c).unwrap();
        assert!(report.is_logarithmic_like());
    }

    #[test]
    fn growth_check_needs_three_distinct_ratios() {
        let sample = |ratio, sensitivity| SensitivitySample { ratio, sensitivity };
        let repeated = SensitivityCurve::new(
            Metric::Precision,
            grid(8),
            vec![sample(4.0, 0.3), sample(4.0, 0.3), sample(4.0, 0.3)],
        )
        .unwrap();
        assert_eq!(log_growth_check(&repeated), Err(Error::InsufficientSamples(1)));

        let below_one = SensitivityCurve::new(
            Metric::Precision,
            grid(8),
            vec![sample(0.1, 0.3), sample(0.5, 0.1), sample(1.0, 0.0), sample(2.0, 0.1)],
        )
        .unwrap();
        assert_eq!(log_growth_check(&below_one), Err(Error::InsufficientSamples(2)));
    }

    #[test]
    fn growth_check_locates_convex_start() {
        let sample = |ratio, sensitivity| SensitivitySample { ratio, sensitivity };
        let c = SensitivityCurve::new(
            Metric::F1,
            grid(8),
            vec![sample(1.0, 0.0), sample(2.0, 0.05), sample(4.0, 0.15), sample(8.0, 0.2), sample(16.0, 0.22)],
        )
        .unwrap();
        let report = log_growth_check(&c).unwrap();
        assert!(report.monotone);
        assert!(!report.concave);
        assert_eq!(report.concave_from, 2.0);
    }

    #[test]
    fn ranking_breaks_ties_alphabetically() {
        let ranked = rank_by_sensitivity(&[Metric::Tss, Metric::Recall], 100.0, grid(16)).unwrap();
        assert_eq!(ranked, vec![(Metric::Recall, 0.0), (Metric::Tss, 0.0)]);
    }
}
