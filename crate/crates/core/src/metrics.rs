//! The relative confusion form and the catalog of deterministic metrics.
//!
//! Every metric is evaluated on the relative form of a confusion matrix:
//! with the positive class normalized to one unit and `r` negative units,
//! `tp = tpr`, `fn = 1 - tpr`, `tn = r * tnr` and `fp = r * (1 - tnr)`.
//! Two count matrices with the same rates and ratio therefore score the same.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Returns `Ok(ratio)` when `ratio` is a usable imbalance ratio.
pub fn check_ratio(ratio: f64) -> Result<f64> {
    if ratio.is_finite() && ratio > 0.0 {
        Ok(ratio)
    } else {
        Err(Error::InvalidRatio(ratio))
    }
}

/// A point `(tpr, tnr)` of the base contingency space at imbalance `1:ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativePerformance {
    tpr: f64,
    tnr: f64,
    ratio: f64,
}

/// The four cells of a confusion matrix in relative form (`p = 1`, `n = r`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeConfusion {
    pub tp: f64,
    pub fn_: f64,
    pub tn: f64,
    pub fp: f64,
}

impl RelativePerformance {
    pub fn new(tpr: f64, tnr: f64, ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tpr) || !(0.0..=1.0).contains(&tnr) {
            return Err(Error::InvalidRate { tpr, tnr });
        }
        check_ratio(ratio)?;
        Ok(Self { tpr, tnr, ratio })
    }

    pub fn tpr(&self) -> f64 {
        self.tpr
    }

    pub fn tnr(&self) -> f64 {
        self.tnr
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn confusion(&self) -> RelativeConfusion {
        RelativeConfusion {
            tp: self.tpr,
            fn_: 1.0 - self.tpr,
            tn: self.ratio * self.tnr,
            fp: self.ratio * (1.0 - self.tnr),
        }
    }
}

/// Raw counts of a binary confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountConfusion {
    pub tp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

impl CountConfusion {
    pub fn new(tp: u64, fn_: u64, tn: u64, fp: u64) -> Self {
        Self { tp, fn_, tn, fp }
    }

    /// Number of positive instances.
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Number of negative instances.
    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }

    /// Multiplies every cell by `k`. The relative form is unchanged.
    pub fn scaled(&self, k: u64) -> Self {
        Self::new(self.tp * k, self.fn_ * k, self.tn * k, self.fp * k)
    }

    /// `tpr = tp/p`, `tnr = tn/n`, `ratio = n/p`.
    pub fn to_relative(&self) -> Result<RelativePerformance> {
        let p = self.positives();
        let n = self.negatives();
        if p == 0 {
            return Err(Error::DegenerateClass("positive"));
        }
        if n == 0 {
            return Err(Error::DegenerateClass("negative"));
        }
        let (p, n) = (p as f64, n as f64);
        RelativePerformance::new(self.tp as f64 / p, self.tn as f64 / n, n / p)
    }

    /// True when both matrices share the same relative form.
    pub fn relatively_identical(&self, other: &CountConfusion) -> Result<bool> {
        // Cross-multiplication keeps this exact for integer counts.
        let (p1, n1) = (self.positives() as u128, self.negatives() as u128);
        let (p2, n2) = (other.positives() as u128, other.negatives() as u128);
        if p1 == 0 || p2 == 0 {
            return Err(Error::DegenerateClass("positive"));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::DegenerateClass("negative"));
        }
        Ok(self.tp as u128 * p2 == other.tp as u128 * p1
            && self.tn as u128 * n2 == other.tn as u128 * n1
            && n1 * p2 == n2 * p1)
    }
}

/// Closed interval of raw metric values mapped onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", from = "[f64; 2]")]
pub struct RescaleInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RescaleInterval {
    pub const UNIT: Self = Self { lo: 0.0, hi: 1.0 };
    pub const SYMMETRIC: Self = Self { lo: -1.0, hi: 1.0 };

    /// Maps `raw` into `[0, 1]`, clamping values outside the interval.
    pub fn rescale(&self, raw: f64) -> f64 {
        ((raw - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    pub fn contains(&self, raw: f64) -> bool {
        self.lo <= raw && raw <= self.hi
    }
}

impl From<RescaleInterval> for [f64; 2] {
    fn from(r: RescaleInterval) -> Self {
        [r.lo, r.hi]
    }
}

impl From<[f64; 2]> for RescaleInterval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

/// A deterministic evaluation metric, with its rescale range and the value
/// substituted where its formula is indeterminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Accuracy,
    Precision,
    Recall,
    F1,
    /// F-beta score, `beta > 0`.
    FBeta(f64),
    /// True skill statistic, `tpr - fpr`.
    Tss,
    /// Updated Heidke skill score.
    Hss,
    YoudenJ,
    /// Gilbert's ratio of success, `tp / (tp + fp + fn)`.
    Gilbert,
    /// Doolittle's association index, `(tp*tn - fn*fp)^2 / (p*n*p'*n')`.
    Doolittle,
}

const CATALOG: [Metric; 9] = [
    Metric::Accuracy,
    Metric::Precision,
    Metric::Recall,
    Metric::F1,
    Metric::Tss,
    Metric::Hss,
    Metric::YoudenJ,
    Metric::Gilbert,
    Metric::Doolittle,
];

/// The full catalog in stable order: the seven studied metrics first, then
/// the extensions.
pub fn list_metrics() -> Vec<Metric> {
    CATALOG.to_vec()
}

/// The seven metrics whose sensitivity ordering is established.
pub fn studied_metrics() -> Vec<Metric> {
    CATALOG.iter().copied().filter(|m| !m.is_extension()).collect()
}

impl Metric {
    pub fn fbeta(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Metric::FBeta(beta))
        } else {
            Err(Error::InvalidBeta(beta))
        }
    }

    /// Symbolic name, e.g. `youden_j` or `fbeta(2)`.
    pub fn id(&self) -> String {
        match self {
            Metric::Accuracy => "accuracy".into(),
            Metric::Precision => "precision".into(),
            Metric::Recall => "recall".into(),
            Metric::F1 => "f1".into(),
            Metric::FBeta(beta) => format!("fbeta({beta})"),
            Metric::Tss => "tss".into(),
            Metric::Hss => "hss".into(),
            Metric::YoudenJ => "youden_j".into(),
            Metric::Gilbert => "gilbert".into(),
            Metric::Doolittle => "doolittle".into(),
        }
    }

    pub fn theoretical_range(&self) -> RescaleInterval {
        match self {
            Metric::Tss | Metric::YoudenJ | Metric::Hss => RescaleInterval::SYMMETRIC,
            _ => RescaleInterval::UNIT,
        }
    }

    /// Raw value used where the formula is 0/0.
    pub fn undefined_value(&self) -> f64 {
        0.0
    }

    /// Metrics outside the studied seven.
    pub fn is_extension(&self) -> bool {
        matches!(self, Metric::FBeta(_) | Metric::Gilbert | Metric::Doolittle)
    }

    pub fn evaluate(&self, x: &RelativePerformance) -> f64 {
        self.evaluate_rates(x.tpr, x.tnr, x.ratio)
    }

    /// Closed form over `(tpr, tnr, r)`. Callers guarantee the arguments are
    /// in range; [`RelativePerformance::new`] is the checked entry point.
    #[inline]
    pub fn evaluate_rates(&self, tpr: f64, tnr: f64, r: f64) -> f64 {
        let ratio_or_undefined = |num: f64, den: f64| {
            if den == 0.0 {
                self.undefined_value()
            } else {
                num / den
            }
        };
        match *self {
            Metric::Accuracy => (tpr + r * tnr) / (1.0 + r),
            Metric::Precision => ratio_or_undefined(tpr, tpr + r * (1.0 - tnr)),
            Metric::Recall => tpr,
            Metric::F1 => ratio_or_undefined(2.0 * tpr, 2.0 * tpr + r * (1.0 - tnr) + (1.0 - tpr)),
            Metric::FBeta(beta) => {
                let b2 = beta * beta;
                let num = (1.0 + b2) * tpr;
                ratio_or_undefined(num, num + b2 * (1.0 - tpr) + r * (1.0 - tnr))
            }
            // tpr - fpr; youden_j takes the algebraically equal route
            Metric::Tss => tpr - (1.0 - tnr),
            Metric::YoudenJ => tpr + tnr - 1.0,
            Metric::Hss => ratio_or_undefined(
                2.0 * r * (tpr + tnr - 1.0),
                (1.0 - tpr) + r * tnr + r * tpr + r * r * (1.0 - tnr),
            ),
            Metric::Gilbert => ratio_or_undefined(tpr, 1.0 + r * (1.0 - tnr)),
            Metric::Doolittle => {
                // p = 1, n = r; the common factor r cancels once.
                let skill = tpr + tnr - 1.0;
                let predicted_pos = tpr + r * (1.0 - tnr);
                let predicted_neg = (1.0 - tpr) + r * tnr;
                ratio_or_undefined(r * skill * skill, predicted_pos * predicted_neg)
            }
        }
    }

    /// Raw value rescaled onto `[0, 1]` by the theoretical range.
    #[inline]
    pub fn rescaled(&self, tpr: f64, tnr: f64, r: f64) -> f64 {
        self.theoretical_range().rescale(self.evaluate_rates(tpr, tnr, r))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_lowercase();
        let metric = match name.as_str() {
            "accuracy" => Metric::Accuracy,
            "precision" => Metric::Precision,
            "recall" => Metric::Recall,
            "f1" => Metric::F1,
            "tss" => Metric::Tss,
            "hss" => Metric::Hss,
            "youden_j" | "youden" => Metric::YoudenJ,
            "gilbert" => Metric::Gilbert,
            "doolittle" => Metric::Doolittle,
            _ => {
                let beta = name
                    .strip_prefix("fbeta(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .or_else(|| name.strip_prefix("fbeta:"))
                    .ok_or_else(|| Error::UnknownMetric(s.to_string()))?;
                let beta: f64 = beta.parse().map_err(|_| Error::UnknownMetric(s.to_string()))?;
                return Metric::fbeta(beta);
            }
        };
        Ok(metric)
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(tpr: f64, tnr: f64, r: f64) -> RelativePerformance {
        RelativePerformance::new(tpr, tnr, r).unwrap()
    }

    #[test]
    fn to_relative_divides_counts() {
        let x = CountConfusion::new(0, 1, 49, 0).to_relative().unwrap();
        assert_eq!((x.tpr(), x.tnr(), x.ratio()), (0.0, 1.0, 49.0));

        let x = CountConfusion::new(5, 0, 5, 0).to_relative().unwrap();
        assert_eq!((x.tpr(), x.tnr(), x.ratio()), (1.0, 1.0, 1.0));

        let x = CountConfusion::new(3, 3, 7, 7).to_relative().unwrap();
        assert_eq!((x.tpr(), x.tnr()), (0.5, 0.5));
        assert!((x.ratio() - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_classes_are_rejected() {
        assert_eq!(
            CountConfusion::new(0, 0, 3, 1).to_relative(),
            Err(Error::DegenerateClass("positive"))
        );
        assert_eq!(
            CountConfusion::new(2, 1, 0, 0).to_relative(),
            Err(Error::DegenerateClass("negative"))
        );
    }

    #[test]
    fn relative_form_matches_rates() {
        let c = at(0.25, 0.75, 4.0).confusion();
        assert_eq!((c.tp, c.fn_, c.tn, c.fp), (0.25, 0.75, 3.0, 1.0));
    }

    #[test]
    fn relatively_identical_is_exact() {
        let a = CountConfusion::new(3, 1, 10, 30);
        assert!(a.relatively_identical(&a.scaled(7)).unwrap());
        assert!(!a.relatively_identical(&CountConfusion::new(3, 1, 11, 29)).unwrap());
    }

    #[test]
    fn rates_out_of_range_are_rejected() {
        assert!(RelativePerformance::new(1.5, 0.0, 1.0).is_err());
        assert!(RelativePerformance::new(0.5, -0.1, 1.0).is_err());
        assert_eq!(
            RelativePerformance::new(0.5, 0.5, 0.0),
            Err(Error::InvalidRatio(0.0))
        );
        assert!(RelativePerformance::new(0.5, 0.5, f64::NAN).is_err());
        assert!(RelativePerformance::new(0.5, 0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn worked_examples() {
        assert!((Metric::Accuracy.evaluate(&at(0.0, 1.0, 49.0)) - 0.98).abs() < 1e-15);
        for r in [0.01, 1.0, 49.0, 1e6] {
            assert_eq!(Metric::F1.evaluate(&at(1.0, 1.0, r)), 1.0);
            assert_eq!(Metric::Tss.evaluate(&at(0.5, 0.5, r)), 0.0);
        }
        assert_eq!(Metric::Precision.evaluate(&at(0.5, 0.5, 1.0)), 0.5);
        assert_eq!(Metric::Hss.evaluate(&at(1.0, 1.0, 1.0)), 1.0);
    }

    #[test]
    fn indeterminate_points_use_policy() {
        let all_negative = at(0.0, 1.0, 9.0);
        assert_eq!(Metric::Precision.evaluate(&all_negative), 0.0);
        assert_eq!(Metric::Doolittle.evaluate(&all_negative), 0.0);
        assert_eq!(Metric::Doolittle.evaluate(&at(1.0, 0.0, 9.0)), 0.0);
        // f1's denominator 1 + tpr + r(1 - tnr) never vanishes.
        assert_eq!(Metric::F1.evaluate(&all_negative), 0.0);
    }

    #[test]
    fn catalog_order_and_ranges() {
        let ids: Vec<String> = list_metrics().iter().map(Metric::id).collect();
        assert_eq!(
            ids,
            ["accuracy", "precision", "recall", "f1", "tss", "hss", "youden_j", "gilbert", "doolittle"]
        );
        for m in list_metrics() {
            let range = m.theoretical_range();
            assert!(range.lo < range.hi, "{m}");
        }
        assert_eq!(studied_metrics().len(), 7);
    }

    #[test]
    fn parse_round_trips_ids() {
        for m in list_metrics() {
            assert_eq!(m.id().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("fbeta(2)".parse::<Metric>().unwrap(), Metric::FBeta(2.0));
        assert_eq!("fbeta:0.5".parse::<Metric>().unwrap(), Metric::FBeta(0.5));
        assert_eq!(
            "nosuch".parse::<Metric>(),
            Err(Error::UnknownMetric("nosuch".into()))
        );
        assert_eq!("fbeta(0)".parse::<Metric>(), Err(Error::InvalidBeta(0.0)));
    }

    #[test]
    fn fbeta_one_is_f1() {
        let f = Metric::fbeta(1.0).unwrap();
        for &(tpr, tnr, r) in &[(0.1, 0.9, 3.0), (0.7, 0.2, 49.0), (0.5, 0.5, 0.2)] {
            let a = f.evaluate_rates(tpr, tnr, r);
            let b = Metric::F1.evaluate_rates(tpr, tnr, r);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rescale_clamps() {
        let r = RescaleInterval::SYMMETRIC;
        assert_eq!(r.rescale(0.5), 0.75);
        assert_eq!(r.rescale(-3.0), 0.0);
        assert_eq!(r.rescale(2.0), 1.0);
    }
}
