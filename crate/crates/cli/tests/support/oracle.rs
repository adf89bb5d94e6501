//! Independent reference computations for the acceptance suite. Nothing here
//! calls into the library's metric or surface code.

use contingency::Metric;

/// Midpoint-rule sensitivities on a 1024 x 1024 grid, computed once with
/// [`midpoint_sensitivity`] and frozen.
pub const GOLDEN_PRECISION_49: f64 = 0.4550561562551131;
pub const GOLDEN_F1_49: f64 = 0.4068494200275664;

#[derive(Debug, Clone, Copy)]
pub struct Counts {
    pub tp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

fn div0(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Textbook formulas on raw counts.
pub fn raw_from_counts(metric: Metric, c: Counts) -> f64 {
    let (tp, fn_, tn, fp) = (c.tp as f64, c.fn_ as f64, c.tn as f64, c.fp as f64);
    raw(metric, tp, fn_, tn, fp)
}

fn raw(metric: Metric, tp: f64, fn_: f64, tn: f64, fp: f64) -> f64 {
    let (p, n) = (tp + fn_, tn + fp);
    let precision = div0(tp, tp + fp);
    let recall = tp / p;
    match metric {
        Metric::Accuracy => (tp + tn) / (p + n),
        Metric::Precision => precision,
        Metric::Recall => recall,
        Metric::F1 => div0(2.0 * precision * recall, precision + recall),
        Metric::Tss => tp / p - fp / n,
        Metric::Hss => 2.0 * (tp * tn - fn_ * fp) / (p * (fn_ + tn) + n * (tp + fp)),
        Metric::YoudenJ => (tp * tn - fn_ * fp) / ((tp + fn_) * (fp + tn)),
        other => panic!("no oracle for {other}"),
    }
}

/// Mean absolute difference between the `[0, 1]`-valued metric at 1:1 and
/// at 1:r, sampled at cell centers of a `t x t` grid.
pub fn midpoint_sensitivity(metric: Metric, r: f64, t: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..t {
        let tpr = (i as f64 + 0.5) / t as f64;
        for j in 0..t {
            let tnr = (j as f64 + 0.5) / t as f64;
            let at = |r: f64| raw(metric, tpr, 1.0 - tpr, r * tnr, r * (1.0 - tnr));
            total += (at(1.0) - at(r)).abs();
        }
    }
    total / (t * t) as f64
}
