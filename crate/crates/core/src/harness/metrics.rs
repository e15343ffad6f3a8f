use serde::{Deserialize, Serialize};

use crate::approx::heaviside_ref;
use crate::comparator::{oracle_weights, ComparatorConfig, Variant};
use crate::error::{Error, Result};

/// Mean absolute error between two equal-length sequences.
pub fn mae(expected: &[f64], actual: &[f64]) -> Result<f64> {
    if expected.len() != actual.len() || expected.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "mae needs equal nonempty lengths, got {} and {}",
            expected.len(),
            actual.len()
        )));
    }
    let sum: f64 = expected.iter().zip(actual).map(|(e, a)| (e - a).abs()).sum();
    Ok(sum / expected.len() as f64)
}

/// `H(x)` minus the oracle weight of `gt_half` on `(x, 0)`.
pub fn simple_error(x: f64, r: u32) -> Result<f64> {
    let cfg = ComparatorConfig::new(r, Variant::GtHalf)?;
    let (w, _) = oracle_weights(x, 0.0, &cfg)?;
    Ok(heaviside_ref(x) - w)
}

/// The exact weights each selection approximates, including its tie rule.
pub fn ideal_weights(variant: Variant, x1: f64, x2: f64) -> (f64, f64) {
    let z = x1 - x2;
    let strict = |v: f64| if v > 0.0 { 1.0 } else { 0.0 };
    match variant {
        Variant::GtHalf => (heaviside_ref(z), heaviside_ref(-z)),
        Variant::LtHalf => (heaviside_ref(-z), heaviside_ref(z)),
        Variant::Gt => (strict(z), strict(-z)),
        Variant::Lt => (strict(-z), strict(z)),
        Variant::Eq => {
            let w = if z == 0.0 { 1.0 } else { 0.0 };
            (w, w)
        }
    }
}

/// Mean error of the instances whose gap falls in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_error: Option<f64>,
}

/// Bins `(gap, error)` samples into consecutive bins of `width` covering
/// `[0, max_gap)`.
pub fn gap_bins(samples: &[(f64, f64)], width: f64, max_gap: f64) -> Vec<GapBin> {
    let n = (max_gap / width).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let lo = i as f64 * width;
            let hi = lo + width;
            let errs: Vec<f64> =
                samples.iter().filter(|(g, _)| *g >= lo && *g < hi).map(|&(_, e)| e).collect();
            let mean_error = (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64);
            GapBin { lo, hi, count: errs.len(), mean_error }
        })
        .collect()
}

/// CSV with one `x` column and one simple-error column per `r`.
pub fn simple_error_csv(r_values: &[u32], points: usize, range: f64) -> Result<String> {
    let mut out = String::from("x");
    for r in r_values {
        out.push_str(&format!(",r{r}"));
    }
    out.push('\n');
    let n = points.max(2);
    for i in 0..n {
        let x = -range + 2.0 * range * i as f64 / (n - 1) as f64;
        out.push_str(&format!("{x:.6}"));
        for &r in r_values {
            out.push_str(&format!(",{:.6}", simple_error(x, r)?));
        }
        out.push('\n');
    }
    Ok(out)
}
