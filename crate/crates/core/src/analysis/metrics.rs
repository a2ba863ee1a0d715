//! Rate-sweep metrics. Series are `(masking rate, value)` pairs; rates are matched
//! to the baseline within `RATE_TOLERANCE`.

use super::ordered_sum;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const RATE_TOLERANCE: f64 = 1e-9;

fn baseline_value<T: Real>(values: &[(f64, T)], baseline_rate: f64) -> Result<T> {
    values
        .iter()
        .find(|(r, _)| (r - baseline_rate).abs() <= RATE_TOLERANCE)
        .map(|&(_, v)| v)
        .ok_or_else(|| Error::Config(format!("no value for baseline rate {baseline_rate}")))
}

/// Population standard deviation, summed left to right.
pub fn population_std<T: Real>(values: &[T]) -> T {
    let n = T::from_count(values.len() as u64);
    let mean = ordered_sum(values.iter().copied()) / n;
    let var = ordered_sum(values.iter().map(|&x| (x - mean) * (x - mean))) / n;
    var.sqrt()
}

/// `(x - x_baseline) / sigma` for every point, sigma the population standard deviation
/// over all points.
pub fn normalized_performance<T: Real>(
    values: &[(f64, T)],
    baseline_rate: f64,
) -> Result<Vec<(f64, T)>> {
    if values.len() < 2 {
        return Err(Error::Config(
            "normalization needs values for at least two rates".into(),
        ));
    }
    let base = baseline_value(values, baseline_rate)?;
    let xs: Vec<T> = values.iter().map(|&(_, v)| v).collect();
    let sigma = population_std(&xs);
    if sigma == T::zero() {
        return Err(Error::Degenerate(
            "all values are equal, standard deviation is zero".into(),
        ));
    }
    Ok(values
        .iter()
        .map(|&(r, v)| (r, (v - base) / sigma))
        .collect())
}

/// `x - x_baseline` for every point.
pub fn relative_metric<T: Real>(values: &[(f64, T)], baseline_rate: f64) -> Result<Vec<(f64, T)>> {
    let base = baseline_value(values, baseline_rate)?;
    Ok(values.iter().map(|&(r, v)| (r, v - base)).collect())
}
