use crate::{Error, Result};

/// Symmetric mean absolute percentage error on the 0–200 scale.
///
/// `(200 / T) · Σ |F_t − A_t| / (|A_t| + |F_t|)`, where a day with
/// `A_t = F_t = 0` contributes 0.
pub fn smape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::InvalidInput("SMAPE of an empty series".into()));
    }
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(&a, &f)| {
            let denom = a.abs() + f.abs();
            if denom == 0.0 {
                0.0
            } else {
                (f - a).abs() / denom
            }
        })
        .sum();
    Ok(200.0 * sum / actual.len() as f64)
}
