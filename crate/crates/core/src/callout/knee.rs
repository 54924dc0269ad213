//! Kneedle knee detection on an ascending list of values.
//!
//! Indices are normalized to `[0, 1]` and so are values. The knee of a
//! convex curve (flat, then a sharp upturn) is the maximum of `x - y`; the
//! knee of a concave curve (sharp rise, then flat) is the maximum of `y - x`.
//! No smoothing or sensitivity threshold is applied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KneeShape {
    Convex,
    Concave,
}

/// Where the knee landed and why.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knee {
    pub index: usize,
    pub value: f64,
    /// `None` when the fallback (largest value) was used.
    pub shape: Option<KneeShape>,
}

fn validate(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Input("kneedle needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("kneedle values must be finite".into()));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Input("kneedle values must be sorted ascending".into()));
    }
    Ok(())
}

/// Normalized difference curve `y_norm - x_norm`, or `None` for flat or tiny input.
pub fn difference_curve(values: &[f64]) -> Option<Vec<f64>> {
    let m = values.len();
    if m < 3 {
        return None;
    }
    let (lo, hi) = (values[0], values[m - 1]);
    let span = hi - lo;
    if span <= 0.0 {
        return None;
    }
    let last = (m - 1) as f64;
    Some(
        values
            .iter()
            .enumerate()
            .map(|(i, &y)| (y - lo) / span - i as f64 / last)
            .collect(),
    )
}

fn peak(curve: &[f64], sign: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &d) in curve.iter().enumerate() {
        let d = sign * d;
        if d > 0.0 && best.is_none_or(|(_, b)| d > b) {
            best = Some((i, d));
        }
    }
    best
}

fn fallback(values: &[f64]) -> Knee {
    Knee {
        index: values.len() - 1,
        value: values[values.len() - 1],
        shape: None,
    }
}

/// Knee for a known curve shape. Falls back to the largest value when the
/// list has fewer than three entries or the difference curve never peaks.
pub fn kneedle_with_shape(values: &[f64], shape: KneeShape) -> Result<Knee> {
    validate(values)?;
    let Some(curve) = difference_curve(values) else {
        return Ok(fallback(values));
    };
    let sign = match shape {
        KneeShape::Convex => -1.0,
        KneeShape::Concave => 1.0,
    };
    Ok(match peak(&curve, sign) {
        Some((index, _)) => Knee {
            index,
            value: values[index],
            shape: Some(shape),
        },
        None => fallback(values),
    })
}

/// Knee with the curve shape picked from the larger excursion of the
/// difference curve; convex wins ties.
pub fn kneedle_detect(values: &[f64]) -> Result<Knee> {
    validate(values)?;
    let Some(curve) = difference_curve(values) else {
        return Ok(fallback(values));
    };
    let shape = match (peak(&curve, -1.0), peak(&curve, 1.0)) {
        (None, None) => return Ok(fallback(values)),
        (Some(_), None) => KneeShape::Convex,
        (None, Some(_)) => KneeShape::Concave,
        (Some((_, convex)), Some((_, concave))) => {
            if convex >= concave {
                KneeShape::Convex
            } else {
                KneeShape::Concave
            }
        }
    };
    kneedle_with_shape(values, shape)
}

/// Knee value of an ascending list.
pub fn kneedle(values: &[f64]) -> Result<f64> {
    kneedle_detect(values).map(|k| k.value)
}
