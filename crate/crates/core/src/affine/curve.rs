use crate::error::{Error, Result};

/// Forward variance `u ↦ ξ_t(u)` seen at the evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum ForwardVarianceCurve {
    Flat(f64),
    /// Linear interpolation between samples, flat beyond the ends.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl ForwardVarianceCurve {
    pub fn flat(xi: f64) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidArgument(format!("forward variance {xi} < 0")));
        }
        Ok(ForwardVarianceCurve::Flat(xi))
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidArgument(
                "curve needs matching, non-empty times and values".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "curve times must be strictly increasing".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("forward variance {v} < 0")));
        }
        Ok(ForwardVarianceCurve::Sampled { times, values })
    }

    pub fn at(&self, u: f64) -> f64 {
        match self {
            ForwardVarianceCurve::Flat(x) => *x,
            ForwardVarianceCurve::Sampled { times, values } => {
                let n = times.len();
                if u <= times[0] {
                    return values[0];
                }
                if u >= times[n - 1] {
                    return values[n - 1];
                }
                let k = times.partition_point(|&s| s <= u) - 1;
                let w = (u - times[k]) / (times[k + 1] - times[k]);
                values[k] + w * (values[k + 1] - values[k])
            }
        }
    }
}
