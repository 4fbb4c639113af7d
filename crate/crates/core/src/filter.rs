//! Degree-domain weighting of harmonic coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sht::ShCoefficients;

/// Weight profile over harmonic degree.
///
/// * `Gaussian { s }`: `w(l) = exp(-l^2 / (2 s^2))`, so `w(0) = 1` and the
///   weights decay monotonically with `l`.
/// * `Box { cutoff }`: `w(l) = 1` for `l <= cutoff`, else 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FilterSpec {
    Gaussian { s: f64 },
    Box { cutoff: usize },
}

impl FilterSpec {
    pub fn gaussian(s: f64) -> Result<Self> {
        let f = FilterSpec::Gaussian { s };
        f.validate()?;
        Ok(f)
    }

    pub fn boxcar(cutoff: usize) -> Self {
        FilterSpec::Box { cutoff }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterSpec::Gaussian { s } if !(s.is_finite() && s > 0.0) => Err(
                Error::InvalidFilterParam(format!("gaussian S must be positive and finite, got {s}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn weight(&self, l: usize) -> f64 {
        match *self {
            FilterSpec::Gaussian { s } => {
                let l = l as f64;
                (-(l * l) / (2.0 * s * s)).exp()
            }
            FilterSpec::Box { cutoff } => {
                if l <= cutoff {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// `w(0) ..= w(bandlimit)`.
pub fn degree_weights(filter: &FilterSpec, bandlimit: usize) -> Result<Vec<f64>> {
    filter.validate()?;
    Ok((0..=bandlimit).map(|l| filter.weight(l)).collect())
}

/// Multiplies every `c(l, m)` by `w(l)`.
pub fn apply_filter(coeffs: &ShCoefficients, filter: &FilterSpec) -> Result<ShCoefficients> {
    let weights = degree_weights(filter, coeffs.bandlimit())?;
    let mut out = coeffs.clone();
    let data = out.as_mut_slice();
    for (l, w) in weights.iter().enumerate() {
        for c in &mut data[l * l..(l + 1) * (l + 1)] {
            *c *= w;
        }
    }
    Ok(out)
}
