use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Real harmonic coefficients `c(l, m)` for `0 <= l <= L`, `-l <= m <= l`.
///
/// Stored flat at index `l^2 + l + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    bandlimit: usize,
    coeffs: Vec<f64>,
}

impl ShCoefficients {
    pub fn zeros(bandlimit: usize) -> Self {
        Self {
            bandlimit,
            coeffs: vec![0.0; (bandlimit + 1) * (bandlimit + 1)],
        }
    }

    pub fn from_vec(bandlimit: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = (bandlimit + 1) * (bandlimit + 1);
        if coeffs.len() != expected {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for bandlimit {bandlimit} (expected {expected})",
                coeffs.len()
            )));
        }
        Ok(Self { bandlimit, coeffs })
    }

    #[inline]
    pub fn index(l: usize, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= l);
        ((l * l + l) as i64 + m) as usize
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    #[inline]
    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.coeffs[(l * l + l).wrapping_add_signed(m as isize)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i64, v: f64) {
        self.coeffs[(l * l + l).wrapping_add_signed(m as isize)] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// `(l, m, c)` in order of increasing `l`, then `m`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.bandlimit).flat_map(move |l| {
            (-(l as i64)..=l as i64).map(move |m| (l, m, self.get(l, m)))
        })
    }

    /// Squared Euclidean norm of the flat coefficient vector.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// CSV with header `l,m,c`; values use the shortest exact decimal form.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,m,c\n");
        for (l, m, c) in self.iter() {
            let _ = writeln!(s, "{l},{m},{c}");
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Per-degree power `P(l) = sum_m c(l, m)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum(pub Vec<f64>);

impl PowerSpectrum {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Power in degrees `l >= 1`, i.e. the variance of the field about its mean
    /// up to a factor of `4 pi`.
    pub fn non_constant(&self) -> f64 {
        self.0.iter().skip(1).sum()
    }
}

pub fn power_spectrum(coeffs: &ShCoefficients) -> PowerSpectrum {
    PowerSpectrum(
        (0..=coeffs.bandlimit())
            .map(|l| {
                (-(l as i64)..=l as i64)
                    .map(|m| {
                        let c = coeffs.get(l, m);
                        c * c
                    })
                    .sum()
            })
            .collect(),
    )
}
