use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use super::coeffs::ShCoefficients;
use super::legendre;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, MAX_BANDLIMIT};
use crate::projection::RadialField;

/// Precomputed quadrature weights and trigonometric tables for one grid.
///
/// The analysis is exact for fields bandlimited to the grid's `L`: the
/// co-latitude weights integrate `cos(n theta) sin(theta)` exactly for every
/// `n < n_lat`, and the longitude sum is exact for frequencies below `n_lon`.
/// Every reduction runs in a fixed order, so results do not depend on the
/// number of worker threads.
#[derive(Debug, Clone)]
pub struct ShtPlan {
    grid: GridSpec,
    /// Area weight of one node in row `j` (co-latitude weight times `dphi`).
    weights: Vec<f64>,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
    sin_theta: Vec<f64>,
    cos_theta: Vec<f64>,
}

impl ShtPlan {
    pub fn new(grid: GridSpec) -> Self {
        let n_lat = grid.n_lat();
        let n_lon = grid.n_lon();
        let dphi = 2.0 * PI / n_lon as f64;
        let weights = (0..n_lat)
            .map(|j| {
                let theta = grid.theta(j);
                let series: f64 = (0..n_lat / 2)
                    .map(|h| {
                        let odd = (2 * h + 1) as f64;
                        (odd * theta).sin() / odd
                    })
                    .sum();
                4.0 / n_lat as f64 * theta.sin() * series * dphi
            })
            .collect();
        let (sin_table, cos_table) = (0..n_lon).map(|k| grid.phi(k).sin_cos()).unzip();
        let (sin_theta, cos_theta) = (0..n_lat).map(|j| grid.theta(j).sin_cos()).unzip();
        Self {
            grid,
            weights,
            cos_table,
            sin_table,
            sin_theta,
            cos_theta,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Quadrature weight of a single node in row `j`.
    pub fn node_weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    /// Integrates a grid function over the sphere.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let n_lon = self.grid.n_lon();
        values
            .chunks(n_lon)
            .zip(&self.weights)
            .map(|(row, w)| w * row.iter().sum::<f64>())
            .sum()
    }

    pub fn forward(&self, field: &RadialField) -> Result<ShCoefficients> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch("field grid differs from plan grid".into()));
        }
        let lmax = self.grid.bandlimit();
        let n_lon = self.grid.n_lon();

        // Weighted longitude sums per row: (sum f cos(m phi), sum f sin(m phi)).
        let rows: Vec<(Vec<f64>, Vec<f64>)> = field
            .values()
            .par_chunks(n_lon)
            .enumerate()
            .map(|(j, row)| {
                let w = self.weights[j];
                let mut a = vec![0.0; lmax + 1];
                let mut b = vec![0.0; lmax + 1];
                for m in 0..=lmax {
                    let (mut sa, mut sb) = (0.0, 0.0);
                    let mut t = 0;
                    for &f in row {
                        sa += f * self.cos_table[t];
                        sb += f * self.sin_table[t];
                        t += m;
                        if t >= n_lon {
                            t -= n_lon;
                        }
                    }
                    a[m] = w * sa;
                    b[m] = w * sb;
                }
                (a, b)
            })
            .collect();

        // Legendre projection, one order at a time; each sum runs over rows in order.
        let per_order: Vec<(Vec<f64>, Vec<f64>)> = (0..=lmax)
            .into_par_iter()
            .map(|m| {
                let mut cos_part = vec![0.0; lmax + 1 - m];
                let mut sin_part = vec![0.0; lmax + 1 - m];
                let mut col = Vec::with_capacity(lmax + 1);
                for (j, (a, b)) in rows.iter().enumerate() {
                    legendre::column(m, lmax, self.cos_theta[j], self.sin_theta[j], &mut col);
                    for (i, p) in col.iter().enumerate() {
                        cos_part[i] += p * a[m];
                        sin_part[i] += p * b[m];
                    }
                }
                (cos_part, sin_part)
            })
            .collect();

        let mut out = ShCoefficients::zeros(lmax);
        for (m, (cos_part, sin_part)) in per_order.into_iter().enumerate() {
            for (i, (c, s)) in cos_part.into_iter().zip(sin_part).enumerate() {
                let l = m + i;
                if m == 0 {
                    out.set(l, 0, c);
                } else {
                    out.set(l, m as i64, SQRT_2 * c);
                    out.set(l, -(m as i64), SQRT_2 * s);
                }
            }
        }
        Ok(out)
    }

    /// Synthesizes `sum c(l, m) Y(l, m)` at every node. The returned field has
    /// every cell occupied once.
    pub fn inverse(&self, coeffs: &ShCoefficients) -> Result<RadialField> {
        let lmax = coeffs.bandlimit();
        if lmax > self.grid.bandlimit() {
            return Err(Error::GridMismatch(format!(
                "coefficients of bandlimit {lmax} exceed grid bandlimit {}",
                self.grid.bandlimit()
            )));
        }
        let n_lon = self.grid.n_lon();
        let values: Vec<f64> = (0..self.grid.n_lat())
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut a = vec![0.0; lmax + 1];
                let mut b = vec![0.0; lmax + 1];
                let mut col = Vec::with_capacity(lmax + 1);
                for m in 0..=lmax {
                    legendre::column(m, lmax, self.cos_theta[j], self.sin_theta[j], &mut col);
                    let (mut sa, mut sb) = (0.0, 0.0);
                    for (i, p) in col.iter().enumerate() {
                        let l = m + i;
                        sa += p * coeffs.get(l, m as i64);
                        if m > 0 {
                            sb += p * coeffs.get(l, -(m as i64));
                        }
                    }
                    if m == 0 {
                        a[0] = sa;
                    } else {
                        a[m] = SQRT_2 * sa;
                        b[m] = SQRT_2 * sb;
                    }
                }
                let mut row = vec![a[0]; n_lon];
                for m in 1..=lmax {
                    let mut t = 0;
                    for v in row.iter_mut() {
                        *v += a[m] * self.cos_table[t] + b[m] * self.sin_table[t];
                        t += m;
                        if t >= n_lon {
                            t -= n_lon;
                        }
                    }
                }
                row
            })
            .collect();
        RadialField::from_values(self.grid, values)
    }
}

pub fn forward_sht(field: &RadialField) -> Result<ShCoefficients> {
    ShtPlan::new(*field.grid()).forward(field)
}

pub fn inverse_sht(coeffs: &ShCoefficients, grid: &GridSpec) -> Result<RadialField> {
    ShtPlan::new(*grid).inverse(coeffs)
}

/// Real orthonormal spherical harmonic `Y(l, m)` at `(theta, phi)`.
pub fn eval_ylm(l: usize, m: i64, theta: f64, phi: f64) -> Result<f64> {
    let am = m.unsigned_abs() as usize;
    if am > l || l > MAX_BANDLIMIT {
        return Err(Error::InvalidDegreeOrder { l: l as i64, m });
    }
    let (s, c) = theta.sin_cos();
    let mut col = Vec::with_capacity(l + 1);
    legendre::column(am, l, c, s, &mut col);
    let p = col[l - am];
    Ok(match m {
        0 => p,
        m if m > 0 => SQRT_2 * p * (m as f64 * phi).cos(),
        _ => SQRT_2 * p * (am as f64 * phi).sin(),
    })
}
