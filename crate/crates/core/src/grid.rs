//! Equiangular sampling grid on the unit sphere.

use std::f64::consts::PI;

use crate::cloud::Point;
use crate::error::{Error, Result};

pub const MAX_BANDLIMIT: usize = 512;

/// A `2(L+1) x 4(L+1)` equiangular grid for bandlimit `L`.
///
/// Row `j` sits at co-latitude `pi * j / n_lat` (the north pole is row 0, the
/// south pole is not sampled); column `k` at longitude `2 pi * k / n_lon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    bandlimit: usize,
    n_lat: usize,
    n_lon: usize,
}

pub fn build_grid(bandlimit: usize) -> Result<GridSpec> {
    if !(1..=MAX_BANDLIMIT).contains(&bandlimit) {
        return Err(Error::InvalidBandlimit(bandlimit));
    }
    let n_lat = 2 * (bandlimit + 1);
    Ok(GridSpec {
        bandlimit,
        n_lat,
        n_lon: 2 * n_lat,
    })
}

impl GridSpec {
    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn n_cells(&self) -> usize {
        self.n_lat * self.n_lon
    }

    pub fn theta(&self, j: usize) -> f64 {
        PI * j as f64 / self.n_lat as f64
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_lon as f64
    }

    #[inline]
    pub fn cell_index(&self, j: usize, k: usize) -> usize {
        j * self.n_lon + k
    }

    #[inline]
    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.n_lon, cell % self.n_lon)
    }

    /// Unit vector pointing at node `(j, k)`.
    pub fn node_direction(&self, j: usize, k: usize) -> Point {
        let (st, ct) = self.theta(j).sin_cos();
        let (sp, cp) = self.phi(k).sin_cos();
        [st * cp, st * sp, ct]
    }

    /// All node directions in row-major order.
    pub fn node_directions(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.n_cells());
        for j in 0..self.n_lat {
            for k in 0..self.n_lon {
                out.push(self.node_direction(j, k));
            }
        }
        out
    }
}
