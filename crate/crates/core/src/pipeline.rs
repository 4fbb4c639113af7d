//! The end-to-end low-pass transform:
//! center, project, analyze, weight, synthesize, reconstruct, resample.

use rand::Rng as _;

use crate::cloud::{center, Centroid, Point, PointCloud};
use crate::error::{Error, Result};
use crate::filter::{apply_filter, FilterSpec};
use crate::grid::{build_grid, GridSpec};
use crate::projection::{project, RadialField};
use crate::rng::{seeded, Rng};
use crate::sht::ShtPlan;

pub const DEFAULT_BANDLIMIT: usize = 100;
pub const DEFAULT_TARGET_POINTS: usize = 1024;

/// Emits one point per occupied cell of `projected`, in row-major cell order,
/// at radius `max(filtered, 0)` along the node direction, shifted by `centroid`.
pub fn reconstruct(filtered: &RadialField, projected: &RadialField, centroid: Centroid) -> Result<PointCloud> {
    if filtered.grid() != projected.grid() {
        return Err(Error::GridMismatch(
            "filtered field and projection use different grids".into(),
        ));
    }
    let grid = filtered.grid();
    let points: Vec<Point> = projected
        .occupied_cells()
        .into_iter()
        .map(|cell| {
            let (j, k) = grid.cell_coords(cell);
            let r = filtered.values()[cell].max(0.0);
            let d = grid.node_direction(j, k);
            [
                centroid.0[0] + r * d[0],
                centroid.0[1] + r * d[1],
                centroid.0[2] + r * d[2],
            ]
        })
        .collect();
    PointCloud::new(points)
}

/// Pads `cloud` to `n_target` points by appending uniform draws (with
/// replacement) from its existing points.
pub fn resample(cloud: &PointCloud, n_target: usize, seed: u64) -> Result<PointCloud> {
    resample_with(cloud, n_target, &mut seeded(seed))
}

pub fn resample_with(cloud: &PointCloud, n_target: usize, rng: &mut Rng) -> Result<PointCloud> {
    let n = cloud.len();
    if n_target < n {
        return Err(Error::ShrinkRequested {
            have: n,
            target: n_target,
        });
    }
    let mut points = cloud.points().to_vec();
    points.reserve(n_target - n);
    for _ in n..n_target {
        points.push(cloud.points()[rng.random_range(0..n)]);
    }
    cloud.derive(points)
}

/// A reusable low-pass transform for one filter and bandlimit.
#[derive(Debug, Clone)]
pub struct Lowpass {
    filter: FilterSpec,
    plan: ShtPlan,
}

/// Intermediate products of one low-pass run, for inspection and tests.
#[derive(Debug, Clone)]
pub struct LowpassTrace {
    pub centroid: Centroid,
    pub projected: RadialField,
    pub filtered: RadialField,
    pub reconstructed: PointCloud,
}

impl Lowpass {
    pub fn new(filter: FilterSpec, bandlimit: usize) -> Result<Self> {
        filter.validate()?;
        Ok(Self {
            filter,
            plan: ShtPlan::new(build_grid(bandlimit)?),
        })
    }

    pub fn filter(&self) -> &FilterSpec {
        &self.filter
    }

    pub fn grid(&self) -> &GridSpec {
        self.plan.grid()
    }

    /// Runs every stage up to (not including) resampling.
    pub fn trace(&self, cloud: &PointCloud) -> Result<LowpassTrace> {
        let (centered, centroid) = center(cloud)?;
        let projected = project(&centered, self.plan.grid())?;
        let coeffs = self.plan.forward(&projected)?;
        let weighted = apply_filter(&coeffs, &self.filter)?;
        let filtered = self.plan.inverse(&weighted)?;
        let reconstructed = reconstruct(&filtered, &projected, centroid)?;
        let reconstructed = cloud.derive(reconstructed.into_points())?;
        Ok(LowpassTrace {
            centroid,
            projected,
            filtered,
            reconstructed,
        })
    }

    pub fn apply(&self, cloud: &PointCloud, n_target: usize, seed: u64) -> Result<PointCloud> {
        self.apply_with(cloud, n_target, &mut seeded(seed))
    }

    pub fn apply_with(&self, cloud: &PointCloud, n_target: usize, rng: &mut Rng) -> Result<PointCloud> {
        let trace = self.trace(cloud)?;
        resample_with(&trace.reconstructed, n_target, rng)
    }
}

/// Low-pass filters a single cloud and pads it back to `n_target` points.
pub fn lowpass_cloud(
    cloud: &PointCloud,
    filter: &FilterSpec,
    bandlimit: usize,
    n_target: usize,
    seed: u64,
) -> Result<PointCloud> {
    Lowpass::new(*filter, bandlimit)?.apply(cloud, n_target, seed)
}
