//! Projection of a centered cloud onto the equiangular grid.
//!
//! Each grid node takes the radius of the cloud point whose direction is
//! angularly closest to it. Independently, each point is assigned to its
//! closest node; the resulting occupancy decides which nodes emit points
//! during reconstruction.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::cloud::{dot, norm, to_spherical, Centroid, Point, PointCloud};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kdtree::KdTree;

/// Slack, in radians, when pruning grid rows during point-to-node search.
const ROW_PRUNE_SLACK: f64 = 1e-9;

/// Relative tolerance for the centering precondition.
pub const CENTERING_TOLERANCE: f64 = 1e-6;

/// A function sampled on the grid plus the point-to-cell assignment it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: GridSpec,
    values: Vec<f64>,
    occupancy: Vec<u32>,
    point_cell: Vec<usize>,
}

impl RadialField {
    /// A field with every cell occupied once, as if sampled from one point per node.
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.n_lat(),
                grid.n_lon()
            )));
        }
        Ok(Self {
            grid,
            values,
            occupancy: vec![1; grid.n_cells()],
            point_cell: (0..grid.n_cells()).collect(),
        })
    }

    /// Samples `f(theta, phi)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.n_lat() {
            let theta = grid.theta(j);
            for k in 0..grid.n_lon() {
                values.push(f(theta, grid.phi(k)));
            }
        }
        Self::from_values(grid, values).expect("sized from grid")
    }

    /// Same occupancy and assignment, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut out = Self::from_values(self.grid, values)?;
        out.occupancy.clone_from(&self.occupancy);
        out.point_cell.clone_from(&self.point_cell);
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Row-major `n_lat x n_lon` samples.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[self.grid.cell_index(j, k)]
    }

    /// Row-major count of points assigned to each cell.
    pub fn occupancy(&self) -> &[u32] {
        &self.occupancy
    }

    /// Flat cell index of every source point, in input order.
    pub fn point_cell(&self) -> &[usize] {
        &self.point_cell
    }

    /// Flat indices of cells with at least one assigned point, ascending.
    pub fn occupied_cells(&self) -> Vec<usize> {
        self.occupancy
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Source points assigned to `cell`, ascending.
    pub fn assigned_points(&self, cell: usize) -> Vec<usize> {
        self.point_cell
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cell)
            .map(|(i, _)| i)
            .collect()
    }

    /// Debug dump with columns `j,k,theta,phi,value,occupancy`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,k,theta,phi,value,occupancy\n");
        for j in 0..self.grid.n_lat() {
            for k in 0..self.grid.n_lon() {
                let c = self.grid.cell_index(j, k);
                let _ = writeln!(
                    s,
                    "{j},{k},{},{},{},{}",
                    self.grid.theta(j),
                    self.grid.phi(k),
                    self.values[c],
                    self.occupancy[c]
                );
            }
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Projects a centroid-centered cloud onto `grid`.
pub fn project(cloud: &PointCloud, grid: &GridSpec) -> Result<RadialField> {
    let pts = cloud.points();
    let centroid = cloud.centroid();
    let tolerance = CENTERING_TOLERANCE * cloud.bounding_radius(Centroid::ORIGIN);
    if centroid.norm() > tolerance {
        return Err(Error::NotCentered {
            offset: centroid.norm(),
            tolerance,
        });
    }

    let radii: Vec<f64> = pts.iter().map(|&p| norm(p)).collect();
    let dirs: Vec<Point> = pts
        .iter()
        .zip(&radii)
        .map(|(p, &r)| {
            if r > 0.0 {
                [p[0] / r, p[1] / r, p[2] / r]
            } else {
                [0.0, 0.0, 1.0]
            }
        })
        .collect();
    let nonzero: Vec<usize> = (0..pts.len()).filter(|&i| radii[i] > 0.0).collect();
    // With no directional point at all, every node falls back to the first point.
    let fallback = 0usize;
    let tree = KdTree::new(&dirs, Some(nonzero));

    let nodes = grid.node_directions();
    let n_lon = grid.n_lon();
    let values: Vec<f64> = nodes
        .par_chunks(n_lon)
        .flat_map_iter(|row| {
            row.iter()
                .map(|&n| radii[tree.max_dot(n).unwrap_or(fallback)])
                .collect::<Vec<_>>()
        })
        .collect();

    let point_cell: Vec<usize> = dirs
        .par_iter()
        .map(|&d| nearest_node(grid, &nodes, d))
        .collect();
    let mut occupancy = vec![0u32; grid.n_cells()];
    for &c in &point_cell {
        occupancy[c] += 1;
    }

    Ok(RadialField {
        grid: *grid,
        values,
        occupancy,
        point_cell,
    })
}

/// Flat index of the node with the largest dot product against unit vector `d`;
/// ties go to the smallest `(j, k)`.
fn nearest_node(grid: &GridSpec, nodes: &[Point], d: Point) -> usize {
    let n_lat = grid.n_lat();
    let n_lon = grid.n_lon();
    let s = to_spherical(d, Centroid::ORIGIN);
    let dtheta = std::f64::consts::PI / n_lat as f64;
    let dphi = 2.0 * std::f64::consts::PI / n_lon as f64;

    let mut best_dot = f64::NEG_INFINITY;
    let mut best_cell = usize::MAX;
    let consider = |cell: usize, best_dot: &mut f64, best_cell: &mut usize| {
        let v = dot(nodes[cell], d);
        if v > *best_dot || (v == *best_dot && cell < *best_cell) {
            *best_dot = v;
            *best_cell = cell;
        }
    };
    let scan_row = |j: usize, best_dot: &mut f64, best_cell: &mut usize| {
        if j == 0 {
            // Every node in the pole row is the same direction; column 0 wins ties.
            consider(0, best_dot, best_cell);
            return;
        }
        let kf = (s.phi / dphi).floor() as i64;
        for dk in -1..=2 {
            let k = (kf + dk).rem_euclid(n_lon as i64) as usize;
            consider(grid.cell_index(j, k), best_dot, best_cell);
        }
    };

    let j0 = ((s.theta / dtheta).round() as usize).min(n_lat - 1);
    scan_row(j0, &mut best_dot, &mut best_cell);
    let within = |j: usize, best_dot: f64| {
        let best_angle = best_dot.clamp(-1.0, 1.0).acos();
        (s.theta - grid.theta(j)).abs() <= best_angle + ROW_PRUNE_SLACK
    };
    for j in (0..j0).rev() {
        if !within(j, best_dot) {
            break;
        }
        scan_row(j, &mut best_dot, &mut best_cell);
    }
    for j in j0 + 1..n_lat {
        if !within(j, best_dot) {
            break;
        }
        scan_row(j, &mut best_dot, &mut best_cell);
    }
    best_cell
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn antipodal_pair_on_coarse_grid() {
        let grid = build_grid(1).unwrap();
        let cloud = PointCloud::new(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        let field = project(&cloud, &grid).unwrap();
        assert!(field.values().iter().all(|&v| v == 1.0));
        assert_eq!(field.occupancy().iter().sum::<u32>(), 2);
        // north pole maps to (0,0); the unsampled south pole to the lowest row, column 0
        assert_eq!(field.point_cell(), &[0, grid.cell_index(3, 0)]);
        assert_eq!(field.assigned_points(0), vec![0]);
    }

    #[test]
    fn rejects_uncentered_cloud() {
        let grid = build_grid(2).unwrap();
        let cloud = PointCloud::new(vec![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(project(&cloud, &grid), Err(Error::NotCentered { .. })));
    }

    #[test]
    fn zero_radius_points_only_win_when_alone() {
        let grid = build_grid(2).unwrap();
        let cloud = PointCloud::new(vec![[0.0; 3], [0.0, 0.0, 2.0], [0.0, 0.0, -2.0]]).unwrap();
        let field = project(&cloud, &grid).unwrap();
        assert!(field.values().iter().all(|&v| v == 2.0));
        assert_eq!(field.point_cell()[0], 0);

        let lone = PointCloud::new(vec![[0.0; 3]]).unwrap();
        let field = project(&lone, &grid).unwrap();
        assert!(field.values().iter().all(|&v| v == 0.0));
        assert_eq!(field.occupied_cells(), vec![0]);
    }

    #[test]
    fn from_values_checks_size_and_csv_has_all_cells() {
        let grid = build_grid(1).unwrap();
        assert!(RadialField::from_values(grid, vec![0.0; 3]).is_err());
        let f = RadialField::from_fn(grid, |t, _| t);
        let csv = f.to_csv();
        assert_eq!(csv.lines().count(), 1 + grid.n_cells());
        assert!(csv.starts_with("j,k,theta,phi,value,occupancy\n0,0,0,0,0,1\n"));
    }
}
