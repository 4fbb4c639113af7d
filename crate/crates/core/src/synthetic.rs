//! Deterministic synthetic shapes for tests, benchmarks and demos.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::cloud::{Point, PointCloud};
use crate::grid::GridSpec;
use crate::rng::{seeded, Rng};

/// Uniformly distributed unit vector.
pub fn random_direction(rng: &mut Rng) -> Point {
    loop {
        let v: Point = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// `2 * pairs` points on the unit sphere, stored as interleaved antipodal
/// pairs so the centroid is exactly the origin.
pub fn sphere_antipodal(pairs: usize, seed: u64) -> PointCloud {
    let mut rng = seeded(seed);
    let mut pts = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let d = random_direction(&mut rng);
        pts.push(d);
        pts.push([-d[0], -d[1], -d[2]]);
    }
    PointCloud::new(pts).expect("nonempty")
}

/// One unit-radius point per grid node, skipping the north-pole row.
///
/// The pole row is a single direction repeated `n_lon` times, and leaving it
/// out makes the cloud's centroid the origin, so the cloud projects back onto
/// exactly its own nodes.
pub fn grid_nodes(grid: &GridSpec) -> PointCloud {
    let mut pts = Vec::with_capacity((grid.n_lat() - 1) * grid.n_lon());
    for j in 1..grid.n_lat() {
        for k in 0..grid.n_lon() {
            pts.push(grid.node_direction(j, k));
        }
    }
    PointCloud::new(pts).expect("nonempty")
}

/// Uniform samples on the surface of the cube `[-half, half]^3`, stored as
/// mirrored pairs `p, -p` so the centroid is the cube center. An odd `n`
/// ends with one unpaired sample.
pub fn cube_surface(n: usize, half: f64, seed: u64) -> PointCloud {
    let mut rng = seeded(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let face = rng.random_range(0..6usize);
        let axis = face / 2;
        let sign = if face % 2 == 0 { 1.0 } else { -1.0 };
        let mut p = [0.0; 3];
        p[axis] = sign * half;
        p[(axis + 1) % 3] = rng.random_range(-half..half);
        p[(axis + 2) % 3] = rng.random_range(-half..half);
        pts.push(p);
        if pts.len() < n {
            pts.push([-p[0], -p[1], -p[2]]);
        }
    }
    PointCloud::new(pts).expect("nonempty")
}

/// A crude airplane: an elongated fuselage, a flat wing and a tail fin.
pub fn airplane(n: usize, seed: u64) -> PointCloud {
    let mut rng = seeded(seed);
    let pts = (0..n)
        .map(|i| match i % 10 {
            // fuselage: ellipsoid along x
            0..=5 => {
                let d = random_direction(&mut rng);
                [1.0 * d[0], 0.15 * d[1], 0.15 * d[2]]
            }
            // wings: thin slab spanning y
            6..=8 => [
                rng.random_range(-0.25..0.15),
                rng.random_range(-0.9..0.9),
                rng.random_range(-0.02..0.02),
            ],
            // tail fin
            _ => [
                rng.random_range(-0.95..-0.75),
                rng.random_range(-0.02..0.02),
                rng.random_range(0.0..0.35),
            ],
        })
        .collect();
    PointCloud::new(pts).expect("nonempty")
}

/// Adds iid zero-mean Gaussian noise of standard deviation `sigma` to each coordinate.
pub fn jitter(cloud: &PointCloud, sigma: f64, rng: &mut Rng) -> PointCloud {
    let pts = cloud
        .points()
        .iter()
        .map(|p| {
            let n: Point = [
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            ];
            [p[0] + sigma * n[0], p[1] + sigma * n[1], p[2] + sigma * n[2]]
        })
        .collect();
    cloud.derive(pts).expect("same length")
}
