//! Input-restoration baselines (statistical outlier removal, simple random
//! sampling) and seeded perturbation generators.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::kdtree::KdTree;
use crate::rng::seeded;
use crate::synthetic::{jitter, random_direction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SorParams {
    pub k: usize,
    pub alpha: f64,
}

impl Default for SorParams {
    fn default() -> Self {
        Self { k: 2, alpha: 1.1 }
    }
}

impl SorParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidSpec("SOR k must be at least 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidSpec(format!("SOR alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Mean distance from each point to its `k` nearest other points.
pub fn mean_knn_distances(cloud: &PointCloud, k: usize) -> Vec<f64> {
    let tree = KdTree::new(cloud.points(), None);
    (0..cloud.len())
        .into_par_iter()
        .map(|i| tree.knn_distances(i, k).iter().sum::<f64>() / k as f64)
        .collect()
}

/// Statistical outlier removal.
///
/// Drops every point whose mean k-nearest-neighbor distance exceeds
/// `mean + alpha * std` of that statistic over the cloud (population std).
/// Survivors keep their relative order.
pub fn sor(cloud: &PointCloud, params: &SorParams) -> Result<PointCloud> {
    params.validate()?;
    if cloud.len() <= params.k {
        return Err(Error::TooFewPoints {
            points: cloud.len(),
            k: params.k,
        });
    }
    let d = mean_knn_distances(cloud, params.k);
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let threshold = mean + params.alpha * var.sqrt();
    let kept = cloud
        .points()
        .iter()
        .zip(&d)
        .filter(|(_, &di)| di <= threshold)
        .map(|(p, _)| *p)
        .collect();
    cloud.derive(kept)
}

/// Simple random sampling: drops `n_drop` uniformly chosen points.
pub fn srs(cloud: &PointCloud, n_drop: usize, seed: u64) -> Result<PointCloud> {
    if n_drop >= cloud.len() {
        return Err(Error::DropTooLarge {
            drop: n_drop,
            points: cloud.len(),
        });
    }
    let mut rng = seeded(seed);
    let mut dropped = vec![false; cloud.len()];
    for i in rand::seq::index::sample(&mut rng, cloud.len(), n_drop) {
        dropped[i] = true;
    }
    let kept = cloud
        .points()
        .iter()
        .zip(&dropped)
        .filter(|(_, &d)| !d)
        .map(|(p, _)| *p)
        .collect();
    cloud.derive(kept)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbKind {
    /// iid Gaussian displacement with standard deviation `sigma` on every coordinate.
    ShiftGaussian { sigma: f64 },
    /// `count` extra points at uniform directions about the centroid, with
    /// radii uniform in `[r_min, r_max]`.
    AddOutliers { count: usize, r_min: f64, r_max: f64 },
    /// Removes `count` uniformly chosen points.
    DropRandom { count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbSpec {
    #[serde(flatten)]
    pub kind: PerturbKind,
    pub seed: u64,
}

impl PerturbSpec {
    pub fn validate(&self, cloud_len: usize) -> Result<()> {
        match self.kind {
            PerturbKind::ShiftGaussian { sigma } if !(sigma.is_finite() && sigma >= 0.0) => {
                Err(Error::InvalidSpec(format!("sigma must be >= 0, got {sigma}")))
            }
            PerturbKind::AddOutliers { r_min, r_max, .. }
                if !(r_min.is_finite() && r_max.is_finite() && 0.0 <= r_min && r_min <= r_max) =>
            {
                Err(Error::InvalidSpec(format!("invalid outlier radius range [{r_min}, {r_max}]")))
            }
            PerturbKind::DropRandom { count } if count >= cloud_len => Err(Error::InvalidSpec(
                format!("cannot drop {count} of {cloud_len} points"),
            )),
            _ => Ok(()),
        }
    }
}

pub fn perturb(cloud: &PointCloud, spec: &PerturbSpec) -> Result<PointCloud> {
    spec.validate(cloud.len())?;
    match spec.kind {
        PerturbKind::ShiftGaussian { sigma } => {
            if sigma == 0.0 {
                return Ok(cloud.clone());
            }
            Ok(jitter(cloud, sigma, &mut seeded(spec.seed)))
        }
        PerturbKind::AddOutliers { count, r_min, r_max } => {
            let mut rng = seeded(spec.seed);
            let c = cloud.centroid().0;
            let mut pts = cloud.points().to_vec();
            for _ in 0..count {
                let d = random_direction(&mut rng);
                let r = if r_max > r_min { rng.random_range(r_min..r_max) } else { r_min };
                pts.push([c[0] + r * d[0], c[1] + r * d[1], c[2] + r * d[2]]);
            }
            cloud.derive(pts)
        }
        PerturbKind::DropRandom { count } => srs(cloud, count, spec.seed),
    }
}
