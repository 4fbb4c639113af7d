//! Point-cloud value types and coordinate conversions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Point = [f64; 3];

/// An ordered, nonempty list of finite 3D points with optional provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
    label: Option<String>,
    source_path: Option<String>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(index) = points
            .iter()
            .position(|p| !p.iter().all(|c| c.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            points,
            label: None,
            source_path: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_source_path(mut self, path: impl Into<String>) -> Self {
        self.source_path = Some(path.into());
        self
    }

    /// Builds a cloud that keeps this cloud's provenance but holds new points.
    pub fn derive(&self, points: Vec<Point>) -> Result<Self> {
        let mut out = Self::new(points)?;
        out.label.clone_from(&self.label);
        out.source_path.clone_from(&self.source_path);
        Ok(out)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a `PointCloud` holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn source_path(&self) -> Option<&str> {
        self.source_path.as_deref()
    }

    pub fn centroid(&self) -> Centroid {
        let n = self.points.len() as f64;
        let mut sum = [0.0; 3];
        for p in &self.points {
            for a in 0..3 {
                sum[a] += p[a];
            }
        }
        Centroid([sum[0] / n, sum[1] / n, sum[2] / n])
    }

    /// Largest distance from `origin` to any point.
    pub fn bounding_radius(&self, origin: Centroid) -> f64 {
        self.points
            .iter()
            .map(|p| norm(sub(*p, origin.0)))
            .fold(0.0, f64::max)
    }

    pub fn translated(&self, offset: Point) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| [p[0] + offset[0], p[1] + offset[1], p[2] + offset[2]])
            .collect();
        Self {
            points,
            label: self.label.clone(),
            source_path: self.source_path.clone(),
        }
    }
}

/// Arithmetic mean of a cloud's points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Centroid(pub Point);

impl Centroid {
    pub const ORIGIN: Centroid = Centroid([0.0; 3]);

    pub fn norm(&self) -> f64 {
        norm(self.0)
    }
}

/// `r >= 0`, co-latitude `theta` in `[0, pi]`, longitude `phi` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCoord {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalCoord {
    pub fn to_cartesian(&self, origin: Centroid) -> Point {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [
            origin.0[0] + self.r * st * cp,
            origin.0[1] + self.r * st * sp,
            origin.0[2] + self.r * ct,
        ]
    }
}

/// Translates the cloud so its centroid sits at the origin.
///
/// The returned `Centroid` is the translation that restores the input.
pub fn center(cloud: &PointCloud) -> Result<(PointCloud, Centroid)> {
    if cloud.points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let c = cloud.centroid();
    Ok((cloud.translated([-c.0[0], -c.0[1], -c.0[2]]), c))
}

/// Spherical coordinates of `point` about `origin`. The origin itself maps to
/// `r = theta = phi = 0`.
pub fn to_spherical(point: Point, origin: Centroid) -> SphericalCoord {
    let d = sub(point, origin.0);
    let r = norm(d);
    if r == 0.0 {
        return SphericalCoord {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        };
    }
    let theta = (d[2] / r).clamp(-1.0, 1.0).acos();
    let mut phi = d[1].atan2(d[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    // -0.0 and values that round up to 2pi both belong at 0.
    if phi >= 2.0 * PI || phi == 0.0 {
        phi = 0.0;
    }
    SphericalCoord { r, theta, phi }
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(PointCloud::new(vec![]), Err(Error::EmptyCloud)));
        assert!(matches!(
            PointCloud::new(vec![[0.0; 3], [f64::NAN, 0.0, 0.0]]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn center_examples() {
        let c = PointCloud::new(vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap();
        let (centered, centroid) = center(&c).unwrap();
        assert_eq!(centered.points(), c.points());
        assert_eq!(centroid, Centroid::ORIGIN);

        let c = PointCloud::new(vec![[2.0, 2.0, 2.0]]).unwrap();
        let (centered, centroid) = center(&c).unwrap();
        assert_eq!(centered.points(), &[[0.0, 0.0, 0.0]]);
        assert_eq!(centroid, Centroid([2.0, 2.0, 2.0]));
    }

    #[test]
    fn spherical_axis_cases() {
        let s = to_spherical([0.0, 0.0, 1.0], Centroid::ORIGIN);
        assert_eq!((s.r, s.theta, s.phi), (1.0, 0.0, 0.0));

        let s = to_spherical([1.0, 0.0, 0.0], Centroid::ORIGIN);
        assert_eq!(s.r, 1.0);
        assert_abs_diff_eq!(s.theta, PI / 2.0, epsilon = 1e-15);
        assert_eq!(s.phi, 0.0);

        let s = to_spherical([0.0, -1.0, 0.0], Centroid::ORIGIN);
        assert_abs_diff_eq!(s.theta, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.phi, 1.5 * PI, epsilon = 1e-15);

        let s = to_spherical([3.0, 3.0, 3.0], Centroid([3.0, 3.0, 3.0]));
        assert_eq!((s.r, s.theta, s.phi), (0.0, 0.0, 0.0));

        // negative zero on the y axis must not produce phi = 2pi
        let s = to_spherical([1.0, -0.0, 0.0], Centroid::ORIGIN);
        assert_eq!(s.phi, 0.0);
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        prop::array::uniform3(-100.0f64..100.0)
    }

    proptest! {
        #[test]
        fn spherical_roundtrip(p in arb_point(), o in arb_point()) {
            let origin = Centroid(o);
            let s = to_spherical(p, origin);
            prop_assert!(s.r >= 0.0);
            prop_assert!((0.0..=PI).contains(&s.theta));
            prop_assert!((0.0..2.0 * PI).contains(&s.phi));
            let back = s.to_cartesian(origin);
            let scale = s.r.max(norm(o)).max(1e-300);
            for a in 0..3 {
                prop_assert!((back[a] - p[a]).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn center_is_idempotent_and_zero_mean(pts in prop::collection::vec(arb_point(), 1..100)) {
            let cloud = PointCloud::new(pts).unwrap();
            let (once, c) = center(&cloud).unwrap();
            prop_assert!(once.centroid().norm() < 1e-12);
            let (twice, _) = center(&once).unwrap();
            for (a, b) in once.points().iter().zip(twice.points()) {
                for k in 0..3 {
                    prop_assert!((a[k] - b[k]).abs() < 1e-12);
                }
            }
            let restored = once.translated(c.0);
            for (a, b) in restored.points().iter().zip(cloud.points()) {
                for k in 0..3 {
                    prop_assert!((a[k] - b[k]).abs() < 1e-12);
                }
            }
        }
    }
}
