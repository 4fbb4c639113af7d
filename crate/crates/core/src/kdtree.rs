//! Static 3-d tree used for nearest-direction and k-nearest-neighbor queries.
//!
//! Queries return exactly what an exhaustive scan would: candidate ordering
//! uses the same floating-point expressions as a brute-force loop, and pruning
//! keeps a small slack so that near-ties are always inspected.

use std::collections::BinaryHeap;

use ordered_float_lite::OrdF64;

use crate::cloud::Point;

const PRUNE_SLACK: f64 = 1e-12;

pub(crate) struct KdTree<'a> {
    points: &'a [Point],
    /// Implicit balanced tree: the median of `order[lo..hi]` is the node,
    /// split on axis `depth % 3`.
    order: Vec<usize>,
}

impl<'a> KdTree<'a> {
    /// Builds a tree over the points at `indices` (all points when `None`).
    pub fn new(points: &'a [Point], indices: Option<Vec<usize>>) -> Self {
        let mut order = indices.unwrap_or_else(|| (0..points.len()).collect());
        build(points, &mut order, 0);
        Self { points, order }
    }

    /// Index of the point with the largest dot product against `q`; ties go to
    /// the lowest index. Points and `q` must be unit vectors.
    pub fn max_dot(&self, q: Point) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        self.max_dot_rec(q, 0, self.order.len(), 0, &mut best);
        best.map(|(_, i)| i)
    }

    fn max_dot_rec(&self, q: Point, lo: usize, hi: usize, depth: usize, best: &mut Option<(f64, usize)>) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let idx = self.order[mid];
        let p = self.points[idx];
        let d = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        match *best {
            Some((bd, bi)) if d < bd || (d == bd && idx > bi) => {}
            _ => *best = Some((d, idx)),
        }
        let axis = depth % 3;
        let delta = q[axis] - p[axis];
        let (near, far) = if delta <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.max_dot_rec(q, near.0, near.1, depth + 1, best);
        let bound = 1.0 - 0.5 * delta * delta;
        if let Some((bd, _)) = *best {
            if bound < bd - PRUNE_SLACK {
                return;
            }
        }
        self.max_dot_rec(q, far.0, far.1, depth + 1, best);
    }

    /// Euclidean distances from point `query` to its `k` nearest other points,
    /// ascending. The query index itself is excluded; duplicates are not.
    pub fn knn_distances(&self, query: usize, k: usize) -> Vec<f64> {
        let mut heap: BinaryHeap<OrdF64> = BinaryHeap::with_capacity(k + 1);
        if k > 0 {
            self.knn_rec(query, k, 0, self.order.len(), 0, &mut heap);
        }
        let mut d2: Vec<f64> = heap.into_iter().map(|v| v.0).collect();
        d2.sort_by(f64::total_cmp);
        d2.into_iter().map(f64::sqrt).collect()
    }

    fn knn_rec(&self, query: usize, k: usize, lo: usize, hi: usize, depth: usize, heap: &mut BinaryHeap<OrdF64>) {
        if lo >= hi {
            return;
        }
        let q = self.points[query];
        let mid = lo + (hi - lo) / 2;
        let idx = self.order[mid];
        let p = self.points[idx];
        if idx != query {
            let d2 = sq_dist(p, q);
            if heap.len() < k {
                heap.push(OrdF64(d2));
            } else if d2 < heap.peek().unwrap().0 {
                heap.pop();
                heap.push(OrdF64(d2));
            }
        }
        let axis = depth % 3;
        let delta = q[axis] - p[axis];
        let (near, far) = if delta <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.knn_rec(query, k, near.0, near.1, depth + 1, heap);
        if heap.len() == k && delta * delta > heap.peek().unwrap().0 {
            return;
        }
        self.knn_rec(query, k, far.0, far.1, depth + 1, heap);
    }
}

#[inline]
pub(crate) fn sq_dist(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

fn build(points: &[Point], order: &mut [usize], depth: usize) {
    if order.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points[a][axis]
            .total_cmp(&points[b][axis])
            .then(a.cmp(&b))
    });
    let (left, right) = order.split_at_mut(mid);
    build(points, left, depth + 1);
    build(points, &mut right[1..], depth + 1);
}

mod ordered_float_lite {
    /// Total-ordered `f64` for the kNN heap.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct OrdF64(pub f64);

    impl Eq for OrdF64 {}

    impl PartialOrd for OrdF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    impl Ord for OrdF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}
