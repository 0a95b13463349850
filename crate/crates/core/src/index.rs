//! Exact nearest-neighbor queries over an immutable point cloud.
//!
//! The index is an axis-aligned splitting tree with a brute-force fallback.
//! Both paths return exactly the same `(distance, witness)` for every query:
//! distances are compared as squared values computed in a single fixed
//! accumulation order, and ties are broken towards the lowest point id. That
//! contract is what makes every downstream argmin witness deterministic.

use crate::cloud::{dist2, PointCloud};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 16;
/// Above this ambient dimension tree pruning stops paying for itself.
const BRUTE_DIM_LIMIT: usize = 12;
/// Below this cloud size the brute-force scan wins outright.
const BRUTE_N_LIMIT: usize = 64;

#[derive(Debug, Clone)]
enum Node {
    /// Points `order[start..end]`.
    Leaf { start: u32, end: u32 },
    /// Left child is `self + 1` in preorder layout; `right` is explicit.
    /// Left subtree holds coordinates `<= value` along `dim`, right `>= value`.
    Split { dim: u32, value: f64, right: u32 },
}

/// Read-only nearest-neighbor index over a borrowed [`PointCloud`].
///
/// Safe to query concurrently from many threads.
#[derive(Debug)]
pub struct SpatialIndex<'a> {
    cloud: &'a PointCloud,
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl<'a> SpatialIndex<'a> {
    /// Builds with the automatic strategy: a splitting tree for large
    /// low-dimensional clouds, a brute-force scan otherwise.
    pub fn build(cloud: &'a PointCloud) -> SpatialIndex<'a> {
        if cloud.dim() > BRUTE_DIM_LIMIT || cloud.len() < BRUTE_N_LIMIT {
            SpatialIndex::build_brute(cloud)
        } else {
            SpatialIndex::build_tree(cloud)
        }
    }

    /// Forces the brute-force strategy.
    pub fn build_brute(cloud: &'a PointCloud) -> SpatialIndex<'a> {
        SpatialIndex { cloud, nodes: Vec::new(), order: Vec::new() }
    }

    /// Forces the tree strategy regardless of size.
    pub fn build_tree(cloud: &'a PointCloud) -> SpatialIndex<'a> {
        let n = cloud.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 2);
        build_node(cloud, &mut order, 0, n, &mut nodes);
        SpatialIndex { cloud, nodes, order }
    }

    pub fn cloud(&self) -> &PointCloud {
        self.cloud
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    pub fn is_tree(&self) -> bool {
        !self.nodes.is_empty()
    }

    fn check_dim(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.cloud.dim() {
            return Err(Error::DimensionMismatch { expected: self.cloud.dim(), got: q.len() });
        }
        Ok(())
    }

    /// Distance from `q` to the cloud and the lowest point id attaining it.
    pub fn nearest(&self, q: &[f64]) -> Result<(f64, usize)> {
        self.check_dim(q)?;
        Ok(self.nearest_unchecked(q))
    }

    #[inline]
    pub(crate) fn nearest_unchecked(&self, q: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, u32::MAX);
        if self.nodes.is_empty() {
            for (id, p) in self.cloud.iter().enumerate() {
                let d2 = dist2(q, p);
                if d2 < best.0 || (d2 == best.0 && (id as u32) < best.1) {
                    best = (d2, id as u32);
                }
            }
        } else {
            self.search(0, q, &mut best);
        }
        (best.0.sqrt(), best.1 as usize)
    }

    fn search(&self, node: usize, q: &[f64], best: &mut (f64, u32)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &id in &self.order[start as usize..end as usize] {
                    let d2 = dist2(q, self.cloud.point(id as usize));
                    if d2 < best.0 || (d2 == best.0 && id < best.1) {
                        *best = (d2, id);
                    }
                }
            }
            Node::Split { dim, value, right } => {
                let diff = q[dim as usize] - value;
                let (near, far) =
                    if diff < 0.0 { (node + 1, right as usize) } else { (right as usize, node + 1) };
                self.search(near, q, best);
                // `<=` keeps subtrees at exactly the best distance alive, so a
                // lower-id tie on the far side is never lost.
                if diff * diff <= best.0 {
                    self.search(far, q, best);
                }
            }
        }
    }

    /// All points within `radius` (inclusive) of `q`, as `(distance, id)`
    /// pairs sorted by `(distance, id)`.
    pub fn within_radius(&self, q: &[f64], radius: f64) -> Result<Vec<(f64, usize)>> {
        self.check_dim(q)?;
        let mut out = Vec::new();
        self.within_radius_unchecked(q, radius, &mut out);
        Ok(out)
    }

    pub(crate) fn within_radius_unchecked(
        &self,
        q: &[f64],
        radius: f64,
        out: &mut Vec<(f64, usize)>,
    ) {
        out.clear();
        if radius < 0.0 {
            return;
        }
        let r2 = if radius.is_finite() { radius * radius } else { f64::INFINITY };
        if self.nodes.is_empty() {
            for (id, p) in self.cloud.iter().enumerate() {
                let d2 = dist2(q, p);
                if d2 <= r2 {
                    out.push((d2.sqrt(), id));
                }
            }
        } else {
            self.collect(0, q, r2, out);
        }
        out.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    }

    fn collect(&self, node: usize, q: &[f64], r2: f64, out: &mut Vec<(f64, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &id in &self.order[start as usize..end as usize] {
                    let d2 = dist2(q, self.cloud.point(id as usize));
                    if d2 <= r2 {
                        out.push((d2.sqrt(), id as usize));
                    }
                }
            }
            Node::Split { dim, value, right } => {
                let diff = q[dim as usize] - value;
                let (near, far) =
                    if diff < 0.0 { (node + 1, right as usize) } else { (right as usize, node + 1) };
                self.collect(near, q, r2, out);
                if diff * diff <= r2 {
                    self.collect(far, q, r2, out);
                }
            }
        }
    }
}

fn build_node(cloud: &PointCloud, order: &mut [u32], lo: usize, hi: usize, nodes: &mut Vec<Node>) {
    let len = hi - lo;
    if len <= LEAF_SIZE {
        order[lo..hi].sort_unstable();
        nodes.push(Node::Leaf { start: lo as u32, end: hi as u32 });
        return;
    }
    // Split along the widest coordinate.
    let dim = cloud.dim();
    let mut widest = 0;
    let mut widest_extent = -1.0;
    for d in 0..dim {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &id in &order[lo..hi] {
            let c = cloud.point(id as usize)[d];
            min = min.min(c);
            max = max.max(c);
        }
        let extent = max - min;
        if extent > widest_extent {
            widest_extent = extent;
            widest = d;
        }
    }
    let mid = len / 2;
    let slice = &mut order[lo..hi];
    slice.select_nth_unstable_by(mid, |&a, &b| {
        let ca = cloud.point(a as usize)[widest];
        let cb = cloud.point(b as usize)[widest];
        ca.partial_cmp(&cb).unwrap().then(a.cmp(&b))
    });
    let split_value = cloud.point(slice[mid] as usize)[widest];

    let here = nodes.len();
    nodes.push(Node::Split { dim: widest as u32, value: split_value, right: 0 });
    build_node(cloud, order, lo, lo + mid, nodes);
    let right = nodes.len() as u32;
    if let Node::Split { right: r, .. } = &mut nodes[here] {
        *r = right;
    }
    build_node(cloud, order, lo + mid, hi, nodes);
}
