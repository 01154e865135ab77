use std::cmp::Ordering;

use super::{squared_distance, PointCloud};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 8;
const NO_CHILD: u32 = u32::MAX;

/// A data point returned by a neighbor query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

#[derive(Clone, Debug)]
struct Node {
    start: u32,
    end: u32,
    left: u32,
    right: u32,
}

/// Exact k-nearest-neighbor index (a bounding-box kd-tree) over a
/// [`PointCloud`].
///
/// Results are ordered by distance with ties broken by ascending point
/// index, so they coincide with a stable sort of the exhaustive distance
/// list. The index is immutable once built and can be shared across
/// threads.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    cloud: PointCloud,
    fingerprint: u64,
    /// Point indices in tree order.
    order: Vec<u32>,
    /// Coordinates in tree order.
    packed: Vec<f64>,
    nodes: Vec<Node>,
    /// Per node: `dim` lower bounds followed by `dim` upper bounds.
    boxes: Vec<f64>,
}

/// Per-point multiplicative weights on squared distance, with per-node
/// minima for pruning. Built by [`NeighborIndex::weighting`].
#[derive(Clone, Debug)]
pub struct ScaledNeighbors {
    fingerprint: u64,
    /// Weight of the point at each tree position.
    packed: Vec<f64>,
    /// Weight of each point by cloud index.
    by_index: Vec<f64>,
    node_min: Vec<f64>,
}

trait Weighting {
    fn point(&self, pos: usize) -> f64;
    fn index(&self, i: usize) -> f64;
    fn node(&self, node: usize) -> f64;
}

struct Unit;

impl Weighting for Unit {
    #[inline(always)]
    fn point(&self, _: usize) -> f64 {
        1.0
    }
    #[inline(always)]
    fn index(&self, _: usize) -> f64 {
        1.0
    }
    #[inline(always)]
    fn node(&self, _: usize) -> f64 {
        1.0
    }
}

impl Weighting for ScaledNeighbors {
    #[inline(always)]
    fn point(&self, pos: usize) -> f64 {
        self.packed[pos]
    }
    #[inline(always)]
    fn index(&self, i: usize) -> f64 {
        self.by_index[i]
    }
    #[inline(always)]
    fn node(&self, node: usize) -> f64 {
        self.node_min[node]
    }
}

/// Bounded ascending list of `(key, index)` candidates.
struct Best<'a> {
    k: usize,
    items: &'a mut Vec<(f64, usize)>,
}

impl Best<'_> {
    #[inline]
    fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].0
        }
    }

    #[inline]
    fn offer(&mut self, key: f64, index: usize) {
        let full = self.items.len() == self.k;
        if full {
            let (wk, wi) = self.items[self.k - 1];
            if key > wk || (key == wk && index > wi) {
                return;
            }
        }
        let at = self
            .items
            .partition_point(|&(k, i)| k < key || (k == key && i < index));
        if self.items.get(at) == Some(&(key, index)) {
            return;
        }
        if full {
            self.items.pop();
        }
        self.items.insert(at, (key, index));
    }
}

fn cmp_key(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

impl NeighborIndex {
    pub fn new(cloud: PointCloud) -> Self {
        let n = cloud.len();
        let dim = cloud.dim();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        let mut boxes = Vec::new();
        build(&cloud, &mut order, 0, n, &mut nodes, &mut boxes);
        let mut packed = Vec::with_capacity(n * dim);
        for &i in &order {
            packed.extend_from_slice(cloud.point(i as usize));
        }
        Self {
            fingerprint: cloud.fingerprint(),
            cloud,
            order,
            packed,
            nodes,
            boxes,
        }
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    fn check_rank(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(Error::RankOutOfRange { k, n: self.len() });
        }
        Ok(())
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "query has dimension {}, index has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// The `k` nearest data points to `x`, nearest first.
    pub fn knn(&self, x: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.check_rank(k)?;
        self.check_query(x)?;
        let mut buf = Vec::with_capacity(k);
        self.search(x, k, &Unit, &mut buf);
        Ok(buf
            .into_iter()
            .map(|(sq, index)| Neighbor {
                index,
                distance: sq.sqrt(),
            })
            .collect())
    }

    /// Distance from `x` to its `k`-th nearest data point (1-based).
    pub fn kth_distance(&self, x: &[f64], k: usize) -> Result<f64> {
        self.check_rank(k)?;
        self.check_query(x)?;
        let mut buf = Vec::with_capacity(k);
        self.search(x, k, &Unit, &mut buf);
        Ok(buf[k - 1].0.sqrt())
    }

    /// Squared distances of the `k` nearest points, ascending, written
    /// into `out`. Callers validate `k` and `x`. Indices already in `out`
    /// seed the search; any seed gives the same result.
    pub(crate) fn k_smallest_squared(&self, x: &[f64], k: usize, out: &mut Vec<(f64, usize)>) {
        self.search(x, k, &Unit, out);
    }

    /// The `k` smallest values of `weight_i * |x - X_i|^2`, ascending.
    /// Seeds from `out` as in [`Self::k_smallest_squared`].
    pub(crate) fn k_smallest_weighted(
        &self,
        x: &[f64],
        k: usize,
        weights: &ScaledNeighbors,
        out: &mut Vec<(f64, usize)>,
    ) {
        debug_assert_eq!(weights.fingerprint, self.fingerprint);
        self.search(x, k, weights, out);
    }

    /// Prepares per-point weights (indexed like the cloud) for weighted
    /// queries. Weights must be positive.
    pub fn weighting(&self, weights: &[f64]) -> ScaledNeighbors {
        assert_eq!(weights.len(), self.len());
        let packed: Vec<f64> = self.order.iter().map(|&i| weights[i as usize]).collect();
        let node_min = self
            .nodes
            .iter()
            .map(|n| {
                packed[n.start as usize..n.end as usize]
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        ScaledNeighbors {
            fingerprint: self.fingerprint,
            packed,
            by_index: weights.to_vec(),
            node_min,
        }
    }

    /// Exact k smallest keys. Entries left in `out` are re-keyed for `x`
    /// and serve as initial candidates, which only tightens pruning.
    fn search<W: Weighting>(&self, x: &[f64], k: usize, w: &W, out: &mut Vec<(f64, usize)>) {
        let n = self.len();
        out.retain(|&(_, i)| i < n);
        out.truncate(k);
        for e in out.iter_mut() {
            e.0 = squared_distance(x, self.cloud.point(e.1)) * w.index(e.1);
        }
        out.sort_by(|&a, &b| cmp_key(a, b));
        out.dedup_by_key(|e| e.1);
        let mut best = Best { k, items: out };
        match x.len() {
            2 => self.visit_fixed::<W, 2>(0, x.try_into().expect("dimension 2"), w, &mut best),
            _ => self.visit(0, x, w, &mut best),
        }
    }

    /// [`Self::visit`] with the dimension known at compile time. Sums run
    /// in the same axis order, so keys are bitwise identical.
    fn visit_fixed<W: Weighting, const D: usize>(
        &self,
        node: usize,
        x: &[f64; D],
        w: &W,
        best: &mut Best<'_>,
    ) {
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            let (start, end) = (n.start as usize, n.end as usize);
            let pts = &self.packed[start * D..end * D];
            for (off, p) in pts.chunks_exact(D).enumerate() {
                let mut sq = 0.0;
                for a in 0..D {
                    let d = x[a] - p[a];
                    sq += d * d;
                }
                let pos = start + off;
                best.offer(sq * w.point(pos), self.order[pos] as usize);
            }
            return;
        }
        let (l, r) = (n.left as usize, n.right as usize);
        let bl = self.box_sq_distance_fixed::<D>(l, x) * w.node(l);
        let br = self.box_sq_distance_fixed::<D>(r, x) * w.node(r);
        let (first, fb, second, sb) = if bl <= br {
            (l, bl, r, br)
        } else {
            (r, br, l, bl)
        };
        if fb <= best.worst() {
            self.visit_fixed(first, x, w, best);
        }
        if sb <= best.worst() {
            self.visit_fixed(second, x, w, best);
        }
    }

    #[inline]
    fn box_sq_distance_fixed<const D: usize>(&self, node: usize, x: &[f64; D]) -> f64 {
        let b = &self.boxes[node * 2 * D..(node + 1) * 2 * D];
        let mut acc = 0.0;
        for a in 0..D {
            let d = if x[a] < b[a] {
                b[a] - x[a]
            } else if x[a] > b[D + a] {
                x[a] - b[D + a]
            } else {
                0.0
            };
            acc += d * d;
        }
        acc
    }

    #[inline]
    fn box_sq_distance(&self, node: usize, x: &[f64]) -> f64 {
        let dim = x.len();
        let b = &self.boxes[node * 2 * dim..(node + 1) * 2 * dim];
        let (lo, hi) = b.split_at(dim);
        let mut acc = 0.0;
        for a in 0..dim {
            let d = if x[a] < lo[a] {
                lo[a] - x[a]
            } else if x[a] > hi[a] {
                x[a] - hi[a]
            } else {
                0.0
            };
            acc += d * d;
        }
        acc
    }

    fn visit<W: Weighting>(&self, node: usize, x: &[f64], w: &W, best: &mut Best<'_>) {
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            let dim = x.len();
            for pos in n.start as usize..n.end as usize {
                let p = &self.packed[pos * dim..(pos + 1) * dim];
                let key = squared_distance(x, p) * w.point(pos);
                best.offer(key, self.order[pos] as usize);
            }
            return;
        }
        let (l, r) = (n.left as usize, n.right as usize);
        let bl = self.box_sq_distance(l, x) * w.node(l);
        let br = self.box_sq_distance(r, x) * w.node(r);
        let (first, fb, second, sb) = if bl <= br {
            (l, bl, r, br)
        } else {
            (r, br, l, bl)
        };
        // Equal keys must still be visited so ties resolve by index.
        if fb <= best.worst() {
            self.visit(first, x, w, best);
        }
        if sb <= best.worst() {
            self.visit(second, x, w, best);
        }
    }
}

fn build(
    cloud: &PointCloud,
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
    boxes: &mut Vec<f64>,
) -> u32 {
    let dim = cloud.dim();
    let id = nodes.len();
    nodes.push(Node {
        start: start as u32,
        end: end as u32,
        left: NO_CHILD,
        right: NO_CHILD,
    });
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in &order[start..end] {
        for (a, &c) in cloud.point(i as usize).iter().enumerate() {
            lo[a] = lo[a].min(c);
            hi[a] = hi[a].max(c);
        }
    }
    boxes.extend_from_slice(&lo);
    boxes.extend_from_slice(&hi);
    if end - start <= LEAF_SIZE {
        return id as u32;
    }
    let axis = (0..dim)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mid = start + (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        cmp_key(
            (cloud.point(a as usize)[axis], a as usize),
            (cloud.point(b as usize)[axis], b as usize),
        )
    });
    let left = build(cloud, order, start, mid, nodes, boxes);
    let right = build(cloud, order, mid, end, nodes, boxes);
    nodes[id].left = left;
    nodes[id].right = right;
    id as u32
}
