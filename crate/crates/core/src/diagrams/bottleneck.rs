use std::collections::VecDeque;

use crate::cubical::PersistenceDiagram;

/// One assignment in an optimal bottleneck matching. Indices refer to the
/// diagram points of the chosen dimension, in diagram order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Matched {
    Pair(usize, usize),
    LeftToDiagonal(usize),
    RightToDiagonal(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    pub pairs: Vec<Matched>,
    pub cost: f64,
}

#[inline]
pub(crate) fn sup_norm(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

#[inline]
pub(crate) fn diagonal_cost(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Bottleneck distance between the dimension-`dim` parts of two diagrams.
pub fn bottleneck(p: &PersistenceDiagram, q: &PersistenceDiagram, dim: usize) -> f64 {
    let parts = Parts::new(p, q, dim);
    if parts.essential_cost.is_infinite() {
        return f64::INFINITY;
    }
    parts
        .essential_cost
        .max(finite_cost(&parts.left_finite(), &parts.right_finite()))
}

/// Optimal bottleneck matching. Essential points match only each other
/// (by sorted birth); a mismatch in their counts makes the distance
/// infinite and leaves them out of `pairs`.
pub fn bottleneck_matching(p: &PersistenceDiagram, q: &PersistenceDiagram, dim: usize) -> Matching {
    let parts = Parts::new(p, q, dim);
    let mut pairs = parts.essential_pairs.clone();
    let (finite, assignment) = finite_bottleneck(&parts.left_finite(), &parts.right_finite());
    let (lf, rf) = (&parts.left_idx, &parts.right_idx);
    for m in assignment {
        pairs.push(match m {
            Matched::Pair(a, b) => Matched::Pair(lf[a], rf[b]),
            Matched::LeftToDiagonal(a) => Matched::LeftToDiagonal(lf[a]),
            Matched::RightToDiagonal(b) => Matched::RightToDiagonal(rf[b]),
        });
    }
    Matching {
        pairs,
        cost: parts.essential_cost.max(finite),
    }
}

/// One dimension of both diagrams, split into finite and essential points.
struct Parts {
    left: Vec<(f64, f64)>,
    right: Vec<(f64, f64)>,
    left_idx: Vec<usize>,
    right_idx: Vec<usize>,
    essential_pairs: Vec<Matched>,
    essential_cost: f64,
}

impl Parts {
    fn new(p: &PersistenceDiagram, q: &PersistenceDiagram, dim: usize) -> Self {
        let left = p.pairs(dim);
        let right = q.pairs(dim);
        let split = |pts: &[(f64, f64)]| -> (Vec<usize>, Vec<usize>) {
            (0..pts.len()).partition(|&i| pts[i].1.is_finite())
        };
        let (left_idx, mut le) = split(&left);
        let (right_idx, mut re) = split(&right);
        let mut essential_pairs = Vec::new();
        let mut essential_cost: f64 = 0.0;
        if le.len() != re.len() {
            essential_cost = f64::INFINITY;
        } else {
            le.sort_by(|&a, &b| left[a].0.total_cmp(&left[b].0));
            re.sort_by(|&a, &b| right[a].0.total_cmp(&right[b].0));
            for (&a, &b) in le.iter().zip(&re) {
                essential_cost = essential_cost.max((left[a].0 - right[b].0).abs());
                essential_pairs.push(Matched::Pair(a, b));
            }
        }
        Self {
            left,
            right,
            left_idx,
            right_idx,
            essential_pairs,
            essential_cost,
        }
    }

    fn left_finite(&self) -> Vec<(f64, f64)> {
        self.left_idx.iter().map(|&i| self.left[i]).collect()
    }

    fn right_finite(&self) -> Vec<(f64, f64)> {
        self.right_idx.iter().map(|&i| self.right[i]).collect()
    }
}

/// Exact bottleneck distance between finite diagrams: binary search over
/// every candidate value with a matching test at each step.
fn finite_bottleneck(left: &[(f64, f64)], right: &[(f64, f64)]) -> (f64, Vec<Matched>) {
    let cost = finite_cost(left, right);
    let assignment = perfect_matching(left, right, cost).expect("feasible at the optimum");
    (cost, assignment)
}

pub(crate) fn finite_cost(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
    let (n, m) = (left.len(), right.len());
    if n + m == 0 {
        return 0.0;
    }
    let gaps = Gaps::new(left, right);
    let mut candidates = Vec::with_capacity(n * m + n + m + 1);
    candidates.push(0.0);
    candidates.extend_from_slice(&gaps.left_diag);
    candidates.extend_from_slice(&gaps.right_diag);
    candidates.extend_from_slice(&gaps.pair);

    // Smallest feasible candidate, by bisection on medians. Sending
    // everything to the diagonal makes the largest candidate feasible.
    let mut best = candidates.iter().copied().fold(0.0, f64::max);
    while !candidates.is_empty() {
        let mid = candidates.len() / 2;
        let (_, &mut pivot, _) = candidates.select_nth_unstable_by(mid, f64::total_cmp);
        if gaps.feasible(pivot) {
            best = pivot;
            candidates.retain(|&c| c < pivot);
        } else {
            candidates.retain(|&c| c > pivot);
        }
    }
    best
}

/// Every distance a bottleneck matching can realize.
struct Gaps {
    n: usize,
    m: usize,
    /// Row-major `n x m` sup-norm distances.
    pair: Vec<f64>,
    left_diag: Vec<f64>,
    right_diag: Vec<f64>,
}

impl Gaps {
    fn new(left: &[(f64, f64)], right: &[(f64, f64)]) -> Self {
        let pair = left
            .iter()
            .flat_map(|&a| right.iter().map(move |&b| sup_norm(a, b)))
            .collect();
        Self {
            n: left.len(),
            m: right.len(),
            pair,
            left_diag: left.iter().map(|&a| diagonal_cost(a)).collect(),
            right_diag: right.iter().map(|&b| diagonal_cost(b)).collect(),
        }
    }

    /// A threshold is feasible iff some matching of pairs within `delta`
    /// covers all points farther than `delta` from the diagonal. By the
    /// Mendelsohn-Dulmage theorem it suffices to cover each side's far
    /// points separately.
    fn feasible(&self, delta: f64) -> bool {
        let (n, m) = (self.n, self.m);
        let left_adj: Vec<Vec<usize>> = (0..n)
            .filter(|&i| self.left_diag[i] > delta)
            .map(|i| (0..m).filter(|&j| self.pair[i * m + j] <= delta).collect())
            .collect();
        if !saturates(&left_adj, m) {
            return false;
        }
        let right_adj: Vec<Vec<usize>> = (0..m)
            .filter(|&j| self.right_diag[j] > delta)
            .map(|j| (0..n).filter(|&i| self.pair[i * m + j] <= delta).collect())
            .collect();
        saturates(&right_adj, n)
    }
}

fn saturates(adj: &[Vec<usize>], n_other: usize) -> bool {
    if adj.len() > n_other || adj.iter().any(Vec::is_empty) {
        return false;
    }
    hopcroft_karp(adj, n_other).0 == adj.len()
}

/// Left vertices: `n` points then `m` diagonal slots; right vertices: `m`
/// points then `n` diagonal slots.
fn perfect_matching(left: &[(f64, f64)], right: &[(f64, f64)], delta: f64) -> Option<Vec<Matched>> {
    let (n, m) = (left.len(), right.len());
    let size = n + m;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, &a) in left.iter().enumerate() {
        for (j, &b) in right.iter().enumerate() {
            if sup_norm(a, b) <= delta {
                adj[i].push(j);
            }
        }
        if diagonal_cost(a) <= delta {
            adj[i].push(m + i);
        }
    }
    for (j, &b) in right.iter().enumerate() {
        let v = n + j;
        if diagonal_cost(b) <= delta {
            adj[v].push(j);
        }
        adj[v].extend(m..m + n);
    }
    let (matched, mate) = hopcroft_karp(&adj, size);
    if matched < size {
        return None;
    }
    let mut out = Vec::with_capacity(size);
    for (u, &v) in mate.iter().enumerate() {
        match (u < n, v < m) {
            (true, true) => out.push(Matched::Pair(u, v)),
            (true, false) => out.push(Matched::LeftToDiagonal(u)),
            (false, true) => out.push(Matched::RightToDiagonal(v)),
            (false, false) => {}
        }
    }
    Some(out)
}

/// Maximum bipartite matching: its size and the mate of each left vertex
/// (`usize::MAX` when unmatched).
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> (usize, Vec<usize>) {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut mate_l = vec![FREE; n_left];
    let mut mate_r = vec![FREE; n_right];
    let mut dist = vec![0u32; n_left];
    let mut matched = 0;

    loop {
        // Layer the free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if mate_l[u] == FREE && augment(u, adj, &mut mate_l, &mut mate_r, &mut dist, &mut it) {
                matched += 1;
            }
        }
    }
    (matched, mate_l)
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [u32],
    it: &mut [usize],
) -> bool {
    while it[u] < adj[u].len() {
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = mate_r[v];
        if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist, it))
        {
            mate_l[u] = v;
            mate_r[v] = u;
            return true;
        }
    }
    dist[u] = u32::MAX;
    false
}
