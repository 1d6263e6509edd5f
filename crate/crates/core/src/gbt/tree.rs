use super::Dataset;
use crate::error::{Error, Result};

/// A node of a [`RegressionTree`]. Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: f64 },
}

/// Binary regression tree stored as a node arena; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        Self { nodes: vec![Node::Leaf { value }] }
    }

    /// Build from an explicit node arena. Children must point forward and every
    /// node except the root must have exactly one parent.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::param("nodes", "tree needs at least one node"));
        }
        let mut parents = vec![0usize; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            match *n {
                Node::Split { left, right, threshold, .. } => {
                    if left <= i || right <= i || left >= nodes.len() || right >= nodes.len() || left == right {
                        return Err(Error::param("nodes", format!("bad children at node {i}")));
                    }
                    if !threshold.is_finite() {
                        return Err(Error::param("nodes", "non-finite threshold"));
                    }
                    parents[left] += 1;
                    parents[right] += 1;
                }
                Node::Leaf { value } => {
                    if !value.is_finite() {
                        return Err(Error::param("nodes", "non-finite leaf value"));
                    }
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err(Error::param("nodes", "arena is not a tree"));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Index of the leaf `x` is routed to.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        while let Node::Split { feature, threshold, left, right } = self.nodes[i] {
            i = if x[feature] <= threshold { left } else { right };
        }
        i
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Row indices of a dataset sorted by each feature. Computed once per
/// training run and reused by every boosting round.
#[derive(Debug, Clone)]
pub struct SortedColumns {
    order: Vec<Vec<u32>>,
}

impl SortedColumns {
    pub fn new(data: &Dataset) -> Self {
        let order = (0..data.n_features())
            .map(|f| {
                let mut idx: Vec<u32> = (0..data.len() as u32).collect();
                idx.sort_by(|&a, &b| data.value(a as usize, f).total_cmp(&data.value(b as usize, f)));
                idx
            })
            .collect();
        Self { order }
    }
}

/// Fit a least-squares regression tree to `targets`.
///
/// Splits are searched exhaustively over every feature and every midpoint
/// between consecutive distinct values; the split with the largest reduction
/// in sum of squared errors wins (first feature, then lowest threshold, on
/// ties). A node becomes a leaf when it holds fewer than
/// `2 * min_samples_leaf` rows, sits at `max_depth`, or has no split with
/// positive gain. Leaves hold the mean target of their rows.
pub fn fit_tree(data: &Dataset, targets: &[f64], max_depth: usize, min_samples_leaf: usize) -> Result<RegressionTree> {
    check_inputs(data, targets, min_samples_leaf)?;
    Ok(grow(data, &SortedColumns::new(data), targets, max_depth, min_samples_leaf))
}

pub(crate) fn check_inputs(data: &Dataset, targets: &[f64], min_samples_leaf: usize) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if targets.len() != data.len() {
        return Err(Error::LengthMismatch { expected: data.len(), actual: targets.len() });
    }
    if min_samples_leaf == 0 {
        return Err(Error::param("min_samples_leaf", "must be positive"));
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("targets", "non-finite target"));
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct NodeStats {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct Scan {
    left_n: usize,
    left_sum: f64,
    last: f64,
}

const NO_NODE: u32 = u32::MAX;

/// Level-wise growth: one pass over each presorted column per level scores
/// every open node at once.
pub(crate) fn grow(
    data: &Dataset,
    sorted: &SortedColumns,
    targets: &[f64],
    max_depth: usize,
    min_samples_leaf: usize,
) -> RegressionTree {
    let n = data.len();
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut node_of = vec![0u32; n];

    let root = targets.iter().fold(NodeStats { count: 0, sum: 0.0, sum_sq: 0.0 }, |s, &t| NodeStats {
        count: s.count + 1,
        sum: s.sum + t,
        sum_sq: s.sum_sq + t * t,
    });
    let mut frontier: Vec<(usize, NodeStats)> = vec![(0, root)];

    for _ in 0..max_depth {
        // slot_of[node] = position in `open`, for nodes still eligible to split
        let mut slot_of = vec![NO_NODE; nodes.len()];
        let mut open: Vec<(usize, NodeStats)> = Vec::new();
        for &(id, st) in &frontier {
            if st.count >= 2 * min_samples_leaf {
                slot_of[id] = open.len() as u32;
                open.push((id, st));
            }
        }
        if open.is_empty() {
            break;
        }

        let mut best: Vec<Option<Candidate>> = vec![None; open.len()];
        let mut scans: Vec<Scan> = Vec::with_capacity(open.len());
        for (feature, column) in sorted.order.iter().enumerate() {
            scans.clear();
            scans.extend(open.iter().map(|_| Scan { left_n: 0, left_sum: 0.0, last: f64::NEG_INFINITY }));
            for &row in column {
                let row = row as usize;
                let slot = slot_of[node_of[row] as usize];
                if slot == NO_NODE {
                    continue;
                }
                let slot = slot as usize;
                let v = data.value(row, feature);
                let st = &open[slot].1;
                let sc = &mut scans[slot];
                if v > sc.last && sc.left_n >= min_samples_leaf && st.count - sc.left_n >= min_samples_leaf {
                    let right_n = st.count - sc.left_n;
                    let right_sum = st.sum - sc.left_sum;
                    let gain = sc.left_sum * sc.left_sum / sc.left_n as f64 + right_sum * right_sum / right_n as f64
                        - st.sum * st.sum / st.count as f64;
                    if best[slot].is_none_or(|b| gain > b.gain) {
                        best[slot] = Some(Candidate { gain, feature, threshold: midpoint(sc.last, v) });
                    }
                }
                sc.left_n += 1;
                sc.left_sum += targets[row];
                sc.last = v;
            }
        }

        let mut split_at: Vec<Option<(usize, f64, u32, u32)>> = vec![None; open.len()];
        for (slot, &(id, st)) in open.iter().enumerate() {
            let Some(c) = best[slot] else { continue };
            // Rounding noise on constant targets yields gains ~ eps * sum_sq.
            if !(c.gain > 1e-12 * st.sum_sq.max(f64::MIN_POSITIVE)) {
                continue;
            }
            let left = nodes.len();
            nodes.push(Node::Leaf { value: 0.0 });
            nodes.push(Node::Leaf { value: 0.0 });
            nodes[id] = Node::Split { feature: c.feature, threshold: c.threshold, left, right: left + 1 };
            split_at[slot] = Some((c.feature, c.threshold, left as u32, left as u32 + 1));
        }
        let mut next = Vec::new();
        let mut child_stats: Vec<NodeStats> = vec![NodeStats { count: 0, sum: 0.0, sum_sq: 0.0 }; nodes.len()];
        for row in 0..n {
            let node = node_of[row] as usize;
            if node >= slot_of.len() || slot_of[node] == NO_NODE {
                continue;
            }
            if let Some((f, thr, l, r)) = split_at[slot_of[node] as usize] {
                let child = if data.value(row, f) <= thr { l } else { r };
                node_of[row] = child;
                let cs = &mut child_stats[child as usize];
                let t = targets[row];
                cs.count += 1;
                cs.sum += t;
                cs.sum_sq += t * t;
            }
        }
        for &(_, _, l, r) in split_at.iter().flatten() {
            next.push((l as usize, child_stats[l as usize]));
            next.push((r as usize, child_stats[r as usize]));
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let mut sums = vec![(0.0f64, 0usize); nodes.len()];
    for row in 0..n {
        let s = &mut sums[node_of[row] as usize];
        s.0 += targets[row];
        s.1 += 1;
    }
    for (i, node) in nodes.iter_mut().enumerate() {
        if let Node::Leaf { value } = node {
            let (sum, count) = sums[i];
            *value = if count > 0 { sum / count as f64 } else { 0.0 };
        }
    }
    RegressionTree { nodes }
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    // adjacent floats can round the midpoint up onto `hi`
    if mid >= hi {
        lo
    } else {
        mid
    }
}
