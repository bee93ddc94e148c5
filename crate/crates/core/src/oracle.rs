//! Successive minimum spanning trees by repeated Kruskal with deletion.
//!
//! This is the reference the cascade is checked against: sort the edges, run
//! plain Kruskal for `T_1`, delete its edges, run Kruskal again on what is
//! left, and so on. It keeps its own connectivity labels rather than sharing
//! the cascade's union-find.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTrees {
    /// Tree edge sets as sorted positions into the input slice.
    pub trees: Vec<Vec<usize>>,
    /// 1-based level whose residual graph was disconnected, if any.
    pub incomplete_level: Option<usize>,
}

/// Spanning-tree-or-forest of the residual edges, by Kruskal on relabelled
/// components.
fn kruskal(n: usize, order: &[usize], edges: &[WeightedEdge], used: &[bool]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| alloc::vec![v]).collect();
    let mut tree = Vec::new();
    for &i in order {
        if used[i] {
            continue;
        }
        let e = edges[i];
        let (a, b) = (label[e.u], label[e.v]);
        if a == b {
            continue;
        }
        // relabel the smaller class
        let (keep, gone) = if members[a].len() >= members[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        let moved = core::mem::take(&mut members[gone]);
        for &w in &moved {
            label[w] = keep;
        }
        members[keep].extend(moved);
        tree.push(i);
        if tree.len() + 1 == n {
            break;
        }
    }
    tree
}

/// Computes up to `k` successive minimum spanning trees of the multigraph on
/// `n` vertices. Ties in weight are broken by stream position.
pub fn oracle_successive_msts(n: usize, edges: &[WeightedEdge], k: usize) -> OracleTrees {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| edges[a].weight.total_cmp(&edges[b].weight).then(a.cmp(&b)));
    let mut used = alloc::vec![false; edges.len()];
    let mut trees = Vec::new();
    let mut incomplete_level = None;
    for level in 1..=k {
        let mut tree = kruskal(n, &order, edges, &used);
        if tree.len() + 1 < n {
            incomplete_level = Some(level);
            break;
        }
        for &i in &tree {
            used[i] = true;
        }
        tree.sort_unstable();
        trees.push(tree);
    }
    OracleTrees {
        trees,
        incomplete_level,
    }
}
