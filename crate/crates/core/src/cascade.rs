//! The Kruskal forest cascade `F_1, …, F_K`.
//!
//! An arriving edge is offered to `F_1`, then `F_2`, …, and joins the first
//! forest in which its endpoints lie in different components. Since `F_k`
//! spans the components of `G_k`, the edges that reach level `k` are exactly
//! the edges of `G_k(t)`, and `F_k(∞)` is the `k`-th successive minimum
//! spanning tree.

use alloc::vec::Vec;

use crate::dsf::DisjointSetForest;

/// Where an arriving edge ended up. Levels are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Accepted(usize),
    RejectedByAll,
}

#[derive(Debug, Clone)]
pub struct CascadeState {
    n: usize,
    forests: Vec<DisjointSetForest>,
    /// Σ t/n over accepted edges, per level.
    cost_sum: Vec<f64>,
    /// Forest edge counts, per level.
    accepted_edges: Vec<u64>,
    /// Edges that reached each level, i.e. `e(G_k(t))`.
    reached_edges: Vec<u64>,
    completion_time: Vec<Option<f64>>,
    arrivals: u64,
    rejected: u64,
    /// Levels below this index span all vertices.
    first_open: usize,
    last_t: f64,
}

impl CascadeState {
    /// Empty cascade with `k_max` forests on `n` vertices.
    pub fn new(n: usize, k_max: usize) -> Self {
        assert!(k_max >= 1, "cascade needs at least one level");
        Self {
            n,
            forests: (0..k_max).map(|_| DisjointSetForest::new(n)).collect(),
            cost_sum: alloc::vec![0.0; k_max],
            accepted_edges: alloc::vec![0; k_max],
            reached_edges: alloc::vec![0; k_max],
            completion_time: alloc::vec![None; k_max],
            arrivals: 0,
            rejected: 0,
            first_open: if n <= 1 { k_max } else { 0 },
            last_t: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.forests.len()
    }

    /// Offers the edge `{u, v}` arriving at time `t` to the cascade.
    ///
    /// Times must be nondecreasing across calls. Inserting after every level
    /// spans is legal and always returns [`Placement::RejectedByAll`].
    pub fn insert(&mut self, u: usize, v: usize, t: f64) -> Placement {
        debug_assert!(t >= self.last_t, "arrival times must be nondecreasing");
        self.last_t = t;
        self.arrivals += 1;
        let n = self.n;
        for k in 0..self.first_open {
            self.reached_edges[k] += 1;
        }
        for k in self.first_open..self.forests.len() {
            self.reached_edges[k] += 1;
            let f = &mut self.forests[k];
            let ru = f.find(u);
            let rv = f.find(v);
            if ru == rv {
                continue;
            }
            f.link_roots(ru, rv);
            self.cost_sum[k] += t / n as f64;
            self.accepted_edges[k] += 1;
            if self.accepted_edges[k] == n as u64 - 1 {
                self.completion_time[k] = Some(t);
                while self.first_open < self.forests.len()
                    && self.completion_time[self.first_open].is_some()
                {
                    self.first_open += 1;
                }
            }
            return Placement::Accepted(k + 1);
        }
        self.rejected += 1;
        Placement::RejectedByAll
    }

    /// True once level `k` (1-based) is a spanning tree.
    pub fn is_spanning(&self, k: usize) -> bool {
        self.completion_time[k - 1].is_some()
    }

    pub fn all_spanning(&self) -> bool {
        self.first_open == self.forests.len()
    }

    pub fn forest(&self, k: usize) -> &DisjointSetForest {
        &self.forests[k - 1]
    }

    pub fn forest_mut(&mut self, k: usize) -> &mut DisjointSetForest {
        &mut self.forests[k - 1]
    }

    pub fn cost_sum(&self) -> &[f64] {
        &self.cost_sum
    }

    pub fn accepted_edges(&self) -> &[u64] {
        &self.accepted_edges
    }

    pub fn reached_edges(&self) -> &[u64] {
        &self.reached_edges
    }

    pub fn completion_time(&self) -> &[Option<f64>] {
        &self.completion_time
    }

    pub fn arrivals(&self) -> u64 {
        self.arrivals
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    /// Largest component size at level `k` (1-based).
    pub fn largest_component(&self, k: usize) -> usize {
        self.forests[k - 1].max_component()
    }
}

/// Runs the cascade over `edges` (taken in order) and returns, per level, the
/// positions of the edges each forest accepted. Meant for small graphs.
pub fn forest_edge_sets(n: usize, k_max: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut c = CascadeState::new(n, k_max);
    let mut sets = alloc::vec![Vec::new(); k_max];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if let Placement::Accepted(k) = c.insert(u, v, i as f64) {
            sets[k - 1].push(i);
        }
    }
    sets
}
