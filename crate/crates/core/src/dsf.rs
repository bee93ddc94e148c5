//! Index-based union-find with union by size and full path compression.

use alloc::vec::Vec;

/// Disjoint-set forest over the vertices `0..n`.
///
/// Vertex indices are stored as `u32`; one forest is kept per cascade level,
/// so at `n = 10⁷` this halves the memory of the cascade.
#[derive(Debug, Clone)]
pub struct DisjointSetForest {
    parent: Vec<u32>,
    size: Vec<u32>,
    num_components: usize,
    max_component: usize,
}

impl DisjointSetForest {
    /// `n` singletons.
    ///
    /// # Panics
    ///
    /// If `n` does not fit in a `u32`.
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "vertex count {n} exceeds u32 range");
        Self {
            parent: (0..n as u32).collect(),
            size: alloc::vec![1; n],
            num_components: n,
            max_component: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn num_components(&self) -> usize {
        self.num_components
    }

    /// Size of the largest component, `C1`.
    pub fn max_component(&self) -> usize {
        self.max_component
    }

    /// Root of `v`'s component. Compresses the path behind it.
    ///
    /// # Panics
    ///
    /// If `v >= n`.
    pub fn find(&mut self, v: usize) -> usize {
        assert!(
            v < self.parent.len(),
            "vertex {v} out of range 0..{}",
            self.parent.len()
        );
        let mut root = v as u32;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut node = v as u32;
        while self.parent[node as usize] != root {
            let next = self.parent[node as usize];
            self.parent[node as usize] = root;
            node = next;
        }
        root as usize
    }

    /// Root lookup without compression, for read-only scans.
    pub fn find_immutable(&self, v: usize) -> usize {
        let mut root = v as u32;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        root as usize
    }

    pub fn same_set(&mut self, u: usize, v: usize) -> bool {
        self.find(u) == self.find(v)
    }

    /// Merges the components of `u` and `v`. Returns `false` (and changes
    /// nothing) if they already share a root.
    pub fn union(&mut self, u: usize, v: usize) -> bool {
        let ru = self.find(u);
        let rv = self.find(v);
        if ru == rv {
            return false;
        }
        self.link_roots(ru, rv);
        true
    }

    /// Links two distinct roots by size. Callers must pass roots.
    pub(crate) fn link_roots(&mut self, ru: usize, rv: usize) {
        debug_assert!(ru != rv);
        let (big, small) = if self.size[ru] >= self.size[rv] {
            (ru, rv)
        } else {
            (rv, ru)
        };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
        self.num_components -= 1;
        self.max_component = self.max_component.max(self.size[big] as usize);
    }

    /// Size of the component containing `v`.
    pub fn component_size(&mut self, v: usize) -> usize {
        let r = self.find(v);
        self.size[r] as usize
    }

    /// Sizes of all components, in root-index order.
    pub fn component_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(i, &p)| p as usize == i)
            .map(|(i, _)| self.size[i] as usize)
    }

    /// Susceptibility of the partition: `χ = Σ C_i² / n` and `χ̂`, the same
    /// sum without the largest component.
    pub fn susceptibility(&self) -> (f64, f64) {
        let n = self.len() as f64;
        if self.is_empty() {
            return (0.0, 0.0);
        }
        let mut total = 0.0f64;
        let mut largest = 0usize;
        for s in self.component_sizes() {
            total += (s as f64) * (s as f64);
            largest = largest.max(s);
        }
        let chi = total / n;
        let chi_hat = (total - (largest as f64) * (largest as f64)) / n;
        (chi, chi_hat)
    }
}

/// `(χ, χ̂)` of the forest's partition.
pub fn compute_susceptibility(f: &DisjointSetForest) -> (f64, f64) {
    f.susceptibility()
}
