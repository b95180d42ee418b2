//! Connected components and degree histograms of sampled graphs.

use serde::Serialize;

use crate::sampler::SimpleGraph;

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parents: Vec<usize>,
    sizes: Vec<usize>,
}

impl UnionFind {
    pub fn new(size: usize) -> Self {
        Self {
            parents: (0..size).collect(),
            sizes: vec![1; size],
        }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parents[root] != root {
            root = self.parents[root];
        }
        while i != root {
            let parent = self.parents[i];
            self.parents[i] = root;
            i = parent;
        }
        root
    }

    /// Merges the sets of `i` and `j`; false if they were already joined.
    pub fn union(&mut self, i: usize, j: usize) -> bool {
        let (mut a, mut b) = (self.find(i), self.find(j));
        if a == b {
            return false;
        }
        if self.sizes[a] < self.sizes[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parents[b] = a;
        self.sizes[a] += self.sizes[b];
        true
    }

    pub fn size_of(&mut self, i: usize) -> usize {
        let root = self.find(i);
        self.sizes[root]
    }
}

/// A component identified by its size and smallest vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub size: usize,
    pub min_vertex: usize,
}

/// Components ordered by size descending, ties by smallest label ascending.
pub fn components(g: &SimpleGraph) -> Vec<Component> {
    let mut forest = UnionFind::new(g.n());
    for &(u, v) in g.edges() {
        forest.union(u as usize, v as usize);
    }
    // vertices are visited in increasing order, so the first one seen in a
    // set is its smallest label
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for v in 0..g.n() {
        let root = forest.find(v);
        if !seen[root] {
            seen[root] = true;
            out.push(Component { size: forest.sizes[root], min_vertex: v });
        }
    }
    out.sort_unstable_by(|a, b| b.size.cmp(&a.size).then(a.min_vertex.cmp(&b.min_vertex)));
    out
}

/// Component sizes in descending order.
pub fn connected_components(g: &SimpleGraph) -> Vec<usize> {
    components(g).into_iter().map(|c| c.size).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub n: usize,
    pub m: usize,
    pub sizes: Vec<usize>,
    pub largest_fraction: f64,
    pub second_fraction: f64,
    /// `degree_counts[i]` vertices have degree `i`, for `i` in `0..=d`.
    pub degree_counts: Vec<usize>,
}

impl ComponentReport {
    /// `max_i |ν_i/n − p_i|` against a reference degree distribution.
    pub fn degree_deviation(&self, probs: &[f64]) -> f64 {
        let len = probs.len().max(self.degree_counts.len());
        (0..len)
            .map(|i| {
                let observed = self.degree_counts.get(i).copied().unwrap_or(0) as f64 / self.n as f64;
                let expected = probs.get(i).copied().unwrap_or(0.0);
                (observed - expected).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn report(g: &SimpleGraph) -> ComponentReport {
    let sizes = connected_components(g);
    let mut degree_counts = vec![0usize; g.max_degree() + 1];
    for v in 0..g.n() {
        degree_counts[g.degree(v)] += 1;
    }
    let n = g.n();
    let fraction = |k: Option<&usize>| k.map_or(0.0, |&s| s as f64 / n as f64);
    let r = ComponentReport {
        n,
        m: g.m(),
        largest_fraction: fraction(sizes.first()),
        second_fraction: fraction(sizes.get(1)),
        sizes,
        degree_counts,
    };
    assert_eq!(r.sizes.iter().sum::<usize>(), n, "components must partition the vertices");
    assert_eq!(
        r.degree_counts.iter().enumerate().map(|(i, c)| i * c).sum::<usize>(),
        2 * r.m,
        "handshake"
    );
    r
}
