//! Exclusivity graphs and context hypergraphs.
//!
//! A [`Graph`] records which pairs of events are compatible and mutually
//! exclusive; a [`ContextHypergraph`] records the maximal sets of jointly
//! measurable events. The two views are bridged by
//! [`ContextHypergraph::adjacency_graph`] and [`Graph::clique_hypergraph`],
//! which are mutually inverse on the graphs used here (see the round-trip
//! test below).
//!
//! Both types are immutable after construction and contain no interior
//! mutability, so they can be shared freely across threads.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GraphError {
    /// A vertex index is `>= n`.
    VertexOutOfRange { vertex: usize, n: usize },
    /// An edge joins a vertex to itself.
    SelfLoop { vertex: usize },
    /// Cycle graphs need at least 3 vertices.
    CycleTooShort { n: usize },
    /// Circulant offsets must satisfy `1 <= d <= n/2`.
    OffsetOutOfRange { offset: usize, n: usize },
    /// Subset passed to `induced` contains a repeated vertex.
    DuplicateVertex { vertex: usize },
    /// A hypergraph context is empty.
    EmptyContext,
}

impl core::fmt::Display for GraphError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GraphError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for {n} vertices")
            }
            GraphError::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            GraphError::CycleTooShort { n } => {
                write!(f, "cycle graph needs n >= 3, got {n}")
            }
            GraphError::OffsetOutOfRange { offset, n } => {
                write!(
                    f,
                    "circulant offset {offset} not in 1..={} for n = {n}",
                    n / 2
                )
            }
            GraphError::DuplicateVertex { vertex } => {
                write!(f, "vertex {vertex} listed twice in subset")
            }
            GraphError::EmptyContext => write!(f, "hypergraph context is empty"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Undirected graph on vertices `0..n`, dense bit-matrix adjacency.
///
/// No self-loops; each edge stored once. Instances in this crate stay small
/// (tens of vertices), so an adjacency row per vertex is the whole story.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl Graph {
    /// Graph with no edges.
    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            adj: vec![BitSet::new(n); n],
        }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.adj[i].insert(j);
                }
            }
        }
        g
    }

    /// Builds a graph from an edge list. Duplicate pairs collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            if i >= n {
                return Err(GraphError::VertexOutOfRange { vertex: i, n });
            }
            if j >= n {
                return Err(GraphError::VertexOutOfRange { vertex: j, n });
            }
            if i == j {
                return Err(GraphError::SelfLoop { vertex: i });
            }
            g.adj[i].insert(j);
            g.adj[j].insert(i);
        }
        Ok(g)
    }

    /// The `n`-cycle `C_n`: edges `{i, i+1 mod n}`.
    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::CycleTooShort { n });
        }
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    /// Circulant graph: edges `{i, i+d mod n}` for every offset `d`.
    /// Offsets must satisfy `1 <= d <= n/2`; repeats are collapsed.
    pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph, GraphError> {
        let mut edges = Vec::new();
        for &d in offsets {
            if d < 1 || d > n / 2 {
                return Err(GraphError::OffsetOutOfRange { offset: d, n });
            }
            for i in 0..n {
                edges.push((i, (i + d) % n));
            }
        }
        Graph::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> &BitSet {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count()
    }

    /// Edges as sorted `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.adj[i].iter() {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|row| row.count()).sum::<usize>() / 2
    }

    /// Subgraph induced by `subset`, relabeled in sorted order of the subset.
    /// Vertex `k` of the result is the `k`-th smallest element of `subset`.
    pub fn induced(&self, subset: &[usize]) -> Result<Graph, GraphError> {
        let mut s: Vec<usize> = subset.to_vec();
        s.sort_unstable();
        for w in s.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex { vertex: w[0] });
            }
        }
        if let Some(&v) = s.last() {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
        }
        let mut g = Graph::empty(s.len());
        for (a, &i) in s.iter().enumerate() {
            for (b, &j) in s.iter().enumerate() {
                if a < b && self.adjacent(i, j) {
                    g.adj[a].insert(b);
                    g.adj[b].insert(a);
                }
            }
        }
        Ok(g)
    }

    /// Hypergraph of all maximal cliques (Bron-Kerbosch with pivoting).
    ///
    /// Worst case is exponential in `n`; the instances handled here stay
    /// below ~40 vertices. Every vertex appears in some context, isolated
    /// vertices as singletons, so `adjacency_graph` inverts this exactly.
    pub fn clique_hypergraph(&self) -> ContextHypergraph {
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        let mut r = Vec::new();
        let mut p = BitSet::new(self.n);
        for i in 0..self.n {
            p.insert(i);
        }
        let x = BitSet::new(self.n);
        self.bron_kerbosch(&mut r, p, x, &mut cliques);
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        ContextHypergraph {
            n: self.n,
            contexts: cliques,
        }
    }

    fn bron_kerbosch(
        &self,
        r: &mut Vec<usize>,
        p: BitSet,
        mut x: BitSet,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        // pivot: vertex of P ∪ X with most neighbors in P
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| self.adj[u].intersection_count(&p))
            .unwrap();
        let mut candidates = p.clone();
        candidates.subtract(&self.adj[pivot]);
        let mut p = p;
        for v in candidates.iter() {
            let mut p_next = p.clone();
            p_next.intersect_with(&self.adj[v]);
            let mut x_next = x.clone();
            x_next.intersect_with(&self.adj[v]);
            r.push(v);
            self.bron_kerbosch(r, p_next, x_next, out);
            r.pop();
            p.remove(v);
            x.insert(v);
        }
    }
}

/// Vertex set plus the family of maximal measurement contexts.
///
/// Only maximal contexts are stored; every subset of a context is implicitly
/// a context as well, but the packing and membership constraints only bind at
/// the maximal ones. Contexts are kept sorted (each internally, and the list
/// lexicographically) so construction order never shows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ContextHypergraph {
    n: usize,
    contexts: Vec<Vec<usize>>,
}

impl ContextHypergraph {
    /// Builds a hypergraph, dropping contexts that are subsets of others
    /// (duplicates included). Empty contexts and out-of-range vertices are
    /// rejected.
    pub fn new(n: usize, contexts: &[Vec<usize>]) -> Result<ContextHypergraph, GraphError> {
        let mut cleaned: Vec<Vec<usize>> = Vec::with_capacity(contexts.len());
        for c in contexts {
            if c.is_empty() {
                return Err(GraphError::EmptyContext);
            }
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if let Some(&v) = c.last() {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            cleaned.push(c);
        }
        // keep only maximal contexts
        let mut keep = vec![true; cleaned.len()];
        for i in 0..cleaned.len() {
            for j in 0..cleaned.len() {
                if i != j && keep[i] && is_subset(&cleaned[i], &cleaned[j]) {
                    // equal contexts: keep the first occurrence
                    if cleaned[i] == cleaned[j] && i < j {
                        continue;
                    }
                    keep[i] = false;
                }
            }
        }
        let mut contexts: Vec<Vec<usize>> = cleaned
            .into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect();
        contexts.sort();
        contexts.dedup();
        Ok(ContextHypergraph { n, contexts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    /// Graph joining `i, j` exactly when some context contains both.
    pub fn adjacency_graph(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for c in &self.contexts {
            for (a, &i) in c.iter().enumerate() {
                for &j in &c[a + 1..] {
                    g.adj[i].insert(j);
                    g.adj[j].insert(i);
                }
            }
        }
        g
    }

    /// Human-readable size summary, used by the CLI.
    pub fn summary(&self) -> String {
        format!("{} vertices, {} contexts", self.n, self.contexts.len())
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_shape() {
        let g = Graph::cycle(5).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 5);
        for i in 0..5 {
            assert_eq!(g.degree(i), 2);
        }
        assert!(g.adjacent(0, 4) && g.adjacent(4, 0));
        assert!(!g.adjacent(0, 2));
    }

    #[test]
    fn triangle() {
        let g = Graph::cycle(3).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(matches!(
            Graph::cycle(2),
            Err(GraphError::CycleTooShort { n: 2 })
        ));
    }

    #[test]
    fn c8_is_bipartite() {
        // brute-force 2-coloring: alternate colors along the cycle and check
        let g = Graph::cycle(8).unwrap();
        assert_eq!(g.edge_count(), 8);
        let color = |v: usize| v % 2;
        for (i, j) in g.edges() {
            assert_ne!(color(i), color(j));
        }
    }

    #[test]
    fn circulant_8_14() {
        let g = Graph::circulant(8, &[1, 4]).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.edge_count(), 12); // C8 plus 4 antipodal chords
        assert!(g.adjacent(0, 4) && g.adjacent(1, 5));
    }

    #[test]
    fn circulant_offset_one_is_cycle() {
        for n in 3..10 {
            assert_eq!(Graph::circulant(n, &[1]).unwrap(), Graph::cycle(n).unwrap());
        }
    }

    #[test]
    fn circulant_complete() {
        let g = Graph::circulant(6, &[1, 2, 3]).unwrap();
        // enumerate pairs: all 15 present
        let mut count = 0;
        for i in 0..6 {
            for j in i + 1..6 {
                assert!(g.adjacent(i, j));
                count += 1;
            }
        }
        assert_eq!(count, 15);
        assert_eq!(g, Graph::complete(6));
    }

    #[test]
    fn circulant_rejects_bad_offsets() {
        assert!(Graph::circulant(8, &[0]).is_err());
        assert!(Graph::circulant(8, &[5]).is_err());
        assert!(Graph::circulant(8, &[4]).is_ok());
    }

    #[test]
    fn induced_path() {
        let g = Graph::cycle(5).unwrap();
        let h = g.induced(&[0, 1, 2]).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn induced_identity() {
        let g = Graph::circulant(8, &[1, 4]).unwrap();
        let all: Vec<usize> = (0..8).collect();
        assert_eq!(g.induced(&all).unwrap(), g);
    }

    #[test]
    fn induced_rejects_bad_subsets() {
        let g = Graph::cycle(5).unwrap();
        assert!(matches!(
            g.induced(&[0, 0]),
            Err(GraphError::DuplicateVertex { vertex: 0 })
        ));
        assert!(g.induced(&[0, 7]).is_err());
    }

    #[test]
    fn from_edges_validation() {
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        // duplicates collapse
        let g = Graph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn adjacency_graph_cases() {
        // pairwise contexts of C5 reproduce C5
        let c5 = Graph::cycle(5).unwrap();
        let contexts: Vec<Vec<usize>> = c5.edges().iter().map(|&(i, j)| vec![i, j]).collect();
        let h = ContextHypergraph::new(5, &contexts).unwrap();
        assert_eq!(h.adjacency_graph(), c5);

        // one 3-context is a triangle
        let h = ContextHypergraph::new(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(h.adjacency_graph(), Graph::complete(3));

        // all pairs of K_n reproduce K_n
        let k6 = Graph::complete(6);
        let contexts: Vec<Vec<usize>> = k6.edges().iter().map(|&(i, j)| vec![i, j]).collect();
        let h = ContextHypergraph::new(6, &contexts).unwrap();
        assert_eq!(h.adjacency_graph(), k6);
    }

    #[test]
    fn clique_hypergraph_cases() {
        // triangle-free: maximal cliques are the edges
        let c5 = Graph::cycle(5).unwrap();
        let h = c5.clique_hypergraph();
        assert_eq!(h.contexts().len(), 5);
        assert!(h.contexts().iter().all(|c| c.len() == 2));

        let k4 = Graph::complete(4);
        assert_eq!(k4.clique_hypergraph().contexts(), &[vec![0, 1, 2, 3]]);

        let g = Graph::circulant(8, &[1, 4]).unwrap();
        let h = g.clique_hypergraph();
        assert_eq!(h.contexts().len(), 12);
        assert!(h.contexts().iter().all(|c| c.len() == 2));
    }

    #[test]
    fn clique_hypergraph_matches_brute_force() {
        // oracle: a maximal clique is a pairwise-adjacent subset that no
        // vertex extends; enumerate all subsets of a small graph
        let g = Graph::circulant(7, &[1, 2]).unwrap();
        let n = g.n();
        let mut expected: Vec<Vec<usize>> = Vec::new();
        for mask in 1u32..(1 << n) {
            let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let clique = verts
                .iter()
                .enumerate()
                .all(|(a, &i)| verts[a + 1..].iter().all(|&j| g.adjacent(i, j)));
            if !clique {
                continue;
            }
            let maximal = (0..n)
                .filter(|v| !verts.contains(v))
                .all(|u| !verts.iter().all(|&i| g.adjacent(u, i)));
            if maximal {
                expected.push(verts);
            }
        }
        expected.sort();
        assert_eq!(g.clique_hypergraph().contexts(), &expected[..]);
    }

    #[test]
    fn isolated_vertices_become_singleton_contexts() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let h = g.clique_hypergraph();
        assert_eq!(h.contexts(), &[vec![0, 1], vec![2]]);
        assert_eq!(h.adjacency_graph(), g);
    }

    #[test]
    fn hypergraph_drops_dominated_contexts() {
        let h = ContextHypergraph::new(4, &[vec![0, 1], vec![0, 1, 2], vec![0, 1, 2], vec![3]])
            .unwrap();
        assert_eq!(h.contexts(), &[vec![0, 1, 2], vec![3]]);
        assert!(ContextHypergraph::new(2, &[vec![]]).is_err());
        assert!(ContextHypergraph::new(2, &[vec![0, 2]]).is_err());
    }

    #[test]
    fn round_trip_on_small_graphs() {
        let graphs = [
            Graph::cycle(5).unwrap(),
            Graph::cycle(8).unwrap(),
            Graph::circulant(8, &[1, 4]).unwrap(),
            Graph::complete(5),
            Graph::empty(4),
            Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (4, 5)]).unwrap(),
        ];
        for g in graphs {
            assert_eq!(g.clique_hypergraph().adjacency_graph(), g);
        }
    }
}
