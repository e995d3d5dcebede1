//! Finite simple graphs, rooted graphs and edge-weighted graphs, with the
//! constructions the density and reduction code is built on.
//!
//! Vertex indexing is deterministic everywhere: constructions that add
//! vertices ([`qify`], [`edge_substitute`]) keep the original vertices first
//! and append new ones in edge order, edges being visited in the canonical
//! `(u, v)`, `u < v`, lexicographic order.

mod base;
mod canon;
mod homs;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::numeric::Rational;

pub use base::{base_graph, hoffman_singleton, petersen, BaseGraph, BASE_NAMES};
pub use canon::{are_isomorphic, canonical_form, canonical_form_colored, find_automorphism, Canonical};
pub use homs::find_induced_homomorphism;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, normalizing each pair to `(min, max)` and merging
    /// repeated pairs. Loops and out-of-range endpoints are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid("edges", format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(Error::invalid("edges", format!("loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set.into_iter().collect() })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order, each as `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            m[u][v] = true;
            m[v][u] = true;
        }
        m
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// The common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        match deg.first() {
            Some(&d) if deg.iter().all(|&x| x == d) => Some(d),
            _ => None,
        }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n, "permutation length");
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Graph { n: self.n, edges }
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency_lists();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Subgraph induced on `vertices`, relabeled `0..vertices.len()` in the
    /// given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::new(vertices.len(), edges).expect("induced subgraph is simple")
    }

    /// First triangle found, if any.
    pub fn find_triangle(&self) -> Option<[usize; 3]> {
        let adj = self.adjacency_lists();
        for &(u, v) in &self.edges {
            // Both lists are sorted; merge for a common neighbour.
            let (a, b) = (&adj[u], &adj[v]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => return Some([u, v, a[i]]),
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    /// Whether removing any set of fewer than `k` vertices leaves the graph
    /// connected, with at least `k + 1` vertices to begin with.
    pub fn is_k_connected(&self, k: usize) -> bool {
        if self.n <= k {
            return false;
        }
        fn subsets(
            n: usize,
            size: usize,
            start: usize,
            cur: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]) -> bool,
        ) -> bool {
            if cur.len() == size {
                return f(cur);
            }
            for v in start..n {
                cur.push(v);
                if !subsets(n, size, v + 1, cur, f) {
                    return false;
                }
                cur.pop();
            }
            true
        }
        (0..k).all(|size| {
            subsets(self.n, size, 0, &mut Vec::new(), &mut |removed| {
                let keep: Vec<usize> = (0..self.n).filter(|v| !removed.contains(v)).collect();
                self.induced_subgraph(&keep).is_connected()
            })
        })
    }
}

/// A graph with an ordered list of distinct root vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedGraph {
    graph: Graph,
    roots: Vec<usize>,
}

impl RootedGraph {
    pub fn new(graph: Graph, roots: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &r in &roots {
            if r >= graph.vertex_count() {
                return Err(Error::invalid("roots", format!("root {r} is not a vertex")));
            }
            if !seen.insert(r) {
                return Err(Error::invalid("roots", format!("root {r} repeated")));
            }
        }
        Ok(RootedGraph { graph, roots })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Non-root vertices in increasing order.
    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.graph.vertex_count()).filter(|v| !self.roots.contains(v)).collect()
    }

    /// Checks the two-root, adjacent-roots shape needed for gluing.
    pub fn require_two_adjacent_roots(&self) -> Result<(usize, usize)> {
        match self.roots[..] {
            [a, b] if self.graph.has_edge(a, b) => Ok((a, b)),
            [a, b] => Err(Error::invalid("roots", format!("roots {a} and {b} are not adjacent"))),
            _ => Err(Error::invalid("roots", format!("expected exactly 2 roots, found {}", self.roots.len()))),
        }
    }
}

/// Graph with real edge weights; absent pairs have weight zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    weights: BTreeMap<(usize, usize), Rational>,
}

impl WeightedGraph {
    /// Later entries for the same pair overwrite earlier ones; zero weights
    /// are dropped.
    pub fn new<I>(n: usize, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (u, v, w) in weights {
            if u >= n || v >= n {
                return Err(Error::invalid("weights", format!("pair ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(Error::invalid("weights", format!("self-pair at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if num_traits::Zero::is_zero(&w) {
                map.remove(&key);
            } else {
                map.insert(key, w);
            }
        }
        Ok(WeightedGraph { n, weights: map })
    }

    /// Unit weights on the edges of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        let one = num_traits::One::one();
        WeightedGraph { n: g.vertex_count(), weights: g.edges().iter().map(|&e| (e, Rational::clone(&one))).collect() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> Rational {
        self.weights.get(&(u.min(v), u.max(v))).cloned().unwrap_or_else(num_traits::Zero::zero)
    }

    /// Nonzero weights as `((u, v), w)` with `u < v`.
    pub fn weights(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.weights.iter()
    }
}

/// Named graph families for [`generate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Cycle(usize),
    Clique(usize),
    Path(usize),
    Base(String),
}

pub fn generate(family: &Family) -> Result<Graph> {
    match family {
        Family::Cycle(c) => cycle(*c),
        Family::Clique(q) => clique(*q),
        Family::Path(n) => Ok(path(*n)),
        Family::Base(name) => Ok(base_graph(name)?.into_graph()),
    }
}

/// The cycle C_c.
pub fn cycle(c: usize) -> Result<Graph> {
    if c < 3 {
        return Err(Error::invalid("c", format!("a cycle needs at least 3 vertices, got {c}")));
    }
    Graph::new(c, (0..c).map(|i| (i, (i + 1) % c)))
}

/// The complete graph K_q.
pub fn clique(q: usize) -> Result<Graph> {
    if q < 1 {
        return Err(Error::invalid("q", "a clique needs at least one vertex"));
    }
    Graph::new(q, (0..q).flat_map(|i| (i + 1..q).map(move |j| (i, j))))
}

/// K_q with vertices 0 and 1 as roots.
pub fn rooted_clique(q: usize) -> Result<RootedGraph> {
    if q < 2 {
        return Err(Error::invalid("q", format!("a doubly rooted clique needs q >= 2, got {q}")));
    }
    RootedGraph::new(clique(q)?, vec![0, 1])
}

/// Path on `n` vertices.
pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
}

/// Replaces every edge by a q-clique: each edge gains `q - 2` new vertices
/// adjacent to each other and to both endpoints.
pub fn qify(g: &Graph, q: usize) -> Result<Graph> {
    if q < 2 {
        return Err(Error::invalid("q", format!("q-ification needs q >= 2, got {q}")));
    }
    let extra = q - 2;
    let n = g.vertex_count() + extra * g.edge_count();
    let mut edges = Vec::with_capacity(g.edge_count() * q * (q - 1) / 2);
    let mut next = g.vertex_count();
    for &(u, v) in g.edges() {
        let mut members = vec![u, v];
        members.extend(next..next + extra);
        next += extra;
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                edges.push((members[i], members[j]));
            }
        }
    }
    Graph::new(n, edges)
}

/// The q-necklace of length c: the q-ification of C_c.
pub fn necklace(c: usize, q: usize) -> Result<Graph> {
    if q < 2 {
        return Err(Error::invalid("q", format!("necklaces need q >= 2, got {q}")));
    }
    qify(&cycle(c)?, q)
}

/// Disjoint union, with the vertices of `gs[i]` placed after those of
/// `gs[..i]`.
pub fn disjoint_union<'a, I>(gs: I) -> Graph
where
    I: IntoIterator<Item = &'a Graph>,
{
    let mut n = 0;
    let mut edges = Vec::new();
    for g in gs {
        edges.extend(g.edges().iter().map(|&(u, v)| (u + n, v + n)));
        n += g.vertex_count();
    }
    Graph::new(n, edges).expect("union of simple graphs is simple")
}

/// Glues a fresh copy of `h` onto every edge `(u, v)` of `g`, identifying the
/// first root with `u` and the second with `v`.
pub fn edge_substitute(g: &Graph, h: &RootedGraph) -> Result<Graph> {
    let (r0, r1) = h.require_two_adjacent_roots()?;
    let free = h.free_vertices();
    let hn = h.graph().vertex_count();
    let n = g.vertex_count() + g.edge_count() * free.len();
    let mut edges = Vec::with_capacity(g.edge_count() * h.graph().edge_count());
    let mut next = g.vertex_count();
    let mut image = vec![0usize; hn];
    for &(u, v) in g.edges() {
        image[r0] = u;
        image[r1] = v;
        for &f in &free {
            image[f] = next;
            next += 1;
        }
        edges.extend(h.graph().edges().iter().map(|&(a, b)| (image[a], image[b])));
    }
    Graph::new(n, edges)
}

/// Whether `h` belongs to the gluing class: connected, two adjacent roots,
/// and an automorphism exchanging the roots.
pub fn is_admissible_rooted(h: &RootedGraph) -> bool {
    let Ok((a, b)) = h.require_two_adjacent_roots() else {
        return false;
    };
    h.graph().is_connected() && find_automorphism(h.graph(), &[(a, b), (b, a)]).is_some()
}
