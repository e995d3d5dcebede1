//! Canonical labeling by colour refinement with individualization.
//!
//! Search tree nodes are equitable colourings; a leaf is a discrete colouring,
//! read as a relabeling. The canonical form is the relabeled graph whose
//! adjacency certificate is lexicographically smallest. Leaves with equal
//! certificates yield automorphisms, which prune siblings in the same orbit.

use crate::config::CANONICAL_GUARD;
use crate::error::{Error, Result};

use super::Graph;

/// A canonical relabeling: `graph == original.relabel(&perm)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub graph: Graph,
    pub perm: Vec<usize>,
}

pub fn canonical_form(g: &Graph) -> Result<Canonical> {
    canonical_form_colored(g, &vec![0; g.vertex_count()])
}

/// Canonical form of a vertex-coloured graph. Only the relative order of the
/// colour values matters; relabelings preserve colour classes, and classes
/// with smaller values come first.
pub fn canonical_form_colored(g: &Graph, colors: &[usize]) -> Result<Canonical> {
    let n = g.vertex_count();
    if n > CANONICAL_GUARD {
        return Err(Error::GuardExceeded {
            what: format!("canonical form of a {n}-vertex graph"),
            needed: n as f64,
            guard: CANONICAL_GUARD as f64,
            hint: String::new(),
        });
    }
    if colors.len() != n {
        return Err(Error::invalid("colors", format!("expected {n} colours, got {}", colors.len())));
    }
    let mut adj = vec![0u64; n];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut search = Search { adj, n, best: None, first: None, autos: Vec::new() };
    let start = refine(&search.adj, &ranks(colors));
    search.descend(start, &mut Vec::new());
    let (_, perm) = search.best.expect("search reaches at least one leaf");
    Ok(Canonical { graph: g.relabel(&perm), perm })
}

/// Isomorphism test through canonical forms.
pub fn are_isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    Ok(canonical_form(a)?.graph == canonical_form(b)?.graph)
}

/// Dense rank of each value, preserving order.
fn ranks<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = values.to_vec();
    distinct.sort();
    distinct.dedup();
    values.iter().map(|v| distinct.binary_search(v).expect("present")).collect()
}

/// 1-dimensional Weisfeiler-Leman refinement to a stable colouring. The new
/// colour of `v` is the rank of `(old colour, sorted neighbour colours)`, so
/// every round refines the ordered partition without reordering cells.
fn refine(adj: &[u64], colors: &[usize]) -> Vec<usize> {
    let mut colors = colors.to_vec();
    let mut count = distinct_count(&colors);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<usize> = bits(adj[v]).map(|w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = ranks(&sigs);
        let next_count = distinct_count(&next);
        colors = next;
        if next_count == count {
            return colors;
        }
        count = next_count;
    }
}

fn distinct_count(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

fn bits(mut word: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let i = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(i)
        }
    })
}

struct Search {
    adj: Vec<u64>,
    n: usize,
    best: Option<(Vec<u64>, Vec<usize>)>,
    first: Option<(Vec<u64>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl Search {
    fn descend(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>) {
        if distinct_count(&colors) == self.n {
            self.leaf(colors);
            return;
        }
        let target = target_cell(&colors);
        let cell: Vec<usize> = (0..self.n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(prefix, &cell, &explored, v) {
                continue;
            }
            let split: Vec<(usize, bool)> = (0..self.n).map(|w| (colors[w], w != v)).collect();
            let child = refine(&self.adj, &ranks(&split));
            prefix.push(v);
            self.descend(child, prefix);
            prefix.pop();
            explored.push(v);
        }
    }

    /// Whether `v` is in the orbit of an explored vertex under the recorded
    /// automorphisms that fix `prefix` pointwise.
    fn same_orbit(&self, prefix: &[usize], cell: &[usize], explored: &[usize], v: usize) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.autos {
            if prefix.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            any = true;
            for &c in cell {
                let (a, b) = (find(&mut parent, c), find(&mut parent, gamma[c]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == root)
    }

    fn leaf(&mut self, perm: Vec<usize>) {
        let mut inverse = vec![0; self.n];
        for (v, &p) in perm.iter().enumerate() {
            inverse[p] = v;
        }
        let cert: Vec<u64> =
            (0..self.n).map(|i| bits(self.adj[inverse[i]]).fold(0u64, |row, w| row | 1 << perm[w])).collect();
        for known in [&self.first, &self.best].into_iter().flatten() {
            if known.0 == cert {
                let gamma = automorphism_between(&known.1, &perm);
                if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                    self.autos.push(gamma);
                }
            }
        }
        if self.first.is_none() {
            self.first = Some((cert.clone(), perm.clone()));
        }
        if self.best.as_ref().map_or(true, |(b, _)| cert < *b) {
            self.best = Some((cert, perm));
        }
    }
}

/// `pi1^{-1} . pi2`, an automorphism whenever both leaves give the same
/// relabeled graph.
fn automorphism_between(pi1: &[usize], pi2: &[usize]) -> Vec<usize> {
    let mut inv1 = vec![0; pi1.len()];
    for (v, &p) in pi1.iter().enumerate() {
        inv1[p] = v;
    }
    pi2.iter().map(|&p| inv1[p]).collect()
}

/// First non-singleton cell.
fn target_cell(colors: &[usize]) -> usize {
    let mut sizes = vec![0usize; distinct_count(colors)];
    for &c in colors {
        sizes[c] += 1;
    }
    sizes.iter().position(|&s| s > 1).expect("non-discrete colouring")
}

/// Searches for an automorphism of `g` extending the partial map `forced`
/// (pairs `(v, image)`). Works at any size: candidates are pruned by stable
/// colour and by adjacency to already mapped vertices.
pub fn find_automorphism(g: &Graph, forced: &[(usize, usize)]) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let adj = g.adjacency_matrix();
    let lists = g.adjacency_lists();
    let colors = stable_colors(&lists);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(v, w) in forced {
        if colors[v] != colors[w] || (map[v] != usize::MAX && map[v] != w) {
            return None;
        }
        if map[v] == usize::MAX {
            if used[w] {
                return None;
            }
            map[v] = w;
            used[w] = true;
        }
    }
    let assigned: Vec<usize> = (0..n).filter(|&v| map[v] != usize::MAX).collect();
    for &a in &assigned {
        for &b in &assigned {
            if adj[a][b] != adj[map[a]][map[b]] {
                return None;
            }
        }
    }
    // Breadth-first order from the forced vertices keeps candidates local.
    let order = bfs_order(&lists, &assigned);
    let mut placed = assigned.clone();
    if extend(&order, 0, &adj, &lists, &colors, &mut map, &mut used, &mut placed) {
        Some(map)
    } else {
        None
    }
}

fn stable_colors(lists: &[Vec<usize>]) -> Vec<usize> {
    let mut colors: Vec<usize> = ranks(&lists.iter().map(Vec::len).collect::<Vec<_>>());
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = lists
            .iter()
            .enumerate()
            .map(|(v, nb)| {
                let mut s: Vec<usize> = nb.iter().map(|&w| colors[w]).collect();
                s.sort_unstable();
                (colors[v], s)
            })
            .collect();
        let next = ranks(&sigs);
        if distinct_count(&next) == distinct_count(&colors) {
            return next;
        }
        colors = next;
    }
}

fn bfs_order(lists: &[Vec<usize>], seeds: &[usize]) -> Vec<usize> {
    let n = lists.len();
    let mut seen = vec![false; n];
    for &s in seeds {
        seen[s] = true;
    }
    let mut order = Vec::new();
    let mut queue: std::collections::VecDeque<usize> = seeds.iter().copied().collect();
    let mut next_start = 0;
    loop {
        while let Some(u) = queue.pop_front() {
            for &w in &lists[u] {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        while next_start < n && seen[next_start] {
            next_start += 1;
        }
        if next_start == n {
            return order;
        }
        seen[next_start] = true;
        order.push(next_start);
        queue.push_back(next_start);
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    order: &[usize],
    depth: usize,
    adj: &[Vec<bool>],
    lists: &[Vec<usize>],
    colors: &[usize],
    map: &mut [usize],
    used: &mut [bool],
    placed: &mut Vec<usize>,
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    // Candidates: neighbours of the image of a mapped neighbour, if any.
    let anchor = lists[v].iter().find(|&&w| map[w] != usize::MAX).copied();
    let candidates: Vec<usize> = match anchor {
        Some(a) => lists[map[a]].clone(),
        None => (0..adj.len()).collect(),
    };
    for w in candidates {
        if used[w] || colors[w] != colors[v] {
            continue;
        }
        if placed.iter().any(|&p| adj[v][p] != adj[w][map[p]]) {
            continue;
        }
        map[v] = w;
        used[w] = true;
        placed.push(v);
        if extend(order, depth + 1, adj, lists, colors, map, used, placed) {
            return true;
        }
        placed.pop();
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}
