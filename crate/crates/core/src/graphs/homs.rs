//! Induced homomorphisms: maps sending edges to edges and non-edges to
//! non-edges. Non-adjacent vertices may share an image; adjacent ones cannot.

use super::Graph;

/// Depth-first search for an induced homomorphism `from -> to` accepted by
/// `accept`, which sees each complete map. Vertices are placed in
/// breadth-first order so later choices are constrained by earlier ones.
pub fn find_induced_homomorphism<F>(from: &Graph, to: &Graph, accept: F) -> Option<Vec<usize>>
where
    F: Fn(&[usize]) -> bool,
{
    let n = from.vertex_count();
    if n == 0 {
        return accept(&[]).then(Vec::new);
    }
    if to.vertex_count() == 0 {
        return None;
    }
    let fa = from.adjacency_matrix();
    let ta = to.adjacency_matrix();
    let order: Vec<usize> = from.components().into_iter().flat_map(|c| bfs(from, c[0])).collect();
    let mut map = vec![usize::MAX; n];
    let mut placed = Vec::with_capacity(n);
    if search(&order, &fa, &ta, &mut map, &mut placed, &accept) {
        Some(map)
    } else {
        None
    }
}

fn bfs(g: &Graph, start: usize) -> Vec<usize> {
    let lists = g.adjacency_lists();
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut order = vec![start];
    let mut i = 0;
    while i < order.len() {
        for &w in &lists[order[i]] {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
        i += 1;
    }
    order
}

fn search<F: Fn(&[usize]) -> bool>(
    order: &[usize],
    fa: &[Vec<bool>],
    ta: &[Vec<bool>],
    map: &mut [usize],
    placed: &mut Vec<usize>,
    accept: &F,
) -> bool {
    let Some(&v) = order.get(placed.len()) else {
        return accept(map);
    };
    for w in 0..ta.len() {
        let ok = placed.iter().all(|&p| {
            let img = map[p];
            if fa[v][p] {
                ta[w][img]
            } else {
                w == img || !ta[w][img]
            }
        });
        if !ok {
            continue;
        }
        map[v] = w;
        placed.push(v);
        if search(order, fa, ta, map, placed, accept) {
            return true;
        }
        placed.pop();
        map[v] = usize::MAX;
    }
    false
}
