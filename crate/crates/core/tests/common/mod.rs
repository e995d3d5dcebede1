//! Reference implementations used as oracles. They favour obviousness over
//! speed and share no code paths with the library's enumerator, eigensolver
//! or canonical labelling.

#![allow(dead_code)]

use necklace_core::graphs::Graph;
use necklace_core::numeric::{int, Rational};
use necklace_core::{ExactKernel, StepKernel};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Calls `f` on every tuple in {0..k}^len, lexicographically.
pub fn for_each_tuple(len: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; len];
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < k {
                break;
            }
            t[i] = 0;
        }
    }
}

/// hom(H, G) / |V(G)|^{|V(H)|} by checking every map.
pub fn map_count_density(h: &Graph, g: &Graph) -> Rational {
    let adj = g.adjacency_matrix();
    let mut homs = 0i64;
    for_each_tuple(h.vertex_count(), g.vertex_count(), |m| {
        if h.edges().iter().all(|&(u, v)| adj[m[u]][m[v]]) {
            homs += 1;
        }
    });
    let total = num_traits::pow(int(g.vertex_count() as i64), h.vertex_count());
    int(homs) / total
}

/// hom(H, G) for edge-weighted G given as a dense matrix.
pub fn weighted_map_count(h: &Graph, weights: &[Vec<Rational>]) -> Rational {
    let mut total = Rational::zero();
    for_each_tuple(h.vertex_count(), weights.len(), |m| {
        let mut p = Rational::one();
        for &(u, v) in h.edges() {
            p *= &weights[m[u]][m[v]];
        }
        total += p;
    });
    total
}

/// t(H, W) or t_ind(H, W) by summing over every map of V(H) to blocks.
pub fn block_density(h: &Graph, w: &ExactKernel, induced: bool) -> Rational {
    let k = w.block_count();
    let n = h.vertex_count();
    let adj = h.adjacency_matrix();
    let mut total = Rational::zero();
    for_each_tuple(n, k, |m| {
        let mut p = Rational::one();
        for &b in m {
            p *= &w.measures()[b];
        }
        for u in 0..n {
            for v in u + 1..n {
                let x = w.value(m[u], m[v]);
                if adj[u][v] {
                    p *= x;
                } else if induced {
                    p *= Rational::one() - x;
                }
            }
        }
        total += p;
    });
    total
}

/// Float version of [`block_density`] for homomorphisms.
pub fn block_density_f64(h: &Graph, w: &StepKernel<f64>) -> f64 {
    let k = w.block_count();
    let measures: Vec<f64> = w.measures_as();
    let mut total = 0.0;
    for_each_tuple(h.vertex_count(), k, |m| {
        let mut p: f64 = m.iter().map(|&b| measures[b]).product();
        for &(u, v) in h.edges() {
            p *= w.value(m[u], m[v]);
        }
        total += p;
    });
    total
}

/// M_{W,q}(i, j) = W(i, j) Σ_z Π m_z Π_{pairs in {i, j, z}} W, summing over
/// all block tuples z of length q - 2.
pub fn naive_clique_operator(w: &ExactKernel, q: usize) -> Vec<Vec<Rational>> {
    let k = w.block_count();
    let mut out = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut sum = Rational::zero();
            for_each_tuple(q - 2, k, |z| {
                let mut blocks = vec![i, j];
                blocks.extend_from_slice(z);
                let mut p = Rational::one();
                for &b in z {
                    p *= &w.measures()[b];
                }
                for a in 0..q {
                    for b in a + 1..q {
                        p *= w.value(blocks[a], blocks[b]);
                    }
                }
                sum += p;
            });
            out[i][j] = sum;
        }
    }
    out
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for l in 0..n {
            for j in 0..n {
                c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    c
}

/// tr(S^c) for S_ij = sqrt(m_i m_j) W_ij, by repeated multiplication.
pub fn trace_power(w: &StepKernel<f64>, c: u32) -> f64 {
    let m = w.measures_as();
    let k = w.block_count();
    let s: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| (m[i] * m[j]).sqrt() * w.value(i, j)).collect()).collect();
    let mut p = s.clone();
    for _ in 1..c {
        p = mat_mul(&p, &s);
    }
    (0..k).map(|i| p[i][i]).sum()
}

/// Exhaustive isomorphism test through all vertex permutations.
pub fn isomorphic_brute(a: &Graph, b: &Graph) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let adj_b = b.adjacency_matrix();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| a.edges().iter().all(|&(u, v)| adj_b[p[u]][p[v]]))
}

fn permutations(p: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if i == p.len() {
        return f(p);
    }
    for j in i..p.len() {
        p.swap(i, j);
        if permutations(p, i + 1, f) {
            p.swap(i, j);
            return true;
        }
        p.swap(i, j);
    }
    false
}

/// Graph on `n` vertices whose edges are the set bits of `mask` in the
/// order (0,1), (0,2), …, (1,2), ….
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> (bit % 64) & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn graph_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n, any::<u64>()).prop_map(|(n, mask)| graph_from_mask(n, mask))
}

/// A permutation of 0..n built from a seed.
pub fn permutation_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Exact kernel with at most `max_blocks` blocks, positive rational
/// measures and values drawn from `values`.
pub fn exact_kernel_strategy(
    max_blocks: usize,
    values: impl Strategy<Value = Rational> + Clone + 'static,
) -> impl Strategy<Value = ExactKernel> {
    (1..=max_blocks).prop_flat_map(move |k| {
        (proptest::collection::vec(1i64..=6, k), proptest::collection::vec(values.clone(), k * (k + 1) / 2)).prop_map(
            move |(weights, upper)| {
                let total: i64 = weights.iter().sum();
                let measures = weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect();
                let mut rows = vec![vec![Rational::zero(); k]; k];
                let mut it = upper.into_iter();
                for i in 0..k {
                    for j in i..k {
                        let v = it.next().unwrap();
                        rows[i][j] = v.clone();
                        rows[j][i] = v;
                    }
                }
                StepKernel::new(measures, rows).unwrap()
            },
        )
    })
}

/// Values in [0, 1] with denominators up to 4.
pub fn unit_rational() -> impl Strategy<Value = Rational> + Clone {
    (0i64..=4, 1i64..=4).prop_map(|(n, d)| Rational::new(n.min(d).into(), d.into()))
}

/// Multiples of 1/4 in [-2, 2].
pub fn signed_rational() -> impl Strategy<Value = Rational> + Clone {
    (-8i64..=8).prop_map(|n| Rational::new(n.into(), 4.into()))
}

pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
