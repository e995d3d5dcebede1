//! Homomorphism densities on step kernels.
//!
//! Brute-force densities enumerate maps from pattern vertices to blocks in a
//! fixed lexicographic order. With [`Config::parallel`] the maps are split by
//! the block of the first enumerated vertex; partial sums are merged in block
//! order in both modes, so the two modes return identical values.

use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::graphs::{necklace, rooted_clique, Graph, RootedGraph, WeightedGraph};
use crate::kernels::{Spectrum, StepKernel};
use crate::numeric::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityMethod {
    BruteForce,
    Spectral,
}

impl std::str::FromStr for DensityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" | "brute-force" => Ok(DensityMethod::BruteForce),
            "spectral" => Ok(DensityMethod::Spectral),
            _ => Err(Error::invalid("method", format!("unknown method {s:?}; expected brute or spectral"))),
        }
    }
}

/// Block data the enumerator runs over: `k` blocks with weights `measures`
/// and a row-major `k x k` value matrix.
pub(crate) struct Blocks<'a, S> {
    pub k: usize,
    pub measures: Vec<S>,
    pub values: &'a [S],
}

impl<'a, S: Scalar> Blocks<'a, S> {
    pub fn of(w: &'a StepKernel<S>) -> Self {
        Blocks { k: w.block_count(), measures: w.measures_as(), values: w.values() }
    }
}

/// Σ over maps of the free vertices to blocks of
/// Π measure · Π_{edges} W · Π_{non-edges} (1 - W) (non-edges only when
/// `induced`), with `pinned` vertices fixed to the given blocks.
pub(crate) fn enumerate<S: Scalar>(
    h: &Graph,
    blocks: &Blocks<'_, S>,
    pinned: &[(usize, usize)],
    induced: bool,
    cfg: &Config,
    what: &str,
) -> Result<S> {
    let n = h.vertex_count();
    let k = blocks.k;
    let adj = h.adjacency_matrix();
    let mut assigned = vec![usize::MAX; n];
    for &(v, b) in pinned {
        if b >= k {
            return Err(Error::invalid("root_blocks", format!("block {b} is outside 0..{k}")));
        }
        assigned[v] = b;
    }
    let degrees = h.degrees();
    let mut free: Vec<usize> = (0..n).filter(|&v| assigned[v] == usize::MAX && (induced || degrees[v] > 0)).collect();
    let needed = (k as f64).powi(free.len() as i32);
    if needed > cfg.enumeration_guard {
        return Err(Error::GuardExceeded {
            what: what.to_string(),
            needed,
            guard: cfg.enumeration_guard,
            hint: "; use the spectral method or a smaller pattern".into(),
        });
    }

    // Place vertices with the most links to already placed ones first, so
    // zero factors prune early. Ties go to the smaller index.
    let mut placed: Vec<usize> = pinned.iter().map(|&(v, _)| v).collect();
    let mut order = Vec::with_capacity(free.len());
    while !free.is_empty() {
        let (pos, _) = free
            .iter()
            .enumerate()
            .max_by_key(|&(_, &v)| (placed.iter().filter(|&&u| adj[v][u]).count(), std::cmp::Reverse(v)))
            .expect("nonempty");
        let v = free.remove(pos);
        placed.push(v);
        order.push(v);
    }
    let links: Vec<Vec<(usize, bool)>> = order
        .iter()
        .enumerate()
        .map(|(d, &v)| {
            pinned
                .iter()
                .map(|&(u, _)| u)
                .chain(order[..d].iter().copied())
                .filter(|&u| induced || adj[v][u])
                .map(|u| (u, adj[v][u]))
                .collect()
        })
        .collect();

    let factor = |a: usize, b: usize, edge: bool| -> S {
        let w = blocks.values[a * k + b].clone();
        if edge {
            w
        } else {
            S::one() - w
        }
    };
    let mut root_factor = S::one();
    for (i, &(u, bu)) in pinned.iter().enumerate() {
        for &(v, bv) in &pinned[..i] {
            if adj[u][v] || induced {
                root_factor = root_factor * factor(bu, bv, adj[u][v]);
            }
        }
    }
    if order.is_empty() || root_factor.is_zero() {
        return Ok(root_factor);
    }

    let walker = Walker { blocks, order: &order, links: &links, factor: &factor };
    let first = |b: usize| -> S::Sum {
        let mut acc = S::Sum::default();
        let mut assigned = assigned.clone();
        walker.step(0, b, root_factor.clone(), &mut assigned, &mut acc);
        acc
    };
    let partials: Vec<S::Sum> =
        if cfg.parallel { (0..k).into_par_iter().map(first).collect() } else { (0..k).map(first).collect() };
    let mut total = S::Sum::default();
    for p in partials {
        S::merge(&mut total, p);
    }
    Ok(S::total(total))
}

struct Walker<'a, 'b, S, F> {
    blocks: &'a Blocks<'b, S>,
    order: &'a [usize],
    links: &'a [Vec<(usize, bool)>],
    factor: &'a F,
}

impl<S: Scalar, F: Fn(usize, usize, bool) -> S> Walker<'_, '_, S, F> {
    fn step(&self, depth: usize, b: usize, mut prod: S, assigned: &mut [usize], acc: &mut S::Sum) {
        prod = prod * self.blocks.measures[b].clone();
        for &(u, edge) in &self.links[depth] {
            if prod.is_zero() {
                return;
            }
            prod = prod * (self.factor)(b, assigned[u], edge);
        }
        if prod.is_zero() {
            return;
        }
        let v = self.order[depth];
        if depth + 1 == self.order.len() {
            S::accumulate(acc, &prod);
            return;
        }
        assigned[v] = b;
        for next in 0..self.blocks.k {
            self.step(depth + 1, next, prod.clone(), assigned, acc);
        }
        assigned[v] = usize::MAX;
    }
}

/// t(H, W) by block enumeration.
pub fn hom_density<S: Scalar>(h: &Graph, w: &StepKernel<S>) -> Result<S> {
    hom_density_with(h, w, &Config::default())
}

pub fn hom_density_with<S: Scalar>(h: &Graph, w: &StepKernel<S>, cfg: &Config) -> Result<S> {
    enumerate(h, &Blocks::of(w), &[], false, cfg, &format!("t(H, W) for a {}-vertex H", h.vertex_count()))
}

/// hom(H, G) for an edge-weighted G: Σ over all maps V(H) -> V(G) of the
/// product of edge weights.
pub fn weighted_hom_count<S: Scalar>(h: &Graph, g: &WeightedGraph) -> Result<S> {
    let n = g.vertex_count();
    let mut values = vec![S::zero(); n * n];
    for (&(u, v), wt) in g.weights() {
        values[u * n + v] = S::from_rational(wt);
        values[v * n + u] = S::from_rational(wt);
    }
    let blocks = Blocks { k: n, measures: vec![S::one(); n], values: &values };
    let cfg = Config::default();
    // Isolated vertices are skipped by the enumerator; each one contributes
    // a factor n here instead of 1.
    let isolated = h.degrees().iter().filter(|&&d| d == 0).count();
    let mut count = enumerate(h, &blocks, &[], false, &cfg, "weighted homomorphism count")?;
    for _ in 0..isolated {
        count = count * S::from_i64(n as i64);
    }
    Ok(count)
}

/// Density of `h` with its roots pinned to `root_blocks`.
pub fn conditional_density<S: Scalar>(h: &RootedGraph, w: &StepKernel<S>, root_blocks: &[usize]) -> Result<S> {
    conditional_density_with(h, w, root_blocks, &Config::default())
}

pub fn conditional_density_with<S: Scalar>(
    h: &RootedGraph,
    w: &StepKernel<S>,
    root_blocks: &[usize],
    cfg: &Config,
) -> Result<S> {
    let pinned = pin(h, root_blocks)?;
    enumerate(h.graph(), &Blocks::of(w), &pinned, false, cfg, "conditional density")
}

pub(crate) fn pin(h: &RootedGraph, root_blocks: &[usize]) -> Result<Vec<(usize, usize)>> {
    if root_blocks.len() != h.roots().len() {
        return Err(Error::invalid(
            "root_blocks",
            format!("{} blocks given for {} roots", root_blocks.len(), h.roots().len()),
        ));
    }
    Ok(h.roots().iter().copied().zip(root_blocks.iter().copied()).collect())
}

/// M_{W,q}: the kernel whose (i, j) value is the conditional density of the
/// doubly rooted K_q with roots in blocks i and j. For kernels with 0/1
/// values and a zero diagonal the value is computed by clique enumeration in
/// the underlying graph instead of block enumeration.
pub fn clique_operator<S: Scalar>(w: &StepKernel<S>, q: usize) -> Result<StepKernel<S>> {
    clique_operator_with(w, q, &Config::default())
}

pub fn clique_operator_with<S: Scalar>(w: &StepKernel<S>, q: usize, cfg: &Config) -> Result<StepKernel<S>> {
    if q < 2 {
        return Err(Error::invalid("q", format!("q must be at least 2, got {q}")));
    }
    if q == 2 {
        return Ok(w.clone());
    }
    match w.graph_support() {
        Some(adj) => Ok(clique_operator_graph(w, &adj, q)),
        None => clique_operator_generic(w, q, cfg),
    }
}

/// Block enumeration for every entry.
pub fn clique_operator_generic<S: Scalar>(w: &StepKernel<S>, q: usize, cfg: &Config) -> Result<StepKernel<S>> {
    let h = rooted_clique(q)?;
    let k = w.block_count();
    let blocks = Blocks::of(w);
    let entry = |i: usize, j: usize| -> Result<S> {
        enumerate(h.graph(), &blocks, &[(0, i), (1, j)], false, cfg, "clique operator entry")
    };
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let upper: Vec<S> = if cfg.parallel {
        pairs.par_iter().map(|&(i, j)| entry(i, j)).collect::<Result<_>>()?
    } else {
        pairs.iter().map(|&(i, j)| entry(i, j)).collect::<Result<_>>()?
    };
    let mut rows = vec![vec![S::zero(); k]; k];
    for ((i, j), v) in pairs.into_iter().zip(upper) {
        rows[i][j] = v.clone();
        rows[j][i] = v;
    }
    StepKernel::new(w.measures().to_vec(), rows)
}

/// Clique enumeration: with 0/1 values and a zero diagonal, only maps of the
/// q - 2 free vertices to distinct blocks forming a clique with both roots
/// contribute, each with the product of its block measures. Every unordered
/// clique is counted (q - 2)! times.
fn clique_operator_graph<S: Scalar>(w: &StepKernel<S>, adj: &[Vec<usize>], q: usize) -> StepKernel<S> {
    let k = w.block_count();
    let measures = w.measures_as();
    let mut orderings = S::one();
    for i in 2..=(q as i64 - 2) {
        orderings = orderings * S::from_i64(i);
    }
    let mut values = vec![S::zero(); k * k];
    for i in 0..k {
        for &j in adj[i].iter().filter(|&&j| j > i) {
            let common = intersect(&adj[i], &adj[j]);
            let mut acc = S::Sum::default();
            clique_sum(adj, &common, q - 2, S::one(), &measures, &mut acc);
            let v = S::total(acc) * orderings.clone();
            values[i * k + j] = v.clone();
            values[j * k + i] = v;
        }
    }
    StepKernel::new(w.measures().to_vec(), values.chunks(k).map(<[S]>::to_vec).collect())
        .expect("clique operator of a valid kernel is valid")
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Adds Π measure over each `size`-clique inside `candidates`, visiting each
/// clique once in increasing vertex order.
fn clique_sum<S: Scalar>(
    adj: &[Vec<usize>],
    candidates: &[usize],
    size: usize,
    prod: S,
    measures: &[S],
    acc: &mut S::Sum,
) {
    if size == 0 {
        S::accumulate(acc, &prod);
        return;
    }
    for (idx, &v) in candidates.iter().enumerate() {
        if candidates.len() - idx < size {
            break;
        }
        let rest = intersect(&candidates[idx + 1..], &adj[v]);
        clique_sum(adj, &rest, size - 1, prod.clone() * measures[v].clone(), measures, acc);
    }
}

/// Spectrum of M_{W,q}.
pub fn necklace_spectrum<S: Scalar>(w: &StepKernel<S>, q: usize) -> Result<Spectrum> {
    clique_operator(w, q)?.spectrum()
}

/// t(N_{c,q}, W), either as Σ λ^c over the spectrum of M_{W,q} or by
/// enumerating maps of the necklace itself.
pub fn necklace_density<S: Scalar>(c: usize, q: usize, w: &StepKernel<S>, method: DensityMethod) -> Result<f64> {
    if c < 3 {
        return Err(Error::invalid("c", format!("necklace length must be at least 3, got {c}")));
    }
    if q < 2 {
        return Err(Error::invalid("q", format!("q must be at least 2, got {q}")));
    }
    match method {
        DensityMethod::Spectral => Ok(necklace_spectrum(w, q)?.power_sum(c as u32)),
        DensityMethod::BruteForce => Ok(hom_density(&necklace(c, q)?, w)?.to_f64()),
    }
}

/// t(C_c, W) = Σ λ^c over the spectrum of W.
pub fn cycle_density_spectral<S: Scalar>(c: usize, w: &StepKernel<S>) -> Result<f64> {
    if c < 3 {
        return Err(Error::invalid("c", format!("cycle length must be at least 3, got {c}")));
    }
    Ok(w.spectrum()?.power_sum(c as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{clique, cycle, path, petersen, qify};
    use crate::numeric::{int, rational, Rational};

    fn k2<S: Scalar>() -> StepKernel<S> {
        StepKernel::from_graph(&clique(2).unwrap()).unwrap()
    }

    #[test]
    fn basic_densities() {
        let half = StepKernel::constant(rational(1, 2));
        assert_eq!(hom_density(&clique(2).unwrap(), &half).unwrap(), rational(1, 2));
        assert_eq!(hom_density(&cycle(4).unwrap(), &k2::<Rational>()).unwrap(), rational(1, 8));
        assert_eq!(hom_density(&Graph::empty(3), &half).unwrap(), int(1));
    }

    #[test]
    fn hom_counts() {
        let edge = WeightedGraph::new(2, [(0, 1, int(5))]).unwrap();
        assert_eq!(weighted_hom_count::<Rational>(&clique(2).unwrap(), &edge).unwrap(), int(10));
        let k3 = WeightedGraph::from_graph(&clique(3).unwrap());
        assert_eq!(weighted_hom_count::<Rational>(&clique(2).unwrap(), &k3).unwrap(), int(6));
        let c4 = WeightedGraph::from_graph(&cycle(4).unwrap());
        assert_eq!(weighted_hom_count::<Rational>(&cycle(3).unwrap(), &c4).unwrap(), int(0));
        // isolated vertices range over all of V(G)
        let g = Graph::new(3, [(0, 1)]).unwrap();
        assert_eq!(weighted_hom_count::<Rational>(&g, &k3).unwrap(), int(18));
    }

    #[test]
    fn conditional_examples() {
        let w = StepKernel::<Rational>::uniform(vec![vec![int(2), int(3)], vec![int(3), int(-1)]]).unwrap();
        let e = rooted_clique(2).unwrap();
        assert_eq!(conditional_density(&e, &w, &[0, 1]).unwrap(), int(3));
        let r = 4;
        let cu = StepKernel::<Rational>::clique_union(r).unwrap();
        let t = rooted_clique(3).unwrap();
        assert_eq!(conditional_density(&t, &cu, &[2, 2]).unwrap(), rational(1, r as i64));
        assert_eq!(conditional_density(&t, &cu, &[1, 2]).unwrap(), int(0));
        assert!(conditional_density(&t, &cu, &[1]).is_err());
        assert!(conditional_density(&t, &cu, &[1, 9]).is_err());
    }

    #[test]
    fn clique_operator_examples() {
        let w = StepKernel::<Rational>::uniform(vec![vec![int(1), int(-2)], vec![int(-2), int(0)]]).unwrap();
        assert_eq!(clique_operator(&w, 2).unwrap(), w);
        for r in 1..=4 {
            let cu = StepKernel::<Rational>::clique_union(r).unwrap();
            for q in 2..=5 {
                let m = clique_operator(&cu, q).unwrap();
                for i in 0..r {
                    for j in 0..r {
                        let expect =
                            if i == j { Rational::new(1.into(), num_traits::pow(r.into(), q - 2)) } else { int(0) };
                        assert_eq!(m.value(i, j), &expect);
                    }
                }
            }
        }
    }

    #[test]
    fn graph_path_matches_block_enumeration() {
        let cfg = Config::default();
        for g in [qify(&cycle(5).unwrap(), 4).unwrap(), qify(&petersen(), 3).unwrap(), clique(5).unwrap()] {
            let w = StepKernel::<Rational>::from_graph(&g).unwrap();
            for q in 3..=4 {
                let fast = clique_operator(&w, q).unwrap();
                let slow = clique_operator_generic(&w, q, &cfg).unwrap();
                assert_eq!(fast, slow, "q = {q}");
            }
        }
    }

    #[test]
    fn graph_path_with_unequal_measures() {
        let g = clique(4).unwrap();
        let w = StepKernel::<Rational>::new(
            vec![rational(1, 10), rational(2, 10), rational(3, 10), rational(4, 10)],
            StepKernel::<Rational>::from_graph(&g).unwrap().rows(),
        )
        .unwrap();
        let cfg = Config::default();
        assert_eq!(clique_operator(&w, 4).unwrap(), clique_operator_generic(&w, 4, &cfg).unwrap());
    }

    #[test]
    fn four_ified_petersen_operator() {
        let g = qify(&petersen(), 4).unwrap();
        let w = StepKernel::<Rational>::from_graph(&g).unwrap();
        let m = clique_operator(&w, 3).unwrap();
        let expect = w.scale(&rational(2, 40));
        assert_eq!(m, expect);
    }

    #[test]
    fn necklace_examples() {
        let cu = StepKernel::<f64>::clique_union(2).unwrap();
        let s = necklace_density(4, 3, &cu, DensityMethod::Spectral).unwrap();
        let b = necklace_density(4, 3, &cu, DensityMethod::BruteForce).unwrap();
        assert!((s - 1.0 / 128.0).abs() < 1e-15 && (b - 1.0 / 128.0).abs() < 1e-15);
        let c = StepKernel::constant(0.7);
        assert!((necklace_density(4, 2, &c, DensityMethod::Spectral).unwrap() - 0.7f64.powi(4)).abs() < 1e-15);
        assert!(necklace_density(2, 2, &c, DensityMethod::Spectral).is_err());
    }

    #[test]
    fn cycle_spectral_examples() {
        assert!((cycle_density_spectral(4, &k2::<f64>()).unwrap() - 0.125).abs() < 1e-15);
        let c = StepKernel::constant(-0.5);
        assert!((cycle_density_spectral(3, &c).unwrap() + 0.125).abs() < 1e-15);
        let bip = StepKernel::<f64>::from_graph(&cycle(6).unwrap()).unwrap();
        assert!(cycle_density_spectral(3, &bip).unwrap().abs() < 1e-15);
        assert_eq!(hom_density(&cycle(3).unwrap(), &bip).unwrap(), 0.0);
    }

    #[test]
    fn guard_rejects_large_patterns() {
        let w = StepKernel::<f64>::from_graph(&petersen()).unwrap();
        let err = hom_density(&path(10), &w).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn parallel_matches_sequential() {
        let spec = crate::kernels::RandomKernelSpec::new(4, crate::kernels::KernelClass::RangeSym(1.0));
        let par = Config { parallel: true, ..Config::default() };
        for seed in 0..5 {
            let w = crate::kernels::random_kernel(&spec, seed).unwrap();
            let h = necklace(4, 3).unwrap();
            let a = hom_density_with(&h, &w, &Config::default()).unwrap();
            let b = hom_density_with(&h, &w, &par).unwrap();
            assert_eq!(a, b);
        }
    }
}
