//! Induced densities and the rooted operator M_{W,H••}.
//!
//! Induced densities weight every non-edge of the pattern by (1 - W). For a
//! doubly rooted H that is symmetric in its roots, M_{W,H••}(x, y) is the
//! induced density of H with its roots at x and y; the glued necklace family
//! built from H has induced density Σ λ^c over the spectrum of this operator.

use crate::config::{Config, GLUE_CHECK_LIMIT};
use crate::density::{enumerate, pin, Blocks};
use crate::error::{Error, Result};
use crate::graphs::{find_induced_homomorphism, is_admissible_rooted, Graph, RootedGraph};
use crate::kernels::StepKernel;
use crate::numeric::Scalar;

/// t_ind(H, W).
pub fn induced_density<S: Scalar>(h: &Graph, w: &StepKernel<S>) -> Result<S> {
    induced_density_with(h, w, &Config::default())
}

pub fn induced_density_with<S: Scalar>(h: &Graph, w: &StepKernel<S>, cfg: &Config) -> Result<S> {
    let what = format!("t_ind(H, W) for a {}-vertex H", h.vertex_count());
    enumerate(h, &Blocks::of(w), &[], true, cfg, &what)
}

/// Induced density of `h` with its roots pinned to `root_blocks`.
pub fn conditional_induced_density<S: Scalar>(h: &RootedGraph, w: &StepKernel<S>, root_blocks: &[usize]) -> Result<S> {
    conditional_induced_density_with(h, w, root_blocks, &Config::default())
}

pub fn conditional_induced_density_with<S: Scalar>(
    h: &RootedGraph,
    w: &StepKernel<S>,
    root_blocks: &[usize],
    cfg: &Config,
) -> Result<S> {
    let pinned = pin(h, root_blocks)?;
    enumerate(h.graph(), &Blocks::of(w), &pinned, true, cfg, "conditional induced density")
}

fn require_admissible(h: &RootedGraph) -> Result<()> {
    if is_admissible_rooted(h) {
        Ok(())
    } else {
        Err(Error::invalid("h", "rooted graph must be connected with two adjacent roots exchanged by an automorphism"))
    }
}

/// M_{W,H••}. Kernels with 0/1 values and a zero diagonal are handled by
/// searching for induced copies in the underlying graph; all others by
/// block enumeration per entry.
pub fn rooted_operator<S: Scalar>(w: &StepKernel<S>, h: &RootedGraph) -> Result<StepKernel<S>> {
    rooted_operator_with(w, h, &Config::default())
}

pub fn rooted_operator_with<S: Scalar>(w: &StepKernel<S>, h: &RootedGraph, cfg: &Config) -> Result<StepKernel<S>> {
    require_admissible(h)?;
    match w.graph_support() {
        Some(adj) => Ok(rooted_operator_graph(w, &adj, h)),
        None => rooted_operator_generic(w, h, cfg),
    }
}

/// Block enumeration for every entry.
pub fn rooted_operator_generic<S: Scalar>(w: &StepKernel<S>, h: &RootedGraph, cfg: &Config) -> Result<StepKernel<S>> {
    require_admissible(h)?;
    let k = w.block_count();
    let blocks = Blocks::of(w);
    let roots = h.roots();
    let mut rows = vec![vec![S::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = enumerate(h.graph(), &blocks, &[(roots[0], i), (roots[1], j)], true, cfg, "rooted operator entry")?;
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    StepKernel::new(w.measures().to_vec(), rows)
}

/// With 0/1 values and a zero diagonal the roots must sit on an edge of the
/// underlying graph, pattern edges must map to graph edges, and pattern
/// non-edges to non-adjacent or equal vertices. Free vertices are placed in
/// breadth-first order from the roots so each candidate set is a
/// neighbourhood whenever possible.
fn rooted_operator_graph<S: Scalar>(w: &StepKernel<S>, adj: &[Vec<usize>], h: &RootedGraph) -> StepKernel<S> {
    let k = w.block_count();
    let measures = w.measures_as();
    let hg = h.graph();
    let ha = hg.adjacency_matrix();
    let hl = hg.adjacency_lists();
    let roots = [h.roots()[0], h.roots()[1]];

    let mut order: Vec<usize> = Vec::new();
    let mut seen = vec![false; hg.vertex_count()];
    for r in roots {
        seen[r] = true;
    }
    let mut frontier: std::collections::VecDeque<usize> = roots.into_iter().collect();
    while let Some(u) = frontier.pop_front() {
        for &x in &hl[u] {
            if !seen[x] {
                seen[x] = true;
                order.push(x);
                frontier.push_back(x);
            }
        }
    }
    let anchors: Vec<Option<usize>> =
        order.iter().enumerate().map(|(d, &v)| roots.iter().chain(&order[..d]).copied().find(|&u| ha[v][u])).collect();
    let earlier: Vec<Vec<usize>> =
        (0..order.len()).map(|d| roots.iter().chain(&order[..d]).copied().collect()).collect();

    let mut gadj = vec![false; k * k];
    for (i, list) in adj.iter().enumerate() {
        for &j in list {
            gadj[i * k + j] = true;
        }
    }
    let all: Vec<usize> = (0..k).collect();
    let search = Extension {
        order: &order,
        anchors: &anchors,
        earlier: &earlier,
        ha: &ha,
        adj,
        gadj: &gadj,
        k,
        all: &all,
        measures: &measures,
    };

    let mut values = vec![S::zero(); k * k];
    for i in 0..k {
        for &j in adj[i].iter().filter(|&&j| j > i) {
            let mut image = vec![usize::MAX; hg.vertex_count()];
            image[roots[0]] = i;
            image[roots[1]] = j;
            let mut acc = S::Sum::default();
            search.run(0, S::one(), &mut image, &mut acc);
            let v = S::total(acc);
            values[i * k + j] = v.clone();
            values[j * k + i] = v;
        }
    }
    StepKernel::new(w.measures().to_vec(), values.chunks(k).map(<[S]>::to_vec).collect())
        .expect("rooted operator of a valid kernel is valid")
}

struct Extension<'a, S> {
    order: &'a [usize],
    anchors: &'a [Option<usize>],
    earlier: &'a [Vec<usize>],
    ha: &'a [Vec<bool>],
    adj: &'a [Vec<usize>],
    gadj: &'a [bool],
    k: usize,
    all: &'a [usize],
    measures: &'a [S],
}

impl<S: Scalar> Extension<'_, S> {
    fn run(&self, depth: usize, prod: S, image: &mut [usize], acc: &mut S::Sum) {
        let Some(&v) = self.order.get(depth) else {
            S::accumulate(acc, &prod);
            return;
        };
        let candidates: &[usize] = match self.anchors[depth] {
            Some(a) => &self.adj[image[a]],
            None => self.all,
        };
        for &x in candidates {
            let ok = self.earlier[depth].iter().all(|&u| {
                let y = image[u];
                if self.ha[v][u] {
                    self.gadj[x * self.k + y]
                } else {
                    !self.gadj[x * self.k + y]
                }
            });
            if !ok {
                continue;
            }
            image[v] = x;
            self.run(depth + 1, prod.clone() * self.measures[x].clone(), image, acc);
            image[v] = usize::MAX;
        }
    }
}

/// t_ind of the glued family of length c: Σ λ^c over the spectrum of
/// M_{W,H••}.
pub fn glued_family_density<S: Scalar>(c: usize, h: &RootedGraph, w: &StepKernel<S>) -> Result<f64> {
    if c < 3 {
        return Err(Error::invalid("c", format!("family length must be at least 3, got {c}")));
    }
    Ok(rooted_operator(w, h)?.spectrum()?.power_sum(c as u32))
}

/// Outcome of a condition that is decided by exhaustive search on small
/// graphs and assumed on larger ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Verified(bool),
    /// Too large for exhaustive search; assumed to hold.
    Trusted,
}

impl Verification {
    pub fn holds(&self) -> bool {
        !matches!(self, Verification::Verified(false))
    }
}

/// Conditions on a family H_1, …, H_m for glued profile realizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueConditions {
    /// Per graph: connected, two adjacent roots, root-swapping automorphism.
    pub admissible: Vec<bool>,
    pub has_triangle: Vec<bool>,
    /// Per graph: no vertex cut of size below three.
    pub three_connected: Vec<bool>,
    /// Per graph: every induced self-homomorphism maps the root pair onto
    /// itself.
    pub roots_fixed: Vec<Verification>,
    /// No induced homomorphism between distinct members, in either
    /// direction.
    pub pairwise_separated: Verification,
}

impl GlueConditions {
    pub fn all_hold(&self) -> bool {
        self.admissible.iter().all(|&b| b)
            && self.has_triangle.iter().all(|&b| b)
            && self.three_connected.iter().all(|&b| b)
            && self.roots_fixed.iter().all(Verification::holds)
            && self.pairwise_separated.holds()
    }

    /// Human-readable list of failed or assumed conditions.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, v) in self.roots_fixed.iter().enumerate() {
            if *v == Verification::Trusted {
                out.push(format!("H{i}: root rigidity assumed (more than {GLUE_CHECK_LIMIT} vertices)"));
            }
        }
        if self.pairwise_separated == Verification::Trusted {
            out.push(format!("pairwise separation assumed (a member has more than {GLUE_CHECK_LIMIT} vertices)"));
        }
        out
    }
}

pub fn check_glue_conditions(hs: &[RootedGraph]) -> GlueConditions {
    let small = |g: &Graph| g.vertex_count() <= GLUE_CHECK_LIMIT;
    let roots_fixed = hs
        .iter()
        .map(|h| {
            if !small(h.graph()) || h.roots().len() != 2 {
                return Verification::Trusted;
            }
            let (a, b) = (h.roots()[0], h.roots()[1]);
            let moves = find_induced_homomorphism(h.graph(), h.graph(), |m| {
                let (x, y) = (m[a], m[b]);
                !((x == a && y == b) || (x == b && y == a))
            });
            Verification::Verified(moves.is_none())
        })
        .collect();
    let pairwise_separated = if hs.iter().all(|h| small(h.graph())) {
        let separated = (0..hs.len()).all(|i| {
            (0..hs.len())
                .filter(|&j| j != i)
                .all(|j| find_induced_homomorphism(hs[i].graph(), hs[j].graph(), |_| true).is_none())
        });
        Verification::Verified(separated)
    } else {
        Verification::Trusted
    };
    GlueConditions {
        admissible: hs.iter().map(is_admissible_rooted).collect(),
        has_triangle: hs.iter().map(|h| h.graph().find_triangle().is_some()).collect(),
        three_connected: hs.iter().map(|h| h.graph().is_k_connected(3)).collect(),
        roots_fixed,
        pairwise_separated,
    }
}
