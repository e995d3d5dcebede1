//! Quantum graphs: finite formal linear combinations of graphs with rational
//! coefficients.
//!
//! A term is keyed by the multiset of its connected components. Necklaces
//! N_{c,q} are recognized structurally at any size; every other component is
//! stored by its canonical form, which bounds it by the canonicalization
//! guard. Two keys are equal exactly when the disjoint unions they describe
//! are isomorphic.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::density::{hom_density, necklace_spectrum};
use crate::error::Result;
use crate::graphs::{canonical_form, disjoint_union, necklace, Graph};
use crate::kernels::{Spectrum, StepKernel};
use crate::numeric::{format_rational, CompensatedSum, Rational, Scalar};

/// Connected component of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Necklace {
        c: usize,
        q: usize,
    },
    /// Canonical form of a connected graph that is not a necklace.
    Graph(Graph),
}

impl Component {
    pub fn to_graph(&self) -> Graph {
        match self {
            Component::Necklace { c, q } => necklace(*c, *q).expect("stored necklaces are valid"),
            Component::Graph(g) => g.clone(),
        }
    }

    /// Identifies a connected graph.
    pub fn of_connected(g: &Graph) -> Result<Component> {
        if let Some((c, q)) = recognize_necklace(g) {
            return Ok(Component::Necklace { c, q });
        }
        Ok(Component::Graph(canonical_form(g)?.graph))
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Necklace { c, q } => write!(f, "N({c},{q})"),
            Component::Graph(g) => {
                let edges: Vec<String> = g.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
                write!(f, "G({};{})", g.vertex_count(), edges.join(","))
            }
        }
    }
}

/// Multiset of components, sorted, with positive multiplicities. The empty
/// key is the empty graph, whose density is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TermKey {
    parts: Vec<(Component, u32)>,
}

impl TermKey {
    pub fn new<I: IntoIterator<Item = (Component, u32)>>(parts: I) -> Self {
        let mut map: BTreeMap<Component, u32> = BTreeMap::new();
        for (c, m) in parts {
            if m > 0 {
                *map.entry(c).or_default() += m;
            }
        }
        TermKey { parts: map.into_iter().collect() }
    }

    pub fn of_graph(g: &Graph) -> Result<Self> {
        let parts = g
            .components()
            .into_iter()
            .map(|vs| Component::of_connected(&g.induced_subgraph(&vs)).map(|c| (c, 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TermKey::new(parts))
    }

    pub fn parts(&self) -> &[(Component, u32)] {
        &self.parts
    }

    /// Disjoint union of the two multisets.
    pub fn union(&self, other: &TermKey) -> TermKey {
        TermKey::new(self.parts.iter().chain(&other.parts).cloned())
    }

    /// The graph the key describes, components in key order.
    pub fn to_graph(&self) -> Graph {
        let graphs: Vec<Graph> =
            self.parts.iter().flat_map(|(c, m)| std::iter::repeat_with(|| c.to_graph()).take(*m as usize)).collect();
        disjoint_union(&graphs)
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, (c, m)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊔ ")?;
            }
            write!(f, "{c}")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuantumGraph {
    terms: BTreeMap<TermKey, Rational>,
}

impl QuantumGraph {
    pub fn zero() -> Self {
        QuantumGraph::default()
    }

    /// `coeff · g`.
    pub fn from_graph(g: &Graph, coeff: Rational) -> Result<Self> {
        let mut out = QuantumGraph::zero();
        out.add_term(TermKey::of_graph(g)?, coeff);
        Ok(out)
    }

    pub fn from_key(key: TermKey, coeff: Rational) -> Self {
        let mut out = QuantumGraph::zero();
        out.add_term(key, coeff);
        out
    }

    /// Adds `coeff` to the coefficient of `key`, dropping it if it cancels.
    pub fn add_term(&mut self, key: TermKey, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TermKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `alpha · a + beta · b`.
    pub fn combine(a: &QuantumGraph, b: &QuantumGraph, alpha: &Rational, beta: &Rational) -> QuantumGraph {
        let mut out = QuantumGraph::zero();
        for (k, c) in &a.terms {
            out.add_term(k.clone(), alpha * c);
        }
        for (k, c) in &b.terms {
            out.add_term(k.clone(), beta * c);
        }
        out
    }

    /// Bilinear extension of disjoint union.
    pub fn multiply(a: &QuantumGraph, b: &QuantumGraph) -> QuantumGraph {
        let mut out = QuantumGraph::zero();
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                out.add_term(ka.union(kb), ca * cb);
            }
        }
        out
    }

    /// Σ c · t(H, W), with each component's density computed once:
    /// necklaces through the spectrum of M_{W,q}, other components by
    /// block enumeration.
    pub fn evaluate<S: Scalar>(&self, w: &StepKernel<S>) -> Result<f64> {
        let mut spectra: BTreeMap<usize, Spectrum> = BTreeMap::new();
        let mut densities: BTreeMap<&Component, f64> = BTreeMap::new();
        for key in self.terms.keys() {
            for (comp, _) in &key.parts {
                if densities.contains_key(comp) {
                    continue;
                }
                let t = match comp {
                    Component::Necklace { c, q } => {
                        if !spectra.contains_key(q) {
                            spectra.insert(*q, necklace_spectrum(w, *q)?);
                        }
                        spectra[q].power_sum(*c as u32)
                    }
                    Component::Graph(g) => hom_density(g, w)?.to_f64(),
                };
                densities.insert(comp, t);
            }
        }
        let mut acc = CompensatedSum::default();
        for (key, coeff) in &self.terms {
            let mut t = coeff.to_f64();
            for (comp, m) in &key.parts {
                t *= densities[comp].powi(*m as i32);
            }
            acc.add(t);
        }
        Ok(acc.value())
    }

    /// Σ c · t(H, W) with each term's graph materialized as one disjoint
    /// union and enumerated as a whole.
    pub fn evaluate_brute_force<S: Scalar>(&self, w: &StepKernel<S>) -> Result<S> {
        let mut acc = S::Sum::default();
        for (key, coeff) in &self.terms {
            let t = hom_density(&key.to_graph(), w)?;
            S::accumulate(&mut acc, &(S::from_rational(coeff) * t));
        }
        Ok(S::total(acc))
    }

    /// Exact evaluation, one block enumeration per distinct component.
    pub fn evaluate_exact(&self, w: &StepKernel<Rational>) -> Result<Rational> {
        let mut densities: BTreeMap<&Component, Rational> = BTreeMap::new();
        let mut total = Rational::zero();
        for (key, coeff) in &self.terms {
            let mut t = coeff.clone();
            for (comp, m) in &key.parts {
                if !densities.contains_key(comp) {
                    densities.insert(comp, hom_density(&comp.to_graph(), w)?);
                }
                t *= num_traits::pow(densities[comp].clone(), *m as usize);
            }
            total += t;
        }
        Ok(total)
    }
}

impl fmt::Display for QuantumGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "[{k}]")?;
            } else {
                write!(f, "({})·[{k}]", format_rational(c))?;
            }
        }
        Ok(())
    }
}

/// `(c, q)` when the connected graph `g` is the necklace N_{c,q}.
///
/// N_{c,q} has c(q-1) vertices and c·q(q-1)/2 edges, which fixes q and c.
/// For q >= 3 the c cycle vertices are those of degree 2(q-1); they must
/// induce C_c, and each cycle edge must carry exactly q-2 vertices of degree
/// q-1 whose neighbourhoods are the edge plus each other.
pub fn recognize_necklace(g: &Graph) -> Option<(usize, usize)> {
    let n = g.vertex_count();
    let m = g.edge_count();
    if n < 3 || (2 * m) % n != 0 {
        return None;
    }
    let q = 2 * m / n;
    if q < 2 || n % (q - 1) != 0 {
        return None;
    }
    let c = n / (q - 1);
    if c < 3 || !g.is_connected() {
        return None;
    }
    let deg = g.degrees();
    if q == 2 {
        return deg.iter().all(|&d| d == 2).then_some((c, 2));
    }
    let hubs: Vec<usize> = (0..n).filter(|&v| deg[v] == 2 * (q - 1)).collect();
    if hubs.len() != c || (0..n).any(|v| deg[v] != 2 * (q - 1) && deg[v] != q - 1) {
        return None;
    }
    let ring = g.induced_subgraph(&hubs);
    if ring.regular_degree() != Some(2) || !ring.is_connected() {
        return None;
    }
    let adj = g.adjacency_lists();
    let mut covered = vec![false; n];
    for &(a, b) in ring.edges() {
        let (u, v) = (hubs[a], hubs[b]);
        let group: Vec<usize> = adj[u].iter().copied().filter(|&x| deg[x] == q - 1 && g.has_edge(x, v)).collect();
        if group.len() != q - 2 {
            return None;
        }
        for &x in &group {
            if covered[x] {
                return None;
            }
            covered[x] = true;
            let mut expect: Vec<usize> = group.iter().copied().filter(|&y| y != x).chain([u, v]).collect();
            expect.sort_unstable();
            if adj[x] != expect {
                return None;
            }
        }
    }
    Some((c, q))
}

impl TermKey {
    /// Key of a single component with multiplicity.
    pub fn single(component: Component, multiplicity: u32) -> Self {
        TermKey::new([(component, multiplicity)])
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.iter().map(|(c, m)| component_size(c) * *m as usize).sum()
    }
}

fn component_size(c: &Component) -> usize {
    match c {
        Component::Necklace { c, q } => c * (q - 1),
        Component::Graph(g) => g.vertex_count(),
    }
}
