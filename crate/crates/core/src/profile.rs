//! Necklace profiles, the region R, and the constructions that realize
//! points of R.
//!
//! For a kernel W and q >= 2, x_q = t(N_{8,q})/t(N_{4,q})² and
//! y_q = t(N_{12,q})/t(N_{4,q})³, all computed from the spectrum of M_{W,q}.
//! R is the convex hull of (0, 0) and the points (1/n, 1/n²): it lies under
//! y = x and above the chord envelope L.

use num_traits::{One, Signed, Zero};

use crate::config::Config;
use crate::density::clique_operator_with;
use crate::error::{Error, Result};
use crate::graphs::{disjoint_union, edge_substitute, qify, BaseGraph, Graph, RootedGraph};
use crate::induced::{check_glue_conditions, rooted_operator_with, GlueConditions};
use crate::kernels::{ExactKernel, Spectrum, StepKernel};
use crate::numeric::{rational, CompensatedSum, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub q: usize,
    pub x: f64,
    pub y: f64,
}

/// Membership query for R with a tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionQuery {
    pub x: f64,
    pub y: f64,
    pub tolerance: f64,
}

/// (x, y) from an operator spectrum. The vanishing test is applied to
/// Σ λ⁴ of the operator rescaled to max |entry| = 1, so that it does not
/// depend on the overall scale of W; `scale` is that max |entry|.
fn profile_from_spectrum(q: usize, spectrum: &Spectrum, scale: f64, cfg: &Config) -> Result<ProfilePoint> {
    let raw = spectrum.power_sum(4);
    if scale == 0.0 || raw / scale.powi(4) <= cfg.zero_threshold {
        return Err(Error::VanishingDenominator { q, value: raw.abs() });
    }
    // Ratios are scale free; normalizing by the top eigenvalue keeps the
    // twelfth powers in range.
    let top = spectrum.eigenvalues()[0].abs();
    let sums = |c: i32| -> f64 {
        spectrum.eigenvalues().iter().map(|l| (l / top).powi(c)).collect::<CompensatedSum>().value()
    };
    let (t4, t8, t12) = (sums(4), sums(8), sums(12));
    Ok(ProfilePoint { q, x: t8 / (t4 * t4), y: t12 / (t4 * t4 * t4) })
}

fn max_abs<S: Scalar>(w: &StepKernel<S>) -> f64 {
    w.values().iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

/// (x_q(W), y_q(W)).
pub fn profile_point<S: Scalar>(w: &StepKernel<S>, q: usize) -> Result<ProfilePoint> {
    profile_point_with(w, q, &Config::default())
}

pub fn profile_point_with<S: Scalar>(w: &StepKernel<S>, q: usize, cfg: &Config) -> Result<ProfilePoint> {
    let m = clique_operator_with(w, q, cfg)?;
    profile_from_spectrum(q, &m.spectrum()?, max_abs(&m), cfg)
}

/// Profile points for q = 2..=ell.
pub fn profile_vector<S: Scalar>(w: &StepKernel<S>, ell: usize) -> Result<Vec<ProfilePoint>> {
    profile_vector_with(w, ell, &Config::default())
}

pub fn profile_vector_with<S: Scalar>(w: &StepKernel<S>, ell: usize, cfg: &Config) -> Result<Vec<ProfilePoint>> {
    if ell < 2 {
        return Err(Error::invalid("ell", format!("ell must be at least 2, got {ell}")));
    }
    (2..=ell).map(|q| profile_point_with(w, q, cfg)).collect()
}

/// Induced profile point for a glued family: the ratios of
/// t_ind(N_{c,H••}) for c = 8, 12 over powers of c = 4. `label` is reported
/// as the point's q.
pub fn glued_profile_point<S: Scalar>(
    w: &StepKernel<S>,
    h: &RootedGraph,
    label: usize,
    cfg: &Config,
) -> Result<ProfilePoint> {
    let m = rooted_operator_with(w, h, cfg)?;
    profile_from_spectrum(label, &m.spectrum()?, max_abs(&m), cfg)
}

fn chord(r: f64, x: f64) -> f64 {
    (2.0 * r + 1.0) / (r * (r + 1.0)) * x - 1.0 / (r * (r + 1.0))
}

/// L(x): on [1/(r+1), 1/r] the chord through (1/(r+1), 1/(r+1)²) and
/// (1/r, 1/r²), where r = floor(1/x).
pub fn lower_envelope(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::invalid("x", format!("the envelope is defined on (0, 1], got {x}")));
    }
    Ok(envelope_unchecked(x))
}

fn envelope_unchecked(x: f64) -> f64 {
    if x < 1e-150 {
        return 0.0;
    }
    let r = (1.0 / x).floor().max(1.0);
    // The envelope is convex, so it is the largest of the chord lines; the
    // neighbours absorb rounding in 1/x near breakpoints.
    [r - 1.0, r, r + 1.0].into_iter().filter(|&s| s >= 1.0).map(|s| chord(s, x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Exact L(x) for rational x in (0, 1].
pub fn lower_envelope_exact(x: &Rational) -> Result<Rational> {
    if !x.is_positive() || *x > Rational::one() {
        return Err(Error::invalid("x", "the envelope is defined on (0, 1]"));
    }
    let r = x.recip().floor();
    let denom = &r * (&r + Rational::one());
    Ok((Rational::from_integer(2.into()) * &r + Rational::one()) / &denom * x - denom.recip())
}

/// Closed membership in R with tolerance; (0, 0) belongs to R.
pub fn region_contains(p: &RegionQuery) -> bool {
    let RegionQuery { x, y, tolerance: tol } = *p;
    if !(x.is_finite() && y.is_finite()) || x < -tol || x > 1.0 + tol {
        return false;
    }
    if y > x + tol {
        return false;
    }
    let lower = if x <= 0.0 { 0.0 } else { envelope_unchecked(x.min(1.0)) };
    y >= lower - tol
}

/// Exact membership in R.
pub fn region_contains_exact(x: &Rational, y: &Rational) -> bool {
    if x.is_negative() || *x > Rational::one() || y > x {
        return false;
    }
    if x.is_zero() {
        return y.is_zero();
    }
    *y >= lower_envelope_exact(x).expect("x in (0, 1]")
}

/// Power sums p₂ = 1 - 2e₂ and p₃ = 1 - 3e₂ + 3e₃ of a point with e₁ = 1.
pub fn newton_transform(e2: &Rational, e3: &Rational) -> (Rational, Rational) {
    let one = Rational::one();
    let two = rational(2, 1);
    let three = rational(3, 1);
    (&one - &two * e2, &one - &three * e2 + &three * e3)
}

/// The kernel of r disjoint equal cliques, whose profile is (1/r, 1/r²) for
/// every q.
pub fn realize_reciprocal(r: usize) -> Result<ExactKernel> {
    StepKernel::clique_union(r)
}

/// How [0, 1] is split between the parts of a realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MassScheme {
    /// Every vertex of the union gets the same measure.
    VertexProportional,
    /// One mass per part type, summing to 1, shared equally among that
    /// type's copies.
    Custom(Vec<Rational>),
}

/// A disjoint-union realization with its predicted profile.
#[derive(Debug, Clone)]
pub struct Realization {
    pub graph: Graph,
    pub kernel: ExactKernel,
    /// Per part type: its graph size, copy count and per-copy mass.
    pub parts: Vec<PartInfo>,
    /// Profile predicted from per-part spectra, one point per profile index.
    pub predicted: Vec<ProfilePoint>,
    /// Conditions report, for glued realizations.
    pub glue_conditions: Option<GlueConditions>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartInfo {
    pub vertices: usize,
    pub copies: usize,
    pub copy_mass: Rational,
}

/// Disjoint union of r_s copies of the s-ification of `base` for
/// s = 2..=ℓ, where `rs = [r_2, …, r_ℓ]`.
///
/// The prediction uses the block structure of the union: M_{G,q} is block
/// diagonal over the copies, and a copy of mass ρ contributes the
/// eigenvalues μ = ρ^{q-1} λ of M_{A_s,q} computed on the copy alone, so
/// x_q = Σ_s r_s Σ μ⁸ / (Σ_s r_s Σ μ⁴)² and likewise for y_q.
pub fn realize_vector(rs: &[usize], base: &BaseGraph, scheme: &MassScheme) -> Result<Realization> {
    if rs.is_empty() {
        return Err(Error::invalid("rs", "need at least one multiplicity"));
    }
    let ell = rs.len() + 1;
    let pieces: Vec<Graph> = (2..=ell).map(|s| qify(base.graph(), s)).collect::<Result<_>>()?;
    let piece_kernels: Vec<StepKernel<f64>> = pieces.iter().map(StepKernel::from_graph).collect::<Result<_>>()?;
    let cfg = Config::default();
    let spectra = |q: usize| -> Result<Vec<Spectrum>> {
        piece_kernels.iter().map(|k| clique_operator_with(k, q, &cfg)?.spectrum()).collect()
    };
    build_realization(rs, &pieces, scheme, (2..=ell).collect(), spectra, None)
}

/// Disjoint union of r_i copies of the graph obtained by gluing a copy of
/// `hs[i]` onto every edge of `base`. Predictions are the induced profile
/// points for each H_i, labelled 0, 1, … in the order of `hs`, from the
/// per-copy spectra of M_{G_j,H_i••}.
pub fn realize_glued(rs: &[usize], hs: &[RootedGraph], base: &BaseGraph, scheme: &MassScheme) -> Result<Realization> {
    if rs.len() != hs.len() || rs.is_empty() {
        return Err(Error::invalid("rs", "need one multiplicity per rooted graph"));
    }
    let conditions = check_glue_conditions(hs);
    if let Some(i) = conditions.admissible.iter().position(|&a| !a) {
        return Err(Error::invalid("h", format!("rooted graph {i} is not admissible")));
    }
    let pieces: Vec<Graph> = hs.iter().map(|h| edge_substitute(base.graph(), h)).collect::<Result<_>>()?;
    let piece_kernels: Vec<StepKernel<f64>> = pieces.iter().map(StepKernel::from_graph).collect::<Result<_>>()?;
    let cfg = Config::default();
    let spectra = |i: usize| -> Result<Vec<Spectrum>> {
        piece_kernels.iter().map(|k| rooted_operator_with(k, &hs[i], &cfg)?.spectrum()).collect()
    };
    let exponents: Vec<usize> = hs.iter().map(|h| h.graph().vertex_count()).collect();
    build_realization(rs, &pieces, scheme, (0..hs.len()).collect(), spectra, Some((conditions, exponents)))
}

fn build_realization(
    rs: &[usize],
    pieces: &[Graph],
    scheme: &MassScheme,
    labels: Vec<usize>,
    spectra: impl Fn(usize) -> Result<Vec<Spectrum>>,
    glue: Option<(GlueConditions, Vec<usize>)>,
) -> Result<Realization> {
    if let Some(i) = rs.iter().position(|&r| r < 1) {
        return Err(Error::invalid("rs", format!("multiplicity {i} must be at least 1")));
    }
    let total_vertices: usize = pieces.iter().zip(rs).map(|(g, r)| g.vertex_count() * r).sum();
    let group_mass: Vec<Rational> = match scheme {
        MassScheme::VertexProportional => pieces
            .iter()
            .zip(rs)
            .map(|(g, &r)| rational((g.vertex_count() * r) as i64, total_vertices as i64))
            .collect(),
        MassScheme::Custom(ms) => {
            if ms.len() != rs.len() {
                return Err(Error::invalid("masses", format!("expected {} masses, got {}", rs.len(), ms.len())));
            }
            ms.clone()
        }
    };
    let parts: Vec<PartInfo> = pieces
        .iter()
        .zip(rs)
        .zip(&group_mass)
        .map(|((g, &r), m)| PartInfo { vertices: g.vertex_count(), copies: r, copy_mass: m / rational(r as i64, 1) })
        .collect();

    let mut kernel_parts = Vec::new();
    let mut copies = Vec::new();
    for (g, part) in pieces.iter().zip(&parts) {
        let k = StepKernel::<Rational>::from_graph(g)?;
        for _ in 0..part.copies {
            kernel_parts.push((k.clone(), part.copy_mass.clone()));
            copies.push(g);
        }
    }
    let kernel = StepKernel::direct_sum(&kernel_parts)?;
    let graph = disjoint_union(copies);

    let (glue_conditions, sizes) = match glue {
        Some((c, sizes)) => (Some(c), Some(sizes)),
        None => (None, None),
    };
    let mut predicted = Vec::with_capacity(labels.len());
    for (idx, &label) in labels.iter().enumerate() {
        // Operator eigenvalues scale with the copy mass to the power
        // (pattern vertices - 1): q for cliques, |V(H)| for glued patterns.
        let power = match &sizes {
            Some(s) => s[idx] - 1,
            None => label - 1,
        };
        let mut mus = Vec::new();
        for (spec, part) in spectra(label)?.iter().zip(&parts) {
            let rho = Scalar::to_f64(&part.copy_mass).powi(power as i32);
            for _ in 0..part.copies {
                mus.extend(spec.eigenvalues().iter().map(|l| rho * l));
            }
        }
        let spectrum = Spectrum::from_values(mus);
        let scale = spectrum.eigenvalues().first().map_or(0.0, |l| l.abs());
        predicted.push(profile_from_spectrum(
            label,
            &spectrum,
            scale,
            &Config { zero_threshold: 0.0, ..Config::default() },
        )?);
    }
    Ok(Realization { graph, kernel, parts, predicted, glue_conditions })
}
