//! From integer polynomials to quantum graphs.
//!
//! For p in the variables x_2, …, x_ℓ the auxiliary polynomial
//! p̄ = p · Π x_q⁶ + M Σ (y_q - x_q²), M = 100 · deg(p) · Σ|c|, is compiled
//! into a quantum graph f(p) by substituting x_q = t(N_{8,q})/t(N_{4,q})² and
//! y_q = t(N_{12,q})/t(N_{4,q})³ and clearing denominators with powers of
//! t(N_{4,q}) = Σ λ⁴ ≥ 0, so t(f(p), W) has the sign of p̄ at the profile of W.

mod poly;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::config::{Config, RECIPROCAL_GRID_MAX};
use crate::density::necklace_spectrum;
use crate::error::{Error, Result};
use crate::kernels::{random_kernel, KernelClass, RandomKernelSpec, Spectrum, StepKernel};
use crate::numeric::{rational, rel_dev, Rational, Scalar};
use crate::profile::{lower_envelope_exact, realize_reciprocal};
use crate::quantum::{Component, QuantumGraph, TermKey};

pub use poly::{x_vars, Coefficient, IntPolynomial, Polynomial, RatPolynomial};

/// `x2, …, x{ell}, y2, …, y{ell}`.
pub fn xy_vars(ell: usize) -> Vec<String> {
    let mut vars = x_vars(ell);
    vars.extend((2..=ell).map(|q| format!("y{q}")));
    vars
}

/// Π x_q^D · p̄(1/x) with D the total degree of p̄: the monomial with
/// exponents e becomes one with exponents D - e. Variables are renamed
/// x2, x3, ….
pub fn reciprocal_transform(pbar: &IntPolynomial) -> IntPolynomial {
    let d = pbar.degree();
    let vars = x_vars(pbar.arity() + 1);
    let mut out = Polynomial::zero(vars);
    for (e, c) in pbar.terms() {
        out.add_term(e.iter().map(|k| d - k).collect(), c.clone());
    }
    out
}

/// The coefficient M = 100 · deg(p) · Σ|c|.
pub fn pbar_multiplier(p: &IntPolynomial) -> Result<BigInt> {
    let deg = p.degree();
    if deg == 0 {
        return Err(Error::invalid("p", "the polynomial must have degree at least 1"));
    }
    Ok(BigInt::from(100u32) * BigInt::from(deg) * p.coefficient_norm())
}

/// p̄ over `x2..x{ell}, y2..y{ell}` with ℓ = arity(p) + 1.
pub fn build_pbar(p: &IntPolynomial) -> Result<RatPolynomial> {
    let m = Rational::from_integer(pbar_multiplier(p)?);
    let k = p.arity();
    let ell = k + 1;
    let vars = xy_vars(ell);
    let lifted = p.to_rational().embed(vars.clone(), &(0..k).collect::<Vec<_>>())?;
    let mut sixth = vec![0u32; 2 * k];
    for e in sixth.iter_mut().take(k) {
        *e = 6;
    }
    let mut pbar = lifted.mul(&RatPolynomial::new(vars.clone(), [(sixth, Rational::one())])?)?;
    for q in 0..k {
        let mut y = vec![0; 2 * k];
        y[k + q] = 1;
        let mut x2 = vec![0; 2 * k];
        x2[q] = 2;
        pbar.add_term(y, m.clone());
        pbar.add_term(x2, -m.clone());
    }
    Ok(pbar)
}

/// Pads p to the variables x2..x{ell}.
fn lift_to(p: &IntPolynomial, ell: usize) -> Result<IntPolynomial> {
    if ell < 2 {
        return Err(Error::invalid("ell", format!("ell must be at least 2, got {ell}")));
    }
    let vars = x_vars(ell);
    if p.arity() > vars.len() {
        return Err(Error::invalid(
            "ell",
            format!("p has {} variables but ell = {ell} allows {}", p.arity(), vars.len()),
        ));
    }
    for (i, name) in p.vars().iter().enumerate() {
        if *name != vars[i] {
            return Err(Error::invalid("vars", format!("variable {i} must be named {}, found {name}", vars[i])));
        }
    }
    p.embed(vars, &(0..p.arity()).collect::<Vec<_>>())
}

/// Clearing exponents used for f(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentReport {
    /// The fixed exponent 3 · deg(p).
    pub fixed_exponent: u32,
    /// Smallest E_q making every monomial of Π t(N_{4,q})^{E_q} · p̄ a
    /// polynomial in the densities, per q.
    pub computed: BTreeMap<usize, u32>,
}

impl ExponentReport {
    /// Whether the fixed exponent clears every denominator.
    pub fn fixed_suffices(&self) -> bool {
        self.computed.values().all(|&e| e <= self.fixed_exponent)
    }
}

/// f(p) and its clearing exponents.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub ell: usize,
    pub pbar: RatPolynomial,
    pub exponents: ExponentReport,
    pub quantum_graph: QuantumGraph,
}

/// Compiles p into the quantum graph f(p).
pub fn compile_f(p: &IntPolynomial, ell: usize) -> Result<Compiled> {
    let p = lift_to(p, ell)?;
    let pbar = build_pbar(&p)?;
    let k = ell - 1;
    let computed: BTreeMap<usize, u32> = (0..k)
        .map(|i| {
            let e = pbar.terms().map(|(e, _)| 2 * e[i] + 3 * e[k + i]).max().unwrap_or(0);
            (i + 2, e)
        })
        .collect();
    let mut qg = QuantumGraph::zero();
    for (e, c) in pbar.terms() {
        let mut parts = Vec::new();
        for i in 0..k {
            let q = i + 2;
            let (a, b) = (e[i], e[k + i]);
            parts.push((Component::Necklace { c: 8, q }, a));
            parts.push((Component::Necklace { c: 12, q }, b));
            parts.push((Component::Necklace { c: 4, q }, computed[&q] - 2 * a - 3 * b));
        }
        qg.add_term(TermKey::new(parts), c.clone());
    }
    Ok(Compiled {
        ell,
        pbar,
        exponents: ExponentReport { fixed_exponent: 3 * p.degree(), computed },
        quantum_graph: qg,
    })
}

/// Necklace power sums t(N_{4,q}), t(N_{8,q}), t(N_{12,q}) for q = 2..=ell.
fn necklace_sums<S: Scalar>(w: &StepKernel<S>, ell: usize) -> Result<Vec<(f64, f64, f64)>> {
    (2..=ell)
        .map(|q| {
            let s: Spectrum = necklace_spectrum(w, q)?;
            Ok((s.power_sum(4), s.power_sum(8), s.power_sum(12)))
        })
        .collect()
}

/// Π t(N_{4,q})^{E_q} · p̄(x(W), y(W)) evaluated by substituting the
/// profile ratios into p̄. `None` when some t(N_{4,q}) is zero.
pub fn substituted_value<S: Scalar>(compiled: &Compiled, w: &StepKernel<S>) -> Result<Option<f64>> {
    let sums = necklace_sums(w, compiled.ell)?;
    if sums.iter().any(|&(d, _, _)| d == 0.0) {
        return Ok(None);
    }
    let mut point: Vec<f64> = sums.iter().map(|&(d, a, _)| a / (d * d)).collect();
    point.extend(sums.iter().map(|&(d, _, b)| b / (d * d * d)));
    let multiplier: f64 =
        sums.iter().zip(compiled.exponents.computed.values()).map(|(&(d, _, _), &e)| d.powi(e as i32)).product();
    Ok(Some(multiplier * compiled.pbar.eval_f64(&point)))
}

/// A point of the reciprocal grid where p is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWitness {
    /// (n_2, …, n_ℓ).
    pub ns: Vec<u64>,
    /// p(1/n_2, …, 1/n_ℓ).
    pub value: Rational,
}

fn grid_size(dim: usize, n_max: u64, cfg: &Config) -> Result<()> {
    let needed = (n_max as f64).powi(dim as i32);
    if needed > cfg.enumeration_guard {
        return Err(Error::GuardExceeded {
            what: format!("grid scan over {dim} variables"),
            needed,
            guard: cfg.enumeration_guard,
            hint: "; lower n_max".into(),
        });
    }
    Ok(())
}

/// Lexicographic walk over {1..n_max}^dim calling `f` until it returns a
/// value.
fn grid_find<T>(dim: usize, n_max: u64, mut f: impl FnMut(&[u64]) -> Option<T>) -> Option<T> {
    if dim == 0 {
        return f(&[]);
    }
    let mut ns = vec![1u64; dim];
    loop {
        if let Some(t) = f(&ns) {
            return Some(t);
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if ns[i] < n_max {
                ns[i] += 1;
                for n in ns.iter_mut().skip(i + 1) {
                    *n = 1;
                }
                break;
            }
        }
    }
}

/// First (n_2, …, n_ℓ) in lexicographic order with every n_i <= n_max and
/// p(1/n_2, …, 1/n_ℓ) < 0, by exact arithmetic.
pub fn scan_reciprocal_grid(p: &IntPolynomial, n_max: u64) -> Result<Option<GridWitness>> {
    if n_max < 1 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    let dim = p.arity();
    grid_size(dim, n_max, &Config::default())?;
    // Sign of p(1/n) is the sign of Σ c Π n_i^{D_i - e_i}, D_i = deg in x_i.
    let degs: Vec<u32> = (0..dim).map(|i| p.degree_in(i)).collect();
    let terms: Vec<(Vec<u32>, BigInt)> =
        p.terms().map(|(e, c)| (e.iter().zip(&degs).map(|(e, d)| d - e).collect(), c.clone())).collect();
    let small: Option<Vec<(Vec<u32>, i128)>> =
        terms.iter().map(|(e, c)| i128::try_from(c).ok().map(|c| (e.clone(), c))).collect();
    let found = grid_find(dim, n_max, |ns| {
        let negative = match small.as_ref().and_then(|t| numerator_i128(t, ns)) {
            Some(v) => v < 0,
            None => numerator_big(&terms, ns).is_negative(),
        };
        negative.then(|| ns.to_vec())
    });
    Ok(found.map(|ns| {
        let point: Vec<Rational> = ns.iter().map(|&n| rational(1, n as i64)).collect();
        GridWitness { value: p.eval_rational(&point), ns }
    }))
}

fn numerator_i128(terms: &[(Vec<u32>, i128)], ns: &[u64]) -> Option<i128> {
    let mut total: i128 = 0;
    for (e, c) in terms {
        let mut t = *c;
        for (&n, &k) in ns.iter().zip(e) {
            t = t.checked_mul((n as i128).checked_pow(k)?)?;
        }
        total = total.checked_add(t)?;
    }
    Some(total)
}

fn numerator_big(terms: &[(Vec<u32>, BigInt)], ns: &[u64]) -> BigInt {
    let mut total = BigInt::zero();
    for (e, c) in terms {
        let mut t = c.clone();
        for (&n, &k) in ns.iter().zip(e) {
            t *= num_traits::pow(BigInt::from(n), k as usize);
        }
        total += t;
    }
    total
}

/// First point of {1..n_max}^dim in lexicographic order where p < 0.
pub fn scan_integer_grid(p: &IntPolynomial, n_max: u64) -> Result<Option<GridWitness>> {
    if n_max < 1 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    let dim = p.arity();
    grid_size(dim, n_max, &Config::default())?;
    let terms: Vec<(Vec<u32>, BigInt)> = p.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    Ok(grid_find(dim, n_max, |ns| {
        let v = numerator_big(&terms, ns);
        v.is_negative().then(|| GridWitness { ns: ns.to_vec(), value: Rational::from_integer(v) })
    }))
}

/// A point of (R ∩ grid)^{ℓ-1} where p̄ is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionWitness {
    /// (x_q, y_q) for q = 2..=ℓ.
    pub point: Vec<(Rational, Rational)>,
    pub value: Rational,
}

/// Sample points of R at resolution n: x runs over the breakpoints 1/m
/// (m <= n) and the chord midpoints between consecutive breakpoints, plus
/// (0, 0). At breakpoints y takes the values x² and x; at midpoints L(x)
/// and x.
pub fn region_grid(n: u64) -> Vec<(Rational, Rational)> {
    let mut points = vec![(Rational::zero(), Rational::zero())];
    for m in 1..=n as i64 {
        let x = rational(1, m);
        points.push((x.clone(), &x * &x));
        if m > 1 {
            points.push((x.clone(), x.clone()));
        }
        if (m as u64) < n {
            let mid = (rational(1, m) + rational(1, m + 1)) / rational(2, 1);
            let low = lower_envelope_exact(&mid).expect("midpoint in (0, 1]");
            points.push((mid.clone(), low));
            points.push((mid.clone(), mid));
        }
    }
    points
}

/// First point of the product grid (lexicographic over coordinates q = 2,
/// 3, …) where p̄ < 0, by exact arithmetic. `pbar` has variables
/// x2..x{ell}, y2..y{ell}.
pub fn scan_region_grid(pbar: &RatPolynomial, resolution: u64) -> Result<Option<RegionWitness>> {
    if pbar.arity() % 2 != 0 || pbar.arity() == 0 {
        return Err(Error::invalid("pbar", "expected variables x2..xl, y2..yl"));
    }
    let k = pbar.arity() / 2;
    let points = region_grid(resolution);
    grid_size(k, points.len() as u64, &Config::default())?;
    // The first coordinate is split across threads; find_map_first keeps
    // the lexicographically first witness.
    let found = (0..points.len()).into_par_iter().find_map_first(|first| {
        grid_find(k - 1, points.len() as u64, |rest| {
            let chosen: Vec<&(Rational, Rational)> =
                std::iter::once(&points[first]).chain(rest.iter().map(|&i| &points[(i - 1) as usize])).collect();
            let mut arg: Vec<Rational> = chosen.iter().map(|(x, _)| x.clone()).collect();
            arg.extend(chosen.iter().map(|(_, y)| y.clone()));
            let v = pbar.eval_rational(&arg);
            v.is_negative().then(|| RegionWitness { point: chosen.into_iter().cloned().collect(), value: v })
        })
    });
    Ok(found)
}

/// One sampled kernel in [`verify_reduction`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCheck {
    pub seed: u64,
    pub blocks: usize,
    /// t(f(p), W) from the quantum graph.
    pub quantum: f64,
    /// The same quantity by substitution into p̄; `None` when a
    /// denominator vanishes.
    pub substituted: Option<f64>,
    pub rel_dev: Option<f64>,
    /// Π t(N_{4,q})^{E_q}.
    pub multiplier: f64,
}

/// Evaluation of f(p) on the clique-union kernel at a diagonal grid witness.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCheck {
    pub grid: GridWitness,
    /// Clique count r of the kernel, when the witness has all n_i = r.
    pub kernel_cliques: Option<u64>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub compiled: Compiled,
    pub samples: Vec<SampleCheck>,
    pub max_rel_dev: f64,
    pub tolerance: f64,
    pub witness: Option<WitnessCheck>,
}

impl VerificationReport {
    pub fn identity_holds(&self) -> bool {
        self.max_rel_dev <= self.tolerance
    }

    pub fn multipliers_nonnegative(&self) -> bool {
        self.samples.iter().all(|s| s.multiplier >= 0.0)
    }
}

/// Sampling scheme of [`verify_reduction`]: kernels with at most three blocks
/// alternating between the classes [0, 1] and [-1, 1].
pub fn verification_kernel(seed: u64) -> Result<StepKernel<f64>> {
    let class = if seed % 2 == 0 { KernelClass::Range01 } else { KernelClass::RangeSym(1.0) };
    random_kernel(&RandomKernelSpec::new(3, class), seed)
}

/// Checks t(f(p), W) against substitution into p̄ on `samples` seeded
/// kernels, and evaluates f(p) at a reciprocal-grid witness when one exists.
pub fn verify_reduction(
    p: &IntPolynomial,
    ell: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    verify_reduction_with(p, ell, samples, seed, tol, RECIPROCAL_GRID_MAX)
}

pub fn verify_reduction_with(
    p: &IntPolynomial,
    ell: usize,
    samples: usize,
    seed: u64,
    tol: f64,
    n_max: u64,
) -> Result<VerificationReport> {
    let compiled = compile_f(p, ell)?;
    let checks: Vec<SampleCheck> = (0..samples as u64)
        .into_par_iter()
        .map(|i| sample_check(&compiled, seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let max_rel_dev = checks.iter().filter_map(|c| c.rel_dev).fold(0.0, f64::max);

    let lifted = lift_to(p, ell)?;
    let dim = lifted.arity();
    let witness = match scan_reciprocal_grid(&lifted, n_max)? {
        None => None,
        Some(grid) => {
            // Exact realization exists on the diagonal n_2 = … = n_ℓ.
            let diagonal = grid_find(1, n_max, |n| {
                let point = vec![rational(1, n[0] as i64); dim];
                lifted.eval_rational(&point).is_negative().then_some(n[0])
            });
            let value = match diagonal {
                Some(r) => Some(compiled.quantum_graph.evaluate(&realize_reciprocal(r as usize)?.to_float())?),
                None => None,
            };
            Some(WitnessCheck { grid, kernel_cliques: diagonal, value })
        }
    };
    Ok(VerificationReport { compiled, samples: checks, max_rel_dev, tolerance: tol, witness })
}

fn sample_check(compiled: &Compiled, seed: u64) -> Result<SampleCheck> {
    let w = verification_kernel(seed)?;
    let quantum = compiled.quantum_graph.evaluate(&w)?;
    let substituted = substituted_value(compiled, &w)?;
    let multiplier = necklace_sums(&w, compiled.ell)?
        .iter()
        .zip(compiled.exponents.computed.values())
        .map(|(&(d, _, _), &e)| d.powi(e as i32))
        .product();
    Ok(SampleCheck {
        seed,
        blocks: w.block_count(),
        quantum,
        substituted,
        rel_dev: substituted.map(|s| rel_dev(quantum, s)),
        multiplier,
    })
}

/// The exact value Π t(N_{4,q})^{E_q} · p̄(profile) on an exact kernel whose
/// operators have rational power sums, used by tests on clique unions.
pub fn clique_union_value(compiled: &Compiled, r: u64) -> Rational {
    // Spectrum of M_{W,q} for r cliques is 1/r^{q-1} with multiplicity r.
    let mut total = Rational::zero();
    for (key, c) in compiled.quantum_graph.terms() {
        let mut t = c.clone();
        for (comp, m) in key.parts() {
            if let Component::Necklace { c: len, q } = comp {
                let lambda = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(r), q - 1));
                let power_sum = Rational::from_integer(BigInt::from(r)) * num_traits::pow(lambda, *len);
                t *= num_traits::pow(power_sum, *m as usize);
            }
        }
        total += t;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    fn poly(text: &str, ell: usize) -> IntPolynomial {
        IntPolynomial::parse(text, x_vars(ell)).unwrap()
    }

    fn ypoly(text: &str, n: usize) -> IntPolynomial {
        IntPolynomial::parse(text, (2..n + 2).map(|q| format!("y{q}")).collect()).unwrap()
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(reciprocal_transform(&ypoly("y2 - 2", 1)), poly("1 - 2*x2", 2));
        assert_eq!(reciprocal_transform(&ypoly("y2", 1)), poly("1", 2));
        assert_eq!(reciprocal_transform(&ypoly("y2*y3 - 1", 2)), poly("x2*x3 - x2^2*x3^2", 3));
    }

    #[test]
    fn pbar_examples() {
        let pb = build_pbar(&poly("x2", 2)).unwrap();
        assert_eq!(pb.to_string(), "x2^7 - 100*x2^2 + 100*y2");
        let pb = build_pbar(&poly("2*x2 - 1", 2)).unwrap();
        assert_eq!(pb.to_string(), "2*x2^7 - x2^6 - 300*x2^2 + 300*y2");
        assert!(build_pbar(&poly("5", 2)).is_err());
    }

    #[test]
    fn compile_structure() {
        let c = compile_f(&poly("x2", 2), 2).unwrap();
        assert_eq!(c.exponents.fixed_exponent, 3);
        assert_eq!(c.exponents.computed[&2], 14);
        assert!(!c.exponents.fixed_suffices());
        for (key, _) in c.quantum_graph.terms() {
            for (comp, _) in key.parts() {
                match comp {
                    Component::Necklace { c, q: 2 } => assert!([4, 8, 12].contains(c)),
                    other => panic!("unexpected component {other}"),
                }
            }
        }
        assert!(compile_f(&poly("x2*x3", 3), 2).is_err());
    }

    #[test]
    fn constant_one_kernel_zeroes_x_minus_one() {
        let c = compile_f(&poly("x2 - 1", 2), 2).unwrap();
        let v = c.quantum_graph.evaluate(&StepKernel::constant(1.0)).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(c.quantum_graph.evaluate_exact(&StepKernel::constant(int(1))).unwrap(), int(0));
    }

    #[test]
    fn clique_union_sign() {
        let c = compile_f(&poly("2*x2 - 1", 2), 2).unwrap();
        let exact = clique_union_value(&c, 3);
        assert!(exact.is_negative());
        let float = c.quantum_graph.evaluate(&realize_reciprocal(3).unwrap().to_float()).unwrap();
        assert!((float - exact.to_f64()).abs() <= 1e-9 * exact.to_f64().abs());
    }

    #[test]
    fn grid_scans() {
        let w = scan_reciprocal_grid(&poly("2*x2 - 1", 2), 5).unwrap().unwrap();
        assert_eq!(w.ns, vec![3]);
        assert_eq!(w.value, rational(-1, 3));
        assert!(scan_reciprocal_grid(&poly("x2^2", 2), 50).unwrap().is_none());
        assert!(scan_reciprocal_grid(&poly("x2*x3 - x2^2*x3^2", 3), 3).unwrap().is_none());
        let w = scan_integer_grid(&ypoly("y2*y3 - 3", 2), 5).unwrap().unwrap();
        assert_eq!(w.ns, vec![1, 1]);
    }

    #[test]
    fn region_grid_is_inside_region() {
        for (x, y) in region_grid(30) {
            assert!(crate::profile::region_contains_exact(&x, &y), "({x}, {y})");
        }
    }

    #[test]
    fn identity_on_samples() {
        let report = verify_reduction(&poly("x2", 2), 2, 20, 7, 1e-6).unwrap();
        assert!(report.identity_holds(), "{}", report.max_rel_dev);
        assert!(report.multipliers_nonnegative());
        assert!(report.witness.is_none());
        let report = verify_reduction_with(&poly("2*x2 - 1", 2), 2, 4, 0, 1e-6, 10).unwrap();
        let w = report.witness.unwrap();
        assert_eq!(w.kernel_cliques, Some(3));
        assert!(w.value.unwrap() < 0.0);
    }
}
