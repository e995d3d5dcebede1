//! Step kernels: symmetric functions on [0,1]² that are constant on the
//! blocks of a finite partition into intervals.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::{Graph, WeightedGraph};
use crate::numeric::{f64_to_rational, rational, CompensatedSum, Rational, Scalar};

/// Block measures plus a symmetric matrix of block values.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel<S = f64> {
    measures: Vec<Rational>,
    values: Vec<S>,
    k: usize,
}

/// Exact-mode kernel.
pub type ExactKernel = StepKernel<Rational>;

impl<S: Scalar> StepKernel<S> {
    /// Validates positivity and unit total of the measures, squareness,
    /// symmetry and finiteness of the values.
    pub fn new(measures: Vec<Rational>, rows: Vec<Vec<S>>) -> Result<Self> {
        let k = measures.len();
        if k == 0 {
            return Err(Error::invalid("measures", "a kernel needs at least one block"));
        }
        if let Some(i) = measures.iter().position(|m| !m.is_positive()) {
            return Err(Error::invalid("measures", format!("measure {i} is not positive")));
        }
        let total: Rational = measures.iter().sum();
        if !total.is_one() {
            return Err(Error::invalid(
                "measures",
                format!("measures sum to {}, not 1", crate::numeric::format_rational(&total)),
            ));
        }
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("values", format!("expected a {k}x{k} matrix")));
        }
        for i in 0..k {
            for j in 0..k {
                if !rows[i][j].is_finite() {
                    return Err(Error::invalid("values", format!("entry ({i}, {j}) is not finite")));
                }
                if j > i && rows[i][j] != rows[j][i] {
                    return Err(Error::invalid("values", format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(StepKernel { measures, values: rows.into_iter().flatten().collect(), k })
    }

    /// Equal-measure kernel from a value matrix.
    pub fn uniform(rows: Vec<Vec<S>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::invalid("values", "a kernel needs at least one block"));
        }
        Self::new(vec![rational(1, k as i64); k], rows)
    }

    /// Single block with value `c`.
    pub fn constant(c: S) -> Self {
        StepKernel { measures: vec![Rational::one()], values: vec![c], k: 1 }
    }

    /// W_G: one block of measure 1/N per vertex, values the adjacency matrix.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.vertex_count();
        if n == 0 {
            return Err(Error::invalid("graph", "the kernel of an empty graph is undefined"));
        }
        let mut values = vec![S::zero(); n * n];
        for &(u, v) in g.edges() {
            values[u * n + v] = S::one();
            values[v * n + u] = S::one();
        }
        Ok(StepKernel { measures: vec![rational(1, n as i64); n], values, k: n })
    }

    pub fn from_weighted(g: &WeightedGraph) -> Result<Self> {
        let n = g.vertex_count();
        if n == 0 {
            return Err(Error::invalid("graph", "the kernel of an empty graph is undefined"));
        }
        let mut values = vec![S::zero(); n * n];
        for (&(u, v), w) in g.weights() {
            values[u * n + v] = S::from_rational(w);
            values[v * n + u] = S::from_rational(w);
        }
        Ok(StepKernel { measures: vec![rational(1, n as i64); n], values, k: n })
    }

    /// r equal blocks, value 1 inside each block and 0 across blocks.
    pub fn clique_union(r: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::invalid("r", "need at least one clique"));
        }
        let mut values = vec![S::zero(); r * r];
        for i in 0..r {
            values[i * r + i] = S::one();
        }
        Ok(StepKernel { measures: vec![rational(1, r as i64); r], values, k: r })
    }

    pub fn block_count(&self) -> usize {
        self.k
    }

    pub fn measures(&self) -> &[Rational] {
        &self.measures
    }

    pub fn measures_as(&self) -> Vec<S> {
        self.measures.iter().map(S::from_rational).collect()
    }

    pub fn value(&self, i: usize, j: usize) -> &S {
        &self.values[i * self.k + j]
    }

    /// Row-major values.
    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.values.chunks(self.k).map(<[S]>::to_vec).collect()
    }

    /// Same blocks, values transformed entrywise. `f` must preserve symmetry.
    pub fn map_values<T: Scalar>(&self, f: impl Fn(&S) -> T) -> StepKernel<T> {
        StepKernel { measures: self.measures.clone(), values: self.values.iter().map(f).collect(), k: self.k }
    }

    pub fn to_float(&self) -> StepKernel<f64> {
        self.map_values(Scalar::to_f64)
    }

    pub fn scale(&self, alpha: &S) -> Self {
        self.map_values(|v| alpha.clone() * v.clone())
    }

    /// Block-diagonal kernel: part `i` occupies a share `mass_i` of [0,1] and
    /// keeps its own values; values across parts are zero.
    pub fn direct_sum(parts: &[(StepKernel<S>, Rational)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("parts", "direct sum of no kernels"));
        }
        if let Some(i) = parts.iter().position(|(_, m)| !m.is_positive()) {
            return Err(Error::invalid("masses", format!("mass {i} is not positive")));
        }
        let total: Rational = parts.iter().map(|(_, m)| m).sum();
        if !total.is_one() {
            return Err(Error::invalid(
                "masses",
                format!("masses sum to {}, not 1", crate::numeric::format_rational(&total)),
            ));
        }
        let k: usize = parts.iter().map(|(w, _)| w.k).sum();
        let mut measures = Vec::with_capacity(k);
        let mut values = vec![S::zero(); k * k];
        let mut offset = 0;
        for (w, mass) in parts {
            measures.extend(w.measures.iter().map(|m| m * mass));
            for i in 0..w.k {
                for j in 0..w.k {
                    values[(offset + i) * k + offset + j] = w.value(i, j).clone();
                }
            }
            offset += w.k;
        }
        Ok(StepKernel { measures, values, k })
    }

    /// When every value is 0 or 1 and the diagonal is 0, the adjacency lists
    /// of the underlying graph on blocks.
    pub fn graph_support(&self) -> Option<Vec<Vec<usize>>> {
        let mut adj = vec![Vec::new(); self.k];
        for i in 0..self.k {
            for j in 0..self.k {
                let v = self.value(i, j);
                if v.is_one() {
                    if i == j {
                        return None;
                    }
                    adj[i].push(j);
                } else if !v.is_zero() {
                    return None;
                }
            }
        }
        Some(adj)
    }

    /// `true` when all blocks have the same measure.
    pub fn has_equal_measures(&self) -> bool {
        self.measures.windows(2).all(|w| w[0] == w[1])
    }

    /// Operator eigenvalues, from the symmetrization `S_ij = v_ij sqrt(m_i m_j)`.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let k = self.k;
        // sqrt(m_i m_j) is taken from the exact product: sqrt(1/2)² rounds
        // away from 1/2.
        let m = if self.has_equal_measures() {
            let mass = self.measures.first().map_or(1.0, Scalar::to_f64);
            DMatrix::from_fn(k, k, |i, j| self.value(i, j).to_f64() * mass)
        } else {
            DMatrix::from_fn(k, k, |i, j| {
                self.value(i, j).to_f64() * Scalar::to_f64(&(&self.measures[i] * &self.measures[j])).sqrt()
            })
        };
        Spectrum::of_symmetric(m)
    }

    /// Σ m_i m_j v_ij², the squared L² norm.
    pub fn l2_norm_squared(&self) -> f64 {
        let ms: Vec<f64> = self.measures.iter().map(Scalar::to_f64).collect();
        let mut acc = CompensatedSum::default();
        for i in 0..self.k {
            for j in 0..self.k {
                let v = self.value(i, j).to_f64();
                acc.add(ms[i] * ms[j] * v * v);
            }
        }
        acc.value()
    }
}

/// Eigenvalues sorted by decreasing absolute value (ties: larger value first).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn of_symmetric(m: DMatrix<f64>) -> Result<Spectrum> {
        let size = m.nrows();
        if size == 0 {
            return Ok(Spectrum { eigenvalues: Vec::new() });
        }
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * size.max(10)).ok_or(Error::EigenFailure { size })?;
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::EigenFailure { size });
        }
        eigenvalues.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
        Ok(Spectrum { eigenvalues })
    }

    pub fn from_values(mut eigenvalues: Vec<f64>) -> Spectrum {
        eigenvalues.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
        Spectrum { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Σ λ^c, compensated.
    pub fn power_sum(&self, c: u32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(c as i32)).collect::<CompensatedSum>().value()
    }
}

/// Value ranges for kernel classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelClass {
    /// Any bounded kernel. Random sampling draws from [-10, 10].
    All,
    /// Graphons, values in [0, 1].
    Range01,
    /// Values in [-a, a].
    RangeSym(f64),
    /// Values in [0, a].
    RangeZeroTo(f64),
}

/// Range random sampling uses for [`KernelClass::All`].
pub const ALL_SAMPLING_BOUND: f64 = 10.0;

impl KernelClass {
    /// Closed sampling interval.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            KernelClass::All => (-ALL_SAMPLING_BOUND, ALL_SAMPLING_BOUND),
            KernelClass::Range01 => (0.0, 1.0),
            KernelClass::RangeSym(a) => (-a, a),
            KernelClass::RangeZeroTo(a) => (0.0, a),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match *self {
            KernelClass::All => v.is_finite(),
            _ => {
                let (lo, hi) = self.range();
                lo <= v && v <= hi
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            KernelClass::RangeSym(a) | KernelClass::RangeZeroTo(a) if !(a > 0.0 && a.is_finite()) => {
                Err(Error::invalid("class", format!("bound {a} must be positive and finite")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KernelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelClass::All => write!(f, "all"),
            KernelClass::Range01 => write!(f, "01"),
            KernelClass::RangeSym(a) => write!(f, "sym:{a}"),
            KernelClass::RangeZeroTo(a) => write!(f, "0to:{a}"),
        }
    }
}

impl std::str::FromStr for KernelClass {
    type Err = Error;

    /// `all`, `01`, `sym:A` or `0to:A`.
    fn from_str(s: &str) -> Result<Self> {
        let bound = |t: &str| -> Result<f64> {
            t.parse::<f64>().map_err(|_| Error::invalid("class", format!("bad bound in {s:?}")))
        };
        let class = match s {
            "all" => KernelClass::All,
            "01" => KernelClass::Range01,
            _ => match s.split_once(':') {
                Some(("sym", a)) => KernelClass::RangeSym(bound(a)?),
                Some(("0to", a)) => KernelClass::RangeZeroTo(bound(a)?),
                _ => {
                    return Err(Error::invalid(
                        "class",
                        format!("unknown kernel class {s:?}; expected all, 01, sym:A or 0to:A"),
                    ))
                }
            },
        };
        class.validate()?;
        Ok(class)
    }
}

/// Sampling parameters for random kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomKernelSpec {
    /// Block count is drawn uniformly from `1..=max_blocks`.
    pub max_blocks: usize,
    pub class: KernelClass,
    /// Draw block measures proportional to integer weights in 1..=10 instead
    /// of using equal blocks.
    pub unequal_measures: bool,
}

impl RandomKernelSpec {
    pub fn new(max_blocks: usize, class: KernelClass) -> Self {
        RandomKernelSpec { max_blocks, class, unequal_measures: false }
    }
}

fn sample_measures(rng: &mut ChaCha8Rng, k: usize, unequal: bool) -> Vec<Rational> {
    if !unequal {
        return vec![rational(1, k as i64); k];
    }
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| rational(w, total)).collect()
}

fn block_count(rng: &mut ChaCha8Rng, spec: &RandomKernelSpec) -> Result<usize> {
    if spec.max_blocks < 1 {
        return Err(Error::invalid("max_blocks", "need at least one block"));
    }
    spec.class.validate()?;
    Ok(rng.gen_range(1..=spec.max_blocks))
}

/// Seeded random kernel with values uniform in the class range.
pub fn random_kernel(spec: &RandomKernelSpec, seed: u64) -> Result<StepKernel<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = block_count(&mut rng, spec)?;
    let measures = sample_measures(&mut rng, k, spec.unequal_measures);
    let (lo, hi) = spec.class.range();
    let mut rows = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = rng.gen_range(lo..=hi);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    StepKernel::new(measures, rows)
}

/// Seeded random exact kernel whose values are multiples of `1/denominator`
/// in the class range.
pub fn random_exact_kernel(spec: &RandomKernelSpec, seed: u64, denominator: i64) -> Result<ExactKernel> {
    if denominator < 1 {
        return Err(Error::invalid("denominator", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = block_count(&mut rng, spec)?;
    let measures = sample_measures(&mut rng, k, spec.unequal_measures);
    let (lo, hi) = spec.class.range();
    let lo_n = (lo * denominator as f64).ceil() as i64;
    let hi_n = (hi * denominator as f64).floor() as i64;
    let mut rows = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = rational(rng.gen_range(lo_n..=hi_n), denominator);
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    StepKernel::new(measures, rows)
}

impl StepKernel<f64> {
    /// Exact copy of a float kernel; every finite double is a rational.
    pub fn to_exact(&self) -> Result<ExactKernel> {
        let values = self.values.iter().map(|&v| f64_to_rational(v)).collect::<Result<Vec<_>>>()?;
        Ok(StepKernel { measures: self.measures.clone(), values, k: self.k })
    }
}
