//! Homomorphism densities of graphs and quantum graphs on step kernels,
//! spectral evaluation of necklace densities, the (x, y) necklace profile and
//! a compiler from integer polynomials to quantum graphs whose sign on
//! kernels mirrors the sign of the polynomial on reciprocal grids.

pub mod config;
pub mod density;
pub mod error;
pub mod graphs;
pub mod induced;
pub mod io;
pub mod kernels;
pub mod numeric;
pub mod profile;
pub mod quantum;
pub mod reduction;

pub use config::Config;
pub use density::{clique_operator, hom_density, necklace_density, DensityMethod};
pub use error::{Error, ErrorClass, Result};
pub use graphs::{BaseGraph, Graph, RootedGraph, WeightedGraph};
pub use kernels::{ExactKernel, KernelClass, RandomKernelSpec, Spectrum, StepKernel};
pub use numeric::{Rational, Scalar};
pub use profile::{ProfilePoint, RegionQuery};
pub use quantum::{Component, QuantumGraph, TermKey};
pub use reduction::{IntPolynomial, RatPolynomial};
