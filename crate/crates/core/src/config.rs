//! Default limits and tolerances.
//!
//! Every numeric threshold the crate uses by default lives here so that
//! tests, the CLI and library callers agree on them.

/// Limit on the number of block assignments a brute-force density may visit.
pub const ENUMERATION_GUARD: f64 = 1e9;

/// Largest graph [`crate::graphs::canonical_form`] accepts.
pub const CANONICAL_GUARD: usize = 64;

/// Threshold under which t(N_{4,q}, W) counts as zero (see
/// [`crate::profile::profile_point`] for the normalization it is applied to).
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Relative tolerance for agreement between two floating-point routes.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Tolerance for comparisons against closed-form values.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// Relative tolerance for the reduction's dual-path identity check.
pub const REDUCTION_REL_TOL: f64 = 1e-6;

/// Largest pattern on which glue conditions are checked exhaustively.
pub const GLUE_CHECK_LIMIT: usize = 10;

/// Grid bound for the exact reciprocal scan.
pub const RECIPROCAL_GRID_MAX: u64 = 1000;

/// Tunable knobs, defaulting to the constants above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub enumeration_guard: f64,
    pub canonical_guard: usize,
    pub zero_threshold: f64,
    pub float_rel_tol: f64,
    pub closed_form_tol: f64,
    /// Split brute-force enumeration across the rayon pool.
    pub parallel: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            enumeration_guard: ENUMERATION_GUARD,
            canonical_guard: CANONICAL_GUARD,
            zero_threshold: ZERO_THRESHOLD,
            float_rel_tol: FLOAT_REL_TOL,
            closed_form_tol: CLOSED_FORM_TOL,
            parallel: false,
        }
    }
}
