//! Numeric tolerances used throughout the crate.
//!
//! Every floating-point comparison in the library and its test suites goes
//! through one of these constants. Coverage objectives are integer valued and
//! exact in `f64`; the tolerances exist for the log-det objective and for
//! ratios of floating-point values.

/// Slack for comparing two objective values.
///
/// Log-det values are O(1)..O(10²) here, so 1e-9 is far above rounding noise
/// while far below any real value gap.
pub const VALUE_EPS: f64 = 1e-9;

/// Slack for checking a ratio against a closed-form guarantee.
pub const BOUND_TOL: f64 = 1e-9;

/// Tolerance for point values of closed-form bound formulas.
///
/// These are a handful of arithmetic operations, so errors sit at machine
/// epsilon; 1e-12 leaves three orders of margin.
pub const POINT_TOL: f64 = 1e-12;

/// Maximum asymmetry |q_ij - q_ji| tolerated in an information matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Minimum eigenvalue admitted by the positive-semidefinite check.
///
/// Rank-one blocks assembled in floating point can dip this far below zero.
pub const PSD_EIG_TOL: f64 = -1e-9;

/// Worst admissible per-entry error after a matrix JSON round trip.
pub const JSON_MATRIX_TOL: f64 = 1e-15;

/// Half-width of the point mass at ratio = 1 in experiment histograms.
pub const RATIO_ONE_TOL: f64 = 1e-9;

/// Slack when asserting that histogram fractions sum to one.
pub const FRACTION_SUM_TOL: f64 = 1e-12;
