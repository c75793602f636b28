//! Tolerance helpers shared by the mechanisms and the probes.

/// Relative tolerance for welfare and density comparisons.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor applied under [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// Comparison slack for two values of similar magnitude.
#[inline]
pub fn tolerance(a: f64, b: f64) -> f64 {
    (REL_TOL * a.abs().max(b.abs())).max(ABS_TOL)
}

/// `a < b` by more than the shared tolerance.
#[inline]
pub fn definitely_less(a: f64, b: f64) -> bool {
    a < b - tolerance(a, b)
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tolerance(a, b)
}
