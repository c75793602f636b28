//! Reference solvers: an exhaustive welfare oracle and a local-search
//! approximation priced pay-as-bid.

mod brute;
mod local_search;

pub use brute::{brute_force_opt, BruteForce};
pub use local_search::{local_search_opt, run_frls, LocalSearch};

use crate::error::{Error, Result};

/// Hard ceiling for exhaustive enumeration.
pub const MAX_BRUTE_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// Largest instance the exhaustive oracle accepts.
    pub max_brute_n: usize,
    /// Local-search restarts, one per best feasible singleton.
    pub ls_restarts: usize,
    /// Relative improvement a move must achieve to be taken.
    pub ls_tolerance: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            max_brute_n: 22,
            ls_restarts: 3,
            ls_tolerance: 1e-9,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_brute_n > MAX_BRUTE_N {
            return Err(Error::InvalidConfig(format!(
                "max_brute_n must be at most {MAX_BRUTE_N}"
            )));
        }
        if self.ls_restarts == 0 {
            return Err(Error::InvalidConfig("ls_restarts must be at least 1".into()));
        }
        if self.ls_tolerance.is_nan() || self.ls_tolerance < 0.0 {
            return Err(Error::InvalidConfig("ls_tolerance must be non-negative".into()));
        }
        Ok(())
    }
}
