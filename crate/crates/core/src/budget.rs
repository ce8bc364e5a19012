//! Work limits shared by the exhaustive routines.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Environment variable holding a global time cap in seconds.
pub const BUDGET_SECONDS_ENV: &str = "TORSOR_BUDGET_SECONDS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Cap on `2^|E|` for explicit orientation tables.
    pub max_orientations: u128,
    /// Cap on `2^#supports` when enumerating signatures of one kind.
    pub max_signatures: u128,
    /// Cap on `2^(#circuits + #cocircuits)` for exhaustive pair sweeps.
    pub max_pairs: u128,
    /// Cap on `|S(M)| * |B(M)|` for generating-pair searches.
    pub max_states: u128,
    /// Cap on `3^|E|` when scanning functionals for acyclic signatures.
    pub max_functionals: u128,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_orientations: 1 << 20,
            max_signatures: 1 << 16,
            max_pairs: 1 << 12,
            max_states: 1 << 22,
            max_functionals: 1 << 20,
            deadline: None,
        }
    }
}

impl Budget {
    pub fn with_seconds(mut self, seconds: f64) -> Self {
        self.deadline = Some(Instant::now() + Duration::from_secs_f64(seconds));
        self
    }

    /// Default budget, with the deadline taken from [`BUDGET_SECONDS_ENV`]
    /// when it is set to a positive number.
    pub fn from_env() -> Self {
        match std::env::var(BUDGET_SECONDS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
        {
            Some(s) if s > 0.0 => Budget::default().with_seconds(s),
            _ => Budget::default(),
        }
    }

    pub fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::TimeBudget),
            _ => Ok(()),
        }
    }

    pub(crate) fn check(what: &'static str, needed: u128, budget: u128) -> Result<()> {
        if needed > budget {
            Err(Error::BudgetExceeded { what, needed, budget })
        } else {
            Ok(())
        }
    }
}
