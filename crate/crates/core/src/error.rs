//! Error type shared by all modules.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Domain and precondition failures.
///
/// Infeasibility of an optimization scenario is *not* an error: the
/// optimizer reports it as data (see [`crate::optimizer::OptimizationResult`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input fell outside an operation's domain.
    #[error("{name} must be {constraint}, got {value}")]
    Domain {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// A Monte Carlo target too deep in the tail for the requested sample
    /// count; deep tails are covered analytically instead.
    #[error(
        "statistical floor: expected hit count p0*samples = {expected_hits} is below {floor}; \
         increase samples or use the analytic outage references"
    )]
    StatisticalFloor { expected_hits: f64, floor: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, constraint: &'static str, value: f64) -> Self {
        Error::Domain {
            name,
            constraint,
            value,
        }
    }
}

/// Checks that `value` is finite and satisfies `ok`, otherwise returns a
/// domain error built from `name` and `constraint`.
pub(crate) fn require(
    name: &'static str,
    constraint: &'static str,
    value: f64,
    ok: bool,
) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::domain(name, constraint, value))
    }
}
