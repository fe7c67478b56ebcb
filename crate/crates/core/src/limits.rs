use crate::error::{Error, Result};
use crate::transformation::MAX_N;

/// Environment variable that overrides the enumeration bound.
pub const MAX_N_ENV: &str = "IOFPAR_MAX_N";

/// Default largest n for which whole-monoid enumeration is allowed.
pub const DEFAULT_MAX_N: usize = 9;

/// Size bound for operations that materialize the whole monoid or W_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_n: DEFAULT_MAX_N }
    }
}

impl Limits {
    /// Reads `IOFPAR_MAX_N`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        let max_n = std::env::var(MAX_N_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .map(|v| v.min(MAX_N))
            .unwrap_or(DEFAULT_MAX_N);
        Limits { max_n }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::Resource { n, bound: self.max_n });
        }
        if n == 0 {
            return Err(Error::OutOfRange { what: "ambient size", value: n, n: self.max_n });
        }
        Ok(())
    }
}
