//! Shared inputs for the benchmarks.

use strongsum::fixtures::{builtin, Fixture};

/// The fixtures used across benchmark groups.
pub fn fixture(name: &str) -> Fixture {
    builtin(name).expect("builtin fixture")
}
