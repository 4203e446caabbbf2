//! Shared fixtures for the benchmarks.

use ladle_core::{generate_scenario, GeneratorConfig, Scenario};

/// The reference setup: 10 donors, 5 agencies, 3 food types.
pub fn default_scenario(seed: u64) -> Scenario {
    generate_scenario(&GeneratorConfig { seed, ..GeneratorConfig::default() })
        .expect("default config generates")
}

/// A denser scenario to expose the subset-enumeration cost (2^n - 1
/// candidate combinations per agency).
pub fn wide_scenario(n_donors: usize, seed: u64) -> Scenario {
    let cfg = GeneratorConfig { n_donors, seed, ..GeneratorConfig::default() };
    generate_scenario(&cfg).expect("wide config generates")
}
