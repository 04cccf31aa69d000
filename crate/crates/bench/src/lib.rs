//! Instance builders shared by the criterion benches.

use setupsched::gen::scaling_instance;
pub use setupsched::Instance;

/// Scaling instance with `n` jobs, `c = sqrt(n)` classes and `m = n / 10` machines.
pub fn scaling(n: usize, seed: u64) -> Instance {
    scaling_instance(n, seed)
}
