//! Makespan scheduling on identical machines with sequence-independent batch
//! setup times, in the splittable, preemptive and non-preemptive variants.
//!
//! All times are exact rationals ([`Rat`]). Each variant has a simple
//! 2-approximation, a dual test that either builds a schedule of makespan at
//! most 3/2 of a guess or proves the guess too small, and searches over
//! guesses built on top of it.

pub mod classes;
pub mod dual;
pub mod gen;
pub mod model;
pub mod nonpreemptive;
pub mod oracle;
pub mod preemptive;
pub mod rat;
pub mod search;
pub mod splittable;
pub mod verify;
pub mod wrap;

pub use classes::{classify, lower_bound_tmin, machine_counts, ClassPartition, Counts};
pub use model::{parse_instance, Class, Config, Instance, InstanceError, Kind, Placement, Schedule, Variant};
pub use rat::Rat;
pub use verify::{verify_schedule, Rule, Violation, VerifyReport};
