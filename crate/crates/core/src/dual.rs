//! Outcome of a dual test for one makespan guess.

use std::fmt;

use crate::model::{Instance, Placement, Schedule};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// `m * T` is below the load the guess forces.
    Load { load: Rat, capacity: Rat },
    /// More machines are needed than exist.
    Machines { needed: u128, available: usize },
    /// The guess is below a trivial lower bound on the optimum.
    BelowLowerBound { bound: Rat },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Load { load, capacity } => {
                write!(f, "load {load:?} exceeds capacity {capacity:?}")
            }
            RejectReason::Machines { needed, available } => {
                write!(f, "needs {needed} machines, {available} available")
            }
            RejectReason::BelowLowerBound { bound } => write!(f, "below lower bound {bound:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualOutcome {
    Accepted { schedule: Schedule, guess: Rat },
    Rejected { guess: Rat, reason: RejectReason },
}

impl DualOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, DualOutcome::Accepted { .. })
    }

    pub fn guess(&self) -> &Rat {
        match self {
            DualOutcome::Accepted { guess, .. } | DualOutcome::Rejected { guess, .. } => guess,
        }
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            DualOutcome::Accepted { schedule, .. } => Some(schedule),
            DualOutcome::Rejected { .. } => None,
        }
    }

    pub fn into_schedule(self) -> Option<Schedule> {
        match self {
            DualOutcome::Accepted { schedule, .. } => Some(schedule),
            DualOutcome::Rejected { .. } => None,
        }
    }
}

/// Accept/reject without building a schedule. Used inside searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// `m < needed` or `mT < load`, checked in that order.
pub(crate) fn check(inst: &Instance, t: &Rat, load: Rat, needed: u128) -> Verdict {
    let capacity = t.mul_int(inst.m() as u64);
    if (inst.m() as u128) < needed {
        Verdict::Reject(RejectReason::Machines { needed, available: inst.m() })
    } else if capacity < load {
        Verdict::Reject(RejectReason::Load { load, capacity })
    } else {
        Verdict::Accept
    }
}

/// True when there are at least as many machines as jobs.
pub fn is_trivial(inst: &Instance) -> bool {
    inst.m() >= inst.n()
}

/// One job with its setup per machine. Optimal for the non-splittable variants when `m >= n`.
pub fn one_job_per_machine(inst: &Instance) -> Schedule {
    let mut machines = Vec::with_capacity(inst.n());
    for (i, c) in inst.classes().iter().enumerate() {
        for (j, &t) in c.jobs.iter().enumerate() {
            let s = Rat::from(c.setup);
            machines.push(vec![
                Placement::setup(i, Rat::zero(), s.clone()),
                Placement::piece(i, j, 0, s, Rat::from(t)),
            ]);
        }
    }
    Schedule { machines, compressed: Vec::new() }
}

/// Group `(machine, placement)` pairs into `count` machine lists, keeping emission order.
pub(crate) fn gather(placed: Vec<(usize, Placement)>, count: usize) -> Vec<Vec<Placement>> {
    let mut machines = vec![Vec::new(); count];
    for (u, p) in placed {
        machines[u].push(p);
    }
    machines
}

/// One guess evaluated during a search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub t: Rat,
    pub accepted: bool,
}

/// Result of a class jumping or integer search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    /// The returned guess. The dual accepts it.
    pub t: Rat,
    pub schedule: Schedule,
    /// Certified lower bound on the optimum.
    pub lower: Rat,
    pub probes: Vec<Probe>,
    /// Largest number of jumps of one class found inside the final jump window.
    pub max_jumps_per_class: usize,
}

/// Binary search over a sorted candidate list given by `len` and `at`.
///
/// Keeps `lo` rejected and `hi` accepted. Every candidate must lie strictly
/// between them. Ties resolve toward the smaller guess.
pub(crate) fn narrow<F, P>(len: usize, at: F, lo: &mut Rat, hi: &mut Rat, probe: &mut P)
where
    F: Fn(usize) -> Rat,
    P: FnMut(&Rat) -> bool,
{
    let (mut a, mut b) = (0usize, len);
    while a < b {
        let mid = a + (b - a) / 2;
        let t = at(mid);
        if probe(&t) {
            b = mid;
            *hi = t;
        } else {
            a = mid + 1;
            *lo = t;
        }
    }
}
