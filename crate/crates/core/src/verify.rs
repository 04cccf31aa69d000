//! Feasibility checks for schedules.
//!
//! Idle time is allowed anywhere, including between a setup and the first
//! piece it serves, but a foreign placement in between breaks the setup.

use std::collections::HashMap;
use std::fmt;

use crate::model::{Instance, Kind, Placement, Schedule, Variant};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Bad ids, non-positive durations, negative starts, wrong setup length, too many machines.
    Shape,
    /// (a) placements on one machine overlap.
    Overlap,
    /// (b) a piece is not preceded by a setup of its class.
    MissingSetup,
    /// (c) pieces of a job do not add up to its processing time.
    Duration,
    /// (d) non-preemptive job in more than one piece.
    Contiguity,
    /// (e) preemptive job running on two machines at once.
    Parallel,
    /// (f) makespan above the bound.
    Makespan,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Shape => "shape",
            Rule::Overlap => "a",
            Rule::MissingSetup => "b",
            Rule::Duration => "c",
            Rule::Contiguity => "d",
            Rule::Parallel => "e",
            Rule::Makespan => "f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub machine: Option<usize>,
    pub time: Option<Rat>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule ({})", self.rule.id())?;
        if let Some(m) = self.machine {
            write!(f, " machine {m}")?;
        }
        if let Some(t) = &self.time {
            write!(f, " at {t}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
    pub makespan: Rat,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// Check `sched` against every feasibility rule of variant `v` and the makespan `bound`.
///
/// Compressed configurations are checked once and weighted by their
/// multiplicity; they are never expanded.
pub fn verify_schedule(inst: &Instance, sched: &Schedule, v: Variant, bound: &Rat) -> VerifyReport {
    let mut out = Vec::new();
    let mut push = |rule, machine, time: Option<&Rat>, detail: String| {
        out.push(Violation { rule, machine, time: time.cloned(), detail })
    };

    if sched.machine_count() > inst.m() as u128 {
        push(
            Rule::Shape,
            None,
            None,
            format!("{} machines used, only {} available", sched.machine_count(), inst.m()),
        );
    }

    // totals and piece counts per job, intervals for the same-job rule
    let mut total: HashMap<(usize, usize), Rat> = HashMap::new();
    let mut pieces: HashMap<(usize, usize), u128> = HashMap::new();
    let mut intervals: HashMap<(usize, usize), Vec<(Rat, Rat, usize)>> = HashMap::new();
    let mut makespan = Rat::zero();

    let lists = sched
        .machines
        .iter()
        .map(|m| (m, 1u64))
        .chain(sched.compressed.iter().map(|c| (&c.config, c.mult)));
    for (idx, (list, mult)) in lists.enumerate() {
        if mult == 0 {
            continue;
        }
        let mut sorted: Vec<&Placement> = list.iter().collect();
        sorted.sort_by(|a, b| a.start.cmp(&b.start));
        let mut active: Option<usize> = None;
        let mut last_end: Option<Rat> = None;
        for p in sorted {
            if p.class >= inst.c() {
                push(Rule::Shape, Some(idx), Some(&p.start), format!("unknown class {}", p.class));
                continue;
            }
            if !p.dur.is_positive() {
                push(Rule::Shape, Some(idx), Some(&p.start), "non-positive duration".into());
            }
            if p.start.is_negative() {
                push(Rule::Shape, Some(idx), Some(&p.start), "negative start".into());
            }
            if let Some(e) = &last_end {
                if p.start < *e {
                    push(Rule::Overlap, Some(idx), Some(&p.start), "overlaps previous placement".into());
                }
            }
            let end = p.end();
            last_end = Some(match last_end {
                Some(e) if e > end => e,
                _ => end.clone(),
            });
            if end > makespan {
                makespan = end.clone();
            }
            match p.kind {
                Kind::Setup => {
                    if p.dur != inst.setup(p.class) {
                        push(
                            Rule::Shape,
                            Some(idx),
                            Some(&p.start),
                            format!("setup of class {} has wrong length {:?}", p.class, p.dur),
                        );
                    }
                    active = Some(p.class);
                }
                Kind::Piece { job, .. } => {
                    if job >= inst.class(p.class).jobs.len() {
                        push(
                            Rule::Shape,
                            Some(idx),
                            Some(&p.start),
                            format!("unknown job {job} of class {}", p.class),
                        );
                        continue;
                    }
                    if active != Some(p.class) {
                        push(
                            Rule::MissingSetup,
                            Some(idx),
                            Some(&p.start),
                            format!("piece of job ({}, {job}) without a setup of its class", p.class),
                        );
                    }
                    let key = (p.class, job);
                    *total.entry(key).or_insert_with(Rat::zero) += p.dur.mul_int(mult);
                    *pieces.entry(key).or_insert(0) += mult as u128;
                    let iv = intervals.entry(key).or_default();
                    for _ in 0..mult.min(2) {
                        iv.push((p.start.clone(), end.clone(), idx));
                    }
                }
            }
        }
    }

    for (i, c) in inst.classes().iter().enumerate() {
        for (j, &t) in c.jobs.iter().enumerate() {
            let got = total.get(&(i, j)).cloned().unwrap_or_else(Rat::zero);
            if got != Rat::from(t) {
                push(
                    Rule::Duration,
                    None,
                    None,
                    format!("job ({i}, {j}) processed for {got:?}, needs {t}"),
                );
            }
            if v == Variant::NonPreemptive && pieces.get(&(i, j)).copied().unwrap_or(0) > 1 {
                push(Rule::Contiguity, None, None, format!("job ({i}, {j}) is preempted"));
            }
        }
    }

    if v == Variant::Preemptive {
        let mut keys: Vec<_> = intervals.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let iv = intervals.get_mut(&key).unwrap();
            iv.sort();
            let mut reach: Option<&Rat> = None;
            for (s, e, m) in iv.iter() {
                if let Some(r) = reach {
                    if s < r {
                        push(
                            Rule::Parallel,
                            Some(*m),
                            Some(s),
                            format!("job ({}, {}) runs in parallel with itself", key.0, key.1),
                        );
                    }
                }
                reach = match reach {
                    Some(r) if r > e => Some(r),
                    _ => Some(e),
                };
            }
        }
    }

    if makespan > *bound {
        push(Rule::Makespan, None, Some(&makespan), format!("makespan exceeds bound {bound:?}"));
    }

    VerifyReport { violations: out, makespan }
}
