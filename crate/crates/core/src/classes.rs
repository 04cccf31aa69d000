//! Lower bounds, machine counts and the class partition for a makespan guess.

use crate::model::{Instance, Variant};
use crate::rat::{count_u64, Rat};

/// `Splittable`: max(N/m, s_max). Otherwise max(N/m, max_i(s_i + t_max(i))).
pub fn lower_bound_tmin(inst: &Instance, v: Variant) -> Rat {
    let avg = Rat::new(inst.total_load(), inst.m() as u64);
    let single = match v {
        Variant::Splittable => inst.s_max(),
        Variant::Preemptive | Variant::NonPreemptive => {
            inst.classes().iter().map(|c| c.setup + c.t_max()).max().unwrap_or(0)
        }
    };
    avg.max(Rat::from(single))
}

/// Machine counts of one class for a guess T.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    /// ceil(P / (T - s))
    pub alpha: u64,
    /// floor(P / (T - s))
    pub alpha_floor: u64,
    /// ceil(2P / T)
    pub beta: u64,
    /// floor(2P / T)
    pub beta_floor: u64,
    pub gamma: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("guess {t:?} does not exceed setup {s} of class {class}")]
    GuessBelowSetup { class: usize, s: u64, t: Rat },
    #[error("guess must be positive")]
    NonPositive,
}

/// Counts from raw values. Requires 0 < T and s < T.
pub fn counts_for(s: &Rat, p: &Rat, t: &Rat) -> Option<Counts> {
    if !t.is_positive() || s >= t {
        return None;
    }
    let room = t - s;
    let q = p / &room;
    let q2 = p.mul_int(2) / t;
    let alpha = count_u64(&q.ceil());
    let alpha_floor = count_u64(&q.floor());
    let beta = count_u64(&q2.ceil());
    let beta_floor = count_u64(&q2.floor());
    let gamma = gamma_for(s, p, t, beta, beta_floor);
    Some(Counts { alpha, alpha_floor, beta, beta_floor, gamma })
}

/// gamma = max(beta', 1) if P - beta' T/2 <= T - s, else beta.
pub fn gamma_for(s: &Rat, p: &Rat, t: &Rat, beta: u64, beta_floor: u64) -> u64 {
    let rest = p - &t.half().mul_int(beta_floor);
    if rest <= t - s {
        beta_floor.max(1)
    } else {
        beta
    }
}

pub fn machine_counts(inst: &Instance, i: usize, t: &Rat) -> Result<Counts, DomainError> {
    if !t.is_positive() {
        return Err(DomainError::NonPositive);
    }
    let c = inst.class(i);
    counts_for(&Rat::from(c.setup), &Rat::from(c.proc_sum()), t).ok_or_else(|| {
        DomainError::GuessBelowSetup { class: i, s: c.setup, t: t.clone() }
    })
}

/// The partition of classes for a guess T.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    pub t: Rat,
    pub exp: Vec<usize>,
    pub chp: Vec<usize>,
    pub exp_plus: Vec<usize>,
    pub exp_zero: Vec<usize>,
    pub exp_minus: Vec<usize>,
    pub chp_plus: Vec<usize>,
    pub chp_minus: Vec<usize>,
    pub chp_star: Vec<usize>,
    /// P(C_i) per class.
    pub proc: Vec<Rat>,
    /// Counts per class, `None` where T <= s_i.
    pub counts: Vec<Option<Counts>>,
    /// Big jobs C_i^* for classes of I_chp^-, empty elsewhere.
    pub big_jobs: Vec<Vec<usize>>,
}

impl ClassPartition {
    pub fn is_expensive(&self, i: usize) -> bool {
        self.exp.binary_search(&i).is_ok()
    }

    /// Nice means I_exp^0 is empty.
    pub fn is_nice(&self) -> bool {
        self.exp_zero.is_empty()
    }
}

pub fn classify(inst: &Instance, t: &Rat) -> ClassPartition {
    let half = t.half();
    let quarter = t.div_int(4);
    let three_q = t.scale(3, 4);
    let mut part = ClassPartition {
        t: t.clone(),
        exp: vec![],
        chp: vec![],
        exp_plus: vec![],
        exp_zero: vec![],
        exp_minus: vec![],
        chp_plus: vec![],
        chp_minus: vec![],
        chp_star: vec![],
        proc: Vec::with_capacity(inst.c()),
        counts: Vec::with_capacity(inst.c()),
        big_jobs: vec![Vec::new(); inst.c()],
    };
    for (i, c) in inst.classes().iter().enumerate() {
        let s = Rat::from(c.setup);
        let p = Rat::from(c.proc_sum());
        let sp = &s + &p;
        if s > half {
            part.exp.push(i);
            if *t <= sp {
                part.exp_plus.push(i);
            } else if sp > three_q {
                part.exp_zero.push(i);
            } else {
                part.exp_minus.push(i);
            }
        } else {
            part.chp.push(i);
            if s >= quarter {
                part.chp_plus.push(i);
            } else {
                part.chp_minus.push(i);
                let big: Vec<usize> = c
                    .jobs
                    .iter()
                    .enumerate()
                    .filter(|(_, &tj)| &s + Rat::from(tj) > half)
                    .map(|(j, _)| j)
                    .collect();
                if !big.is_empty() {
                    part.chp_star.push(i);
                }
                part.big_jobs[i] = big;
            }
        }
        part.counts.push(counts_for(&s, &p, t));
        part.proc.push(p);
    }
    part
}

/// Per-class sorted jobs with prefix sums, for fast threshold queries.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub setup: Vec<u64>,
    pub proc: Vec<u128>,
    sorted: Vec<Vec<u64>>,
    prefix: Vec<Vec<u128>>,
}

impl Prepared {
    pub fn new(inst: &Instance) -> Self {
        let mut sorted = Vec::with_capacity(inst.c());
        let mut prefix = Vec::with_capacity(inst.c());
        for c in inst.classes() {
            let mut js = c.jobs.clone();
            js.sort_unstable();
            let mut pre = Vec::with_capacity(js.len() + 1);
            let mut acc = 0u128;
            pre.push(0);
            for &t in &js {
                acc += t as u128;
                pre.push(acc);
            }
            sorted.push(js);
            prefix.push(pre);
        }
        Prepared {
            setup: inst.classes().iter().map(|c| c.setup).collect(),
            proc: inst.classes().iter().map(|c| c.proc_sum()).collect(),
            sorted,
            prefix,
        }
    }

    pub fn c(&self) -> usize {
        self.setup.len()
    }

    /// Number of jobs of class `i` with `t_j > x`, and their total.
    pub fn above(&self, i: usize, x: &Rat) -> (u64, u128) {
        let js = &self.sorted[i];
        let k = js.partition_point(|&t| Rat::from(t) <= *x);
        ((js.len() - k) as u64, self.prefix[i][js.len()] - self.prefix[i][k])
    }

    /// Number and total of jobs of class `i` with `lo < t_j <= hi`.
    pub fn between(&self, i: usize, lo: &Rat, hi: &Rat) -> (u64, u128) {
        let (n1, s1) = self.above(i, lo);
        let (n2, s2) = self.above(i, hi);
        (n1.saturating_sub(n2), s1.saturating_sub(s2))
    }

    pub fn t_max(&self, i: usize) -> u64 {
        self.sorted[i].last().copied().unwrap_or(0)
    }
}
