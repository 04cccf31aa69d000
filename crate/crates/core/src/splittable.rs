//! Splittable variant: jobs may be cut anywhere and run in parallel with themselves.

use crate::classes::lower_bound_tmin;
use crate::dual::{check, gather, narrow, DualOutcome, SearchResult, Probe, RejectReason, Verdict};
use crate::model::{Instance, Schedule, Variant};
use crate::rat::{count_u64, Rat};
use crate::wrap::{wrap, wrap_mixed, Gap, ParallelGaps, WrapSequence, WrapTemplate};

/// Next-fit over all classes into `m` gaps of height `N/m`, all but the first
/// lifted by `s_max` to leave room for a moved setup.
///
/// Every machine but the first is identical, so they are emitted compressed.
pub fn two_approx_split(inst: &Instance) -> (Schedule, Rat) {
    let m = inst.m() as u64;
    let s_max = Rat::from(inst.s_max());
    let h = Rat::new(inst.total_load(), m);
    let top = &s_max + &h;
    let first = WrapTemplate::new(vec![Gap::new(0, Rat::zero(), top.clone())]).expect("valid gap");
    let block = ParallelGaps { a: s_max, b: top, count: m - 1 };
    let all: Vec<usize> = (0..inst.c()).collect();
    let out = wrap_mixed(&WrapSequence::of_classes(inst, &all), &first, &block)
        .expect("capacity s_max + N >= N");
    let sched = Schedule { machines: gather(out.placed, 1), compressed: out.configs };
    let mk = sched.makespan();
    (sched, mk)
}

/// Per-class data the load formula needs, so probes cost O(c).
#[derive(Debug, Clone)]
pub struct SplitData {
    setup: Vec<Rat>,
    proc: Vec<Rat>,
    total_proc: Rat,
    tmin: Rat,
}

impl SplitData {
    pub fn new(inst: &Instance) -> Self {
        SplitData {
            setup: inst.classes().iter().map(|c| Rat::from(c.setup)).collect(),
            proc: inst.classes().iter().map(|c| Rat::from(c.proc_sum())).collect(),
            total_proc: Rat::from(inst.total_proc()),
            tmin: lower_bound_tmin(inst, Variant::Splittable),
        }
    }

    fn beta(&self, i: usize, t: &Rat) -> u64 {
        count_u64(&(self.proc[i].mul_int(2) / t).ceil())
    }

    /// `(L_split, m_exp)` for guess `t`.
    pub fn load(&self, t: &Rat) -> (Rat, u128) {
        let half = t.half();
        let mut load = self.total_proc.clone();
        let mut m_exp = 0u128;
        for i in 0..self.setup.len() {
            if self.setup[i] > half {
                let b = self.beta(i, t);
                m_exp += b as u128;
                load += self.setup[i].mul_int(b);
            } else {
                load += &self.setup[i];
            }
        }
        (load, m_exp)
    }

    pub fn verdict(&self, inst: &Instance, t: &Rat) -> Verdict {
        if !t.is_positive() {
            return Verdict::Reject(RejectReason::BelowLowerBound { bound: self.tmin.clone() });
        }
        let (load, m_exp) = self.load(t);
        match check(inst, t, load, m_exp) {
            // the expensive gaps end at s + T/2, too late when some setup exceeds T
            Verdict::Accept if *t < self.tmin => {
                Verdict::Reject(RejectReason::BelowLowerBound { bound: self.tmin.clone() })
            }
            v => v,
        }
    }
}

/// Accept/reject test without building a schedule.
pub fn check_split(inst: &Instance, t: &Rat) -> Verdict {
    SplitData::new(inst).verdict(inst, t)
}

/// Either a schedule of makespan at most `3T/2` or a proof that `T < OPT`.
pub fn dual_split(inst: &Instance, t: &Rat) -> DualOutcome {
    match check_split(inst, t) {
        Verdict::Reject(reason) => DualOutcome::Rejected { guess: t.clone(), reason },
        Verdict::Accept => DualOutcome::Accepted { schedule: build_split(inst, t), guess: t.clone() },
    }
}

fn build_split(inst: &Instance, t: &Rat) -> Schedule {
    let half = t.half();
    let top = t.scale(3, 2);
    let mut placed = Vec::new();
    let mut next = 0usize;
    let mut tails: Vec<Gap> = Vec::new();
    let mut cheap = Vec::new();

    // expensive classes on beta machines each, every gap holding T/2 of jobs
    for (i, c) in inst.classes().iter().enumerate() {
        let s = Rat::from(c.setup);
        if s <= half {
            cheap.push(i);
            continue;
        }
        let beta = count_u64(&(Rat::from(c.proc_sum()).mul_int(2) / t).ceil()) as usize;
        let end = &s + &half;
        let gaps = (0..beta)
            .map(|r| Gap::new(next + r, if r == 0 { Rat::zero() } else { s.clone() }, end.clone()))
            .collect();
        let tpl = WrapTemplate::new(gaps).expect("valid gaps");
        let (out, pos) = wrap(&WrapSequence::of_classes(inst, &[i]), &tpl).expect("beta gaps hold the class");
        placed.extend(out.placed);
        let last = next + beta - 1;
        let fill = pos.map(|p| p.t).unwrap_or_else(Rat::zero);
        if fill < *t {
            tails.push(Gap::new(last, &fill + &half, top.clone()));
        }
        next += beta;
    }

    let m_exp = next;
    let q = WrapSequence::of_classes(inst, &cheap);
    let mut configs = Vec::new();
    if !q.is_empty() {
        let tpl = WrapTemplate::new(tails).expect("tails increase");
        let block = ParallelGaps { a: half, b: top, count: (inst.m() - m_exp) as u64 };
        let out = wrap_mixed(&q, &tpl, &block).expect("load check guarantees room for cheap classes");
        placed.extend(out.placed);
        configs = out.configs;
    }
    Schedule { machines: gather(placed, m_exp), compressed: configs }
}

fn jump_count(p2: &Rat, lo: &Rat, hi: &Rat) -> (u64, u64) {
    // integers k with lo < p2 / k < hi, i.e. p2/hi < k < p2/lo
    let k_lo = count_u64(&(p2 / hi).floor()) + 1;
    let up = p2 / lo;
    let k_hi = if up.is_integer() { count_u64(&up.floor()).saturating_sub(1) } else { count_u64(&up.floor()) };
    (k_lo, k_hi)
}

/// Exact smallest accepted guess by jumping between class breakpoints.
pub fn class_jump_split(inst: &Instance) -> SearchResult {
    let data = SplitData::new(inst);
    let mut probes = Vec::new();
    let mut probe = |t: &Rat| {
        let ok = data.verdict(inst, t).is_accept();
        probes.push(Probe { t: t.clone(), accepted: ok });
        ok
    };

    let tmin = data.tmin.clone();
    if probe(&tmin) {
        let schedule = build_split(inst, &tmin);
        return SearchResult { t: tmin.clone(), schedule, lower: tmin, probes, max_jumps_per_class: 0 };
    }
    let mut lo = tmin.clone();
    let mut hi = tmin.mul_int(2);
    assert!(probe(&hi), "twice the lower bound must be accepted");

    // the partition into expensive and cheap classes
    let mut setups: Vec<Rat> = data.setup.iter().map(|s| s.mul_int(2)).filter(|v| *v > lo && *v < hi).collect();
    setups.sort();
    setups.dedup();
    narrow(setups.len(), |k| setups[k].clone(), &mut lo, &mut hi, &mut probe);

    let exp: Vec<usize> = (0..inst.c()).filter(|&i| data.setup[i].mul_int(2) >= hi).collect();
    let mut max_jumps = 0usize;
    if let Some(&f) = exp.iter().max_by(|&&a, &&b| data.proc[a].cmp(&data.proc[b]).then(b.cmp(&a))) {
        // jumps 2P_f/k of the fastest class, ascending in T means descending in k
        let p2 = data.proc[f].mul_int(2);
        let (k_lo, k_hi) = jump_count(&p2, &lo, &hi);
        if k_lo <= k_hi {
            let len = (k_hi - k_lo + 1) as usize;
            narrow(len, |x| &p2 / Rat::from(k_hi - x as u64), &mut lo, &mut hi, &mut probe);
        }

        let mut jumps = Vec::new();
        for &i in &exp {
            let p2 = data.proc[i].mul_int(2);
            let (k_lo, k_hi) = jump_count(&p2, &lo, &hi);
            if k_lo <= k_hi {
                max_jumps = max_jumps.max((k_hi - k_lo + 1) as usize);
                for k in k_lo..=k_hi {
                    jumps.push(&p2 / Rat::from(k));
                }
            }
        }
        jumps.sort();
        jumps.dedup();
        narrow(jumps.len(), |k| jumps[k].clone(), &mut lo, &mut hi, &mut probe);
    }

    // the load is constant on [lo, hi)
    let (load, m_exp) = data.load(&lo);
    let mut t = hi.clone();
    if m_exp <= inst.m() as u128 {
        let t_new = load.div_int(inst.m() as u64);
        if t_new < hi {
            debug_assert!(data.verdict(inst, &t_new).is_accept());
            t = t_new;
        }
    }
    let schedule = build_split(inst, &t);
    // every guess below t is rejected, so t itself bounds the optimum from below
    SearchResult { lower: t.clone(), t, schedule, probes, max_jumps_per_class: max_jumps }
}
