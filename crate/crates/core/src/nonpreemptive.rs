//! Non-preemptive variant: every job runs in one piece.
//!
//! The dual builds a preemptive schedule of machines as item lists first and
//! then repairs it. Start times are only assigned when the lists are rendered.

use crate::classes::lower_bound_tmin;
use crate::dual::{check, is_trivial, narrow, one_job_per_machine, DualOutcome, SearchResult, Probe, RejectReason, Verdict};
use crate::model::{Instance, Placement, Schedule, Variant};
use crate::rat::{count_u64, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Setup,
    Job {
        job: usize,
        dur: Rat,
        /// Part of a job that was cut.
        piece: bool,
        /// The lowest part of a cut job.
        first: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Item {
    class: usize,
    kind: Kind,
}

impl Item {
    fn setup(class: usize) -> Self {
        Item { class, kind: Kind::Setup }
    }

    fn job(class: usize, job: usize, dur: Rat, piece: bool, first: bool) -> Self {
        Item { class, kind: Kind::Job { job, dur, piece, first } }
    }

    fn dur(&self, inst: &Instance) -> Rat {
        match &self.kind {
            Kind::Setup => inst.setup(self.class),
            Kind::Job { dur, .. } => dur.clone(),
        }
    }
}

fn render(inst: &Instance, machines: Vec<Vec<Item>>) -> Schedule {
    let mut out = Vec::with_capacity(machines.len());
    for list in machines {
        let mut at = Rat::zero();
        let mut row = Vec::with_capacity(list.len());
        for it in list {
            let d = it.dur(inst);
            row.push(match it.kind {
                Kind::Setup => Placement::setup(it.class, at.clone(), d.clone()),
                Kind::Job { job, .. } => Placement::piece(it.class, job, 0, at.clone(), d.clone()),
            });
            at += d;
        }
        out.push(row);
    }
    while out.last().is_some_and(|m| m.is_empty()) {
        out.pop();
    }
    Schedule { machines: out, compressed: Vec::new() }
}

/// Drops setups with no job of their class right after them. Inserts a
/// setup before any job that lacks one; the constructions never need this.
fn tidy(machines: &mut [Vec<Item>]) -> usize {
    let mut inserted = 0;
    for list in machines.iter_mut() {
        let mut out: Vec<Item> = Vec::with_capacity(list.len());
        for it in list.drain(..) {
            if let Some(Item { kind: Kind::Setup, .. }) = out.last() {
                if it.kind == Kind::Setup || out.last().unwrap().class != it.class {
                    out.pop();
                }
            }
            if it.kind != Kind::Setup {
                let active = out.iter().rev().find(|p| p.kind == Kind::Setup).map(|p| p.class);
                if active != Some(it.class) {
                    out.push(Item::setup(it.class));
                    inserted += 1;
                }
            }
            out.push(it);
        }
        if let Some(Item { kind: Kind::Setup, .. }) = out.last() {
            out.pop();
        }
        *list = out;
    }
    inserted
}

/// Next-fit of `seq` over the machines in `targets` with threshold `limit`.
///
/// An item that ends above `limit` is handed to the next machine together
/// with a fresh setup when it is a job. Returns how many targets were touched.
fn next_fit_relay(
    inst: &Instance,
    machines: &mut [Vec<Item>],
    loads: &[Rat],
    targets: &[usize],
    seq: Vec<Item>,
    limit: &Rat,
) -> usize {
    let mut rows: Vec<Vec<Item>> = Vec::new();
    let mut crossing: Vec<bool> = Vec::new();
    let mut k = 0usize;
    let mut load = loads.get(k).cloned().unwrap_or_else(Rat::zero);
    for it in seq {
        if rows.is_empty() {
            rows.push(Vec::new());
            crossing.push(false);
        }
        load += it.dur(inst);
        rows[k].push(it);
        if load > *limit && k + 1 < targets.len() {
            crossing[k] = true;
            k += 1;
            load = loads[k].clone();
            rows.push(Vec::new());
            crossing.push(false);
        }
    }
    let used = rows.len();
    let mut carry: Option<Item> = None;
    for (k, mut row) in rows.into_iter().enumerate() {
        let moved = if crossing[k] { row.pop() } else { None };
        let dst = &mut machines[targets[k]];
        if let Some(q) = carry.take() {
            if q.kind != Kind::Setup {
                dst.push(Item::setup(q.class));
            }
            dst.push(q);
        }
        dst.extend(row);
        carry = moved;
    }
    used
}

/// Next-fit with threshold `T_min`, crossing items moved up to the next
/// machine. Makespan at most `2 T_min`.
pub fn next_fit_two_approx(inst: &Instance, v: Variant) -> (Schedule, Rat) {
    assert!(v != Variant::Splittable, "next fit is for the preemptive and non-preemptive variants");
    if is_trivial(inst) {
        let s = one_job_per_machine(inst);
        let mk = s.makespan();
        return (s, mk);
    }
    let tmin = lower_bound_tmin(inst, v);
    let m = inst.m();
    let mut seq = Vec::with_capacity(inst.n() + inst.c());
    for (i, c) in inst.classes().iter().enumerate() {
        seq.push(Item::setup(i));
        for (j, &t) in c.jobs.iter().enumerate() {
            seq.push(Item::job(i, j, Rat::from(t), false, false));
        }
    }
    let mut machines = vec![Vec::new(); m];
    let targets: Vec<usize> = (0..m).collect();
    next_fit_relay(inst, &mut machines, &vec![Rat::zero(); m], &targets, seq, &tmin);
    let fixed = tidy(&mut machines);
    debug_assert_eq!(fixed, 0);
    let s = render(inst, machines);
    let mk = s.makespan();
    (s, mk)
}

/// Class data for one guess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonpCounts {
    pub t: Rat,
    /// Machine minimum `m_i` per class.
    pub machines: Vec<u64>,
    /// `x_i = P(C_i) - m_i (T - s_i)`.
    pub x: Vec<Rat>,
    /// Jobs with `t_j > T/2`, per class.
    pub big: Vec<Vec<usize>>,
    /// Jobs with `t_j <= T/2`, per class.
    pub small: Vec<Vec<usize>>,
    /// Small jobs of cheap classes with `s_i + t_j > T/2`.
    pub k: Vec<Vec<usize>>,
    /// Jobs with `s_i + t_j > T/2`.
    pub l: Vec<Vec<usize>>,
    pub expensive: Vec<bool>,
}

impl NonpCounts {
    /// `L_nonp = P(J) + sum m_i s_i + sum over x_i > 0 of s_i`.
    pub fn load(&self, inst: &Instance) -> Rat {
        let mut load = Rat::from(inst.total_proc());
        for (i, c) in inst.classes().iter().enumerate() {
            let extra = self.machines[i] + u64::from(self.x[i].is_positive());
            load += Rat::from(c.setup).mul_int(extra);
        }
        load
    }

    /// `m' = sum m_i`.
    pub fn needed(&self) -> u128 {
        self.machines.iter().map(|&k| k as u128).sum()
    }
}

/// The guess is at most some setup time, so it is below the optimum.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("guess {t} does not exceed the setup time of class {class}")]
pub struct SetupExceedsGuess {
    pub class: usize,
    pub t: Rat,
}

pub fn counts_nonp(inst: &Instance, t: &Rat) -> Result<NonpCounts, SetupExceedsGuess> {
    let half = t.half();
    let c = inst.c();
    let mut out = NonpCounts {
        t: t.clone(),
        machines: Vec::with_capacity(c),
        x: Vec::with_capacity(c),
        big: vec![Vec::new(); c],
        small: vec![Vec::new(); c],
        k: vec![Vec::new(); c],
        l: vec![Vec::new(); c],
        expensive: Vec::with_capacity(c),
    };
    for (i, cl) in inst.classes().iter().enumerate() {
        let s = Rat::from(cl.setup);
        if s >= *t {
            return Err(SetupExceedsGuess { class: i, t: t.clone() });
        }
        let room = t - &s;
        let exp = s > half;
        let mut k_load = Rat::zero();
        for (j, &tj) in cl.jobs.iter().enumerate() {
            let tj = Rat::from(tj);
            if tj > half {
                out.big[i].push(j);
            } else {
                out.small[i].push(j);
                if !exp && &s + &tj > half {
                    out.k[i].push(j);
                    k_load += &tj;
                }
            }
            if &s + &tj > half {
                out.l[i].push(j);
            }
        }
        let p = Rat::from(cl.proc_sum());
        let mi = if exp {
            count_u64(&(&p / &room).ceil())
        } else {
            (out.big[i].len() as u64).saturating_add(count_u64(&(k_load / &room).ceil()))
        };
        out.x.push(p - room.mul_int(mi));
        out.machines.push(mi);
        out.expensive.push(exp);
    }
    Ok(out)
}

fn below(tmin: &Rat) -> Verdict {
    Verdict::Reject(RejectReason::BelowLowerBound { bound: tmin.clone() })
}

fn verdict_with(inst: &Instance, t: &Rat, tmin: &Rat) -> (Verdict, Option<NonpCounts>) {
    if !t.is_positive() {
        return (below(tmin), None);
    }
    if is_trivial(inst) {
        return (if t < tmin { below(tmin) } else { Verdict::Accept }, None);
    }
    let Ok(counts) = counts_nonp(inst, t) else {
        return (below(tmin), None);
    };
    match check(inst, t, counts.load(inst), counts.needed()) {
        Verdict::Accept if t < tmin => (below(tmin), None),
        v => (v, Some(counts)),
    }
}

pub fn check_nonp(inst: &Instance, t: &Rat) -> Verdict {
    verdict_with(inst, t, &lower_bound_tmin(inst, Variant::NonPreemptive)).0
}

/// Either a non-preemptive schedule of makespan at most `3T/2` or a proof that `T < OPT`.
pub fn dual_nonp(inst: &Instance, t: &Rat) -> DualOutcome {
    let tmin = lower_bound_tmin(inst, Variant::NonPreemptive);
    match verdict_with(inst, t, &tmin) {
        (Verdict::Reject(reason), _) => DualOutcome::Rejected { guess: t.clone(), reason },
        (Verdict::Accept, None) => DualOutcome::Accepted { schedule: one_job_per_machine(inst), guess: t.clone() },
        (Verdict::Accept, Some(counts)) => {
            DualOutcome::Accepted { schedule: build_nonp(inst, t, &counts), guess: t.clone() }
        }
    }
}

struct Board {
    machines: Vec<Vec<Item>>,
    loads: Vec<Rat>,
}

impl Board {
    fn open(&mut self, class: usize, inst: &Instance) -> usize {
        self.machines.push(vec![Item::setup(class)]);
        self.loads.push(inst.setup(class));
        self.machines.len() - 1
    }

    fn push(&mut self, u: usize, it: Item, inst: &Instance) {
        self.loads[u] += it.dur(inst);
        self.machines[u].push(it);
    }

    /// Wraps whole jobs of one class onto fresh machines with a setup each, cut at `t`.
    fn wrap(&mut self, inst: &Instance, class: usize, jobs: &[usize], t: &Rat) -> usize {
        let mut u = self.open(class, inst);
        for &j in jobs {
            let mut rest = inst.job(class, j);
            let mut cut = false;
            while rest.is_positive() {
                if self.loads[u] >= *t {
                    u = self.open(class, inst);
                }
                let room = t - &self.loads[u];
                if rest <= room {
                    self.push(u, Item::job(class, j, rest, cut, false), inst);
                    break;
                }
                self.push(u, Item::job(class, j, room.clone(), true, !cut), inst);
                cut = true;
                rest -= room;
            }
        }
        u
    }
}

fn build_nonp(inst: &Instance, t: &Rat, counts: &NonpCounts) -> Schedule {
    let m = inst.m();
    let mut board = Board { machines: Vec::with_capacity(m), loads: Vec::with_capacity(m) };
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); inst.c()];

    // step 1: the jobs with s_i + t_j > T/2 on m_i machines per class
    for i in 0..inst.c() {
        if counts.expensive[i] {
            let all: Vec<usize> = (0..inst.class(i).jobs.len()).collect();
            board.wrap(inst, i, &all, t);
            continue;
        }
        for &j in &counts.big[i] {
            let u = board.open(i, inst);
            board.push(u, Item::job(i, j, inst.job(i, j), false, false), inst);
            candidates[i].push(u);
        }
        if !counts.k[i].is_empty() {
            let last = board.wrap(inst, i, &counts.k[i], t);
            candidates[i].push(last);
        }
    }
    let used = board.machines.len();
    debug_assert_eq!(used as u128, counts.needed());

    // step 2: the remaining jobs of cheap classes on their own machines, cut at T
    let mut residual: Vec<Vec<Item>> = vec![Vec::new(); inst.c()];
    for i in 0..inst.c() {
        if counts.expensive[i] {
            continue;
        }
        let s = inst.setup(i);
        let half = t.half();
        let mut k = 0usize;
        let cand = &candidates[i];
        for (j, &tj) in inst.class(i).jobs.iter().enumerate() {
            if &s + Rat::from(tj) > half {
                continue;
            }
            let mut rest = Rat::from(tj);
            let mut cut = false;
            loop {
                while k < cand.len() && board.loads[cand[k]] >= *t {
                    k += 1;
                }
                if k == cand.len() {
                    residual[i].push(Item::job(i, j, rest, cut, false));
                    break;
                }
                let u = cand[k];
                let room = t - &board.loads[u];
                if rest <= room {
                    board.push(u, Item::job(i, j, rest, cut, false), inst);
                    break;
                }
                board.push(u, Item::job(i, j, room.clone(), true, !cut), inst);
                cut = true;
                rest -= room;
            }
        }
        let left: Rat = residual[i].iter().map(|it| it.dur(inst)).sum();
        assert_eq!(left, counts.x[i].clone().max(Rat::zero()), "residual of class {i} differs from x_i");
    }

    // step 3: one new setup per class with residual load, next fit over the open machines
    board.machines.resize(m, Vec::new());
    board.loads.resize(m, Rat::zero());
    let mut targets: Vec<usize> = (0..used).filter(|&u| board.loads[u] < *t).collect();
    targets.extend(used..m);
    let start: Vec<Rat> = targets.iter().map(|&u| board.loads[u].clone()).collect();
    let mut seq = Vec::new();
    for (i, r) in residual.into_iter().enumerate() {
        if !r.is_empty() {
            seq.push(Item::setup(i));
            seq.extend(r);
        }
    }
    next_fit_relay(inst, &mut board.machines, &start, &targets, seq, t);

    // step 4: cut jobs whose lowest part is last on its machine come back whole
    let mut holders: std::collections::HashMap<(usize, usize), Vec<usize>> = std::collections::HashMap::new();
    for (u, list) in board.machines.iter().enumerate() {
        for it in list {
            if let Kind::Job { job, piece: true, .. } = it.kind {
                let h = holders.entry((it.class, job)).or_default();
                if h.last() != Some(&u) {
                    h.push(u);
                }
            }
        }
    }
    for u in 0..m {
        let Some(Item { class, kind: Kind::Job { job, first: true, .. } }) = board.machines[u].last().cloned() else {
            continue;
        };
        let whole = Item::job(class, job, inst.job(class, job), false, false);
        *board.machines[u].last_mut().unwrap() = whole;
        for &v in holders.get(&(class, job)).into_iter().flatten() {
            board.machines[v].retain(|it| !matches!(it.kind, Kind::Job { job: b, piece: true, .. } if it.class == class && b == job));
        }
    }
    debug_assert!(board
        .machines
        .iter()
        .flatten()
        .all(|it| !matches!(it.kind, Kind::Job { piece: true, .. })));
    let fixed = tidy(&mut board.machines);
    debug_assert_eq!(fixed, 0, "a job was left without its setup");
    render(inst, board.machines)
}

/// Smallest accepted integer guess by binary search in `[ceil T_min, ceil 2 T_min]`.
pub fn exact_integer_search_nonp(inst: &Instance) -> SearchResult {
    let tmin = lower_bound_tmin(inst, Variant::NonPreemptive);
    let mut probes = Vec::new();
    let mut probe = |t: &Rat| {
        let ok = verdict_with(inst, t, &tmin).0.is_accept();
        probes.push(Probe { t: t.clone(), accepted: ok });
        ok
    };
    let first = Rat::int(tmin.ceil());
    let t = if probe(&first) {
        first
    } else {
        let mut lo = first;
        let mut hi = Rat::int(tmin.mul_int(2).ceil());
        let base = lo.clone();
        let len = count_u64(&(&hi - &lo).floor()).saturating_sub(1) as usize;
        narrow(len, |k| &base + Rat::from(k as u64 + 1), &mut lo, &mut hi, &mut probe);
        hi
    };
    let schedule = dual_nonp(inst, &t).into_schedule().expect("twice the lower bound is accepted");
    // the optimum is integral and every smaller integer was rejected
    SearchResult { lower: t.clone(), t, schedule, probes, max_jumps_per_class: 0 }
}
