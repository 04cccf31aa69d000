//! Preemptive variant: jobs may be cut, but pieces of one job never overlap in time.
//!
//! Classes of `I_exp^0` get one large machine each. Cheap classes with small
//! setups may put load at the bottom of those machines; which classes stay
//! entirely off them is decided by a continuous knapsack.

use crate::classes::{counts_for, lower_bound_tmin, Counts, Prepared};
use crate::dual::{
    check, gather, is_trivial, narrow, one_job_per_machine, DualOutcome, SearchResult, Probe, RejectReason,
    Verdict,
};
use crate::model::{Instance, Placement, Schedule, Variant};
use crate::rat::{count_u64, Rat};
use crate::wrap::{wrap, Batch, Gap, WrapError, WrapItem, WrapSequence, WrapTemplate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackItem {
    pub class: usize,
    pub profit: Rat,
    pub weight: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackSolution {
    /// Fraction taken of each item, in input order.
    pub x: Vec<Rat>,
    pub value: Rat,
    /// Index of the one item with `0 < x < 1`, if any.
    pub split: Option<usize>,
}

/// Greedy by profit density; zero-weight items are taken first.
pub fn continuous_knapsack(items: &[KnapsackItem], capacity: &Rat) -> KnapsackSolution {
    assert!(!capacity.is_negative(), "negative knapsack capacity");
    let mut order: Vec<usize> = (0..items.len()).collect();
    // p_a / w_a > p_b / w_b  <=>  p_a w_b > p_b w_a, with w = 0 as infinite density
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&items[a], &items[b]);
        let lhs = &ia.profit * &ib.weight;
        let rhs = &ib.profit * &ia.weight;
        match (ia.weight.is_zero(), ib.weight.is_zero()) {
            (true, true) => a.cmp(&b),
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => rhs.cmp(&lhs).then(a.cmp(&b)),
        }
    });
    let mut x = vec![Rat::zero(); items.len()];
    let mut left = capacity.clone();
    let mut value = Rat::zero();
    let mut split = None;
    for k in order {
        let it = &items[k];
        if it.weight <= left {
            x[k] = Rat::one();
            left -= &it.weight;
            value += &it.profit;
        } else {
            if left.is_positive() {
                let f = &left / &it.weight;
                value += &it.profit * &f;
                x[k] = f;
                split = Some(k);
            }
            break;
        }
    }
    KnapsackSolution { x, value, split }
}

/// How many machines a class of `I_exp^+` gets in the nice construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NiceMode {
    /// `alpha'` machines with gaps of height `T - s`.
    #[default]
    AlphaFloor,
    /// `gamma` machines with gaps of height `T/2`; never more machines or load than `AlphaFloor`.
    Gamma,
}

impl NiceMode {
    fn machines(self, k: &Counts) -> u64 {
        match self {
            NiceMode::AlphaFloor => k.alpha_floor,
            NiceMode::Gamma => k.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PmtnError {
    #[error("instance is not nice for the guess: I_exp^0 = {0:?}")]
    NotNice(Vec<usize>),
}

/// Input of the nice construction: whole expensive classes and cheap batches.
struct NiceInput {
    exp_plus: Vec<(usize, Counts)>,
    exp_minus: Vec<usize>,
    cheap: Vec<Batch>,
}

impl NiceInput {
    fn load_and_machines(&self, inst: &Instance, mode: NiceMode) -> (Rat, u128) {
        let mut load = Rat::zero();
        let mut needed = self.exp_minus.len().div_ceil(2) as u128;
        for (i, k) in &self.exp_plus {
            let a = mode.machines(k);
            needed += a as u128;
            load += inst.setup(*i).mul_int(a) + Rat::from(inst.class(*i).proc_sum());
        }
        for &i in &self.exp_minus {
            load += inst.setup(i) + Rat::from(inst.class(i).proc_sum());
        }
        for b in &self.cheap {
            load += b.load();
        }
        (load, needed)
    }
}

/// Place a nice instance on machines `base .. base + avail`.
fn place_nice(
    inst: &Instance,
    t: &Rat,
    mode: NiceMode,
    input: &NiceInput,
    base: usize,
    avail: usize,
) -> Result<Vec<(usize, Placement)>, WrapError> {
    let half = t.half();
    let top = t.scale(3, 2);
    let mut placed = Vec::new();
    let mut u = base;

    // step 1: I_exp^+ wrapped up to a common line, the last machine folded onto the one before
    for (i, k) in &input.exp_plus {
        let s = inst.setup(*i);
        let (gaps, keep, lift) = match mode {
            NiceMode::AlphaFloor => (k.alpha, k.alpha_floor, t - &s),
            NiceMode::Gamma => (k.beta, k.gamma, half.clone()),
        };
        let end = match mode {
            NiceMode::AlphaFloor => t.clone(),
            NiceMode::Gamma => &s + &half,
        };
        let tpl = WrapTemplate::new(
            (0..gaps as usize)
                .map(|r| Gap::new(u + r, if r == 0 { Rat::zero() } else { s.clone() }, end.clone()))
                .collect(),
        )?;
        let (out, _) = wrap(&WrapSequence::of_classes(inst, &[*i]), &tpl)?;
        let last = u + gaps as usize - 1;
        for (m, p) in out.placed {
            if m == last && keep < gaps {
                if !p.is_setup() {
                    placed.push((u + keep as usize - 1, p.shifted(&lift)));
                }
            } else {
                placed.push((m, p));
            }
        }
        u += keep as usize;
    }

    // step 2: I_exp^- two classes per machine, an odd one alone on mu
    let mut pairs = input.exp_minus.chunks(2);
    let mut odd = false;
    for pair in pairs.by_ref() {
        let mut at = Rat::zero();
        for &i in pair {
            let s = inst.setup(i);
            placed.push((u, Placement::setup(i, at.clone(), s.clone())));
            at += s;
            for (j, &tj) in inst.class(i).jobs.iter().enumerate() {
                placed.push((u, Placement::piece(i, j, 0, at.clone(), Rat::from(tj))));
                at += Rat::from(tj);
            }
        }
        odd = pair.len() == 1;
        u += 1;
    }

    // step 3: cheap classes from mu on
    let q = WrapSequence::new(input.cheap.iter().filter(|b| !b.items.is_empty()).cloned().collect());
    if !q.is_empty() {
        let mut gaps = Vec::new();
        if odd {
            gaps.push(Gap::new(u - 1, t.clone(), top.clone()));
        }
        for m in u..base + avail {
            gaps.push(Gap::new(m, half.clone(), top.clone()));
        }
        let (out, _) = wrap(&q, &WrapTemplate::new(gaps)?)?;
        placed.extend(out.placed);
    }
    Ok(placed)
}

fn reject(t: &Rat, reason: RejectReason) -> DualOutcome {
    DualOutcome::Rejected { guess: t.clone(), reason }
}

fn finish(placed: Vec<(usize, Placement)>, m: usize) -> Schedule {
    let used = placed.iter().map(|(u, _)| u + 1).max().unwrap_or(0);
    debug_assert!(used <= m);
    let mut s = Schedule { machines: gather(placed, used), compressed: Vec::new() };
    s.renumber_pieces();
    s
}

/// Dual test for nice instances, `I_exp^0` empty for `t`.
pub fn dual_nice(inst: &Instance, t: &Rat, mode: NiceMode) -> Result<DualOutcome, PmtnError> {
    let tmin = lower_bound_tmin(inst, Variant::Preemptive);
    let part = Structure::new(inst, &Prepared::new(inst), t);
    if !part.exp_zero.is_empty() {
        return Err(PmtnError::NotNice(part.exp_zero));
    }
    let input = NiceInput {
        exp_plus: part.exp_plus.iter().map(|&i| (i, part.counts[i].expect("T > s"))).collect(),
        exp_minus: part.exp_minus.clone(),
        cheap: part.chp.iter().map(|&i| Batch::whole(inst, i)).collect(),
    };
    let (load, needed) = input.load_and_machines(inst, mode);
    if let Verdict::Reject(reason) = check(inst, t, load, needed) {
        return Ok(reject(t, reason));
    }
    if *t < tmin {
        return Ok(reject(t, RejectReason::BelowLowerBound { bound: tmin }));
    }
    let placed = place_nice(inst, t, mode, &input, 0, inst.m()).expect("nice construction fits");
    Ok(DualOutcome::Accepted { schedule: finish(placed, inst.m()), guess: t.clone() })
}

/// The partition for one guess, with big-job counts from sorted jobs.
#[derive(Debug, Clone)]
struct Structure {
    exp_plus: Vec<usize>,
    exp_zero: Vec<usize>,
    exp_minus: Vec<usize>,
    chp: Vec<usize>,
    chp_plus: Vec<usize>,
    chp_minus: Vec<usize>,
    /// `(|C_i^*|, P(C_i^*))` for classes of `I_chp^-`.
    big: Vec<(u64, u128)>,
    counts: Vec<Option<Counts>>,
}

impl Structure {
    fn new(inst: &Instance, pre: &Prepared, t: &Rat) -> Self {
        let half = t.half();
        let quarter = t.div_int(4);
        let three_q = t.scale(3, 4);
        let mut st = Structure {
            exp_plus: vec![],
            exp_zero: vec![],
            exp_minus: vec![],
            chp: vec![],
            chp_plus: vec![],
            chp_minus: vec![],
            big: vec![(0, 0); inst.c()],
            counts: Vec::with_capacity(inst.c()),
        };
        for i in 0..inst.c() {
            let s = Rat::from(pre.setup[i]);
            let p = Rat::from(pre.proc[i]);
            let sp = &s + &p;
            if s > half {
                if *t <= sp {
                    st.exp_plus.push(i);
                } else if sp > three_q {
                    st.exp_zero.push(i);
                } else {
                    st.exp_minus.push(i);
                }
            } else {
                st.chp.push(i);
                if s >= quarter {
                    st.chp_plus.push(i);
                } else {
                    st.chp_minus.push(i);
                    st.big[i] = pre.above(i, &(&half - &s));
                }
            }
            st.counts.push(counts_for(&s, &p, t));
        }
        st
    }
}

#[derive(Debug, Clone)]
enum Residual {
    /// No large machines.
    Nice,
    /// Knapsack over `I_chp^*`: fraction per class, split class.
    Knapsack { star: Vec<usize>, x: Vec<Rat>, split: Option<usize> },
    /// Everything of `I_chp^*` fits outside; `room` is left for `I_chp^- \ I_chp^*`.
    Greedy { star: Vec<usize>, rest: Vec<usize>, room: Rat },
}

#[derive(Debug, Clone)]
struct Plan {
    st: Structure,
    residual: Residual,
}

/// `L_pmtn`, `m'` and the residual split for one guess, before any rejection.
#[derive(Debug, Clone)]
struct Eval {
    st: Structure,
    /// `None` when the obligatory load outside large machines exceeds the free time.
    load: Option<Rat>,
    needed: u128,
    residual: Residual,
}

fn evaluate(inst: &Instance, pre: &Prepared, t: &Rat, mode: NiceMode) -> Eval {
    let m = inst.m();
    let st = Structure::new(inst, pre, t);
    let half = t.half();
    let s = |i: usize| Rat::from(pre.setup[i]);
    let p = |i: usize| Rat::from(pre.proc[i]);
    let k = |i: usize| mode.machines(&st.counts[i].expect("T > s for expensive classes"));

    let l = st.exp_zero.len();
    let mut needed = (l + st.exp_minus.len().div_ceil(2)) as u128;
    let mut load = Rat::from(inst.total_proc());
    for &i in &st.exp_plus {
        needed += k(i) as u128;
        load += s(i).mul_int(k(i));
    }
    for i in 0..inst.c() {
        if st.exp_plus.binary_search(&i).is_err() {
            load += s(i);
        }
    }
    if l == 0 {
        return Eval { st, load: Some(load), needed, residual: Residual::Nice };
    }

    // free time for I_chp^- outside the large machines
    let mut free = t.mul_int(m.saturating_sub(l) as u64);
    for &i in &st.exp_plus {
        free -= s(i).mul_int(k(i)) + p(i);
    }
    for &i in st.exp_minus.iter().chain(&st.chp_plus) {
        free -= s(i) + p(i);
    }
    let star: Vec<usize> = st.chp_minus.iter().copied().filter(|&i| st.big[i].0 > 0).collect();
    let rest: Vec<usize> = st.chp_minus.iter().copied().filter(|&i| st.big[i].0 == 0).collect();
    let star_load: Rat = star.iter().map(|&i| s(i) + p(i)).sum();

    if free >= star_load {
        let room = free - star_load;
        return Eval { st, load: Some(load), needed, residual: Residual::Greedy { star, rest, room } };
    }
    // obligatory load outside large machines
    let oblig = |i: usize| {
        let (cnt, sum) = st.big[i];
        Rat::from(sum) - (&half - s(i)).mul_int(cnt)
    };
    let l_star: Rat = star.iter().map(|&i| s(i) + oblig(i)).sum();
    let y = &free - &l_star;
    if y.is_negative() {
        let residual = Residual::Knapsack { star, x: vec![], split: None };
        return Eval { st, load: None, needed, residual };
    }
    let items: Vec<KnapsackItem> =
        star.iter().map(|&i| KnapsackItem { class: i, profit: s(i), weight: p(i) - oblig(i) }).collect();
    let sol = continuous_knapsack(&items, &y);
    for (idx, &i) in star.iter().enumerate() {
        if sol.x[idx].is_zero() {
            load += s(i);
        }
    }
    Eval { st, load: Some(load), needed, residual: Residual::Knapsack { star, x: sol.x, split: sol.split } }
}

fn plan(inst: &Instance, pre: &Prepared, t: &Rat, mode: NiceMode) -> Result<Plan, RejectReason> {
    let ev = evaluate(inst, pre, t, mode);
    let capacity = t.mul_int(inst.m() as u64);
    if (inst.m() as u128) < ev.needed {
        return Err(RejectReason::Machines { needed: ev.needed, available: inst.m() });
    }
    // a free time deficit outside large machines counts as load beyond capacity
    let load = ev.load.unwrap_or_else(|| &capacity + Rat::one());
    match check(inst, t, load, ev.needed) {
        Verdict::Accept => Ok(Plan { st: ev.st, residual: ev.residual }),
        Verdict::Reject(r) => Err(r),
    }
}

struct KItem {
    class: usize,
    job: usize,
    dur: Rat,
}

fn build_pmtn(inst: &Instance, t: &Rat, mode: NiceMode, pl: &Plan) -> Schedule {
    let m = inst.m();
    let st = &pl.st;
    let half = t.half();
    let quarter = t.div_int(4);
    let l = st.exp_zero.len();
    let whole = |i: usize| Batch::whole(inst, i);
    let exp_plus: Vec<(usize, Counts)> = st.exp_plus.iter().map(|&i| (i, st.counts[i].unwrap())).collect();

    if let Residual::Nice = pl.residual {
        let input = NiceInput { exp_plus, exp_minus: st.exp_minus.clone(), cheap: st.chp.iter().map(|&i| whole(i)).collect() };
        let placed = place_nice(inst, t, mode, &input, 0, m).expect("nice construction fits");
        return finish(placed, m);
    }

    // cheap batches of the nice part by class, and the residual K with its leading class
    let mut nice_cheap: Vec<Batch> = st.chp_plus.iter().map(|&i| whole(i)).collect();
    let mut k_items: Vec<KItem> = Vec::new();
    let mut lead: Option<usize> = None;

    match &pl.residual {
        Residual::Nice => unreachable!(),
        Residual::Knapsack { star, x, split } => {
            lead = split.map(|k| star[k]);
            for (idx, &i) in star.iter().enumerate() {
                let s = inst.setup(i);
                let cut = &half - &s;
                let xi = &x[idx];
                let mut b = Batch { class: i, setup: s.clone(), items: vec![] };
                if xi == &Rat::one() {
                    nice_cheap.push(whole(i));
                    continue;
                }
                let mut outside = Rat::zero();
                for (j, &tj) in inst.class(i).jobs.iter().enumerate() {
                    let tj = Rat::from(tj);
                    let is_big = tj > cut;
                    // j^(2) is what must run outside large machines
                    let (inner, head) = if is_big { (&tj - &cut, cut.clone()) } else { (Rat::zero(), tj.clone()) };
                    let out = &inner + xi * &head;
                    let rest = &tj - &out;
                    if out.is_positive() {
                        outside += &out;
                        b.items.push(WrapItem { job: j, dur: out });
                    }
                    if rest.is_positive() {
                        assert!(&s + &rest <= half, "residual piece too long for a large machine bottom");
                        k_items.push(KItem { class: i, job: j, dur: rest });
                    }
                }
                if xi.is_positive() {
                    let (cnt, sum) = st.big[i];
                    let oblig = Rat::from(sum) - cut.mul_int(cnt);
                    let w = Rat::from(inst.class(i).proc_sum()) - &oblig;
                    assert_eq!(outside, &oblig + xi * &w, "split class bookkeeping");
                }
                nice_cheap.push(b);
            }
            for &i in &st.chp_minus {
                if star.binary_search(&i).is_err() {
                    for (j, &tj) in inst.class(i).jobs.iter().enumerate() {
                        k_items.push(KItem { class: i, job: j, dur: Rat::from(tj) });
                    }
                }
            }
        }
        Residual::Greedy { star, rest, room } => {
            for &i in star {
                nice_cheap.push(whole(i));
            }
            let mut room = room.clone();
            for &i in rest {
                let s = inst.setup(i);
                let jobs = &inst.class(i).jobs;
                if lead.is_none() && room.is_positive() {
                    let total = &s + Rat::from(inst.class(i).proc_sum());
                    if total <= room {
                        room -= total;
                        nice_cheap.push(whole(i));
                        continue;
                    }
                    // the straddling class
                    lead = Some(i);
                    let mut b = Batch { class: i, setup: s.clone(), items: vec![] };
                    let mut fill = if room > s { &room - &s } else { Rat::zero() };
                    room = Rat::zero();
                    for (j, &tj) in jobs.iter().enumerate() {
                        let tj = Rat::from(tj);
                        let take = if tj <= fill { tj.clone() } else { fill.clone() };
                        fill -= &take;
                        let left = &tj - &take;
                        if take.is_positive() {
                            b.items.push(WrapItem { job: j, dur: take });
                        }
                        if left.is_positive() {
                            k_items.push(KItem { class: i, job: j, dur: left });
                        }
                    }
                    nice_cheap.push(b);
                    continue;
                }
                for (j, &tj) in jobs.iter().enumerate() {
                    k_items.push(KItem { class: i, job: j, dur: Rat::from(tj) });
                }
            }
        }
    }
    nice_cheap.sort_by_key(|b| b.class);

    let input = NiceInput { exp_plus, exp_minus: st.exp_minus.clone(), cheap: nice_cheap };
    let mut placed = place_nice(inst, t, mode, &input, l, m - l).expect("nice part fits outside large machines");

    // large machines: the I_exp^0 class from T/2 on
    for (u, &i) in st.exp_zero.iter().enumerate() {
        let s = inst.setup(i);
        placed.push((u, Placement::setup(i, half.clone(), s.clone())));
        let mut at = &half + &s;
        for (j, &tj) in inst.class(i).jobs.iter().enumerate() {
            placed.push((u, Placement::piece(i, j, 0, at.clone(), Rat::from(tj))));
            at += Rat::from(tj);
        }
    }

    // K by class, leading class first
    k_items.sort_by_key(|it| (Some(it.class) != lead, it.class));
    let mut u = 0usize;
    let mut small: Vec<Batch> = Vec::new();
    for it in k_items {
        assert!(inst.setup(it.class) + &it.dur <= half, "large machine bottom item exceeds T/2");
        if it.dur > quarter {
            assert!(u < l, "more big residual jobs than large machines");
            let s = inst.setup(it.class);
            placed.push((u, Placement::setup(it.class, Rat::zero(), s.clone())));
            placed.push((u, Placement::piece(it.class, it.job, 0, s, it.dur)));
            u += 1;
        } else {
            match small.last_mut() {
                Some(b) if b.class == it.class => b.items.push(WrapItem { job: it.job, dur: it.dur }),
                _ => small.push(Batch {
                    class: it.class,
                    setup: inst.setup(it.class),
                    items: vec![WrapItem { job: it.job, dur: it.dur }],
                }),
            }
        }
    }
    if !small.is_empty() {
        let gaps = (u..l)
            .map(|v| Gap::new(v, if v == u { Rat::zero() } else { quarter.clone() }, half.clone()))
            .collect();
        let tpl = WrapTemplate::new(gaps).expect("valid gaps");
        let (out, _) = wrap(&WrapSequence::new(small), &tpl).expect("small residual jobs fit below large machines");
        placed.extend(out.placed);
    }
    finish(placed, m)
}

/// Problem data reused across the probes of one search.
#[derive(Debug, Clone)]
pub struct PmtnData {
    pre: Prepared,
    tmin: Rat,
    mode: NiceMode,
}

impl PmtnData {
    pub fn new(inst: &Instance, mode: NiceMode) -> Self {
        PmtnData { pre: Prepared::new(inst), tmin: lower_bound_tmin(inst, Variant::Preemptive), mode }
    }

    pub fn verdict(&self, inst: &Instance, t: &Rat) -> Verdict {
        match self.plan(inst, t) {
            Ok(_) => Verdict::Accept,
            Err(r) => Verdict::Reject(r),
        }
    }

    fn plan(&self, inst: &Instance, t: &Rat) -> Result<Option<Plan>, RejectReason> {
        if !t.is_positive() || *t < self.tmin {
            // report the construction's own reason where it is defined
            if *t > Rat::from(inst.s_max()) && !is_trivial(inst) {
                plan(inst, &self.pre, t, self.mode)?;
            }
            return Err(RejectReason::BelowLowerBound { bound: self.tmin.clone() });
        }
        if is_trivial(inst) {
            return Ok(None);
        }
        plan(inst, &self.pre, t, self.mode).map(Some)
    }

    /// `(L_pmtn, m')` for `t`, `None` where the load is undefined.
    fn load(&self, inst: &Instance, t: &Rat) -> Option<(Rat, u128)> {
        let ev = evaluate(inst, &self.pre, t, self.mode);
        ev.load.map(|l| (l, ev.needed))
    }

    pub fn dual(&self, inst: &Instance, t: &Rat) -> DualOutcome {
        match self.plan(inst, t) {
            Err(reason) => reject(t, reason),
            Ok(None) => DualOutcome::Accepted { schedule: one_job_per_machine(inst), guess: t.clone() },
            Ok(Some(pl)) => DualOutcome::Accepted { schedule: build_pmtn(inst, t, self.mode, &pl), guess: t.clone() },
        }
    }
}

/// Dual test for any instance with `alpha'` machines per class of `I_exp^+`.
pub fn dual_pmtn(inst: &Instance, t: &Rat) -> DualOutcome {
    dual_pmtn_with(inst, t, NiceMode::AlphaFloor)
}

pub fn dual_pmtn_with(inst: &Instance, t: &Rat, mode: NiceMode) -> DualOutcome {
    PmtnData::new(inst, mode).dual(inst, t)
}

pub fn check_pmtn(inst: &Instance, t: &Rat, mode: NiceMode) -> Verdict {
    PmtnData::new(inst, mode).verdict(inst, t)
}

fn jump_range(top: &Rat, lo: &Rat, hi: &Rat) -> Option<(u64, u64)> {
    // integers k with lo < top / k < hi
    let k_lo = count_u64(&(top / hi).floor()) + 1;
    let up = top / lo;
    let k_hi = if up.is_integer() { count_u64(&up.floor()).saturating_sub(1) } else { count_u64(&up.floor()) };
    (k_lo <= k_hi).then_some((k_lo, k_hi))
}

/// Search precision of the bisection fallback, relative to the guess.
const FALLBACK_BITS: u64 = 36;

/// Class jumping over the gamma-based construction.
///
/// Partition changes are handled by breakpoint search and jumps of
/// `2(s_i + P_i)/k` by the fastest-class window. Changes of the knapsack zero
/// set are not located; when the load is not constant on the final window
/// the search falls back to bisection.
pub fn class_jump_pmtn(inst: &Instance) -> SearchResult {
    let data = PmtnData::new(inst, NiceMode::Gamma);
    let mut probes = Vec::new();
    let mut probe = |t: &Rat| {
        let ok = data.verdict(inst, t).is_accept();
        probes.push(Probe { t: t.clone(), accepted: ok });
        ok
    };
    let tmin = data.tmin.clone();
    if probe(&tmin) {
        let schedule = data.dual(inst, &tmin).into_schedule().unwrap();
        return SearchResult { t: tmin.clone(), schedule, lower: tmin, probes, max_jumps_per_class: 0 };
    }
    let mut lo = tmin.clone();
    let mut hi = tmin.mul_int(2);
    assert!(probe(&hi), "twice the lower bound must be accepted");

    // breakpoints of the partition and of the big-job sets
    let mut bps = Vec::new();
    for (i, c) in inst.classes().iter().enumerate() {
        let s = Rat::from(c.setup);
        let sp = &s + Rat::from(data.pre.proc[i]);
        bps.push(s.mul_int(2));
        bps.push(s.mul_int(4));
        bps.push(sp.scale(4, 3));
        bps.push(sp);
        for &t in &c.jobs {
            bps.push((&s + Rat::from(t)).mul_int(2));
        }
    }
    bps.retain(|v| *v > lo && *v < hi);
    bps.sort();
    bps.dedup();
    narrow(bps.len(), |k| bps[k].clone(), &mut lo, &mut hi, &mut probe);

    let mid = (&lo + &hi).half();
    let st = Structure::new(inst, &data.pre, &mid);
    let top = |i: usize| (Rat::from(data.pre.setup[i]) + Rat::from(data.pre.proc[i])).mul_int(2);
    let mut max_jumps = 0usize;
    let fastest = st.exp_plus.iter().copied().max_by(|&a, &b| top(a).cmp(&top(b)).then(b.cmp(&a)));
    if let Some(f) = fastest {
        let tf = top(f);
        if let Some((k_lo, k_hi)) = jump_range(&tf, &lo, &hi) {
            let len = (k_hi - k_lo + 1) as usize;
            narrow(len, |x| &tf / Rat::from(k_hi - x as u64), &mut lo, &mut hi, &mut probe);
        }
        let mut jumps = Vec::new();
        for &i in &st.exp_plus {
            let ti = top(i);
            if let Some((k_lo, k_hi)) = jump_range(&ti, &lo, &hi) {
                max_jumps = max_jumps.max((k_hi - k_lo + 1) as usize);
                jumps.extend((k_lo..=k_hi).map(|k| &ti / Rat::from(k)));
            }
        }
        jumps.sort();
        jumps.dedup();
        narrow(jumps.len(), |k| jumps[k].clone(), &mut lo, &mut hi, &mut probe);
    }

    // only the knapsack zero set may still change inside (lo, hi)
    let m = inst.m() as u64;
    let eps = (&hi - &lo) / Rat::int(1u64 << 20);
    let mid = (&lo + &hi).half();
    let inner = data.load(inst, &mid);
    let mut result: Option<Rat> = None;
    if let Some((l_mid, need)) = inner.clone() {
        if need > m as u128 {
            result = Some(hi.clone());
        } else {
            let t_new = l_mid.div_int(m);
            let right = if t_new < hi { t_new.clone() } else { &hi - &eps };
            let same = |t: &Rat| data.load(inst, t) == inner;
            if t_new > lo && same(&(&lo + &eps)) && same(&right) {
                if t_new >= hi {
                    result = Some(hi.clone());
                } else if probe(&t_new) {
                    result = Some(t_new);
                }
            }
        }
    }
    let (t, lower) = match result {
        Some(t) => (t.clone(), t),
        None => {
            while &hi - &lo > lo.div_int(1u64 << FALLBACK_BITS) {
                let mid = (&lo + &hi).half();
                if probe(&mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (hi.clone(), lo.clone())
        }
    };
    let schedule = data.dual(inst, &t).into_schedule().expect("returned guess is accepted");
    SearchResult { t, schedule, lower, probes, max_jumps_per_class: max_jumps }
}
