//! Brute-force references for small instances.
//!
//! There is no exact optimum for the splittable and preemptive variants here;
//! their decision spaces are continuous. For those only the smallest accepted
//! guess over a dense candidate set is available.

use crate::classes::lower_bound_tmin;
use crate::model::{Instance, Variant};
use crate::rat::{count_u64, Rat};
use crate::search::verdict;

pub const MAX_JOBS: usize = 10;
pub const MAX_MACHINES: usize = 4;
pub const MAX_CANDIDATES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for enumeration: n = {n}, m = {m} (limits {MAX_JOBS}, {MAX_MACHINES})")]
    TooLarge { n: usize, m: usize },
    #[error("{0} candidate guesses exceed the budget of {MAX_CANDIDATES}")]
    TooManyCandidates(usize),
}

/// Exact non-preemptive optimum by enumerating job to machine assignments.
pub fn exact_nonp(inst: &Instance) -> Result<u64, OracleError> {
    let order: Vec<(usize, usize)> = jobs(inst).collect();
    exact_nonp_ordered(inst, &order)
}

fn jobs(inst: &Instance) -> impl Iterator<Item = (usize, usize)> + '_ {
    inst.classes().iter().enumerate().flat_map(|(i, c)| (0..c.jobs.len()).map(move |j| (i, j)))
}

/// Same as `exact_nonp`, assigning jobs in the given order.
pub fn exact_nonp_ordered(inst: &Instance, order: &[(usize, usize)]) -> Result<u64, OracleError> {
    let (n, m) = (inst.n(), inst.m());
    if n > MAX_JOBS || m > MAX_MACHINES {
        return Err(OracleError::TooLarge { n, m });
    }
    assert_eq!(order.len(), n);
    let mut st = Enum {
        inst,
        order,
        loads: vec![0; m],
        present: vec![vec![0u32; inst.c()]; m],
        best: u64::MAX,
    };
    st.go(0, 0);
    Ok(st.best)
}

struct Enum<'a> {
    inst: &'a Instance,
    order: &'a [(usize, usize)],
    loads: Vec<u64>,
    present: Vec<Vec<u32>>,
    best: u64,
}

impl Enum<'_> {
    fn go(&mut self, k: usize, open: usize) {
        let cur = *self.loads.iter().max().unwrap();
        if cur >= self.best {
            return;
        }
        if k == self.order.len() {
            self.best = cur;
            return;
        }
        let (i, j) = self.order[k];
        let c = self.inst.class(i);
        let t = c.jobs[j];
        // empty machines are interchangeable, so only the first one is tried
        let limit = (open + 1).min(self.loads.len());
        for u in 0..limit {
            let add = t + if self.present[u][i] == 0 { c.setup } else { 0 };
            self.loads[u] += add;
            self.present[u][i] += 1;
            self.go(k + 1, open.max(u + 1));
            self.present[u][i] -= 1;
            self.loads[u] -= add;
        }
    }
}

/// Candidate guesses for `v` in `[T_min, 2 T_min]`, sorted, with midpoints.
pub fn scan_candidates(inst: &Instance, v: Variant) -> Result<Vec<Rat>, OracleError> {
    let tmin = lower_bound_tmin(inst, v);
    let top = tmin.mul_int(2);
    if v == Variant::NonPreemptive {
        let lo = count_u64(&tmin.ceil());
        let hi = count_u64(&top.ceil());
        let len = (hi - lo + 1) as usize;
        if len > MAX_CANDIDATES {
            return Err(OracleError::TooManyCandidates(len));
        }
        return Ok((lo..=hi).map(Rat::from).collect());
    }
    let kmax = (inst.m() + 2 * inst.n()) as u64;
    let budget = inst.c() * (kmax as usize) * 2 + inst.n() * 2 + 8;
    if budget > MAX_CANDIDATES {
        return Err(OracleError::TooManyCandidates(budget));
    }
    let n_all = Rat::from(inst.total_load());
    let mut c = vec![tmin.clone(), top.clone(), n_all.div_int(inst.m() as u64), n_all];
    for cl in inst.classes() {
        let s = Rat::from(cl.setup);
        let p = Rat::from(cl.proc_sum());
        c.push(s.mul_int(2));
        for k in 1..=kmax {
            c.push(p.mul_int(2).div_int(k));
        }
        if v == Variant::Preemptive {
            let sp = &s + &p;
            c.push(s.mul_int(4));
            c.push(sp.clone());
            c.push(sp.scale(4, 3));
            for &t in &cl.jobs {
                c.push((&s + Rat::from(t)).mul_int(2));
            }
            for k in 1..=kmax {
                c.push(sp.mul_int(2).div_int(k + 2));
            }
        }
    }
    c.retain(|t| *t >= tmin && *t <= top);
    c.sort();
    c.dedup();
    let mids: Vec<Rat> = c.windows(2).map(|w| (&w[0] + &w[1]).half()).collect();
    c.extend(mids);
    c.sort();
    Ok(c)
}

/// Smallest candidate guess the variant's dual accepts.
pub fn min_accepted_scan(inst: &Instance, v: Variant) -> Result<Rat, OracleError> {
    let cands = scan_candidates(inst, v)?;
    Ok(cands
        .into_iter()
        .find(|t| verdict(inst, v, t).is_accept())
        .expect("twice the lower bound is accepted"))
}
