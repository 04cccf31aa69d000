//! Searches over the makespan guess, shared by all variants.

use crate::classes::lower_bound_tmin;
use crate::dual::{DualOutcome, Probe, Verdict};
use crate::model::{Instance, Schedule, Variant};
use crate::nonpreemptive::{check_nonp, dual_nonp, exact_integer_search_nonp, next_fit_two_approx};
use crate::preemptive::{check_pmtn, class_jump_pmtn, dual_pmtn_with, NiceMode};
use crate::rat::Rat;
use crate::splittable::{check_split, class_jump_split, dual_split, two_approx_split};

pub use crate::dual::SearchResult;

/// Mode of the preemptive dual inside searches. Its machine counts jump at
/// `2(s_i + P_i)/k`, which the class jumping search relies on.
pub const SEARCH_MODE: NiceMode = NiceMode::Gamma;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(Rat),
}

/// Dual test of variant `v` as used by the searches.
pub fn dual(inst: &Instance, v: Variant, t: &Rat) -> DualOutcome {
    match v {
        Variant::Splittable => dual_split(inst, t),
        Variant::Preemptive => dual_pmtn_with(inst, t, SEARCH_MODE),
        Variant::NonPreemptive => dual_nonp(inst, t),
    }
}

/// Accept/reject of `dual` without building the schedule.
pub fn verdict(inst: &Instance, v: Variant, t: &Rat) -> Verdict {
    match v {
        Variant::Splittable => check_split(inst, t),
        Variant::Preemptive => check_pmtn(inst, t, SEARCH_MODE),
        Variant::NonPreemptive => check_nonp(inst, t),
    }
}

/// The linear-time 2-approximation of variant `v`.
pub fn two_approx(inst: &Instance, v: Variant) -> (Schedule, Rat) {
    match v {
        Variant::Splittable => two_approx_split(inst),
        _ => next_fit_two_approx(inst, v),
    }
}

/// The exact 3/2 search of variant `v`: class jumping, or integer bisection for `NonPreemptive`.
pub fn class_jump(inst: &Instance, v: Variant) -> SearchResult {
    match v {
        Variant::Splittable => class_jump_split(inst),
        Variant::Preemptive => class_jump_pmtn(inst),
        Variant::NonPreemptive => exact_integer_search_nonp(inst),
    }
}

/// Probe `T_min`, then bisect `(T_min, 2 T_min]` until `hi <= (1 + eps) lo`.
pub fn epsilon_search(inst: &Instance, v: Variant, eps: &Rat) -> Result<SearchResult, SearchError> {
    if !eps.is_positive() {
        return Err(SearchError::BadEpsilon(eps.clone()));
    }
    let tmin = lower_bound_tmin(inst, v);
    let mut probes = Vec::new();
    let mut probe = |t: &Rat| {
        let ok = verdict(inst, v, t).is_accept();
        probes.push(Probe { t: t.clone(), accepted: ok });
        ok
    };
    if probe(&tmin) {
        let schedule = dual(inst, v, &tmin).into_schedule().expect("accepted by the verdict");
        return Ok(SearchResult { t: tmin.clone(), schedule, lower: tmin, probes, max_jumps_per_class: 0 });
    }
    // 2 T_min is always accepted, so it is not probed
    let mut lo = tmin.clone();
    let mut hi = tmin.mul_int(2);
    let bound = Rat::one() + eps;
    while hi > &bound * &lo {
        let mid = (&lo + &hi).half();
        if probe(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let schedule = dual(inst, v, &hi).into_schedule().expect("twice the lower bound must be accepted");
    Ok(SearchResult { t: hi, schedule, lower: lo, probes, max_jumps_per_class: 0 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub makespan: Rat,
    pub lower: Rat,
    /// `makespan / lower`, an upper bound on the ratio to the optimum.
    pub ratio_bound: Rat,
}

pub fn certified_report(result: &SearchResult) -> Certificate {
    certify(result.schedule.makespan(), result.lower.clone())
}

pub fn certify(makespan: Rat, lower: Rat) -> Certificate {
    assert!(lower.is_positive(), "lower bounds are at least one");
    let ratio_bound = &makespan / &lower;
    Certificate { makespan, lower, ratio_bound }
}
