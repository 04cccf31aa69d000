//! Batch wrapping: pour a sequence of setup-prefixed batches into time gaps,
//! cutting jobs at gap ends and repeating the setup below the next gap.
//!
//! Runs of identical gaps can be handled in compressed form, where a job that
//! covers many whole gaps yields one configuration with a multiplicity.

use crate::model::{Config, Instance, Placement};
use crate::rat::{count_u64, Rat};

/// A free interval `[a, b)` on `machine`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gap {
    pub machine: usize,
    pub a: Rat,
    pub b: Rat,
}

impl Gap {
    pub fn new(machine: usize, a: Rat, b: Rat) -> Self {
        Gap { machine, a, b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WrapError {
    #[error("sequence load {load:?} exceeds template capacity {capacity:?}")]
    Capacity { load: Rat, capacity: Rat },
    #[error("ran past the last gap")]
    Exhausted,
    #[error("invalid template: {0}")]
    Template(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WrapTemplate {
    gaps: Vec<Gap>,
}

impl WrapTemplate {
    /// Machines must strictly increase and every gap must satisfy `0 <= a < b`.
    pub fn new(gaps: Vec<Gap>) -> Result<Self, WrapError> {
        for (r, g) in gaps.iter().enumerate() {
            if g.a.is_negative() || g.a >= g.b {
                return Err(WrapError::Template(format!("gap {r} is not 0 <= a < b")));
            }
            if r > 0 && gaps[r - 1].machine >= g.machine {
                return Err(WrapError::Template(format!("machine of gap {r} does not increase")));
            }
        }
        Ok(WrapTemplate { gaps })
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn capacity(&self) -> Rat {
        self.gaps.iter().map(|g| &g.b - &g.a).sum()
    }
}

/// A job or job piece of the batch's class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrapItem {
    pub job: usize,
    pub dur: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub class: usize,
    pub setup: Rat,
    pub items: Vec<WrapItem>,
}

impl Batch {
    /// The whole class, jobs in input order.
    pub fn whole(inst: &Instance, class: usize) -> Self {
        Batch {
            class,
            setup: inst.setup(class),
            items: inst
                .class(class)
                .jobs
                .iter()
                .enumerate()
                .map(|(job, &t)| WrapItem { job, dur: Rat::from(t) })
                .collect(),
        }
    }

    pub fn load(&self) -> Rat {
        &self.setup + self.items.iter().map(|x| &x.dur).sum::<Rat>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WrapSequence {
    pub batches: Vec<Batch>,
}

impl WrapSequence {
    pub fn new(batches: Vec<Batch>) -> Self {
        WrapSequence { batches }
    }

    /// `[s_i, C_i]` for each listed class.
    pub fn of_classes(inst: &Instance, classes: &[usize]) -> Self {
        WrapSequence { batches: classes.iter().map(|&i| Batch::whole(inst, i)).collect() }
    }

    pub fn load(&self) -> Rat {
        self.batches.iter().map(Batch::load).sum()
    }

    /// Number of setups plus items.
    pub fn len(&self) -> usize {
        self.batches.iter().map(|b| 1 + b.items.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }
}

/// Where wrapping stopped: gap index and time of the next free point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub gap: usize,
    pub t: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WrapOutput {
    /// `(machine, placement)` for explicit gaps, in emission order.
    pub placed: Vec<(usize, Placement)>,
    /// Machines of the parallel block, in gap order.
    pub configs: Vec<Config>,
}

/// `count` identical gaps `[a, b)` on otherwise idle machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelGaps {
    pub a: Rat,
    pub b: Rat,
    pub count: u64,
}

enum Slot {
    Machine(usize),
    Config(usize),
}

struct Engine<'a> {
    gaps: &'a [Gap],
    block: Option<&'a ParallelGaps>,
    seg: usize,
    k: u64,
    a: Rat,
    b: Rat,
    t: Rat,
    slot: Slot,
    out: WrapOutput,
}

impl<'a> Engine<'a> {
    fn start(gaps: &'a [Gap], block: Option<&'a ParallelGaps>) -> Option<Self> {
        let mut e = Engine {
            gaps,
            block,
            seg: 0,
            k: 0,
            a: Rat::zero(),
            b: Rat::zero(),
            t: Rat::zero(),
            slot: Slot::Machine(0),
            out: WrapOutput::default(),
        };
        if let Some(g) = gaps.first() {
            e.enter_gap(g.machine, g.a.clone(), g.b.clone());
            Some(e)
        } else {
            match block {
                Some(pg) if pg.count > 0 => {
                    e.enter_block();
                    Some(e)
                }
                _ => None,
            }
        }
    }

    fn enter_gap(&mut self, machine: usize, a: Rat, b: Rat) {
        self.slot = Slot::Machine(machine);
        self.t = a.clone();
        self.a = a;
        self.b = b;
    }

    fn enter_block(&mut self) {
        let pg = self.block.unwrap();
        self.out.configs.push(Config { config: Vec::new(), mult: 1 });
        self.slot = Slot::Config(self.out.configs.len() - 1);
        self.a = pg.a.clone();
        self.b = pg.b.clone();
        self.t = pg.a.clone();
    }

    fn in_block(&self) -> bool {
        self.seg >= self.gaps.len()
    }

    fn gap_index(&self) -> usize {
        self.seg + self.k as usize
    }

    fn advance(&mut self) -> Result<(), WrapError> {
        if !self.in_block() {
            self.seg += 1;
            if let Some(g) = self.gaps.get(self.seg) {
                let (m, a, b) = (g.machine, g.a.clone(), g.b.clone());
                self.enter_gap(m, a, b);
                return Ok(());
            }
            return match self.block {
                Some(pg) if pg.count > 0 => {
                    self.k = 0;
                    self.enter_block();
                    Ok(())
                }
                _ => Err(WrapError::Exhausted),
            };
        }
        let pg = self.block.unwrap();
        if self.k + 1 < pg.count {
            self.k += 1;
            self.enter_block();
            Ok(())
        } else {
            Err(WrapError::Exhausted)
        }
    }

    fn emit(&mut self, p: Placement) {
        match self.slot {
            Slot::Machine(u) => self.out.placed.push((u, p)),
            Slot::Config(c) => self.out.configs[c].config.push(p),
        }
    }

    fn setup(&mut self, class: usize, s: &Rat) -> Result<(), WrapError> {
        let end = &self.t + s;
        if end <= self.b {
            self.emit(Placement::setup(class, self.t.clone(), s.clone()));
            self.t = end;
        } else {
            self.advance()?;
            self.emit(Placement::setup(class, &self.a - s, s.clone()));
        }
        Ok(())
    }

    /// The while loop of Split, with whole-gap runs inside a parallel block
    /// collapsed into one configuration.
    fn job(&mut self, class: usize, s: &Rat, job: usize, dur: &Rat) -> Result<(), WrapError> {
        let mut d = dur.clone();
        let mut piece = 0usize;
        loop {
            let end = &self.t + &d;
            if end <= self.b {
                self.emit(Placement::piece(class, job, piece, self.t.clone(), d));
                self.t = end;
                return Ok(());
            }
            let head = &self.b - &self.t;
            if head.is_positive() {
                self.emit(Placement::piece(class, job, piece, self.t.clone(), head.clone()));
                piece += 1;
                d -= head;
                self.t = self.b.clone();
            }
            if self.in_block() {
                let pg = self.block.unwrap();
                let w = &pg.b - &pg.a;
                let avail = pg.count - self.k - 1;
                if avail > 0 && d > w {
                    let full = count_u64(&(&d / &w).ceil()) - 1;
                    let take = full.min(avail);
                    self.out.configs.push(Config {
                        config: vec![
                            Placement::setup(class, &pg.a - s, s.clone()),
                            Placement::piece(class, job, piece, pg.a.clone(), w.clone()),
                        ],
                        mult: take,
                    });
                    piece += take as usize;
                    self.k += take;
                    d -= w.mul_int(take);
                    self.t = self.b.clone();
                }
            }
            self.advance()?;
            self.emit(Placement::setup(class, &self.a - s, s.clone()));
        }
    }

    fn run(mut self, q: &WrapSequence) -> Result<(WrapOutput, Position), WrapError> {
        for batch in &q.batches {
            self.setup(batch.class, &batch.setup)?;
            for it in &batch.items {
                self.job(batch.class, &batch.setup, it.job, &it.dur)?;
            }
        }
        let pos = Position { gap: self.gap_index(), t: self.t.clone() };
        Ok((self.out, pos))
    }
}

fn wrap_segments(
    q: &WrapSequence,
    gaps: &[Gap],
    block: Option<&ParallelGaps>,
) -> Result<(WrapOutput, Option<Position>), WrapError> {
    let mut capacity: Rat = gaps.iter().map(|g| &g.b - &g.a).sum();
    if let Some(pg) = block {
        capacity += (&pg.b - &pg.a).mul_int(pg.count);
    }
    let load = q.load();
    if load > capacity {
        return Err(WrapError::Capacity { load, capacity });
    }
    if q.is_empty() {
        return Ok((WrapOutput::default(), None));
    }
    match Engine::start(gaps, block) {
        Some(e) => e.run(q).map(|(o, p)| (o, Some(p))),
        None => Err(WrapError::Exhausted),
    }
}

/// Wrap `q` into the explicit template `w`.
pub fn wrap(q: &WrapSequence, w: &WrapTemplate) -> Result<(WrapOutput, Option<Position>), WrapError> {
    wrap_segments(q, &w.gaps, None)
}

/// Wrap into the explicit gaps first, then into a block of parallel gaps.
pub fn wrap_mixed(
    q: &WrapSequence,
    w: &WrapTemplate,
    block: &ParallelGaps,
) -> Result<WrapOutput, WrapError> {
    if let Some(g) = w.gaps.last() {
        if g.machine == usize::MAX {
            return Err(WrapError::Template("machine index overflow".into()));
        }
    }
    for (a, b) in [(&block.a, &block.b)] {
        if a.is_negative() || a >= b {
            return Err(WrapError::Template("parallel gap is not 0 <= a < b".into()));
        }
    }
    wrap_segments(q, &w.gaps, Some(block)).map(|(o, _)| o)
}

/// Wrap `q` into `count` identical gaps `[a, b)`; output size does not depend on `count`.
pub fn wrap_parallel_compressed(
    q: &WrapSequence,
    a: &Rat,
    b: &Rat,
    count: u64,
) -> Result<Vec<Config>, WrapError> {
    let block = ParallelGaps { a: a.clone(), b: b.clone(), count };
    wrap_mixed(q, &WrapTemplate::default(), &block).map(|o| o.configs)
}

/// Place one job piece starting at time `t` in gap `r`, cutting it at gap ends.
///
/// Returns the gap and time where the next item starts, with the placements made.
pub fn split(
    class: usize,
    setup: &Rat,
    item: &WrapItem,
    w: &WrapTemplate,
    r: usize,
    t: &Rat,
) -> Result<(Position, Vec<(usize, Placement)>), WrapError> {
    let g = w.gaps.get(r).ok_or(WrapError::Exhausted)?;
    if *t < g.a || *t >= g.b {
        return Err(WrapError::Template(format!("start {t:?} outside gap {r}")));
    }
    let rest = &w.gaps[r..];
    let mut e = Engine::start(rest, None).ok_or(WrapError::Exhausted)?;
    e.t = t.clone();
    e.job(class, setup, item.job, &item.dur)?;
    let pos = Position { gap: r + e.gap_index(), t: e.t.clone() };
    Ok((pos, e.out.placed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rat {
        Rat::from(v)
    }

    fn batch(class: usize, s: i64, jobs: &[i64]) -> Batch {
        Batch {
            class,
            setup: r(s),
            items: jobs.iter().enumerate().map(|(j, &t)| WrapItem { job: j, dur: r(t) }).collect(),
        }
    }

    fn tpl(gaps: &[(usize, i64, i64)]) -> WrapTemplate {
        WrapTemplate::new(gaps.iter().map(|&(u, a, b)| Gap::new(u, r(a), r(b))).collect()).unwrap()
    }

    fn on(out: &WrapOutput, m: usize) -> Vec<(bool, Rat, Rat)> {
        out.placed
            .iter()
            .filter(|(u, _)| *u == m)
            .map(|(_, p)| (p.is_setup(), p.start.clone(), p.dur.clone()))
            .collect()
    }

    #[test]
    fn two_jobs_two_machines() {
        let q = WrapSequence::new(vec![batch(0, 2, &[3, 3])]);
        let (out, _) = wrap(&q, &tpl(&[(1, 0, 6), (2, 2, 6)])).unwrap();
        assert_eq!(on(&out, 1), vec![(true, r(0), r(2)), (false, r(2), r(3)), (false, r(5), r(1))]);
        assert_eq!(on(&out, 2), vec![(true, r(0), r(2)), (false, r(2), r(2))]);
    }

    #[test]
    fn long_job_over_four_gaps() {
        let q = WrapSequence::new(vec![batch(0, 1, &[10])]);
        let (out, _) = wrap(&q, &tpl(&[(1, 0, 4), (2, 1, 4), (3, 1, 4), (4, 1, 4)])).unwrap();
        let pieces: Vec<Rat> =
            out.placed.iter().filter(|(_, p)| !p.is_setup()).map(|(_, p)| p.dur.clone()).collect();
        assert_eq!(pieces, vec![r(3), r(3), r(3), r(1)]);
        for m in 2..=4 {
            assert_eq!(on(&out, m)[0], (true, r(0), r(1)));
        }
    }

    #[test]
    fn setup_exactly_filling_gap_stays() {
        let q = WrapSequence::new(vec![batch(0, 2, &[2]), batch(1, 2, &[1])]);
        let (out, _) = wrap(&q, &tpl(&[(0, 0, 6), (1, 2, 6)])).unwrap();
        assert_eq!(on(&out, 0), vec![(true, r(0), r(2)), (false, r(2), r(2)), (true, r(4), r(2))]);
        assert_eq!(on(&out, 1), vec![(true, r(0), r(2)), (false, r(2), r(1))]);
    }

    #[test]
    fn moved_setup_ends_at_next_gap() {
        let q = WrapSequence::new(vec![batch(0, 1, &[4]), batch(1, 2, &[1])]);
        let (out, _) = wrap(&q, &tpl(&[(0, 0, 6), (1, 3, 6)])).unwrap();
        assert_eq!(on(&out, 1), vec![(true, r(1), r(2)), (false, r(3), r(1))]);
    }

    #[test]
    fn split_examples() {
        let w = tpl(&[(0, 0, 6), (1, 2, 8)]);
        let (pos, placed) = split(0, &r(1), &WrapItem { job: 0, dur: r(1) }, &w, 0, &r(2)).unwrap();
        assert_eq!(pos, Position { gap: 0, t: r(3) });
        assert_eq!(placed.len(), 1);

        let (pos, placed) = split(0, &r(1), &WrapItem { job: 0, dur: r(5) }, &w, 0, &r(4)).unwrap();
        assert_eq!(pos, Position { gap: 1, t: r(5) });
        let shape: Vec<_> = placed.iter().map(|(u, p)| (*u, p.is_setup(), p.start.clone(), p.dur.clone())).collect();
        assert_eq!(
            shape,
            vec![(0, false, r(4), r(2)), (1, true, r(1), r(1)), (1, false, r(2), r(3))]
        );

        let (pos, placed) = split(0, &r(1), &WrapItem { job: 0, dur: r(2) }, &w, 0, &r(4)).unwrap();
        assert_eq!(pos, Position { gap: 0, t: r(6) });
        assert_eq!(placed.len(), 1);
    }

    #[test]
    fn capacity_error() {
        let q = WrapSequence::new(vec![batch(0, 1, &[10])]);
        assert!(matches!(wrap(&q, &tpl(&[(0, 0, 5)])), Err(WrapError::Capacity { .. })));
    }

    #[test]
    fn template_rules() {
        assert!(WrapTemplate::new(vec![Gap::new(1, r(0), r(1)), Gap::new(1, r(0), r(1))]).is_err());
        assert!(WrapTemplate::new(vec![Gap::new(0, r(2), r(2))]).is_err());
    }

    #[test]
    fn compressed_long_job() {
        let mut b = batch(0, 1, &[10]);
        b.setup = Rat::new(1, 2);
        let q = WrapSequence::new(vec![b]);
        let cfgs = wrap_parallel_compressed(&q, &r(1), &r(2), 12).unwrap();
        assert_eq!(cfgs.len(), 3);
        assert_eq!(cfgs.iter().map(|c| c.mult).collect::<Vec<_>>(), vec![1, 9, 1]);
        assert_eq!(cfgs[0].config[1].dur, Rat::new(1, 2));
        assert_eq!(cfgs[2].config[1].dur, Rat::new(1, 2));
    }

    #[test]
    fn compressed_exact_fill() {
        let q = WrapSequence::new(vec![batch(0, 1, &[2, 3])]);
        let cfgs = wrap_parallel_compressed(&q, &r(1), &r(3), 3).unwrap();
        assert_eq!(cfgs.iter().map(|c| c.mult).sum::<u64>(), 3);
    }
}
