//! Instances, placements and schedules.

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// One batch class: a setup time and its jobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    pub setup: u64,
    pub jobs: Vec<u64>,
}

impl Class {
    pub fn new(setup: u64, jobs: Vec<u64>) -> Self {
        Class { setup, jobs }
    }

    pub fn proc_sum(&self) -> u128 {
        self.jobs.iter().map(|&t| t as u128).sum()
    }

    pub fn t_max(&self) -> u64 {
        self.jobs.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("m: machine count must be >= 1")]
    NoMachines,
    #[error("classes: no classes")]
    NoClasses,
    #[error("classes[{0}].jobs: class has no jobs")]
    EmptyClass(usize),
    #[error("classes[{0}].setup: setup must be >= 1")]
    BadSetup(usize),
    #[error("classes[{0}].jobs[{1}]: processing time must be >= 1")]
    BadJob(usize, usize),
}

/// A validated problem instance. Job `(i, j)` is the `j`-th job of class `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    m: usize,
    classes: Vec<Class>,
}

#[derive(Deserialize)]
struct RawInstance {
    m: i128,
    classes: Vec<RawClass>,
}

#[derive(Deserialize)]
struct RawClass {
    setup: i128,
    jobs: Vec<i128>,
}

impl Instance {
    pub fn new(m: usize, classes: Vec<Class>) -> Result<Self, InstanceError> {
        if m < 1 {
            return Err(InstanceError::NoMachines);
        }
        if classes.is_empty() {
            return Err(InstanceError::NoClasses);
        }
        for (i, c) in classes.iter().enumerate() {
            if c.setup < 1 {
                return Err(InstanceError::BadSetup(i));
            }
            if c.jobs.is_empty() {
                return Err(InstanceError::EmptyClass(i));
            }
            if let Some(j) = c.jobs.iter().position(|&t| t < 1) {
                return Err(InstanceError::BadJob(i, j));
            }
        }
        Ok(Instance { m, classes })
    }

    /// Shorthand used by tests and examples: `(setup, jobs)` pairs.
    pub fn from_pairs(m: usize, classes: &[(u64, &[u64])]) -> Result<Self, InstanceError> {
        Instance::new(
            m,
            classes.iter().map(|(s, j)| Class::new(*s, j.to_vec())).collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &Class {
        &self.classes[i]
    }

    pub fn c(&self) -> usize {
        self.classes.len()
    }

    pub fn n(&self) -> usize {
        self.classes.iter().map(|c| c.jobs.len()).sum()
    }

    pub fn setup(&self, i: usize) -> Rat {
        Rat::from(self.classes[i].setup)
    }

    pub fn job(&self, i: usize, j: usize) -> Rat {
        Rat::from(self.classes[i].jobs[j])
    }

    pub fn s_max(&self) -> u64 {
        self.classes.iter().map(|c| c.setup).max().unwrap_or(0)
    }

    /// P(J), the total processing time.
    pub fn total_proc(&self) -> u128 {
        self.classes.iter().map(|c| c.proc_sum()).sum()
    }

    /// N = sum of all setups plus all processing times.
    pub fn total_load(&self) -> u128 {
        self.total_proc() + self.classes.iter().map(|c| c.setup as u128).sum::<u128>()
    }

    /// Same instance on a different number of machines.
    pub fn with_machines(&self, m: usize) -> Result<Self, InstanceError> {
        Instance::new(m, self.classes.clone())
    }
}

/// Parse the JSON instance format `{"m": .., "classes": [{"setup": .., "jobs": [..]}]}`.
pub fn parse_instance(raw: &str) -> Result<Instance, InstanceError> {
    let r: RawInstance =
        serde_json::from_str(raw).map_err(|e| InstanceError::Malformed(e.to_string()))?;
    if r.m < 1 {
        return Err(InstanceError::NoMachines);
    }
    let m = usize::try_from(r.m).map_err(|_| InstanceError::Malformed("m too large".into()))?;
    let mut classes = Vec::with_capacity(r.classes.len());
    for (i, c) in r.classes.into_iter().enumerate() {
        if c.setup < 1 {
            return Err(InstanceError::BadSetup(i));
        }
        let setup = u64::try_from(c.setup)
            .map_err(|_| InstanceError::Malformed(format!("classes[{i}].setup too large")))?;
        let mut jobs = Vec::with_capacity(c.jobs.len());
        for (j, t) in c.jobs.into_iter().enumerate() {
            if t < 1 {
                return Err(InstanceError::BadJob(i, j));
            }
            jobs.push(u64::try_from(t).map_err(|_| {
                InstanceError::Malformed(format!("classes[{i}].jobs[{j}] too large"))
            })?);
        }
        classes.push(Class { setup, jobs });
    }
    Instance::new(m, classes)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string(inst).expect("instance serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Splittable,
    Preemptive,
    NonPreemptive,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Splittable, Variant::Preemptive, Variant::NonPreemptive];

    pub fn short(self) -> &'static str {
        match self {
            Variant::Splittable => "split",
            Variant::Preemptive => "pmtn",
            Variant::NonPreemptive => "nonp",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "split" | "splittable" => Ok(Variant::Splittable),
            "pmtn" | "preemptive" => Ok(Variant::Preemptive),
            "nonp" | "nonpreemptive" | "non-preemptive" => Ok(Variant::NonPreemptive),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Setup,
    Piece { job: usize, piece: usize },
}

/// A setup or a job piece on some machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    pub class: usize,
    pub kind: Kind,
    pub start: Rat,
    pub dur: Rat,
}

impl Placement {
    pub fn setup(class: usize, start: Rat, dur: Rat) -> Self {
        Placement { class, kind: Kind::Setup, start, dur }
    }

    pub fn piece(class: usize, job: usize, piece: usize, start: Rat, dur: Rat) -> Self {
        Placement { class, kind: Kind::Piece { job, piece }, start, dur }
    }

    pub fn end(&self) -> Rat {
        &self.start + &self.dur
    }

    pub fn is_setup(&self) -> bool {
        matches!(self.kind, Kind::Setup)
    }

    pub fn job(&self) -> Option<usize> {
        match self.kind {
            Kind::Piece { job, .. } => Some(job),
            Kind::Setup => None,
        }
    }

    pub fn shifted(&self, by: &Rat) -> Placement {
        Placement { start: &self.start + by, ..self.clone() }
    }
}

#[derive(Serialize, Deserialize)]
struct RawPlacement {
    kind: String,
    class: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    job: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    piece: Option<usize>,
    start: Rat,
    dur: Rat,
}

impl Serialize for Placement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = match self.kind {
            Kind::Setup => RawPlacement {
                kind: "setup".into(),
                class: self.class,
                job: None,
                piece: None,
                start: self.start.clone(),
                dur: self.dur.clone(),
            },
            Kind::Piece { job, piece } => RawPlacement {
                kind: "piece".into(),
                class: self.class,
                job: Some(job),
                piece: Some(piece),
                start: self.start.clone(),
                dur: self.dur.clone(),
            },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Placement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPlacement::deserialize(d)?;
        let kind = match raw.kind.as_str() {
            "setup" => Kind::Setup,
            "piece" => Kind::Piece {
                job: raw.job.ok_or_else(|| serde::de::Error::missing_field("job"))?,
                piece: raw.piece.unwrap_or(0),
            },
            other => return Err(serde::de::Error::custom(format!("unknown kind {other:?}"))),
        };
        Ok(Placement { class: raw.class, kind, start: raw.start, dur: raw.dur })
    }
}

/// A machine configuration repeated `mult` times.
///
/// Copy `k` of the configuration carries piece ids shifted by `k`, which is
/// how a job cut over many identical gaps keeps distinct piece ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub config: Vec<Placement>,
    pub mult: u64,
}

impl Config {
    pub fn copy(&self, k: u64) -> Vec<Placement> {
        self.config
            .iter()
            .map(|p| match p.kind {
                Kind::Piece { job, piece } => Placement {
                    kind: Kind::Piece { job, piece: piece + k as usize },
                    ..p.clone()
                },
                Kind::Setup => p.clone(),
            })
            .collect()
    }
}

/// Explicit machines followed by compressed ones. Machines not listed are idle.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub machines: Vec<Vec<Placement>>,
    #[serde(default)]
    pub compressed: Vec<Config>,
}

impl Schedule {
    pub fn empty(m: usize) -> Self {
        Schedule { machines: vec![Vec::new(); m], compressed: Vec::new() }
    }

    /// Number of machines this schedule occupies, counting multiplicities.
    pub fn machine_count(&self) -> u128 {
        self.machines.len() as u128 + self.compressed.iter().map(|c| c.mult as u128).sum::<u128>()
    }

    pub fn makespan(&self) -> Rat {
        let explicit = self.machines.iter().flatten().map(|p| p.end());
        let packed = self.compressed.iter().filter(|c| c.mult > 0).flat_map(|c| c.config.iter().map(|p| p.end()));
        explicit.chain(packed).fold(Rat::zero(), Rat::max)
    }

    pub fn is_compressed(&self) -> bool {
        self.compressed.iter().any(|c| c.mult > 0)
    }

    /// Materialize every compressed configuration as explicit machines.
    pub fn expand(&self) -> Schedule {
        let mut machines = self.machines.clone();
        for c in &self.compressed {
            for k in 0..c.mult {
                machines.push(c.copy(k));
            }
        }
        Schedule { machines, compressed: Vec::new() }
    }

    /// Sort each machine by start time.
    pub fn sort(&mut self) {
        for m in &mut self.machines {
            m.sort_by(|a, b| a.start.cmp(&b.start));
        }
        for c in &mut self.compressed {
            c.config.sort_by(|a, b| a.start.cmp(&b.start));
        }
    }

    /// Reassign piece ids per job in machine, then time order. Explicit machines only.
    pub fn renumber_pieces(&mut self) {
        use std::collections::HashMap;
        self.sort();
        let mut next: HashMap<(usize, usize), usize> = HashMap::new();
        for m in &mut self.machines {
            for p in m.iter_mut() {
                if let Kind::Piece { job, piece } = &mut p.kind {
                    let e = next.entry((p.class, *job)).or_insert(0);
                    *piece = *e;
                    *e += 1;
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            makespan: Rat,
            machines: &'a [Vec<Placement>],
            compressed: &'a [Config],
        }
        serde_json::to_string(&Out {
            makespan: self.makespan(),
            machines: &self.machines,
            compressed: &self.compressed,
        })
        .expect("schedule serializes")
    }

    pub fn from_json(raw: &str) -> Result<Schedule, String> {
        serde_json::from_str(raw).map_err(|e| e.to_string())
    }
}
