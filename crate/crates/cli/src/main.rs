use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use setupsched::gen::{generate, Dist, GenSpec, Profile};
use setupsched::model::instance_to_json;
use setupsched::search::{self, certify, epsilon_search};
use setupsched::{lower_bound_tmin, parse_instance, verify_schedule, Instance, Rat, Schedule, Variant};

mod bench;

const EXIT_INPUT: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "setupsched", version, about = "Makespan scheduling with batch setup times")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance with one algorithm.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Verify(VerifyArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Time algorithms over a suite of instances.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    TwoApprox,
    Dual,
    Eps,
    Jump,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::TwoApprox => "two-approx",
            Algo::Dual => "dual",
            Algo::Eps => "eps",
            Algo::Jump => "jump",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Schedule,
    Summary,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Guess for `--algo dual`.
    #[arg(long = "T", value_name = "RAT")]
    t: Option<Rat>,
    /// Accuracy for `--algo eps`.
    #[arg(long, value_name = "RAT", default_value = "1/1000")]
    epsilon: Rat,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// What goes to the output. The summary also goes to stderr when the schedule is emitted.
    #[arg(long, value_enum, default_value = "schedule")]
    emit: Emit,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    schedule: PathBuf,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, value_name = "RAT")]
    bound: Rat,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    machines: usize,
    #[arg(long)]
    classes: usize,
    #[arg(long, default_value = "uniform:1:5")]
    jobs_per_class: Dist,
    #[arg(long, default_value = "uniform:1:10")]
    setup: Dist,
    #[arg(long, default_value = "uniform:1:10")]
    proc: Dist,
    #[arg(long, value_parser = parse_profile, default_value = "uniform")]
    profile: Profile,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

/// Failure carrying its own exit code.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let res = match cli.cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Gen(a) => gen(a),
        Cmd::Bench(a) => bench::run(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Exit>() {
            Some(Exit(code)) => ExitCode::from(*code),
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_INPUT)
            }
        },
    }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&raw).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
pub struct Summary {
    pub variant: &'static str,
    pub algo: &'static str,
    pub accepted: bool,
    pub guess: Option<Rat>,
    pub makespan: Option<Rat>,
    #[serde(rename = "LB")]
    pub lb: Rat,
    pub ratio_bound: Option<Rat>,
    pub probes: usize,
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub struct Solved {
    pub summary: Summary,
    pub schedule: Option<Schedule>,
}

/// Runs one algorithm; `Dual` needs `t`.
pub fn run_algo(inst: &Instance, v: Variant, algo: Algo, t: Option<&Rat>, eps: &Rat) -> Result<Solved> {
    let start = Instant::now();
    let tmin = lower_bound_tmin(inst, v);
    let (schedule, guess, lb, probes, reason) = match algo {
        Algo::TwoApprox => {
            let (s, _) = search::two_approx(inst, v);
            (Some(s), None, tmin, 0, None)
        }
        Algo::Dual => {
            let Some(t) = t else { bail!("--algo dual needs --T") };
            if !t.is_positive() {
                bail!("--T must be positive, got {t}");
            }
            match search::dual(inst, v, t) {
                setupsched::dual::DualOutcome::Accepted { schedule, .. } => (Some(schedule), Some(t.clone()), tmin, 1, None),
                setupsched::dual::DualOutcome::Rejected { reason, .. } => {
                    (None, Some(t.clone()), t.clone(), 1, Some(reason.to_string()))
                }
            }
        }
        Algo::Eps => {
            let r = epsilon_search(inst, v, eps)?;
            (Some(r.schedule), Some(r.t), r.lower, r.probes.len(), None)
        }
        Algo::Jump => {
            let r = search::class_jump(inst, v);
            (Some(r.schedule), Some(r.t), r.lower, r.probes.len(), None)
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    let (makespan, ratio_bound) = match &schedule {
        Some(s) => {
            let c = certify(s.makespan(), lb.clone());
            (Some(c.makespan), Some(c.ratio_bound))
        }
        None => (None, None),
    };
    let summary = Summary {
        variant: v.short(),
        algo: algo.name(),
        accepted: schedule.is_some(),
        guess,
        makespan,
        lb,
        ratio_bound,
        probes,
        wall_time,
        reason,
    };
    Ok(Solved { summary, schedule })
}

fn solve(a: SolveArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let solved = run_algo(&inst, a.variant, a.algo, a.t.as_ref(), &a.epsilon)?;
    let summary = serde_json::to_string(&solved.summary)?;
    match (a.emit, &solved.schedule) {
        (Emit::Summary, _) | (Emit::Schedule, None) => write_out(a.out.as_deref(), &summary)?,
        (Emit::Schedule, Some(s)) => {
            write_out(a.out.as_deref(), &s.to_json())?;
            eprintln!("{summary}");
        }
    }
    if solved.schedule.is_none() {
        return Err(Exit(EXIT_REJECTED).into());
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let raw = std::fs::read_to_string(&a.schedule).with_context(|| format!("reading {}", a.schedule.display()))?;
    let sched = Schedule::from_json(&raw).map_err(anyhow::Error::msg).with_context(|| format!("parsing {}", a.schedule.display()))?;
    let rep = verify_schedule(&inst, &sched, a.variant, &a.bound);
    if rep.ok() {
        println!("ok: makespan {} <= {}", rep.makespan, a.bound);
        return Ok(());
    }
    for v in &rep.violations {
        println!("{v}");
    }
    Err(Exit(EXIT_INVALID).into())
}

fn gen(a: GenArgs) -> Result<()> {
    if a.machines == 0 || a.classes == 0 {
        bail!("need at least one machine and one class");
    }
    let spec = GenSpec {
        seed: a.seed,
        machines: a.machines,
        classes: a.classes,
        jobs_per_class: a.jobs_per_class,
        setup: a.setup,
        proc: a.proc,
        profile: a.profile,
    };
    write_out(a.out.as_deref(), &instance_to_json(&generate(&spec)))
}
