use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use setupsched::gen::scaling_instance;
use setupsched::{Instance, Rat, Variant};

use crate::{read_instance, run_algo, Algo};

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance JSON files.
    #[arg(long, conflicts_with = "scaling")]
    suite: Option<PathBuf>,
    /// Generated scaling instances with these job counts, e.g. `10000,20000,40000`.
    #[arg(long, value_delimiter = ',')]
    scaling: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// `variant:algo` pairs, algo one of two-approx, eps, jump.
    #[arg(long, value_delimiter = ',', default_value = "split:jump,pmtn:jump,nonp:jump")]
    algos: Vec<String>,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Worker threads; the SCHED_THREADS environment variable takes precedence.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value = "1/1000")]
    epsilon: Rat,
}

struct Row {
    inst: usize,
    algo: usize,
    makespan: Rat,
    lb: Rat,
    ratio: Rat,
    wall: f64,
}

fn parse_algo(s: &str) -> Result<(Variant, Algo)> {
    let Some((v, a)) = s.split_once(':') else { bail!("expected variant:algo, got {s:?}") };
    let v: Variant = v.parse().map_err(anyhow::Error::msg)?;
    let a = match a {
        "two-approx" => Algo::TwoApprox,
        "eps" => Algo::Eps,
        "jump" => Algo::Jump,
        _ => bail!("unknown bench algorithm {a:?}"),
    };
    Ok((v, a))
}

fn load_suite(args: &BenchArgs) -> Result<Vec<(String, Instance)>> {
    if let Some(dir) = &args.suite {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            bail!("no .json instances in {}", dir.display());
        }
        return paths
            .into_iter()
            .map(|p| Ok((p.file_name().unwrap().to_string_lossy().into_owned(), read_instance(&p)?)))
            .collect();
    }
    if args.scaling.is_empty() {
        bail!("pass --suite or --scaling");
    }
    Ok(args.scaling.iter().map(|&n| (format!("scaling-{n}"), scaling_instance(n, args.seed))).collect())
}

fn threads(flag: usize) -> Result<usize> {
    match std::env::var("SCHED_THREADS") {
        Ok(v) => v.trim().parse().with_context(|| format!("SCHED_THREADS={v:?} is not a thread count")),
        Err(_) => Ok(flag),
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

pub fn run(args: BenchArgs) -> Result<()> {
    let algos: Vec<(Variant, Algo)> = args.algos.iter().map(|s| parse_algo(s)).collect::<Result<_>>()?;
    let suite = load_suite(&args)?;
    let repeat = args.repeat.max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads(args.threads)?.max(1)).build()?;
    let tasks: Vec<(usize, usize)> = (0..suite.len()).flat_map(|i| (0..algos.len()).map(move |a| (i, a))).collect();
    let rows: Vec<Row> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, a)| {
                let (v, algo) = algos[a];
                let mut walls = Vec::with_capacity(repeat);
                let mut last = None;
                for _ in 0..repeat {
                    let s = run_algo(&suite[i].1, v, algo, None, &args.epsilon)?.summary;
                    walls.push(s.wall_time);
                    last = Some(s);
                }
                let s = last.unwrap();
                Ok(Row {
                    inst: i,
                    algo: a,
                    makespan: s.makespan.expect("searches always return a schedule"),
                    lb: s.lb,
                    ratio: s.ratio_bound.unwrap(),
                    wall: median(walls),
                })
            })
            .collect::<Result<Vec<Row>>>()
    })?;

    println!(
        "{:<24} {:>8} {:>6} {:>5} {:<16} {:>14} {:>14} {:>8} {:>11} {:>8}",
        "instance", "n", "m", "c", "algo", "makespan", "LB", "ratio", "wall_ms", "t/t_prev"
    );
    for a in 0..algos.len() {
        let mut mine: Vec<&Row> = rows.iter().filter(|r| r.algo == a).collect();
        mine.sort_by_key(|r| (suite[r.inst].1.n(), r.inst));
        let mut prev: Option<&Row> = None;
        for r in &mine {
            let inst = &suite[r.inst].1;
            // time relative to the next smaller instance of the suite
            let scale = match prev {
                Some(p) if suite[p.inst].1.n() < inst.n() && p.wall > 0.0 => format!("{:.2}", r.wall / p.wall),
                _ => "-".to_string(),
            };
            println!(
                "{:<24} {:>8} {:>6} {:>5} {:<16} {:>14.3} {:>14.3} {:>8.4} {:>11.3} {:>8}",
                suite[r.inst].0,
                inst.n(),
                inst.m(),
                inst.c(),
                label(algos[a]),
                r.makespan.to_f64(),
                r.lb.to_f64(),
                r.ratio.to_f64(),
                r.wall * 1e3,
                scale
            );
            prev = Some(r);
        }
    }
    println!();
    println!("{:<16} {:>14} {:>14}", "algo", "median ratio", "median wall_ms");
    for a in 0..algos.len() {
        let mine: Vec<&Row> = rows.iter().filter(|r| r.algo == a).collect();
        let ratio = median(mine.iter().map(|r| r.ratio.to_f64()).collect());
        let wall = median(mine.iter().map(|r| r.wall * 1e3).collect());
        println!("{:<16} {:>14.4} {:>14.3}", label(algos[a]), ratio, wall);
    }
    Ok(())
}

fn label((v, a): (Variant, Algo)) -> String {
    format!("{}:{}", v.short(), a.name())
}
