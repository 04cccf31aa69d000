//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Class, Instance};

/// Closed integer range `uniform:lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dist {
    pub lo: u64,
    pub hi: u64,
}

impl Dist {
    pub fn new(lo: u64, hi: u64) -> Self {
        Dist { lo, hi }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(self.lo..=self.hi)
    }
}

impl std::str::FromStr for Dist {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["uniform", lo, hi] => {
                let lo: u64 = lo.parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
                let hi: u64 = hi.parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
                if lo < 1 || lo > hi {
                    return Err(format!("need 1 <= lo <= hi in {s:?}"));
                }
                Ok(Dist { lo, hi })
            }
            _ => Err(format!("expected uniform:<lo>:<hi>, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Uniform,
    /// A third of the classes, but fewer than twice the machines, get setups above half the load estimate.
    FewExpensive,
    /// Many short jobs with small setups.
    ManySmall,
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Profile::Uniform),
            "few-expensive" => Ok(Profile::FewExpensive),
            "many-small" => Ok(Profile::ManySmall),
            _ => Err(format!("unknown profile {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub machines: usize,
    pub classes: usize,
    pub jobs_per_class: Dist,
    pub setup: Dist,
    pub proc: Dist,
    pub profile: Profile,
}

pub fn generate(spec: &GenSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut classes = Vec::with_capacity(spec.classes);
    for _ in 0..spec.classes.max(1) {
        let n = spec.jobs_per_class.sample(&mut rng) as usize;
        let (setup, proc) = match spec.profile {
            Profile::ManySmall => (
                Dist::new(spec.setup.lo, spec.setup.lo.max(spec.setup.hi / 4)),
                Dist::new(spec.proc.lo, spec.proc.lo.max(spec.proc.hi / 4)),
            ),
            _ => (spec.setup, spec.proc),
        };
        let s = setup.sample(&mut rng);
        let jobs = (0..n.max(1)).map(|_| proc.sample(&mut rng)).collect();
        classes.push(Class::new(s, jobs));
    }
    if spec.profile == Profile::FewExpensive {
        // lift a third of the setups above half the lower bound estimate
        // k lifted setups add k s / m to the average, so fewer than 2m can all end above half
        let k = classes.len().div_ceil(3).min(2 * spec.machines.max(1) - 1);
        let t_est = estimate(&classes, spec.machines.max(1));
        let big = t_est / 2 + 1;
        for c in classes.iter_mut().take(k) {
            c.setup = c.setup.max(big);
        }
        // the estimate grows with the lifted setups; repeat until stable
        loop {
            let t_est = estimate(&classes, spec.machines.max(1));
            let big = t_est / 2 + 1;
            let mut changed = false;
            for c in classes.iter_mut().take(k) {
                if c.setup < big {
                    c.setup = big;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    Instance::new(spec.machines.max(1), classes).expect("generated instance is valid")
}

/// max(N/m, max(s + t_max)) rounded up, the nonpreemptive lower bound.
fn estimate(classes: &[Class], m: usize) -> u64 {
    let n: u128 = classes.iter().map(|c| c.setup as u128 + c.proc_sum()).sum();
    let avg = n.div_ceil(m as u128) as u64;
    let single = classes.iter().map(|c| c.setup + c.t_max()).max().unwrap_or(0);
    avg.max(single)
}

/// Random small instance for property tests: `m <= max_m`, `c <= max_c`,
/// at most `max_n` jobs in total, values in `1..=max_v`.
pub fn random_instance<R: Rng>(rng: &mut R, max_m: usize, max_c: usize, max_n: usize, max_v: u64) -> Instance {
    let m = rng.gen_range(1..=max_m);
    let c = rng.gen_range(1..=max_c.min(max_n));
    let n = rng.gen_range(c..=max_n);
    let mut sizes = vec![1usize; c];
    for _ in c..n {
        let i = rng.gen_range(0..c);
        sizes[i] += 1;
    }
    // bias some setups high so expensive classes show up often
    let classes = sizes
        .into_iter()
        .map(|k| {
            let s = if rng.gen_bool(0.3) {
                rng.gen_range((max_v / 2).max(1)..=max_v)
            } else {
                rng.gen_range(1..=max_v)
            };
            Class::new(s, (0..k).map(|_| rng.gen_range(1..=max_v)).collect())
        })
        .collect();
    Instance::new(m, classes).expect("valid")
}

/// `n` jobs over `c = ceil(sqrt(n))` classes on `m = max(1, n / 10)` machines.
pub fn scaling_instance(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = ((n as f64).sqrt().ceil() as usize).max(1);
    let m = (n / 10).max(1);
    let mut sizes = vec![n / c; c];
    for s in sizes.iter_mut().take(n % c) {
        *s += 1;
    }
    let classes = sizes
        .into_iter()
        .map(|k| Class::new(rng.gen_range(1..=100), (0..k.max(1)).map(|_| rng.gen_range(1..=100)).collect()))
        .collect();
    Instance::new(m, classes).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(profile: Profile) -> GenSpec {
        GenSpec {
            seed: 1,
            machines: 4,
            classes: 3,
            jobs_per_class: Dist::new(1, 9),
            setup: Dist::new(1, 9),
            proc: Dist::new(1, 9),
            profile,
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&spec(Profile::Uniform)), generate(&spec(Profile::Uniform)));
    }

    #[test]
    fn few_expensive_has_expensive_classes() {
        let inst = generate(&spec(Profile::FewExpensive));
        let t = estimate(inst.classes(), inst.m());
        let k = inst.classes().iter().filter(|c| 2 * c.setup > t).count();
        assert!(k >= (inst.c() + 2) / 3);
    }

    #[test]
    fn single_job_batches() {
        let mut s = spec(Profile::Uniform);
        s.jobs_per_class = Dist::new(1, 1);
        assert!(generate(&s).classes().iter().all(|c| c.jobs.len() == 1));
    }

    #[test]
    fn dist_parse() {
        assert_eq!("uniform:1:9".parse::<Dist>().unwrap(), Dist::new(1, 9));
        assert!("uniform:0:9".parse::<Dist>().is_err());
        assert!("normal:1:2".parse::<Dist>().is_err());
    }

    #[test]
    fn scaling_shape() {
        let inst = scaling_instance(10_000, 3);
        assert_eq!((inst.n(), inst.c(), inst.m()), (10_000, 100, 1000));
    }
}
