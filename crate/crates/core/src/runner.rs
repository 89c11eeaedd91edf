//! Run configuration, the generational loop, multi-seed experiments and
//! their output files.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptation::{activity_bits, adapt, ActivityHistory, AdaptationEvent, AdaptationKind, AdaptationParams};
use crate::archive::{objectives_csv, IndividualArchive};
use crate::error::{Error, Result};
use crate::metrics::{igd, median, sample_times, stability, Trajectory};
use crate::problems::Problem;
use crate::refgen::ReferenceArchive;
use crate::selection::{cascade_cluster, frontier_activity};
use crate::types::{IdealPoint, Individual, ObjectiveVector};
use crate::variation::{offspring, VariationParams, VariationStreams};

fn default_w() -> usize {
    20
}
fn default_theta() -> f64 {
    0.2
}
fn default_igd_samples() -> usize {
    10_000
}
fn default_sample_points() -> usize {
    101
}
fn default_confidence() -> f64 {
    0.95
}
fn default_density_cap() -> u32 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    pub m: usize,
    /// Decision variables; the problem's conventional size when absent.
    #[serde(default)]
    pub d: Option<usize>,
    pub n: usize,
    #[serde(alias = "evals")]
    pub max_evals: u64,
    #[serde(default = "default_w")]
    pub w: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub variation: VariationParams,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_igd_samples")]
    pub igd_samples: usize,
    #[serde(default = "default_sample_points")]
    pub sample_points: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default = "default_density_cap")]
    pub density_cap: u32,
    /// Adapt from the population's activity; the individual archive is unused.
    #[serde(default)]
    pub no_ia: bool,
    /// Never adapt the reference vectors.
    #[serde(default)]
    pub fixed_z: bool,
    #[serde(default, alias = "out")]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Configuration with defaults for everything but the essentials.
    pub fn new(problem: &str, m: usize, n: usize, max_evals: u64) -> Self {
        RunConfig {
            problem: problem.to_string(),
            m,
            d: None,
            n,
            max_evals,
            w: default_w(),
            theta: default_theta(),
            variation: VariationParams::default(),
            seeds: vec![1],
            igd_samples: default_igd_samples(),
            sample_points: default_sample_points(),
            confidence: default_confidence(),
            density_cap: default_density_cap(),
            no_ia: false,
            fixed_z: false,
            out_dir: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn problem_instance(&self) -> Result<Problem> {
        Problem::new(&self.problem, self.m, self.d)
    }

    pub fn adaptation_params(&self) -> Result<AdaptationParams> {
        AdaptationParams::new(self.n, self.theta, self.w)
            .map(|p| p.with_density_cap(self.density_cap))
            .and_then(|p| p.validate().map(|_| p))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.problem_instance()?;
        if self.n < self.m {
            return Err(Error::Config(format!(
                "population size {} is smaller than the objective count {}",
                self.n, self.m
            )));
        }
        if self.max_evals < self.n as u64 {
            return Err(Error::Config(format!(
                "budget of {} evaluations is smaller than one generation of {}",
                self.max_evals, self.n
            )));
        }
        self.adaptation_params()?;
        self.variation.validate()?;
        if self.igd_samples == 0 {
            return Err(Error::Config("igd_samples must be positive".into()));
        }
        if self.sample_points == 0 {
            return Err(Error::Config("sample_points must be positive".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config(format!("confidence {} outside (0, 1)", self.confidence)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub eval_count: u64,
    pub active: usize,
    pub participating: usize,
    pub archive_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub generations: Vec<GenerationRecord>,
    /// Adaptations that changed the archive, plus the first cap hit of
    /// each streak.
    pub events: Vec<AdaptationEvent>,
    pub sample_times: Vec<u64>,
    pub igd: Vec<f64>,
    pub final_population: Vec<Individual>,
    pub archive: Vec<Individual>,
    pub final_igd: f64,
    /// Kept out of every output file so reruns are byte-identical.
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn count(&self, kind: AdaptationKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

fn dedup(pool: Vec<Individual>) -> Vec<Individual> {
    let mut seen = HashSet::with_capacity(pool.len());
    pool.into_iter().filter(|ind| seen.insert(ind.solution_key())).collect()
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn objectives_of(pop: &[Individual]) -> Vec<&ObjectiveVector> {
    pop.iter().map(|ind| &ind.objectives).collect()
}

/// One independent run with `seed`, measuring IGD against `pf`.
pub fn run_with_front(config: &RunConfig, seed: u64, pf: &[ObjectiveVector]) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let problem = config.problem_instance()?;
    let params = config.adaptation_params()?;
    let n = config.n;
    let bounds = problem.bounds().clone();

    let root = seed ^ config.variation.rng_seed;
    let mut init = stream(root, 0);
    let mut streams = VariationStreams {
        mating: stream(root, 1),
        crossover: stream(root, 2),
        mutation: stream(root, 3),
    };

    let mut population: Vec<Individual> = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..problem.d())
                .map(|j| init.random_range(bounds.lower[j]..=bounds.upper[j]))
                .collect();
            let f = problem.evaluate(&x);
            Individual::new(x, f)
        })
        .collect();
    let mut evals = n as u64;
    let mut ideal = IdealPoint::from_points(problem.m(), population.iter().map(|i| i.objectives.as_slice()));

    let mut archive = ReferenceArchive::for_population(problem.m(), n)?;
    let mut z = archive.participating();
    let mut ia = IndividualArchive::new();
    let mut history = ActivityHistory::new(config.w);

    let times = sample_times(n as u64, config.max_evals, config.sample_points);
    let mut igd_values = Vec::with_capacity(times.len());
    let mut generations = Vec::new();
    let mut events = Vec::new();
    let mut capped_streak = false;

    let record_samples = |values: &mut Vec<f64>, evals: u64, pop: &[Individual], inclusive_end: bool| -> Result<()> {
        while values.len() < times.len() {
            let t = times[values.len()];
            if t > evals || (t == config.max_evals && !inclusive_end) {
                break;
            }
            values.push(igd(pf, &objectives_of(pop))?);
        }
        Ok(())
    };
    record_samples(&mut igd_values, evals, &population, false)?;

    let mut generation = 0;
    while evals < config.max_evals {
        generation += 1;
        let k = n.min((config.max_evals - evals) as usize);
        let parents: Vec<Vec<f64>> = population.iter().map(|i| i.solution.clone()).collect();
        let children: Vec<Individual> = offspring(&parents, k, &config.variation, &bounds, &mut streams)
            .into_iter()
            .map(|x| {
                let f = problem.evaluate(&x);
                Individual::new(x, f)
            })
            .collect();
        evals += k as u64;
        for c in &children {
            ideal.observe(&c.objectives);
        }

        let mut pool = population;
        pool.extend(children);
        if !config.no_ia {
            pool.extend(ia.members().iter().cloned());
        }
        let pool = dedup(pool);
        let selected = cascade_cluster(&pool, &z, n, &ideal)?;
        population = selected.population;
        let active = if config.no_ia {
            frontier_activity(&population, &z, &ideal)?
        } else {
            ia.maintain(selected.centers);
            selected.active_indices
        };
        generations.push(GenerationRecord {
            generation,
            eval_count: evals,
            active: active.len(),
            participating: z.len(),
            archive_size: ia.len(),
        });

        if !config.fixed_z {
            history.push(activity_bits(&active, z.len()));
            if history.is_stable() {
                let (next, event) = adapt(&mut archive, &active, &params, generation)?;
                if event.kind != AdaptationKind::None {
                    log::debug!("seed {seed} generation {generation}: {:?}", event.kind);
                    history.clear();
                    z = next;
                    capped_streak = false;
                    events.push(event);
                } else if event.capped && !capped_streak {
                    capped_streak = true;
                    events.push(event);
                }
            }
        }
        record_samples(&mut igd_values, evals, &population, false)?;
    }

    let final_population = if config.no_ia {
        population
    } else {
        let mut pool: Vec<Individual> = ia.members().to_vec();
        pool.extend(population);
        cascade_cluster(&dedup(pool), &z, n, &ideal)?.population
    };
    record_samples(&mut igd_values, evals, &final_population, true)?;
    let final_igd = *igd_values.last().expect("at least one sample time");

    Ok(RunRecord {
        seed,
        generations,
        events,
        sample_times: times,
        igd: igd_values,
        final_population,
        archive: ia.members().to_vec(),
        final_igd,
        wall_time: started.elapsed(),
    })
}

/// One independent run; samples the true front itself.
pub fn run(config: &RunConfig, seed: u64) -> Result<RunRecord> {
    config.validate()?;
    let pf = config.problem_instance()?.sample_true_pf(config.igd_samples)?;
    run_with_front(config, seed, &pf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_igd: f64,
    pub shrinks: usize,
    pub expands: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub status: String,
    pub problem: String,
    pub m: usize,
    pub d: usize,
    pub n: usize,
    pub max_evals: u64,
    pub w: usize,
    pub theta: f64,
    pub no_ia: bool,
    pub fixed_z: bool,
    pub confidence: f64,
    pub median_igd: Option<f64>,
    pub best_igd: Option<f64>,
    pub worst_igd: Option<f64>,
    /// `None` when a confidence bound is not positive.
    pub stability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seeds: Vec<SeedSummary>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub trajectory: Trajectory,
    pub summary: Summary,
    pub records: Vec<RunRecord>,
}

fn summarize(config: &RunConfig, problem: &Problem, records: &[RunRecord]) -> Summary {
    let finals: Vec<f64> = records.iter().map(|r| r.final_igd).collect();
    Summary {
        status: "ok".into(),
        problem: problem.name().into(),
        m: problem.m(),
        d: problem.d(),
        n: config.n,
        max_evals: config.max_evals,
        w: config.w,
        theta: config.theta,
        no_ia: config.no_ia,
        fixed_z: config.fixed_z,
        confidence: config.confidence,
        median_igd: median(&finals),
        best_igd: finals.iter().copied().reduce(f64::min),
        worst_igd: finals.iter().copied().reduce(f64::max),
        stability: None,
        error: None,
        seeds: records
            .iter()
            .map(|r| SeedSummary {
                seed: r.seed,
                final_igd: r.final_igd,
                shrinks: r.count(AdaptationKind::Shrink),
                expands: r.count(AdaptationKind::Expand),
            })
            .collect(),
    }
}

/// Runs every seed of `config` in parallel and aggregates the IGD
/// trajectories. Writes output files when `config.out_dir` is set; if a
/// seed fails, the successful seeds are still written and the summary is
/// marked failed.
pub fn experiment(config: &RunConfig) -> Result<ExperimentResult> {
    config.validate()?;
    if config.seeds.is_empty() {
        return Err(Error::Config("no seeds given".into()));
    }
    let problem = config.problem_instance()?;
    let pf = problem.sample_true_pf(config.igd_samples)?;
    let outcomes: Vec<(u64, Result<RunRecord>)> = config
        .seeds
        .par_iter()
        .map(|&seed| (seed, run_with_front(config, seed, &pf)))
        .collect();

    let mut records = Vec::new();
    let mut failure = None;
    for (seed, outcome) in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                log::error!("seed {seed} failed: {e}");
                failure.get_or_insert((seed, e));
            }
        }
    }

    let mut summary = summarize(config, &problem, &records);
    if let Some((seed, e)) = failure {
        summary.status = "failed".into();
        summary.error = Some(format!("seed {seed}: {e}"));
        if let Some(dir) = &config.out_dir {
            write_run_files(dir, &records)?;
            write_file(&dir.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
        }
        return Err(e);
    }

    let runs: Vec<Vec<f64>> = records.iter().map(|r| r.igd.clone()).collect();
    let trajectory = Trajectory::from_runs(records[0].sample_times.clone(), &runs, config.confidence)?;
    summary.stability = match stability(&trajectory) {
        Ok(v) => Some(v),
        Err(e) => {
            log::warn!("stability undefined: {e}");
            None
        }
    };
    let result = ExperimentResult {
        trajectory,
        summary,
        records,
    };
    if let Some(dir) = &config.out_dir {
        write_outputs(dir, &result)?;
    }
    Ok(result)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_run_files(dir: &Path, records: &[RunRecord]) -> Result<()> {
    for r in records {
        let seed_dir = dir.join(format!("seed_{}", r.seed));
        fs::create_dir_all(&seed_dir).map_err(|e| Error::io(&seed_dir, e))?;
        write_file(&seed_dir.join("final_population.csv"), &objectives_csv(&r.final_population))?;
        write_file(&seed_dir.join("ia.csv"), &objectives_csv(&r.archive))?;

        let mut events = String::new();
        for e in &r.events {
            events.push_str(&serde_json::to_string(e)?);
            events.push('\n');
        }
        write_file(&seed_dir.join("events.jsonl"), &events)?;

        let mut gens = String::from("generation,eval_count,active,participating,archive_size\n");
        for g in &r.generations {
            let _ = writeln!(
                gens,
                "{},{},{},{},{}",
                g.generation, g.eval_count, g.active, g.participating, g.archive_size
            );
        }
        write_file(&seed_dir.join("generations.csv"), &gens)?;

        let mut igd_csv = String::from("eval_count,igd\n");
        for (t, v) in r.sample_times.iter().zip(&r.igd) {
            let _ = writeln!(igd_csv, "{t},{v}");
        }
        write_file(&seed_dir.join("igd.csv"), &igd_csv)?;
    }
    Ok(())
}

/// Writes `trajectory.csv`, `summary.json` and one directory per seed.
pub fn write_outputs(dir: &Path, result: &ExperimentResult) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("trajectory.csv"), &result.trajectory.to_csv())?;
    write_file(&dir.join("summary.json"), &(serde_json::to_string_pretty(&result.summary)? + "\n"))?;
    write_run_files(dir, &result.records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: &str) -> RunConfig {
        let mut c = RunConfig::new(problem, 3, 28, 28 * 15);
        c.w = 3;
        c.igd_samples = 300;
        c.sample_points = 11;
        c
    }

    #[test]
    fn validation() {
        assert!(small("dtlz2").validate().is_ok());
        let mut c = small("dtlz2");
        c.max_evals = 10;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        assert!(small("nope").validate().unwrap_err().is_config());
        let mut c = small("dtlz2");
        c.theta = 1.5;
        assert!(c.validate().unwrap_err().is_config());
        let mut c = small("dtlz2");
        c.n = 2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn record_invariants() {
        let c = small("dtlz2");
        let r = run(&c, 7).unwrap();
        assert_eq!(r.final_population.len(), c.n);
        assert_eq!(r.igd.len(), c.sample_points);
        assert_eq!(r.generations.len(), 14);
        assert!(r.generations.windows(2).all(|g| g[1].eval_count == g[0].eval_count + c.n as u64));
        assert_eq!(r.generations.last().unwrap().eval_count, c.max_evals);
        assert!(r.igd.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(r.archive.len() <= r.generations.last().unwrap().participating);
    }

    #[test]
    fn partial_final_generation() {
        let mut c = small("dtlz2");
        c.max_evals = 28 * 3 + 5;
        let r = run(&c, 1).unwrap();
        let counts: Vec<u64> = r.generations.iter().map(|g| g.eval_count).collect();
        assert_eq!(counts, vec![56, 84, 89]);
        assert_eq!(r.final_population.len(), 28);
    }

    #[test]
    fn same_seed_same_record() {
        let c = small("maf1");
        let a = run(&c, 3).unwrap();
        let b = run(&c, 3).unwrap();
        assert_eq!(a.igd, b.igd);
        assert_eq!(a.final_population, b.final_population);
        assert_eq!(a.events, b.events);
        assert_ne!(run(&c, 4).unwrap().igd, a.igd);
    }

    #[test]
    fn ablation_flags_run() {
        let mut c = small("maf1");
        c.fixed_z = true;
        let r = run(&c, 2).unwrap();
        assert!(r.events.is_empty());
        assert!(r.generations.iter().all(|g| g.participating == r.generations[0].participating));
        let mut c = small("maf1");
        c.no_ia = true;
        let r = run(&c, 2).unwrap();
        assert!(r.archive.is_empty());
        assert_eq!(r.final_population.len(), c.n);
    }

    #[test]
    fn config_json_round_trip_and_aliases() {
        let c: RunConfig = serde_json::from_str(
            r#"{"problem":"dtlz2","m":3,"n":92,"evals":10000,"seeds":[1,2],"out":"x"}"#,
        )
        .unwrap();
        assert_eq!(c.max_evals, 10_000);
        assert_eq!(c.w, 20);
        assert_eq!(c.theta, 0.2);
        assert_eq!(c.out_dir, Some(PathBuf::from("x")));
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<RunConfig>(r#"{"problem":"dtlz2","m":3,"n":92,"evals":1,"bogus":1}"#).is_err());
    }
}
