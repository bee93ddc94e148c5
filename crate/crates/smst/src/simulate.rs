//! Seeded parallel simulation sweeps and their aggregation.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smst_core::sim::{run_cascade, RunOptions, SimSummary};
use smst_core::stream::EdgeStreamConfig;

use crate::config::RunConfig;
use crate::formats::{write_json, write_records, write_trace, SeedSummary};
use crate::manifest::Manifest;

pub const AGGREGATE_JSON: &str = "aggregate.json";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const FAILURES_JSON: &str = "failures.json";
pub const SEEDS_DIR: &str = "seeds";

pub fn summary_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(SEEDS_DIR).join(format!("seed-{seed}.json"))
}

pub fn trace_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(SEEDS_DIR).join(format!("seed-{seed}.trace.csv"))
}

/// Per-level statistics over the completed runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub k: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation over `√completed`; absent below two runs.
    pub std_err: Option<f64>,
    pub completed: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: usize,
    pub seeds: Vec<u64>,
    pub failed_seeds: Vec<u64>,
    pub levels: Vec<LevelStats>,
}

impl AggregateStats {
    /// Folds per-seed summaries, excluding censored levels from the means.
    pub fn from_summaries(n: usize, k_max: usize, runs: &[SeedSummary], failed: Vec<u64>) -> Self {
        let levels = (0..k_max)
            .map(|i| {
                let done: Vec<f64> = runs
                    .iter()
                    .filter_map(|r| r.levels.get(i))
                    .filter(|l| l.completed)
                    .map(|l| l.gamma_hat)
                    .collect();
                let m = done.len();
                let mean = (m > 0).then(|| done.iter().sum::<f64>() / m as f64);
                let std_err = mean.filter(|_| m >= 2).map(|mu| {
                    let var = done.iter().map(|g| (g - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
                    (var / m as f64).sqrt()
                });
                LevelStats {
                    k: i + 1,
                    mean,
                    std_err,
                    completed: m,
                    censored: runs.len() - m,
                }
            })
            .collect();
        Self {
            n,
            seeds: runs.iter().map(|r| r.seed).collect(),
            failed_seeds: failed,
            levels,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Failure {
    seed: u64,
    error: String,
}

pub fn stream_config(cfg: &RunConfig, seed: u64) -> EdgeStreamConfig {
    EdgeStreamConfig {
        n: cfg.n,
        mode: cfg.arrival_mode(),
        seed,
        t_max: cfg.t_max,
    }
}

pub fn run_options(cfg: &RunConfig) -> RunOptions {
    RunOptions {
        k_max: cfg.k_max,
        sample_dt: Some(cfg.sample_dt),
        susceptibility: cfg.susceptibility,
    }
}

/// One seed, run to completion (single-threaded).
pub fn run_seed(cfg: &RunConfig, seed: u64) -> Result<SimSummary> {
    Ok(run_cascade(&stream_config(cfg, seed), &run_options(cfg))?)
}

fn write_seed(dir: &Path, s: &SimSummary) -> Result<()> {
    let seed = s.config.seed;
    write_json(&summary_path(dir, seed), &SeedSummary::from_sim(s))?;
    write_trace(&trace_path(dir, seed), &s.trace)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    Ok(b.build()?)
}

/// Runs every seed in parallel, writes per-seed files as they finish and the
/// aggregate last. Failing seeds are listed in `failures.json` and left out.
pub fn run_simulate(cfg: &RunConfig) -> Result<AggregateStats> {
    let start = Instant::now();
    let dir = &cfg.out;
    fs::create_dir_all(dir.join(SEEDS_DIR))
        .with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = Manifest::new(cfg)?;

    let results: Vec<(u64, f64, Result<SeedSummary>)> = pool(cfg.workers)?.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let t0 = Instant::now();
                let r = run_seed(cfg, seed).and_then(|s| {
                    write_seed(dir, &s)?;
                    Ok(SeedSummary::from_sim(&s))
                });
                (seed, t0.elapsed().as_secs_f64(), r)
            })
            .collect()
    });

    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (seed, wall, r) in results {
        manifest.seed_wall_time_s.insert(seed, wall);
        match r {
            Ok(s) => {
                manifest.outputs.push(rel(dir, &summary_path(dir, seed)));
                manifest.outputs.push(rel(dir, &trace_path(dir, seed)));
                ok.push(s);
            }
            Err(e) => failures.push(Failure {
                seed,
                error: format!("{e:#}"),
            }),
        }
    }
    let failed: Vec<u64> = failures.iter().map(|f| f.seed).collect();
    let agg = AggregateStats::from_summaries(cfg.n, cfg.k_max, &ok, failed);
    if !failures.is_empty() {
        write_json(&dir.join(FAILURES_JSON), &failures)?;
        manifest.outputs.push(FAILURES_JSON.into());
    }
    write_json(&dir.join(AGGREGATE_JSON), &agg)?;
    write_records(&dir.join(AGGREGATE_CSV), &agg.levels)?;
    manifest
        .outputs
        .extend([AGGREGATE_JSON.into(), AGGREGATE_CSV.into()]);
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(agg)
}

fn rel(dir: &Path, p: &Path) -> String {
    p.strip_prefix(dir).unwrap_or(p).display().to_string()
}
