//! The `report` subcommand: tables assembled from the other subcommands'
//! outputs under the runs root.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::config::RunConfig;
use crate::formats::{
    read_json, read_records, write_records, BoundsRecord, FamilyFile, ThresholdsFile,
};
use crate::manifest::Manifest;
use crate::numerics::{
    run_bounds, run_rho, run_thresholds, BOUNDS_CSV, FAMILY_JSON, THRESHOLDS_JSON,
};
use crate::simulate::{run_simulate, AggregateStats, AGGREGATE_JSON};

pub const GAMMA_TABLE_CSV: &str = "gamma_table.csv";
pub const GAMMA_MINUS_CSV: &str = "gamma_minus_2km1.csv";
pub const GAMMA_BOUNDS_CSV: &str = "Gamma_bounds.csv";
pub const THRESHOLDS_CSV: &str = "thresholds.csv";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaTableRow {
    pub k: usize,
    pub gamma: f64,
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaMinusRow {
    pub k: usize,
    pub mean_minus_2km1: Option<f64>,
    pub std_err: Option<f64>,
    pub completed: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct GammaBoundsRow {
    pub k: u32,
    pub Gamma_lower: f64,
    pub Gamma_upper: f64,
    pub Gamma_bar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub k: usize,
    pub s_k: f64,
    pub sigma_k: f64,
    pub assumption_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub gamma_table: Vec<GammaTableRow>,
    pub gamma_minus: Vec<GammaMinusRow>,
    pub gamma_bounds: Vec<GammaBoundsRow>,
    pub thresholds: Vec<ThresholdRow>,
}

/// Config for an upstream subcommand writing into its default directory.
fn upstream(cfg: &RunConfig, sub: &str) -> RunConfig {
    let mut c = cfg.clone();
    c.subcommand = sub.to_string();
    c.out = cfg.runs.join(sub);
    c
}

/// Loads `file` from `<runs>/<sub>`, or runs `sub` first when allowed.
fn load<T>(
    cfg: &RunConfig,
    sub: &str,
    file: &str,
    compute_missing: bool,
    compute: impl FnOnce(&RunConfig) -> Result<()>,
    read: impl FnOnce(&Path) -> Result<T>,
) -> Result<T> {
    let path: PathBuf = cfg.runs.join(sub).join(file);
    if !path.exists() {
        if !compute_missing {
            bail!(
                "missing {}: produced by `smst {sub}` (run it first, or pass --compute-missing)",
                path.display()
            );
        }
        compute(&upstream(cfg, sub))
            .with_context(|| format!("computing missing `{sub}` output"))?;
    }
    read(&path)
}

pub fn run_report(cfg: &RunConfig, compute_missing: bool) -> Result<Report> {
    let start = Instant::now();
    let family: FamilyFile = load(
        cfg,
        "rho",
        FAMILY_JSON,
        compute_missing,
        |c| run_rho(c).map(drop),
        read_json,
    )?;
    let agg: AggregateStats = load(
        cfg,
        "simulate",
        AGGREGATE_JSON,
        compute_missing,
        |c| run_simulate(c).map(drop),
        read_json,
    )?;
    let bounds: Vec<BoundsRecord> = load(
        cfg,
        "bounds",
        BOUNDS_CSV,
        compute_missing,
        |c| run_bounds(c).map(drop),
        read_records,
    )?;
    let thresholds: ThresholdsFile = load(
        cfg,
        "thresholds",
        THRESHOLDS_JSON,
        compute_missing,
        |c| run_thresholds(c).map(drop),
        read_json,
    )?;

    let report = Report {
        gamma_table: family
            .levels
            .iter()
            .map(|l| GammaTableRow {
                k: l.k,
                gamma: l.gamma,
                approximate: l.gamma_approximate,
            })
            .collect(),
        gamma_minus: agg
            .levels
            .iter()
            .map(|l| GammaMinusRow {
                k: l.k,
                mean_minus_2km1: l.mean.map(|m| m - (2 * l.k - 1) as f64),
                std_err: l.std_err,
                completed: l.completed,
                censored: l.censored,
            })
            .collect(),
        gamma_bounds: bounds
            .iter()
            .map(|b| GammaBoundsRow {
                k: b.k,
                Gamma_lower: b.big_gamma_lower,
                Gamma_upper: b.big_gamma_upper,
                Gamma_bar: b.gamma_bar,
            })
            .collect(),
        thresholds: thresholds
            .results
            .iter()
            .map(|t| ThresholdRow {
                k: t.k,
                s_k: t.s_k,
                sigma_k: t.sigma_k,
                assumption_flag: t.assumption_flag,
            })
            .collect(),
    };

    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = Manifest::new(cfg)?;
    write_records(&dir.join(GAMMA_TABLE_CSV), &report.gamma_table)?;
    write_records(&dir.join(GAMMA_MINUS_CSV), &report.gamma_minus)?;
    write_records(&dir.join(GAMMA_BOUNDS_CSV), &report.gamma_bounds)?;
    write_records(&dir.join(THRESHOLDS_CSV), &report.thresholds)?;
    manifest.outputs.extend(
        [
            GAMMA_TABLE_CSV,
            GAMMA_MINUS_CSV,
            GAMMA_BOUNDS_CSV,
            THRESHOLDS_CSV,
        ]
        .map(String::from),
    );
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(report)
}
