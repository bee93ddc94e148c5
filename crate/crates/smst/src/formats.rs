//! On-disk formats: JSON summaries and the CSV schemas.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use smst_core::grid::GridFunction;
use smst_core::sim::{CascadeTrace, SimSummary};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_records<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: usize,
    pub gamma_hat: f64,
    pub completed: bool,
    pub completion_time: Option<f64>,
}

/// Per-seed summary. Holds no timing so that reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub n: usize,
    pub mode: String,
    pub t_max: Option<f64>,
    pub k_max: usize,
    pub sample_dt: Option<f64>,
    pub arrivals: u64,
    pub t_final: f64,
    pub censored: bool,
    pub levels: Vec<LevelRecord>,
}

impl SeedSummary {
    pub fn from_sim(s: &SimSummary) -> Self {
        Self {
            seed: s.config.seed,
            n: s.config.n,
            mode: s.config.mode.as_str().to_string(),
            t_max: s.config.t_max,
            k_max: s.k_max,
            sample_dt: (!s.trace.rows.is_empty()).then_some(s.trace.sample_dt),
            arrivals: s.arrivals,
            t_final: s.t_final,
            censored: s.censored(),
            levels: s
                .levels
                .iter()
                .enumerate()
                .map(|(i, l)| LevelRecord {
                    k: i + 1,
                    gamma_hat: l.gamma_hat,
                    completed: l.completed,
                    completion_time: l.completion_time,
                })
                .collect(),
        }
    }
}

/// One trace row for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub k: usize,
    pub c1_frac: f64,
    pub edges_frac: f64,
    pub chi_frac: Option<f64>,
}

/// Writes `t,k,c1_frac,edges_frac[,chi_frac]`, one row per sample and level.
pub fn write_trace(path: &Path, trace: &CascadeTrace) -> Result<()> {
    let chi = trace.rows.first().is_some_and(|r| r.chi_frac.is_some());
    let mut w = csv_writer(path)?;
    let mut header = vec!["t", "k", "c1_frac", "edges_frac"];
    if chi {
        header.push("chi_frac");
    }
    w.write_record(&header)?;
    for row in &trace.rows {
        for k in 0..row.c1_frac.len() {
            let mut rec = vec![
                row.t.to_string(),
                (k + 1).to_string(),
                row.c1_frac[k].to_string(),
                row.edges_frac[k].to_string(),
            ];
            if let Some(c) = &row.chi_frac {
                rec.push(c[k].to_string());
            }
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let chi = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["t", "k", "c1_frac", "edges_frac"] => false,
        ["t", "k", "c1_frac", "edges_frac", "chi_frac"] => true,
        _ => bail!("{}: unexpected trace header {header:?}", path.display()),
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> { Ok(rec[i].parse()?) };
        out.push(TraceRecord {
            t: f(0)?,
            k: rec[1].parse()?,
            c1_frac: f(2)?,
            edges_frac: f(3)?,
            chi_frac: if chi { Some(f(4)?) } else { None },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct CurvePoint {
    t: f64,
    rho: f64,
}

/// Writes a curve as `t,rho` in absolute time.
pub fn write_curve(path: &Path, g: &GridFunction) -> Result<()> {
    let rows: Vec<CurvePoint> = g
        .values
        .iter()
        .enumerate()
        .map(|(i, &rho)| CurvePoint { t: g.t_at(i), rho })
        .collect();
    write_records(path, &rows)
}

pub fn read_curve(path: &Path) -> Result<GridFunction> {
    let rows: Vec<CurvePoint> = read_records(path)?;
    if rows.len() < 2 {
        bail!("{}: curve needs at least two points", path.display());
    }
    let dt = rows[1].t - rows[0].t;
    Ok(GridFunction::new(
        rows[0].t,
        dt,
        rows.iter().map(|p| p.rho).collect(),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyLevel {
    pub k: usize,
    pub translation: f64,
    pub xi_hat: Option<f64>,
    pub gamma: f64,
    pub gamma_approximate: bool,
    pub mass: f64,
    pub curve: String,
}

/// `family.json` written by `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub dt: f64,
    pub window: f64,
    pub levels: Vec<FamilyLevel>,
}

/// One row of `bounds.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub k: u32,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    #[serde(rename = "Gamma_lower")]
    pub big_gamma_lower: f64,
    #[serde(rename = "Gamma_upper")]
    pub big_gamma_upper: f64,
    #[serde(rename = "Gamma_bar")]
    pub gamma_bar: Option<f64>,
}

/// Writes `t,g1..gK` from trajectories on a common grid.
pub fn write_g_csv(path: &Path, g: &[GridFunction]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=g.len()).map(|k| format!("g{k}")));
    w.write_record(&header)?;
    let len = g.iter().map(GridFunction::len).min().unwrap_or(0);
    for i in 0..len {
        let mut rec = vec![g[0].t_at(i).to_string()];
        rec.extend(g.iter().map(|gk| gk.values[i].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub k: usize,
    pub s_k: f64,
    pub sigma_k: f64,
    pub step: f64,
    /// Set when the result rests on an unproven regularity assumption on
    /// the inverse curve (every `k ≥ 3`).
    pub assumption_flag: bool,
}

/// `thresholds.json` written by `thresholds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsFile {
    pub c3: f64,
    pub c3_lambda: f64,
    pub results: Vec<ThresholdRecord>,
}
