//! The `rho`, `bounds` and `thresholds` subcommands.

use std::fs;
use std::time::Instant;

use anyhow::{Context, Result};
use smst_core::bounds::{solve_g_system, BoundsTable, GParams};
use smst_core::rho::{align_translate, RhoFamily, RhoParams};
use smst_core::thresholds::{
    core3_threshold, phi_from_grid, phi_k2, solve_theta_ode, Phi, DEFAULT_THETA_STEP,
};

use crate::config::RunConfig;
use crate::formats::{
    write_curve, write_g_csv, write_json, write_records, BoundsRecord, FamilyFile, FamilyLevel,
    ThresholdRecord, ThresholdsFile,
};
use crate::manifest::Manifest;

pub const FAMILY_JSON: &str = "family.json";
pub const G_CSV: &str = "g.csv";
pub const BOUNDS_CSV: &str = "bounds.csv";
pub const THRESHOLDS_JSON: &str = "thresholds.json";

/// Default Euler step of the occupancy system.
pub const DEFAULT_BOUNDS_DT: f64 = 1e-5;

pub fn rho_params(cfg: &RunConfig) -> RhoParams {
    let mut p = RhoParams::default();
    if let Some(dt) = cfg.dt {
        p.dt = dt;
    }
    if let Some(w) = cfg.window {
        p.window = w;
    }
    p
}

pub fn curve_file(k: usize) -> String {
    format!("rho_{k}.csv")
}

pub fn aligned_file(k: usize) -> String {
    format!("rho_{k}_aligned.csv")
}

/// Computes `ρ_1..ρ_K`, writing one `t,rho` file per level (absolute time),
/// the aligned copies, and `family.json`.
pub fn run_rho(cfg: &RunConfig) -> Result<FamilyFile> {
    let start = Instant::now();
    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = Manifest::new(cfg)?;
    let p = rho_params(cfg);
    let fam = RhoFamily::compute(cfg.k_max, &p)?;
    let mut levels = Vec::new();
    for k in 1..=cfg.k_max {
        let rho = fam.rho(k);
        write_curve(&dir.join(curve_file(k)), rho)?;
        manifest.outputs.push(curve_file(k));
        if let Ok(a) = align_translate(rho) {
            write_curve(&dir.join(aligned_file(k)), &a.curve)?;
            manifest.outputs.push(aligned_file(k));
        }
        let g = fam.gamma(k);
        levels.push(FamilyLevel {
            k,
            translation: fam.translation[k],
            xi_hat: fam.xi_hat[k],
            gamma: g.value,
            gamma_approximate: g.approximate,
            mass: fam.mass(k).integral,
            curve: curve_file(k),
        });
    }
    let file = FamilyFile {
        dt: p.dt,
        window: p.window,
        levels,
    };
    write_json(&dir.join(FAMILY_JSON), &file)?;
    manifest.outputs.push(FAMILY_JSON.into());
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(file)
}

/// Solves the occupancy system and writes `g.csv` and `bounds.csv`.
pub fn run_bounds(cfg: &RunConfig) -> Result<Vec<BoundsRecord>> {
    let start = Instant::now();
    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = Manifest::new(cfg)?;
    let params = GParams::new(cfg.k_max, cfg.dt.unwrap_or(DEFAULT_BOUNDS_DT));
    let system = solve_g_system(&params)?;
    if !system.tail_met {
        eprintln!(
            "warning: horizon {} reached before 1 - g_K < {}; Gamma_bar is truncated",
            params.horizon, params.tail_tol
        );
    }
    let table = BoundsTable::build(cfg.k_max as u32, Some(&system))?;
    let rows: Vec<BoundsRecord> = table
        .rows
        .iter()
        .map(|r| BoundsRecord {
            k: r.k,
            gamma_lower: r.gamma_lower,
            gamma_upper: r.gamma_upper,
            big_gamma_lower: r.big_gamma_lower,
            big_gamma_upper: r.big_gamma_upper,
            gamma_bar: r.gamma_bar.filter(|_| system.tail_met),
        })
        .collect();
    write_g_csv(&dir.join(G_CSV), &system.g)?;
    write_records(&dir.join(BOUNDS_CSV), &rows)?;
    manifest.outputs.extend([G_CSV.into(), BOUNDS_CSV.into()]);
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(rows)
}

/// `σ_2` from the closed-form inverse and `σ_3..σ_K` from computed curves,
/// plus `c_3`.
pub fn run_thresholds(cfg: &RunConfig) -> Result<ThresholdsFile> {
    let start = Instant::now();
    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = Manifest::new(cfg)?;
    let mut results = Vec::new();
    let k_top = cfg.k_max.max(2);
    let fam = if k_top > 2 {
        let mut p = RhoParams::default();
        if let Some(w) = cfg.window {
            p.window = w;
        }
        Some(RhoFamily::compute(k_top - 1, &p)?)
    } else {
        None
    };
    for k in 2..=k_top {
        let (phi, step): (Box<dyn Phi>, f64) = if k == 2 {
            (Box::new(phi_k2()), cfg.dt.unwrap_or(DEFAULT_THETA_STEP))
        } else {
            let rho = fam.as_ref().expect("family computed for k > 2").rho(k - 1);
            // the grid inverse is piecewise linear; a finer θ-step adds nothing
            (Box::new(phi_from_grid(rho)?), cfg.dt.unwrap_or(1e-4))
        };
        let r = solve_theta_ode(phi.as_ref(), step)?;
        results.push(ThresholdRecord {
            k,
            s_k: r.s,
            sigma_k: r.sigma,
            step: r.step,
            assumption_flag: k >= 3,
        });
    }
    let (c3_lambda, c3) = core3_threshold();
    let file = ThresholdsFile {
        c3,
        c3_lambda,
        results,
    };
    write_json(&dir.join(THRESHOLDS_JSON), &file)?;
    manifest.outputs.push(THRESHOLDS_JSON.into());
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(file)
}
