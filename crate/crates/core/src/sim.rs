//! Single cascade runs: drive a [`CascadeState`] from an edge stream, sample
//! the structural time series and read off the tree costs.

use alloc::vec::Vec;

use crate::cascade::CascadeState;
use crate::stream::{Arrival, EdgeStreamConfig};
use crate::{Error, Result};

pub const DEFAULT_SAMPLE_DT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub k_max: usize,
    /// Trace sampling interval; `None` disables the trace.
    pub sample_dt: Option<f64>,
    /// Also record `χ/n` per level at every sample (an O(n·K) scan each).
    pub susceptibility: bool,
}

impl RunOptions {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            sample_dt: Some(DEFAULT_SAMPLE_DT),
            susceptibility: false,
        }
    }
}

/// One sample of the cascade at time `t`; vectors are indexed by level − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    /// `C1(G_k(t))/n`.
    pub c1_frac: Vec<f64>,
    /// `e(G_k(t))/n`.
    pub edges_frac: Vec<f64>,
    /// `χ(G_k(t))/n = Σ C_i² / n²`.
    pub chi_frac: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CascadeTrace {
    pub sample_dt: f64,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSummary {
    /// Tree cost if the level completed; otherwise the partial forest cost,
    /// a lower bound.
    pub gamma_hat: f64,
    pub completed: bool,
    pub completion_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub config: EdgeStreamConfig,
    pub k_max: usize,
    pub levels: Vec<LevelSummary>,
    pub trace: CascadeTrace,
    pub arrivals: u64,
    /// Time of the last processed arrival.
    pub t_final: f64,
}

impl SimSummary {
    pub fn gamma_hat(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.gamma_hat).collect()
    }

    /// True if some level did not span by the horizon.
    pub fn censored(&self) -> bool {
        self.levels.iter().any(|l| !l.completed)
    }
}

struct Sampler {
    dt: f64,
    next: u64,
    chi: bool,
    rows: Vec<TraceRow>,
}

impl Sampler {
    /// Records every sample time strictly before `t`.
    fn advance_to(&mut self, t: f64, state: &CascadeState) {
        while (self.next as f64) * self.dt < t {
            let ts = self.next as f64 * self.dt;
            self.rows.push(sample(ts, state, self.chi));
            self.next += 1;
        }
    }
}

fn sample(t: f64, state: &CascadeState, chi: bool) -> TraceRow {
    let n = state.n() as f64;
    let k = state.k_max();
    let c1_frac = (1..=k)
        .map(|l| state.largest_component(l) as f64 / n)
        .collect();
    let edges_frac = state
        .reached_edges()
        .iter()
        .map(|&e| e as f64 / n)
        .collect();
    let chi_frac = chi.then(|| {
        (1..=k)
            .map(|l| state.forest(l).susceptibility().0 / n)
            .collect()
    });
    TraceRow {
        t,
        c1_frac,
        edges_frac,
        chi_frac,
    }
}

/// Runs the cascade until level `k_max` spans or the next arrival would
/// pass `t_max`.
pub fn run_cascade(cfg: &EdgeStreamConfig, opts: &RunOptions) -> Result<SimSummary> {
    let stream = cfg.stream()?;
    run_cascade_on(cfg, opts, stream)
}

/// As [`run_cascade`], on an explicit arrival sequence.
pub fn run_cascade_on(
    cfg: &EdgeStreamConfig,
    opts: &RunOptions,
    arrivals: impl IntoIterator<Item = Arrival>,
) -> Result<SimSummary> {
    cfg.validate()?;
    if opts.k_max < 1 {
        return Err(Error::InvalidParameter {
            name: "k_max",
            reason: "need at least one level",
        });
    }
    if let Some(dt) = opts.sample_dt {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sample_dt",
                reason: "must be positive",
            });
        }
    }
    let mut state = CascadeState::new(cfg.n, opts.k_max);
    let mut sampler = opts.sample_dt.map(|dt| Sampler {
        dt,
        next: 0,
        chi: opts.susceptibility,
        rows: Vec::new(),
    });
    let mut t_final = 0.0;
    for a in arrivals {
        if cfg.t_max.is_some_and(|t_max| a.t > t_max) {
            break;
        }
        if let Some(s) = sampler.as_mut() {
            s.advance_to(a.t, &state);
        }
        state.insert(a.u, a.v, a.t);
        t_final = a.t;
        if state.all_spanning() {
            break;
        }
    }
    if let Some(s) = sampler.as_mut() {
        // close the trace at the first sample time at or after the end
        s.advance_to(t_final, &state);
        let ts = s.next as f64 * s.dt;
        s.rows.push(sample(ts, &state, s.chi));
        s.next += 1;
    }

    let levels = (0..opts.k_max)
        .map(|k| LevelSummary {
            gamma_hat: state.cost_sum()[k],
            completed: state.completion_time()[k].is_some(),
            completion_time: state.completion_time()[k],
        })
        .collect();
    let trace = sampler
        .map(|s| CascadeTrace {
            sample_dt: s.dt,
            rows: s.rows,
        })
        .unwrap_or_default();
    Ok(SimSummary {
        config: *cfg,
        k_max: opts.k_max,
        levels,
        trace,
        arrivals: state.arrivals(),
        t_final,
    })
}
