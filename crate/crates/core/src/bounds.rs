//! Bounds on `γ_k` and on the cumulative cost `Γ_k = γ_1 + … + γ_k`.
//!
//! The closed forms come from `k² ≤ Γ_k ≤ k² + k` and the monotonicity of
//! `γ_k`. The sharper upper bound `Γ̄_k = ½ ∫ t (1 − g_k²) dt` uses the
//! occupancy functions of a majorizing process in which every forest is one
//! component:
//!
//! ```text
//! g_k' = ½ (g_{k-1}² − g_k²),   g_k(0) = 0,   g_0 ≡ 1.
//! ```

use alloc::vec::Vec;

use crate::grid::{trapezoid, GridFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GParams {
    pub k_max: usize,
    pub dt: f64,
    /// Give up at this time if the tail criterion is not met.
    pub horizon: f64,
    /// Stop once `1 − g_{k_max} <` this.
    pub tail_tol: f64,
    /// Spacing of the stored trajectories (rounded to a multiple of `dt`).
    pub sample_dt: f64,
    pub integrator: Integrator,
}

impl GParams {
    pub fn new(k_max: usize, dt: f64) -> Self {
        Self {
            k_max,
            dt,
            horizon: default_horizon(k_max),
            tail_tol: 1e-7,
            sample_dt: 0.01,
            integrator: Integrator::Euler,
        }
    }
}

/// Horizon that leaves room for `g_k` to saturate: it rises near `t ≈ 2k`.
pub fn default_horizon(k_max: usize) -> f64 {
    60.0f64.max(4.0 * k_max as f64 + 20.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GSystem {
    pub params: GParams,
    /// `g_1, …, g_K` sampled every `params.sample_dt` (index `k − 1`).
    pub g: Vec<GridFunction>,
    /// `Γ̄_k` from the full-resolution trajectory (index `k − 1`).
    pub gamma_bar: Vec<f64>,
    /// Time the integration stopped.
    pub t_end: f64,
    /// False if the horizon was reached first; `gamma_bar` is then truncated.
    pub tail_met: bool,
}

fn derivative(g: &[f64], out: &mut [f64]) {
    let mut prev_sq = 1.0;
    for (o, &gk) in out.iter_mut().zip(g) {
        let sq = gk * gk;
        *o = 0.5 * (prev_sq - sq);
        prev_sq = sq;
    }
}

/// Integrates the occupancy system and accumulates `Γ̄_k` as it goes.
pub fn solve_g_system(params: &GParams) -> Result<GSystem> {
    let &GParams {
        k_max,
        dt,
        horizon,
        tail_tol,
        sample_dt,
        integrator,
    } = params;
    if k_max == 0 {
        return Err(Error::InvalidParameter {
            name: "k_max",
            reason: "need at least one level",
        });
    }
    if !(dt > 0.0 && dt < 1.0) || !(horizon > dt) || !(sample_dt >= dt) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: "need 0 < dt < 1, horizon > dt and sample_dt >= dt",
        });
    }
    let stride = libm::round(sample_dt / dt).max(1.0) as u64;
    let stored_dt = stride as f64 * dt;

    let mut g = alloc::vec![0.0f64; k_max];
    let mut d = alloc::vec![0.0f64; k_max];
    let mut stage = alloc::vec![0.0f64; k_max];
    let mut k4 = alloc::vec![0.0f64; k_max];
    let mut k1 = alloc::vec![0.0f64; k_max];
    let mut k2 = alloc::vec![0.0f64; k_max];
    let mut k3 = alloc::vec![0.0f64; k_max];
    let mut samples: Vec<Vec<f64>> = (0..k_max).map(|_| alloc::vec![0.0]).collect();
    // trapezoid of t (1 − g²): the t = 0 endpoint contributes nothing
    let mut gamma_sum = alloc::vec![0.0f64; k_max];
    let mut step: u64 = 0;
    let mut t = 0.0;
    let tail_met = loop {
        if 1.0 - g[k_max - 1] < tail_tol {
            break true;
        }
        if t >= horizon {
            break false;
        }
        match integrator {
            Integrator::Euler => {
                derivative(&g, &mut d);
                for (gk, dk) in g.iter_mut().zip(&d) {
                    *gk += dt * dk;
                }
            }
            Integrator::Rk4 => {
                derivative(&g, &mut k1);
                for i in 0..k_max {
                    stage[i] = g[i] + 0.5 * dt * k1[i];
                }
                derivative(&stage, &mut k2);
                for i in 0..k_max {
                    stage[i] = g[i] + 0.5 * dt * k2[i];
                }
                derivative(&stage, &mut k3);
                for i in 0..k_max {
                    stage[i] = g[i] + dt * k3[i];
                }
                derivative(&stage, &mut k4);
                for i in 0..k_max {
                    g[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        step += 1;
        t = step as f64 * dt;
        for (sum, &gk) in gamma_sum.iter_mut().zip(&g) {
            *sum += t * (1.0 - gk * gk);
        }
        if step.is_multiple_of(stride) {
            for (s, &gk) in samples.iter_mut().zip(&g) {
                s.push(gk);
            }
        }
    };
    // the last point is an end point and gets half weight; beyond t_end the
    // integrand is taken as 0
    let gamma_bar = gamma_sum
        .iter()
        .zip(&g)
        .map(|(&s, &gk)| 0.5 * dt * (s - 0.5 * t * (1.0 - gk * gk)))
        .collect();
    let g = samples
        .into_iter()
        .map(|values| GridFunction::new(0.0, stored_dt, values))
        .collect::<Result<Vec<_>>>()?;
    Ok(GSystem {
        params: *params,
        g,
        gamma_bar,
        t_end: t,
        tail_met,
    })
}

/// `½ ∫ t (1 − g²) dt` by the trapezoid rule on the grid of `g`.
pub fn gamma_bar(g: &GridFunction) -> f64 {
    0.5 * trapezoid(
        g.values
            .iter()
            .enumerate()
            .map(|(i, &v)| g.t_at(i) * (1.0 - v * v)),
        g.dt,
    )
}

/// One row of closed-form bounds for level `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub k: u32,
    pub ell: u32,
    /// `2k + 1 − ℓ − k/ℓ`.
    pub gamma_lower: f64,
    /// `2k − 1 + ℓ + (k − 1)/ℓ`.
    pub gamma_upper: f64,
    /// `k²`.
    pub big_gamma_lower: f64,
    /// `k² + k`.
    pub big_gamma_upper: f64,
    /// `2k − 2√k`.
    pub sqrt_lower: f64,
    /// `2k + 2√k`.
    pub sqrt_upper: f64,
    /// `Γ̄_k` from the occupancy ODE, when computed.
    pub gamma_bar: Option<f64>,
}

/// Closed-form bounds; `ell` defaults to `⌈√k⌉`.
pub fn closed_bounds(k: u32, ell: Option<u32>) -> Result<BoundsRow> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "levels start at 1",
        });
    }
    let kf = k as f64;
    let root = libm::sqrt(kf);
    let ell = ell.unwrap_or(libm::ceil(root) as u32);
    if ell < 1 || ell > k {
        return Err(Error::EllOutOfRange { ell, k });
    }
    let l = ell as f64;
    Ok(BoundsRow {
        k,
        ell,
        gamma_lower: 2.0 * kf + 1.0 - l - kf / l,
        gamma_upper: 2.0 * kf - 1.0 + l + (kf - 1.0) / l,
        big_gamma_lower: kf * kf,
        big_gamma_upper: kf * kf + kf,
        sqrt_lower: 2.0 * kf - 2.0 * root,
        sqrt_upper: 2.0 * kf + 2.0 * root,
        gamma_bar: None,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundsTable {
    pub rows: Vec<BoundsRow>,
}

impl BoundsTable {
    /// Rows `1..=k_max` with the default `ℓ`, filled with `Γ̄_k` from `system`
    /// where available.
    pub fn build(k_max: u32, system: Option<&GSystem>) -> Result<Self> {
        let rows = (1..=k_max)
            .map(|k| {
                let mut row = closed_bounds(k, None)?;
                row.gamma_bar = system.and_then(|s| s.gamma_bar.get(k as usize - 1).copied());
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_bound_examples() {
        let r = closed_bounds(2, Some(1)).unwrap();
        assert_eq!((r.gamma_lower, r.gamma_upper), (2.0, 5.0));
        let r = closed_bounds(3, Some(2)).unwrap();
        assert_eq!((r.gamma_lower, r.gamma_upper), (3.5, 8.0));
        let r = closed_bounds(1, None).unwrap();
        assert_eq!((r.big_gamma_lower, r.big_gamma_upper), (1.0, 2.0));
        assert_eq!((r.gamma_lower, r.gamma_upper), (1.0, 2.0));
        assert!(matches!(
            closed_bounds(3, Some(4)),
            Err(Error::EllOutOfRange { .. })
        ));
        assert!(closed_bounds(3, Some(0)).is_err());
    }

    #[test]
    fn lower_never_exceeds_upper() {
        for k in 1..200 {
            for ell in 1..=k {
                let r = closed_bounds(k, Some(ell)).unwrap();
                assert!(r.gamma_lower <= r.gamma_upper);
                assert!(r.big_gamma_lower <= r.big_gamma_upper);
            }
            let r = closed_bounds(k, None).unwrap();
            assert!(r.sqrt_lower <= r.gamma_lower + 1e-12);
            assert!(r.gamma_upper <= r.sqrt_upper + 1e-12);
        }
    }

    #[test]
    fn g1_is_tanh() {
        let p = GParams::new(2, 1e-4);
        let s = solve_g_system(&p).unwrap();
        assert!(s.tail_met);
        let g1 = &s.g[0];
        let sup = (0..g1.len())
            .map(|i| (g1.values[i] - libm::tanh(g1.t_at(i) / 2.0)).abs())
            .fold(0.0, f64::max);
        assert!(sup <= 5.0 * p.dt, "{sup}");
        assert_eq!(g1.values[0], 0.0);
        assert!((s.gamma_bar[0] - 2.0 * core::f64::consts::LN_2).abs() < 1e-3);
    }

    #[test]
    fn ordering_and_monotonicity() {
        let mut p = GParams::new(6, 1e-3);
        p.integrator = Integrator::Rk4;
        let s = solve_g_system(&p).unwrap();
        for k in 0..6 {
            assert!(s.g[k].is_nondecreasing(0.0));
            assert_eq!(s.g[k].values[0], 0.0);
            for i in 0..s.g[k].len() {
                let v = s.g[k].values[i];
                let above = if k == 0 { 1.0 } else { s.g[k - 1].values[i] };
                assert!((0.0..=above).contains(&v));
            }
        }
    }

    #[test]
    fn horizon_flag() {
        let mut p = GParams::new(3, 1e-3);
        p.horizon = 2.0;
        let s = solve_g_system(&p).unwrap();
        assert!(!s.tail_met);
    }

    #[test]
    fn sampled_gamma_bar_close_to_online() {
        let p = GParams::new(2, 1e-4);
        let s = solve_g_system(&p).unwrap();
        for k in 0..2 {
            assert!((gamma_bar(&s.g[k]) - s.gamma_bar[k]).abs() < 1e-3);
        }
    }
}
