//! Limit curves `ρ_k(t)` of the scaled largest component of `G_k(t)`.
//!
//! `ρ_k(t)` is the survival probability of a multi-type branching process
//! whose types are the times `x` at which vertices joined the giant of the
//! previous level, distributed as `μ_{k-1}([0, x]) = ρ_{k-1}(x)`, with
//! offspring kernel `κ_t(x, y) = (t − x∨y)₊`. For each `t` the survival
//! profile `f = ρ_t(·)` is the largest fixed point of
//!
//! ```text
//! f = 1 − exp(−T_κ f),   (T_κ f)(x) = ∫ κ_t(x, y) f(y) dμ_{k-1}(y)
//! ```
//!
//! and `ρ_k(t) = ∫ ρ_t(x) dμ_{k-1}(x)`. Profiles are found by monotone
//! iteration from above, sweeping `t` downward so that each solution
//! warm-starts the next.
//!
//! Discretization: `μ` is split into an atom at the first node (all mass at
//! or below it) and cell masses `μ(x_{j-1}, x_j]` placed at cell midpoints,
//! where `f` is the average of the two end nodes. With that choice `T_κ f`
//! at every node comes out of one prefix sum and one suffix sum.

use alloc::vec::Vec;

use crate::grid::{grid_len, trapezoid, GridFunction};
use crate::{Error, Result};

/// `1 − e⁻¹`, the level used to anchor curves in time.
pub const ALIGN_LEVEL: f64 = 1.0 - 0.367_879_441_171_442_33;
/// Time at which aligned curves reach [`ALIGN_LEVEL`].
pub const ALIGN_TIME: f64 = 4.0;

/// Where the level-1 curve comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhoStart {
    /// Iterate from `ρ_0`, the unit step at 0.
    #[default]
    Step,
    /// Use the closed form of `ρ_1`.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoParams {
    pub dt: f64,
    /// Length of the time window each `ρ_k` is computed on. The default
    /// keeps `1 − ρ_k` below [`TAIL_GAP`] at the window end for `k ≤ 10`.
    pub window: f64,
    /// Window start moves by this much per level (from level 3 on).
    pub level_shift: f64,
    /// Stop when two iterates differ by at most this, at every node.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations after which a slow solve checks whether the linearized
    /// operator has spectral radius ≤ 1 (so the only fixed point is 0).
    pub probe_iters: usize,
    /// `ξ̂_k` is the first grid time with `ρ_k` above this.
    pub threshold_cutoff: f64,
    pub start: RhoStart,
}

impl Default for RhoParams {
    fn default() -> Self {
        Self {
            dt: 0.01,
            window: 16.0,
            level_shift: 2.0,
            tol: 1e-8,
            max_iter: 100_000,
            probe_iters: 200,
            threshold_cutoff: 1e-6,
            start: RhoStart::Step,
        }
    }
}

impl RhoParams {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.window >= self.dt) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "need 0 < dt <= window",
            });
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: "need tol > 0 and max_iter > 0",
            });
        }
        if !(self.level_shift >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "level_shift",
                reason: "must be nonnegative",
            });
        }
        Ok(())
    }

    fn len(&self) -> usize {
        grid_len(self.window, self.dt)
    }
}

/// `ρ_0`: every vertex is "in the giant" from time 0.
pub fn rho0(dt: f64, window: f64) -> Result<GridFunction> {
    GridFunction::constant(0.0, dt, window, 1.0)
}

/// `ρ_1(t)`: 0 for `t ≤ 1`, else the root of `ρ = 1 − e^{−tρ}` in `(0, 1)`.
pub fn rho1_value(t: f64) -> f64 {
    if t <= 1.0 {
        return 0.0;
    }
    // h(ρ) = ρ − 1 + e^{−tρ} is negative on (0, ρ*) and positive on (ρ*, 1]
    let h = |r: f64| r + libm::expm1(-t * r);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-13 {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `ρ_1` sampled on `[t0, t0 + window]`.
pub fn rho1_closed_form(t0: f64, dt: f64, window: f64) -> Result<GridFunction> {
    GridFunction::from_fn(t0, dt, grid_len(window, dt), rho1_value)
}

/// Discretized `μ` on a computation grid.
#[derive(Debug, Clone)]
struct Stieltjes {
    x: Vec<f64>,
    /// Mass locations: the first node, then cell midpoints.
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Stieltjes {
    fn new(t0: f64, dt: f64, len: usize, mu: &GridFunction) -> Result<Self> {
        let grid = GridFunction {
            t0,
            dt,
            values: alloc::vec![0.0; 1],
        };
        grid.aligned_offset(mu)?;
        let x: Vec<f64> = (0..len).map(|l| t0 + l as f64 * dt).collect();
        let cdf: Vec<f64> = x.iter().map(|&t| mu.eval(t)).collect();
        let mut y = Vec::with_capacity(len);
        let mut m = Vec::with_capacity(len);
        y.push(x[0]);
        m.push(cdf[0]);
        for j in 1..len {
            y.push(x[j] - 0.5 * dt);
            m.push((cdf[j] - cdf[j - 1]).max(0.0));
        }
        Ok(Self { x, y, m })
    }

    fn len(&self) -> usize {
        self.x.len()
    }

    /// Number of mass points strictly before `t`.
    fn mass_points_before(&self, t: f64) -> usize {
        self.y.partition_point(|&y| y < t)
    }

    /// Number of nodes strictly before `t`.
    fn nodes_before(&self, t: f64) -> usize {
        self.x.partition_point(|&x| x < t)
    }

    /// `f̄_j m_j` for the mass points before `t`.
    fn weights(&self, t: f64, f: &[f64], w: &mut Vec<f64>) {
        let jmax = self.mass_points_before(t);
        w.clear();
        if jmax == 0 {
            return;
        }
        w.push(f[0] * self.m[0]);
        for j in 1..jmax {
            w.push(0.5 * (f[j - 1] + f[j]) * self.m[j]);
        }
    }

    /// `(T_κ f)(x_l)` for every node, written to `out`.
    fn apply(&self, t: f64, f: &[f64], w: &mut Vec<f64>, out: &mut [f64]) {
        self.weights(t, f, w);
        let mut suffix: f64 = w.iter().zip(&self.y).map(|(wj, yj)| (t - yj) * wj).sum();
        let mut prefix = 0.0;
        let active = self.nodes_before(t);
        for l in 0..active {
            if let Some(&wl) = w.get(l) {
                prefix += wl;
                suffix -= (t - self.y[l]) * wl;
            }
            out[l] = (t - self.x[l]) * prefix + suffix.max(0.0);
        }
        out[active..].fill(0.0);
    }

    /// `∫ f dμ` over the types born before `t`.
    fn integrate(&self, t: f64, f: &[f64], w: &mut Vec<f64>) -> f64 {
        self.weights(t, f, w);
        w.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SolveStats {
    iterations: usize,
    residual: f64,
    /// Settled by the spectral-radius test rather than by iteration.
    extinct: bool,
}

struct Workspace {
    w: Vec<f64>,
    tf: Vec<f64>,
    v: Vec<f64>,
}

impl Workspace {
    fn new(len: usize) -> Self {
        Self {
            w: Vec::with_capacity(len),
            tf: alloc::vec![0.0; len],
            v: alloc::vec![0.0; len],
        }
    }
}

/// Collatz–Wielandt test: true if the discretized `T_κ` has spectral radius
/// at most 1, in which case `f = 1 − e^{−T f}` has only the zero solution.
fn spectral_radius_at_most_one(st: &Stieltjes, t: f64, ws: &mut Workspace) -> bool {
    let active = st.nodes_before(t);
    if active == 0 {
        return true;
    }
    ws.v[..active].fill(1.0);
    ws.v[active..].fill(0.0);
    for _ in 0..1000 {
        st.apply(t, &ws.v, &mut ws.w, &mut ws.tf);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut scale = 0.0f64;
        for l in 0..active {
            let r = ws.tf[l] / ws.v[l];
            lo = lo.min(r);
            hi = hi.max(r);
            scale = scale.max(ws.tf[l]);
        }
        if hi <= 1.0 + 1e-12 {
            return true;
        }
        if lo > 1.0 {
            return false;
        }
        for l in 0..active {
            ws.v[l] = ws.tf[l] / scale;
            if ws.v[l] <= 0.0 {
                return false;
            }
        }
    }
    false
}

/// Iterates `f ← 1 − exp(−T_κ f)` in place until the sup-norm change is at
/// most `tol`. `f` must start at or above the largest fixed point.
fn solve_survival(
    st: &Stieltjes,
    t: f64,
    f: &mut [f64],
    params: &RhoParams,
    ws: &mut Workspace,
) -> Result<SolveStats> {
    let active = st.nodes_before(t);
    f[active..].fill(0.0);
    let mut residual = f64::INFINITY;
    for iter in 1..=params.max_iter {
        st.apply(t, f, &mut ws.w, &mut ws.tf);
        residual = 0.0;
        for l in 0..active {
            let next = -libm::expm1(-ws.tf[l]);
            residual = residual.max(libm::fabs(next - f[l]));
            f[l] = next;
        }
        if residual <= params.tol {
            return Ok(SolveStats {
                iterations: iter,
                residual,
                extinct: false,
            });
        }
        if iter == params.probe_iters && spectral_radius_at_most_one(st, t, ws) {
            f.fill(0.0);
            return Ok(SolveStats {
                iterations: iter,
                residual: 0.0,
                extinct: true,
            });
        }
    }
    Err(Error::NoConvergence {
        t,
        iterations: params.max_iter,
        residual,
    })
}

/// Result of [`survival_fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalProfile {
    /// `x ↦ ρ_t(x)` on the grid of the starting guess.
    pub profile: GridFunction,
    /// `∫ ρ_t dμ`.
    pub survival: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Largest fixed point of `f = 1 − exp(−T_κ f)` for kernel `κ_t` and type
/// distribution `mu`, iterating down from `init` (which must lie above it).
pub fn survival_fixed_point(
    t: f64,
    mu: &GridFunction,
    init: &GridFunction,
    params: &RhoParams,
) -> Result<SurvivalProfile> {
    params.validate()?;
    let st = Stieltjes::new(init.t0, init.dt, init.len(), mu)?;
    let mut ws = Workspace::new(st.len());
    let mut f = init.values.clone();
    let stats = solve_survival(&st, t, &mut f, params, &mut ws)?;
    let survival = st.integrate(t, &f, &mut ws.w);
    Ok(SurvivalProfile {
        profile: GridFunction {
            t0: init.t0,
            dt: init.dt,
            values: f,
        },
        survival,
        iterations: stats.iterations,
        residual: stats.residual,
    })
}

/// One level of the recursion: `ρ_k` from `μ = ρ_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NextRho {
    pub rho: GridFunction,
    pub xi_hat: Option<f64>,
    /// Largest iteration count of any single profile solve.
    pub max_iterations: usize,
}

/// Computes `ρ_k(t) = ∫ ρ_t(x) dμ(x)` on `[t0, t0 + window]`, sweeping `t`
/// downward from the top of the grid, where the iteration starts at `f ≡ 1`.
///
/// `t0` must lie on `mu`'s grid and below the support of `μ` (except for
/// the atom of the unit step).
pub fn next_rho(mu: &GridFunction, t0: f64, params: &RhoParams) -> Result<NextRho> {
    params.validate()?;
    let dt = mu.dt;
    let len = params.len();
    let st = Stieltjes::new(t0, dt, len, mu)?;
    let mut ws = Workspace::new(len);
    let mut f = alloc::vec![1.0; len];
    let mut values = alloc::vec![0.0; len];
    let mut max_iterations = 0;
    for i in (0..len).rev() {
        let t = st.x[i];
        let stats = solve_survival(&st, t, &mut f, params, &mut ws)?;
        max_iterations = max_iterations.max(stats.iterations);
        values[i] = st.integrate(t, &f, &mut ws.w);
        if stats.extinct {
            // survival is monotone in t: nothing below survives either
            break;
        }
    }
    let rho = GridFunction::new(t0, dt, values)?;
    let xi_hat = rho.first_exceedance(params.threshold_cutoff);
    Ok(NextRho {
        rho,
        xi_hat,
        max_iterations,
    })
}

/// `½ ∫₀^∞ (1 − ρ²) t dt` with `ρ` held at its first value below the grid
/// and taken as 1 beyond it.
fn weighted_deficit(rho: &GridFunction) -> f64 {
    let below = 0.5 * (1.0 - rho.first() * rho.first()) * 0.5 * rho.t0 * rho.t0;
    let on = 0.5
        * trapezoid(
            rho.values
                .iter()
                .enumerate()
                .map(|(i, &r)| (1.0 - r * r) * rho.t_at(i)),
            rho.dt,
        );
    below + on
}

/// `½ ∫₀^∞ (1 − ρ²) dt`, same conventions as above.
fn deficit(rho: &GridFunction) -> f64 {
    let below = 0.5 * (1.0 - rho.first() * rho.first()) * rho.t0;
    let on = 0.5 * trapezoid(rho.values.iter().map(|&r| 1.0 - r * r), rho.dt);
    below + on
}

/// Tail coverage below which integrals are flagged approximate.
pub const TAIL_GAP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub value: f64,
    /// Heuristic size of the truncated tail, `(1 − ρ_end²)·t_end·window`
    /// summed over both curves. Not a bound.
    pub tail_residual: f64,
    /// Some curve ends with `1 − ρ ≥` [`TAIL_GAP`].
    pub approximate: bool,
}

fn tail_heuristic(rho: &GridFunction) -> f64 {
    let end = rho.last();
    (1.0 - end * end) * rho.t_end() * (rho.t_end() - rho.t0)
}

/// `γ_k = ½ ∫ (ρ_{k-1}² − ρ_k²) t dt`.
pub fn gamma_from_rho(rho_prev: &GridFunction, rho_k: &GridFunction) -> GammaEstimate {
    let value = weighted_deficit(rho_k) - weighted_deficit(rho_prev);
    let approximate = [rho_prev, rho_k].iter().any(|r| 1.0 - r.last() >= TAIL_GAP);
    GammaEstimate {
        value,
        tail_residual: tail_heuristic(rho_prev) + tail_heuristic(rho_k),
        approximate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassCheck {
    pub k: usize,
    /// `½ ∫ (1 − ρ_k²) dt`, which should equal `k`.
    pub integral: f64,
    pub approximate: bool,
}

impl MassCheck {
    pub fn deviation(&self) -> f64 {
        self.integral - self.k as f64
    }
}

pub fn mass_check(rho_k: &GridFunction, k: usize) -> MassCheck {
    MassCheck {
        k,
        integral: deficit(rho_k),
        approximate: 1.0 - rho_k.last() >= TAIL_GAP,
    }
}

/// Limit of `e(G_k(t))/n`: the running integral `½ ∫₀ᵗ ρ_{k-1}²` on the
/// grid of `rho_prev`.
pub fn edge_count_curve(rho_prev: &GridFunction) -> GridFunction {
    let r0 = rho_prev.first();
    let mut acc = 0.5 * r0 * r0 * rho_prev.t0.max(0.0);
    let mut values = Vec::with_capacity(rho_prev.len());
    values.push(acc);
    for w in rho_prev.values.windows(2) {
        acc += 0.25 * (w[0] * w[0] + w[1] * w[1]) * rho_prev.dt;
        values.push(acc);
    }
    GridFunction {
        t0: rho_prev.t0,
        dt: rho_prev.dt,
        values,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub curve: GridFunction,
    /// Time shift applied: `curve(t) = rho(t − shift)`.
    pub shift: f64,
}

/// Moves `rho` in time so that it passes `1 − e⁻¹` at `t = 4`.
pub fn align_translate(rho: &GridFunction) -> Result<Aligned> {
    let crossing = rho
        .crossing_time(ALIGN_LEVEL)
        .ok_or(Error::AnchorNotAttained {
            target: ALIGN_LEVEL,
        })?;
    let shift = ALIGN_TIME - crossing;
    Ok(Aligned {
        curve: rho.shifted(shift),
        shift,
    })
}

/// `ρ_0, ρ_1, …, ρ_{k_max}`, each on its own translated window.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoFamily {
    pub params: RhoParams,
    /// Index `k` holds `ρ_k`; index 0 is the unit step.
    pub rho: Vec<GridFunction>,
    /// Window start of each curve in absolute time.
    pub translation: Vec<f64>,
    /// `ξ̂_k`, index 0 unused (`None`).
    pub xi_hat: Vec<Option<f64>>,
}

impl RhoFamily {
    pub fn compute(k_max: usize, params: &RhoParams) -> Result<Self> {
        params.validate()?;
        let rho_0 = rho0(params.dt, params.window)?;
        let mut family = RhoFamily {
            params: *params,
            rho: alloc::vec![rho_0],
            translation: alloc::vec![0.0],
            xi_hat: alloc::vec![None],
        };
        for _ in 0..k_max {
            family.extend()?;
        }
        Ok(family)
    }

    pub fn k_max(&self) -> usize {
        self.rho.len() - 1
    }

    /// Window start for the next level: `level_shift·(k − 2)`, but never past
    /// the previous threshold so the support of `μ` stays on the grid.
    fn next_translation(&self) -> f64 {
        let k = self.rho.len();
        let p = &self.params;
        let nominal = p.level_shift * k.saturating_sub(2) as f64;
        let prev = self.translation[k - 1];
        let cap = self.xi_hat[k - 1].map_or(prev, |xi| xi - p.dt).max(prev);
        let t = nominal.min(cap).max(prev);
        // snap to the previous grid
        prev + libm::floor((t - prev) / p.dt + 1e-9) * p.dt
    }

    /// Computes the next level.
    pub fn extend(&mut self) -> Result<()> {
        let k = self.rho.len();
        let p = self.params;
        let t0 = self.next_translation();
        let next = if k == 1 && p.start == RhoStart::ClosedForm {
            let rho = rho1_closed_form(t0, p.dt, p.window)?;
            let xi_hat = rho.first_exceedance(p.threshold_cutoff);
            NextRho {
                rho,
                xi_hat,
                max_iterations: 0,
            }
        } else {
            next_rho(&self.rho[k - 1], t0, &p)?
        };
        self.rho.push(next.rho);
        self.translation.push(t0);
        self.xi_hat.push(next.xi_hat);
        Ok(())
    }

    pub fn rho(&self, k: usize) -> &GridFunction {
        &self.rho[k]
    }

    pub fn gamma(&self, k: usize) -> GammaEstimate {
        gamma_from_rho(&self.rho[k - 1], &self.rho[k])
    }

    pub fn mass(&self, k: usize) -> MassCheck {
        mass_check(&self.rho[k], k)
    }
}
