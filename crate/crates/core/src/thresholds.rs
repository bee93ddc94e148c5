//! Giant-component thresholds `σ_k` by shooting, and the 3-core constant.
//!
//! With `φ = ρ_{k-1}⁻¹` on `(0, 1)`, the threshold eigenfunction problem
//! reduces to `H'' = −φ'(x) H`, `H(0) = 0`, `H'(0) = 1`, and `s_k` is the
//! first zero of `H'`. In the Prüfer angle `H = R sin θ, H' = R cos θ` the
//! inverse `x(θ)` solves
//!
//! ```text
//! dx/dθ = 1 / (cos²θ + φ'(x) sin²θ),   x(0) = 0,
//! ```
//!
//! so `s_k = x(π/2)` and `σ_k = φ(s_k)`.

use core::f64::consts::FRAC_PI_2;

use alloc::vec::Vec;

use crate::grid::GridFunction;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    ClosedFormK2,
    GridInverse,
    Custom,
}

/// The inverse `φ` of a giant-component curve, with its derivative.
pub trait Phi {
    fn value(&self, x: f64) -> Result<f64>;
    fn derivative(&self, x: f64) -> Result<f64>;
    fn kind(&self) -> PhiKind {
        PhiKind::Custom
    }
}

/// `φ(x) = −ln(1 − x)/x`, the inverse of `ρ_1`.
///
/// Accepts `x ∈ [0, 1)`; at 0 it returns the limits `φ(0⁺) = 1` and
/// `φ'(0⁺) = 1/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhiK2;

pub fn phi_k2() -> PhiK2 {
    PhiK2
}

impl Phi for PhiK2 {
    fn value(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain { x });
        }
        if x < 1e-4 {
            // 1 + x/2 + x²/3 + x³/4 + …
            return Ok(1.0 + x * (0.5 + x * (1.0 / 3.0 + x * 0.25)));
        }
        Ok(-libm::log1p(-x) / x)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain { x });
        }
        if x < 1e-3 {
            // Σ n xⁿ⁻¹/(n+1) = 1/2 + 2x/3 + 3x²/4 + 4x³/5 + 5x⁴/6
            return Ok(0.5 + x * (2.0 / 3.0 + x * (0.75 + x * (0.8 + x * 5.0 / 6.0))));
        }
        Ok((x / (1.0 - x) + libm::log1p(-x)) / (x * x))
    }

    fn kind(&self) -> PhiKind {
        PhiKind::ClosedFormK2
    }
}

/// `φ` by inverting a sampled curve `ρ_{k-1}` above its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPhi {
    /// Increasing curve values, starting at 0 (the threshold node).
    rho: Vec<f64>,
    t: Vec<f64>,
    /// `ρ'` at the same nodes.
    slope: Vec<f64>,
}

/// Builds `φ = ρ⁻¹` from a grid curve. The flat part below the threshold is
/// dropped, keeping its last node as `φ(0)`; a flat top is cut off.
pub fn phi_from_grid(rho_prev: &GridFunction) -> Result<GridPhi> {
    let v = &rho_prev.values;
    let start = v
        .iter()
        .position(|&r| r > 0.0)
        .ok_or(Error::InvalidParameter {
            name: "rho_prev",
            reason: "curve never leaves zero",
        })?;
    let first = start.saturating_sub(1);
    let mut end = v.len();
    for i in start + 1..v.len() {
        if v[i] < v[i - 1] {
            return Err(Error::NotMonotone { index: i });
        }
        if v[i] == v[i - 1] {
            end = i;
            break;
        }
    }
    let idx: Vec<usize> = (first..end).collect();
    if idx.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "rho_prev",
            reason: "too few increasing nodes to invert",
        });
    }
    let dt = rho_prev.dt;
    let slope = idx
        .iter()
        .map(|&i| {
            // one-sided at the ends of the increasing part
            if i == first || i + 1 >= end {
                let (a, b) = if i == first { (i, i + 1) } else { (i - 1, i) };
                (v[b] - v[a]) / dt
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * dt)
            }
        })
        .collect();
    Ok(GridPhi {
        rho: idx.iter().map(|&i| v[i]).collect(),
        t: idx.iter().map(|&i| rho_prev.t_at(i)).collect(),
        slope,
    })
}

impl GridPhi {
    /// Largest `x` in the domain.
    pub fn x_max(&self) -> f64 {
        self.rho[self.rho.len() - 1]
    }

    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !(x >= 0.0 && x < self.x_max()) {
            return Err(Error::Domain { x });
        }
        let j = self.rho.partition_point(|&r| r <= x).max(1) - 1;
        let frac = (x - self.rho[j]) / (self.rho[j + 1] - self.rho[j]);
        Ok((j, frac))
    }
}

impl Phi for GridPhi {
    fn value(&self, x: f64) -> Result<f64> {
        let (j, frac) = self.locate(x)?;
        Ok(self.t[j] + frac * (self.t[j + 1] - self.t[j]))
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        let (j, frac) = self.locate(x)?;
        let slope = self.slope[j] + frac * (self.slope[j + 1] - self.slope[j]);
        Ok(1.0 / slope)
    }

    fn kind(&self) -> PhiKind {
        PhiKind::GridInverse
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    /// `s_k = ρ_{k-1}(σ_k)`.
    pub s: f64,
    /// `σ_k = φ(s_k)`.
    pub sigma: f64,
    pub steps: usize,
    pub step: f64,
}

/// Default θ-step: `10⁻⁵·π/2`.
pub const DEFAULT_THETA_STEP: f64 = 1e-5 * FRAC_PI_2;

fn slope_dx(phi: &dyn Phi, theta: f64, x: f64) -> Result<f64> {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let d = phi
        .derivative(x)
        .map_err(|_| Error::LeftDomain { theta, x })?;
    // φ' may be huge near x = 1; the quotient then goes to 0 without overflow
    Ok(1.0 / (c * c + d * s * s))
}

/// Integrates `x(θ)` from 0 to `π/2` with classical RK4 at a fixed step no
/// larger than `step`.
pub fn solve_theta_ode(phi: &dyn Phi, step: f64) -> Result<ThresholdResult> {
    if !(step > 0.0 && step <= FRAC_PI_2) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: "need 0 < step <= π/2",
        });
    }
    let steps = libm::ceil(FRAC_PI_2 / step) as usize;
    let h = FRAC_PI_2 / steps as f64;
    let mut x = 0.0;
    for i in 0..steps {
        let th = i as f64 * h;
        let k1 = slope_dx(phi, th, x)?;
        let k2 = slope_dx(phi, th + 0.5 * h, x + 0.5 * h * k1)?;
        let k3 = slope_dx(phi, th + 0.5 * h, x + 0.5 * h * k2)?;
        let k4 = slope_dx(phi, th + h, x + h * k3)?;
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !x.is_finite() {
            return Err(Error::LeftDomain { theta: th + h, x });
        }
    }
    let sigma = phi.value(x).map_err(|_| Error::LeftDomain {
        theta: FRAC_PI_2,
        x,
    })?;
    Ok(ThresholdResult {
        s: x,
        sigma,
        steps,
        step: h,
    })
}

/// `λ / P(Po(λ) ≥ 2)`.
pub fn core3_objective(lambda: f64) -> f64 {
    let e = libm::exp(-lambda);
    lambda / (-libm::expm1(-lambda) - lambda * e)
}

/// The 3-core threshold `c_3 = min_{λ>0} λ / P(Po(λ) ≥ 2)`, by golden-section
/// search to `1e-10`. Returns `(λ*, c_3)`.
pub fn core3_threshold() -> (f64, f64) {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (0.5f64, 10.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (core3_objective(c), core3_objective(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = core3_objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = core3_objective(d);
        }
    }
    let lambda = 0.5 * (a + b);
    (lambda, core3_objective(lambda))
}
