//! Functions sampled on a uniform time grid.

use alloc::vec::Vec;

use crate::{Error, Result};

/// A real function sampled at `t0 + i·dt`, `i = 0..values.len()`.
///
/// Used for the giant-component curves `ρ_k`, the occupancy functions `g_k`
/// and the survival profiles of the branching process. Between grid points
/// the function is linear; outside the grid it is held at the nearest end
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be positive and finite",
            });
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "grid function needs at least one sample",
            });
        }
        Ok(Self { t0, dt, values })
    }

    /// Samples `f` at `t0, t0 + dt, …, t0 + (len-1)·dt`.
    pub fn from_fn(t0: f64, dt: f64, len: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|i| f(t0 + i as f64 * dt)).collect();
        Self::new(t0, dt, values)
    }

    /// Constant function on `[t0, t0 + window]`.
    pub fn constant(t0: f64, dt: f64, window: f64, value: f64) -> Result<Self> {
        let len = grid_len(window, dt);
        Self::new(t0, dt, alloc::vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn t_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_at(self.values.len() - 1)
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let s = (t - self.t0) / self.dt;
        if s <= 0.0 {
            return self.first();
        }
        let last = self.values.len() - 1;
        if s >= last as f64 {
            return self.last();
        }
        let i = libm::floor(s) as usize;
        let frac = s - i as f64;
        let a = self.values[i];
        let b = self.values[(i + 1).min(last)];
        a + frac * (b - a)
    }

    /// Index offset of `other`'s origin on this grid, if the grids coincide.
    pub fn aligned_offset(&self, other: &GridFunction) -> Result<isize> {
        let mismatch = || Error::GridMismatch {
            dt_a: self.dt,
            dt_b: other.dt,
            offset: other.t0 - self.t0,
        };
        if libm::fabs(self.dt - other.dt) > 1e-12 * self.dt {
            return Err(mismatch());
        }
        let s = (other.t0 - self.t0) / self.dt;
        let r = libm::round(s);
        if libm::fabs(s - r) > 1e-6 {
            return Err(mismatch());
        }
        Ok(r as isize)
    }

    /// True if no step decreases by more than `tol`.
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy of this function moved forward in time by `shift`.
    pub fn shifted(&self, shift: f64) -> GridFunction {
        GridFunction {
            t0: self.t0 + shift,
            dt: self.dt,
            values: self.values.clone(),
        }
    }

    /// `sup |self − other|` over `[from, to]`, probed at both grids' nodes.
    pub fn sup_distance_on(&self, other: &GridFunction, from: f64, to: f64) -> f64 {
        let mut sup = 0.0f64;
        for g in [self, other] {
            for i in 0..g.len() {
                let t = g.t_at(i);
                if t < from || t > to {
                    continue;
                }
                sup = sup.max(libm::fabs(self.eval(t) - other.eval(t)));
            }
        }
        sup
    }

    /// `sup |self − other|` over the overlap of the two grids.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        let from = self.t0.max(other.t0);
        let to = self.t_end().min(other.t_end());
        self.sup_distance_on(other, from, to)
    }

    /// First grid time at which the value exceeds `level`.
    pub fn first_exceedance(&self, level: f64) -> Option<f64> {
        self.values
            .iter()
            .position(|&v| v > level)
            .map(|i| self.t_at(i))
    }

    /// Time at which the curve first reaches `level`, by linear interpolation.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        if self.first() >= level {
            return Some(self.t0);
        }
        for i in 1..self.len() {
            let (a, b) = (self.values[i - 1], self.values[i]);
            if a < level && b >= level {
                let frac = (level - a) / (b - a);
                return Some(self.t_at(i - 1) + frac * self.dt);
            }
        }
        None
    }
}

/// Number of nodes covering `[0, window]` with step `dt`.
pub fn grid_len(window: f64, dt: f64) -> usize {
    libm::round(window / dt) as usize + 1
}

/// Trapezoidal integral of `values` with step `dt`.
pub fn trapezoid(values: impl IntoIterator<Item = f64>, dt: f64) -> f64 {
    let mut iter = values.into_iter();
    let Some(mut prev) = iter.next() else {
        return 0.0;
    };
    let mut sum = 0.0;
    for v in iter {
        sum += 0.5 * (prev + v);
        prev = v;
    }
    sum * dt
}
