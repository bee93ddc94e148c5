use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("grids are not aligned (dt {dt_a} vs {dt_b}, offset {offset})")]
    GridMismatch { dt_a: f64, dt_b: f64, offset: f64 },

    #[error("fixed-point iteration at t = {t} did not converge after {iterations} iterations (last change {residual:e})")]
    NoConvergence {
        t: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("curve never reaches {target} on its grid")]
    AnchorNotAttained { target: f64 },

    #[error("argument {x} outside the domain of φ")]
    Domain { x: f64 },

    #[error("curve is not monotone at grid index {index}")]
    NotMonotone { index: usize },

    #[error("shooting trajectory left (0, 1) at θ = {theta} (x = {x})")]
    LeftDomain { theta: f64, x: f64 },

    #[error("ℓ = {ell} outside 1..={k}")]
    EllOutOfRange { ell: u32, k: u32 },
}
