//! Random edge streams on `K_n` in the scaled time of the Poisson multigraph.
//!
//! Every pair of vertices receives edges at rate `1/n`, so edges arrive in
//! total at rate `(n−1)/2` and an edge arriving at time `t` costs `t/n`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrivalMode {
    /// The `i`-th edge arrives at `t_i = 2i/n`.
    #[default]
    Deterministic,
    /// Exponential inter-arrival times with rate `(n−1)/2`.
    Poisson,
}

impl ArrivalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrivalMode::Deterministic => "det",
            ArrivalMode::Poisson => "poisson",
        }
    }
}

impl core::str::FromStr for ArrivalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" | "deterministic" | "deterministic-spacing" => Ok(ArrivalMode::Deterministic),
            "poisson" | "poisson-process" => Ok(ArrivalMode::Poisson),
            _ => Err(Error::InvalidParameter {
                name: "mode",
                reason: "expected `det` or `poisson`",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStreamConfig {
    pub n: usize,
    pub mode: ArrivalMode,
    pub seed: u64,
    /// Time horizon; `None` runs until the last tracked forest spans.
    pub t_max: Option<f64>,
}

impl EdgeStreamConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            mode: ArrivalMode::Deterministic,
            seed,
            t_max: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "need at least two vertices",
            });
        }
        if self.n > u32::MAX as usize {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "vertex count must fit in u32",
            });
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "t_max",
                    reason: "must be positive",
                });
            }
        }
        Ok(())
    }

    pub fn stream(&self) -> Result<EdgeStream> {
        self.validate()?;
        Ok(EdgeStream::new(self.n, self.mode, self.seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    /// 1-based position in the stream.
    pub index: u64,
    pub u: usize,
    pub v: usize,
    pub t: f64,
}

/// Infinite iterator of edge arrivals with distinct uniform endpoints.
///
/// Driven by ChaCha8 keyed by the seed alone, so a stream is reproducible
/// regardless of which thread consumes it.
#[derive(Debug, Clone)]
pub struct EdgeStream {
    n: usize,
    mode: ArrivalMode,
    rng: ChaCha8Rng,
    index: u64,
    t: f64,
    rate: f64,
}

impl EdgeStream {
    pub fn new(n: usize, mode: ArrivalMode, seed: u64) -> Self {
        assert!(n >= 2, "edge stream needs n >= 2");
        Self {
            n,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            index: 0,
            t: 0.0,
            rate: (n as f64 - 1.0) / 2.0,
        }
    }

    fn endpoints(&mut self) -> (usize, usize) {
        let u = self.rng.gen_range(0..self.n);
        loop {
            let v = self.rng.gen_range(0..self.n);
            if v != u {
                return (u, v);
            }
        }
    }
}

impl Iterator for EdgeStream {
    type Item = Arrival;

    fn next(&mut self) -> Option<Arrival> {
        self.index += 1;
        self.t = match self.mode {
            ArrivalMode::Deterministic => 2.0 * self.index as f64 / self.n as f64,
            ArrivalMode::Poisson => {
                let u: f64 = self.rng.gen();
                self.t - libm::log1p(-u) / self.rate
            }
        };
        let (u, v) = self.endpoints();
        Some(Arrival {
            index: self.index,
            u,
            v,
            t: self.t,
        })
    }
}
