//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use smst_core::stream::ArrivalMode;

pub const DEFAULT_N: usize = 100_000;
pub const DEFAULT_K_MAX: usize = 5;
pub const DEFAULT_SEED_COUNT: u64 = 10;
pub const DEFAULT_SEED_BASE: u64 = 1;
pub const DEFAULT_RUNS_DIR: &str = "runs";

/// Either a number of seeds (counted up from the seed base) or an explicit
/// comma-separated list. A list needs at least one comma: `7,` is the
/// single seed 7.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn expand(&self, base: u64) -> Vec<u64> {
        match self {
            Seeds::Count(c) => (0..*c).map(|i| base + i).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

impl FromStr for Seeds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.contains(',') {
            let list = s
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<u64>().map_err(|e| format!("bad seed {p:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if list.is_empty() {
                return Err("empty seed list".into());
            }
            Ok(Seeds::List(list))
        } else {
            let c: u64 = s
                .parse()
                .map_err(|e| format!("bad seed count {s:?}: {e}"))?;
            if c == 0 {
                return Err("need at least one seed".into());
            }
            Ok(Seeds::Count(c))
        }
    }
}

impl fmt::Display for Seeds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seeds::Count(c) => write!(f, "{c}"),
            Seeds::List(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "{},", parts.join(","))
            }
        }
    }
}

/// Settings shared by every subcommand. All fields are optional so that a
/// config file and the flags can be layered.
#[derive(Args, Debug, Clone, Default, PartialEq)]
pub struct Settings {
    /// Number of vertices.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of cascade levels / curves / bound rows.
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<usize>,
    /// Seed count, or a comma-separated seed list.
    #[arg(long, global = true)]
    pub seeds: Option<Seeds>,
    /// First seed when `--seeds` is a count.
    #[arg(long = "seed-base", global = true)]
    pub seed_base: Option<u64>,
    /// Stop a run once the next arrival would pass this time.
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    /// Arrival times: `det` (t_i = 2i/n) or `poisson`.
    #[arg(long, global = true)]
    pub mode: Option<ArrivalMode>,
    /// Trace sampling interval.
    #[arg(long = "sample-dt", global = true)]
    pub sample_dt: Option<f64>,
    /// Record the susceptibility in traces.
    #[arg(long, global = true)]
    pub susceptibility: Option<bool>,
    /// Grid step for the numerics (subcommand-specific default).
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Window length of each curve in `rho`.
    #[arg(long, global = true)]
    pub window: Option<f64>,
    /// Simulation worker threads (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory (default: `<runs>/<subcommand>`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Root under which subcommands write by default and `report` reads.
    #[arg(long, global = true)]
    pub runs: Option<PathBuf>,
}

impl Settings {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            n: over.n.or(self.n),
            k_max: over.k_max.or(self.k_max),
            seeds: over.seeds.or(self.seeds),
            seed_base: over.seed_base.or(self.seed_base),
            t_max: over.t_max.or(self.t_max),
            mode: over.mode.or(self.mode),
            sample_dt: over.sample_dt.or(self.sample_dt),
            susceptibility: over.susceptibility.or(self.susceptibility),
            dt: over.dt.or(self.dt),
            window: over.window.or(self.window),
            workers: over.workers.or(self.workers),
            out: over.out.or(self.out),
            runs: over.runs.or(self.runs),
        }
    }

    /// Parses a flat config file: one `key = value` per line, `#` starts a
    /// comment, keys are the flag names with `-` or `_`.
    pub fn parse_file(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            let ctx = || format!("line {}: bad value for {key}", lineno + 1);
            match key.as_str() {
                "n" => s.n = Some(value.parse().with_context(ctx)?),
                "k-max" => s.k_max = Some(value.parse().with_context(ctx)?),
                "seeds" => {
                    s.seeds = Some(
                        value
                            .parse()
                            .map_err(anyhow::Error::msg)
                            .with_context(ctx)?,
                    )
                }
                "seed-base" => s.seed_base = Some(value.parse().with_context(ctx)?),
                "t-max" => s.t_max = Some(value.parse().with_context(ctx)?),
                "mode" => {
                    s.mode = Some(
                        value
                            .parse()
                            .map_err(anyhow::Error::msg)
                            .with_context(ctx)?,
                    )
                }
                "sample-dt" => s.sample_dt = Some(value.parse().with_context(ctx)?),
                "susceptibility" => s.susceptibility = Some(value.parse().with_context(ctx)?),
                "dt" => s.dt = Some(value.parse().with_context(ctx)?),
                "window" => s.window = Some(value.parse().with_context(ctx)?),
                "workers" => s.workers = Some(value.parse().with_context(ctx)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "runs" => s.runs = Some(PathBuf::from(value)),
                other => bail!("line {}: unknown key {other:?}", lineno + 1),
            }
        }
        Ok(s)
    }

    pub fn load_file(path: &Path) -> Result<Settings> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_file(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Resolves defaults for `subcommand` and validates.
    pub fn resolve(&self, subcommand: &str) -> Result<RunConfig> {
        let runs = self
            .runs
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_RUNS_DIR));
        let cfg = RunConfig {
            subcommand: subcommand.to_string(),
            n: self.n.unwrap_or(DEFAULT_N),
            k_max: self.k_max.unwrap_or(DEFAULT_K_MAX),
            seeds: self
                .seeds
                .clone()
                .unwrap_or(Seeds::Count(DEFAULT_SEED_COUNT))
                .expand(self.seed_base.unwrap_or(DEFAULT_SEED_BASE)),
            t_max: self.t_max,
            mode: self.mode.unwrap_or_default().as_str().to_string(),
            sample_dt: self.sample_dt.unwrap_or(smst_core::sim::DEFAULT_SAMPLE_DT),
            susceptibility: self.susceptibility.unwrap_or(false),
            dt: self.dt,
            window: self.window,
            workers: self.workers,
            out: self.out.clone().unwrap_or_else(|| runs.join(subcommand)),
            runs,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fully resolved configuration, echoed into every manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub n: usize,
    pub k_max: usize,
    pub seeds: Vec<u64>,
    pub t_max: Option<f64>,
    pub mode: String,
    pub sample_dt: f64,
    pub susceptibility: bool,
    pub dt: Option<f64>,
    pub window: Option<f64>,
    /// Not part of the output contract: results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub runs: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("n must be at least 2");
        }
        if self.k_max < 1 {
            bail!("k-max must be at least 1");
        }
        if self.seeds.is_empty() {
            bail!("need at least one seed");
        }
        if !(self.sample_dt > 0.0) {
            bail!("sample-dt must be positive");
        }
        if self.t_max.is_some_and(|t| !(t > 0.0)) {
            bail!("t-max must be positive");
        }
        if self.dt.is_some_and(|d| !(d > 0.0 && d < 1.0)) {
            bail!("dt must lie in (0, 1)");
        }
        if self.window.is_some_and(|w| !(w > 0.0)) {
            bail!("window must be positive");
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        Ok(())
    }

    pub fn arrival_mode(&self) -> ArrivalMode {
        self.mode.parse().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse() {
        assert_eq!("3".parse::<Seeds>().unwrap().expand(10), vec![10, 11, 12]);
        assert_eq!("4,9".parse::<Seeds>().unwrap().expand(10), vec![4, 9]);
        assert_eq!("7,".parse::<Seeds>().unwrap(), Seeds::List(vec![7]));
        assert!("0".parse::<Seeds>().is_err());
        assert!(",".parse::<Seeds>().is_err());
        assert!("x".parse::<Seeds>().is_err());
        for s in ["5", "1,2,3,"] {
            let seeds: Seeds = s.parse().unwrap();
            assert_eq!(seeds.to_string().parse::<Seeds>().unwrap(), seeds);
        }
    }

    #[test]
    fn file_then_flags() {
        let file = Settings::parse_file(
            "# sweep\nn = 500\nk_max=3\nseeds = 2\nmode = poisson  # model\nsample-dt = 0.1\n",
        )
        .unwrap();
        let flags = Settings {
            n: Some(700),
            ..Settings::default()
        };
        let cfg = file.overlay(flags).resolve("simulate").unwrap();
        assert_eq!(cfg.n, 700);
        assert_eq!(cfg.k_max, 3);
        assert_eq!(cfg.seeds, vec![1, 2]);
        assert_eq!(cfg.mode, "poisson");
        assert_eq!(cfg.sample_dt, 0.1);
        assert_eq!(cfg.out, PathBuf::from("runs/simulate"));
    }

    #[test]
    fn file_errors() {
        assert!(Settings::parse_file("bogus = 1").is_err());
        assert!(Settings::parse_file("n 5").is_err());
        assert!(Settings::parse_file("n = five").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let bad = [
            Settings {
                n: Some(1),
                ..Default::default()
            },
            Settings {
                k_max: Some(0),
                ..Default::default()
            },
            Settings {
                sample_dt: Some(0.0),
                ..Default::default()
            },
            Settings {
                dt: Some(2.0),
                ..Default::default()
            },
            Settings {
                workers: Some(0),
                ..Default::default()
            },
        ];
        for s in bad {
            assert!(s.resolve("simulate").is_err(), "{s:?}");
        }
    }
}
