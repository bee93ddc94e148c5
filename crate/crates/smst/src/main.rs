use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use smst::config::Settings;
use smst::{numerics, report, simulate};

#[derive(Parser, Debug)]
#[command(
    name = "smst",
    version,
    about = "Successive minimum spanning trees: simulation and numerics"
)]
struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the forest cascade for every seed and aggregate the tree costs.
    Simulate,
    /// Compute the giant-component curves by fixed-point iteration.
    Rho,
    /// Closed-form cost bounds and the occupancy-ODE upper bound.
    Bounds,
    /// Giant-component thresholds by shooting, and the 3-core constant.
    Thresholds,
    /// Assemble report tables from the other subcommands' outputs.
    Report {
        /// Run any missing upstream subcommand instead of failing.
        #[arg(long)]
        compute_missing: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Rho => "rho",
            Command::Bounds => "bounds",
            Command::Thresholds => "thresholds",
            Command::Report { .. } => "report",
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(p) => Settings::load_file(p)?,
        None => Settings::default(),
    };
    let cfg = file.overlay(cli.settings).resolve(cli.command.name())?;
    match cli.command {
        Command::Simulate => {
            let agg = simulate::run_simulate(&cfg)?;
            println!("k,mean,std_err,completed,censored");
            for l in &agg.levels {
                println!(
                    "{},{},{},{},{}",
                    l.k,
                    fmt_opt(l.mean),
                    fmt_opt(l.std_err),
                    l.completed,
                    l.censored
                );
            }
            if !agg.failed_seeds.is_empty() {
                eprintln!(
                    "{} seed(s) failed; see failures.json",
                    agg.failed_seeds.len()
                );
            }
        }
        Command::Rho => {
            let fam = numerics::run_rho(&cfg)?;
            println!("k,translation,xi_hat,gamma,mass");
            for l in &fam.levels {
                println!(
                    "{},{},{},{},{}",
                    l.k,
                    l.translation,
                    fmt_opt(l.xi_hat),
                    l.gamma,
                    l.mass
                );
            }
        }
        Command::Bounds => {
            let rows = numerics::run_bounds(&cfg)?;
            println!("k,gamma_lower,gamma_upper,Gamma_lower,Gamma_upper,Gamma_bar");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{}",
                    r.k,
                    r.gamma_lower,
                    r.gamma_upper,
                    r.big_gamma_lower,
                    r.big_gamma_upper,
                    fmt_opt(r.gamma_bar)
                );
            }
        }
        Command::Thresholds => {
            let t = numerics::run_thresholds(&cfg)?;
            for r in &t.results {
                println!("k={} s_k={} sigma_k={}", r.k, r.s_k, r.sigma_k);
            }
            println!("c3={} (lambda={})", t.c3, t.c3_lambda);
        }
        Command::Report { compute_missing } => {
            report::run_report(&cfg, compute_missing)?;
            println!("report written to {}", cfg.out.display());
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
