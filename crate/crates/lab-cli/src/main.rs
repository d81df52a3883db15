use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use lab_cli::{format_check, run_scenario, LabConfig, SCENARIOS};

#[derive(Parser, Debug)]
#[command(name = "blowup-lab", about = "Numerical experiments around the self-similar wave-map blowup")]
struct Cli {
    /// verify-profile, spectrum, scan-modes, connection, evolve, modulate,
    /// strichartz, exterior, delta-scaling or all
    scenario: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "tau-max")]
    tau_max: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => LabConfig::load(p)?,
        None => LabConfig::default(),
    };
    if let Some(o) = cli.out {
        cfg.out_dir = o;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(t) = cli.tau_max {
        cfg.tau_max = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global()?;
    }
    let summary = run_scenario(&cli.scenario, &cfg, &mut |c| println!("{}", format_check(c)))?;
    println!(
        "{}: {} ({} of {} checks passed), artifacts in {}",
        summary.scenario,
        if summary.passed { "PASS" } else { "FAIL" },
        summary.checks.iter().filter(|c| c.passed).count(),
        summary.checks.len(),
        cfg.out_dir.display()
    );
    Ok(summary.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !SCENARIOS.contains(&cli.scenario.as_str()) {
        eprintln!("error: unknown scenario {:?}\nusage: blowup-lab <{}> [--config <path>] [--out <dir>]", cli.scenario, SCENARIOS.join("|"));
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
