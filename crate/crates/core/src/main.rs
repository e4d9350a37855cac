use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crkfr::config::{parse_override, RunConfig};
use crkfr::harness;
use crkfr::physics::VolumeFlux;

#[derive(Parser)]
#[command(name = "crkfr", version, about = "Compact Runge-Kutta flux reconstruction solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. `--set cfl=0.25`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation.
    Run(Common),
    /// Run a sequence of resolutions and tabulate errors.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        resolutions: Vec<usize>,
    },
    /// Compare crash times across volume fluxes.
    Robustness {
        #[command(flatten)]
        common: Common,
        #[arg(long = "volume-fluxes", value_delimiter = ',', default_value = "central,ec,kep")]
        volume_fluxes: Vec<String>,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    let text = fs::read_to_string(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    let overrides = common
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut config = RunConfig::parse_with_overrides(&text, &overrides).with_context(|| format!("in {}", common.config.display()))?;
    if let Some(out) = &common.out {
        config.out_dir = out.clone();
    }
    Ok(config)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(common) => {
            let config = load(&common)?;
            let report = harness::run(&config)?;
            match &report.crash {
                Some(c) => println!("crashed: {c}"),
                None => println!("completed at t = {} after {} steps", report.state.t, report.state.step),
            }
            println!("output written to {}", config.out_dir.display());
        }
        Command::Convergence { common, resolutions } => {
            if resolutions.is_empty() {
                bail!("--resolutions must list at least one value");
            }
            let config = load(&common)?;
            let rows = harness::convergence_study(&config, &resolutions, Some(&config.out_dir))?;
            println!("{:>6} {:>8} {:>12} {:>8}", "nx", "dof", "l2", "order");
            for r in rows {
                let order = r.order_l2.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
                println!("{:>6} {:>8} {:>12.4e} {:>8}", r.nx, r.dof, r.l2, order);
            }
        }
        Command::Robustness { common, volume_fluxes } => {
            let config = load(&common)?;
            let kinds = volume_fluxes
                .iter()
                .map(|s| s.parse::<VolumeFlux>().map_err(anyhow::Error::msg))
                .collect::<Result<Vec<_>>>()?;
            let (_, summary) = harness::robustness_compare(&config, &kinds, Some(&config.out_dir))?;
            print!("{summary}");
        }
    }
    Ok(())
}
