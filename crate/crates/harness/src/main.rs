use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hcran::config::{ExperimentConfig, OutputConfig, OutputFormat, Preset, Sweep, SweepVar};
use hcran::sweep::solve_options;
use hcran::{brute_force_oracle, emit_results, run_scheme, run_sweep, Scheme};
use hcran_channel::{derive_seed, generate_channel, generate_topology, ChannelDraw};
use serde_json::json;

/// Resource allocation for hybrid DaF/FaD uplink cloud-RAN.
///
/// Settings come from the defaults, then the `--config` file, then flags.
/// Log verbosity is read from HCRAN_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "hcran", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel file and print the allocation as JSON.
    Solve {
        /// Channel file written by `hcran channel`.
        channel: PathBuf,
        #[arg(long, default_value = "hybrid_optimal")]
        scheme: String,
        /// Write the allocation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a sweep and write result files.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        sweep_var: Option<SweepArg>,
        /// Comma separated, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Comma separated scheme names.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Report dominance violations without failing.
        #[arg(long)]
        no_dominance_check: bool,
        /// Output path prefix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force a tiny channel file and compare with hybrid_optimal.
    Oracle {
        channel: PathBuf,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Generate one topology and channel draw and save it.
    Channel {
        #[command(flatten)]
        common: Common,
        /// Draw index combined with the seed as in `simulate`.
        #[arg(long, default_value_t = 0)]
        draw: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    #[arg(long)]
    beta: Option<u32>,
    #[arg(long)]
    rbar_mbps: Option<f64>,
    #[arg(long)]
    pbar_dbm: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    subchannels: Option<usize>,
    /// Total bandwidth in Hz.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Small,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Beta,
    PbarDbm,
    RbarMbps,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => {
                ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(p) = self.preset {
            c.preset = match p {
                PresetArg::Small => Preset::Small,
                PresetArg::Large => Preset::Large,
            };
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        if let Some(v) = self.rbar_mbps {
            c.rbar_mbps = v;
        }
        if let Some(v) = self.pbar_dbm {
            c.pbar_dbm = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.subchannels {
            c.channel.num_subchannels = v;
        }
        if let Some(v) = self.bandwidth {
            c.channel.bandwidth = v;
        }
        Ok(c)
    }
}

fn load_channel(path: &Path, config: &mut ExperimentConfig) -> Result<ChannelDraw<f64>> {
    let draw =
        ChannelDraw::<f64>::load(path).with_context(|| format!("reading {}", path.display()))?;
    // the file fixes the number of subchannels
    config.channel.num_subchannels = draw.gains.dims().2;
    Ok(draw)
}

fn write_json(value: &impl serde::Serialize, out: Option<&Path>) -> Result<()> {
    let s = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, s).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{s}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HCRAN_LOG", "warn")).init();
    match Cli::parse().command {
        Command::Solve {
            channel,
            scheme,
            out,
            common,
        } => {
            let mut cfg = common.load()?;
            let draw = load_channel(&channel, &mut cfg)?;
            let (m, k, _) = draw.gains.dims();
            let params = cfg.system_params(cfg.point(0.0), m, k)?;
            let scheme: Scheme = scheme.parse()?;
            let run = run_scheme(scheme, &draw.gains, &params, &solve_options(&cfg))?;
            write_json(&run, out.as_deref())?;
        }
        Command::Simulate {
            common,
            sweep_var,
            values,
            schemes,
            draws,
            tolerance,
            no_dominance_check,
            out,
        } => {
            let mut cfg = common.load()?;
            match (sweep_var, values) {
                (Some(v), Some(values)) => {
                    let variable = match v {
                        SweepArg::Beta => SweepVar::Beta,
                        SweepArg::PbarDbm => SweepVar::PbarDbm,
                        SweepArg::RbarMbps => SweepVar::RbarMbps,
                    };
                    cfg.sweep = Some(Sweep { variable, values });
                }
                (None, None) => {}
                _ => bail!("--sweep-var and --values go together"),
            }
            if let Some(s) = schemes {
                cfg.schemes = s.iter().map(|x| x.parse()).collect::<Result<_, _>>()?;
            }
            if let Some(d) = draws {
                cfg.draws = d;
            }
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            if no_dominance_check {
                cfg.check_dominance = false;
            }
            if let Some(path) = out {
                cfg.output = Some(OutputConfig {
                    path,
                    formats: vec![OutputFormat::Csv, OutputFormat::Json],
                });
            }
            let table = run_sweep(&cfg)?;
            if !table.failed.is_empty() {
                eprintln!("{} draws failed and were excluded", table.failed.len());
            }
            match &cfg.output {
                Some(o) => {
                    for p in emit_results(&table, o)? {
                        eprintln!("wrote {}", p.display());
                    }
                }
                None => write_json(&table.rows, None)?,
            }
        }
        Command::Oracle {
            channel,
            grid,
            common,
        } => {
            let mut cfg = common.load()?;
            let draw = load_channel(&channel, &mut cfg)?;
            let (m, k, _) = draw.gains.dims();
            let params = cfg.system_params(cfg.point(0.0), m, k)?;
            let oracle = brute_force_oracle(&draw.gains, &params, grid)?;
            let run = run_scheme(
                Scheme::HybridOptimal,
                &draw.gains,
                &params,
                &solve_options(&cfg),
            )?;
            let within = run.rate >= oracle.weighted_sum_rate - oracle.grid_slack
                && oracle.weighted_sum_rate <= run.dual_value * (1.0 + 1e-9);
            write_json(
                &json!({
                    "oracle": oracle,
                    "hybrid_optimal_rate": run.rate,
                    "dual_bound": run.dual_value,
                    "consistent": within,
                }),
                None,
            )?;
            if !within {
                bail!("hybrid_optimal is outside [oracle - grid slack, dual bound]");
            }
        }
        Command::Channel { common, draw, out } => {
            let cfg = common.load()?;
            cfg.validate()?;
            let seed = derive_seed(cfg.seed, draw as u64);
            let topo = generate_topology(&cfg.preset.topology(), seed)?;
            let d = generate_channel::<f64>(&topo, &cfg.channel, seed)?;
            d.save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {}", out.display());
        }
    }
    Ok(())
}
