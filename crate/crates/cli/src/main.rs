//! `stackmc`: run StackMC experiments from a config file or a preset.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stackmc::harness::{
    self, emit, ExperimentConfig, ExperimentResult, PRESET_NAMES, PRESET_SUMMARIES,
};
use stackmc::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "stackmc", version, about = "Stacked Monte Carlo experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run (or print) a built-in experiment.
    Preset {
        name: String,
        /// Print the preset as TOML instead of running it.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the built-in experiments.
    ListPresets,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated sample sizes, e.g. `40,80,160`.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
}

impl Overrides {
    fn apply(self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        if let Some(o) = self.out {
            cfg.output.dir = o;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(g) = self.n_grid {
            cfg.n_grid = g;
        }
    }
}

fn print_table(result: &ExperimentResult) {
    println!(
        "# {}  reference mean = {}  trials = {}",
        result.config.name, result.reference, result.config.trials
    );
    println!("{:>6}  {:<22} {:>14} {:>12} {:>9}", "n", "estimator", "mse", "stderr", "mse/mc");
    for r in &result.rows {
        let ratio = result
            .mse(r.n, "mc")
            .filter(|m| *m > 0.0)
            .map_or(f64::NAN, |m| r.mse / m);
        println!(
            "{:>6}  {:<22} {:>14.6e} {:>12.4e} {:>9.4}",
            r.n, r.estimator, r.mse, r.stderr, ratio
        );
    }
    if result.rows.iter().any(|r| r.stderr_is_degenerate()) {
        eprintln!("warning: a single trial per sample size; stderr is reported as 0");
    }
}

fn execute(mut cfg: ExperimentConfig, overrides: Overrides) -> Result<(), Error> {
    overrides.apply(&mut cfg);
    cfg.validate()?;
    let result = harness::run_experiment(&cfg)?;
    print_table(&result);
    let written = emit::emit_all(&result.rows, &cfg.output.emit, &cfg.output.dir, &cfg.name)?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::ListPresets => {
            for (name, summary) in PRESET_NAMES.iter().zip(PRESET_SUMMARIES) {
                println!("{name:<6} {summary}");
            }
            Ok(())
        }
        Command::Run { config, overrides } => match ExperimentConfig::load(&config) {
            Ok(cfg) => execute(cfg, overrides),
            Err(e) => {
                // an unreadable config file is a configuration problem too
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        Command::Preset {
            name,
            print_config,
            overrides,
        } => harness::preset(&name).and_then(|mut cfg| {
            if print_config {
                overrides.apply(&mut cfg);
                print!("{}", cfg.to_toml_string()?);
                Ok(())
            } else {
                execute(cfg, overrides)
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}
