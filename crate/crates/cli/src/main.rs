//! `pinn`: train Laplace PINNs, generate the reference field, evaluate models
//! on the grid and compare fields.

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pinn::evaluation::{abs_diff, eval_grid, load_csv, save_csv, save_heatmap};
use pinn::oracle::oracle_grid;
use pinn::{training, Backend, Error, GridField, HeatmapRange, NetworkModel};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or input files.
    Input(String),
    Diverged(String),
    GateExceeded { value: f64, gate: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Diverged(_) => 3,
            CliError::GateExceeded { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Diverged(m) => f.write_str(m),
            CliError::GateExceeded { value, gate } => {
                write!(f, "max_abs_below_y95 = {value} exceeds the gate {gate}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { .. } => CliError::Diverged(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "pinn", version, about = "Physics-informed networks for the Laplace equation on the unit square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model; writes model.json, history.csv and config.json.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the series reference field as oracle.csv (and oracle.pgm).
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        n_terms: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "on")]
        heatmap: Switch,
    },
    /// Evaluate a saved model on the grid; writes field.csv (and field.pgm).
    Eval {
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "on")]
        heatmap: Switch,
    },
    /// Compare two field CSVs; writes diff.csv (and diff.pgm) and prints the error summary.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        gate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "on")]
        heatmap: Switch,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Train {
            config,
            backend,
            seed,
            steps,
            lr,
            alpha,
            out,
        } => {
            let mut cfg = RunConfig::load(config.as_deref())?;
            set(&mut cfg.backend, backend);
            set(&mut cfg.seed, seed);
            set(&mut cfg.steps, steps);
            set(&mut cfg.learning_rate, lr);
            set(&mut cfg.alpha, alpha);
            set(&mut cfg.out, out);
            cmd_train(&cfg)
        }
        Command::Oracle {
            config,
            grid,
            n_terms,
            out,
            heatmap,
        } => {
            let mut cfg = RunConfig::load(config.as_deref())?;
            set(&mut cfg.grid, grid);
            set(&mut cfg.n_terms, n_terms);
            set(&mut cfg.out, out);
            cmd_oracle(&cfg, heatmap == Switch::On)
        }
        Command::Eval {
            model,
            config,
            grid,
            out,
            heatmap,
        } => {
            let mut cfg = RunConfig::load(config.as_deref())?;
            set(&mut cfg.grid, grid);
            set(&mut cfg.out, out);
            cmd_eval(&model, &cfg, heatmap == Switch::On)
        }
        Command::Compare { a, b, gate, out, heatmap } => {
            let out = out.unwrap_or_else(|| RunConfig::default().out);
            cmd_compare(&a, &b, gate, &out, heatmap == Switch::On)
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn prepare_out(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    create_dir(&cfg.out)?;
    write(&cfg.out.join("config.json"), &cfg.to_json())
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_train(cfg: &RunConfig) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let tc = cfg.train_config();
    eprintln!(
        "training {} for {} steps (seed {}, lr {}, alpha {})",
        tc.backend, tc.steps, tc.seed, tc.learning_rate, tc.alpha
    );
    let (model, history) = training::train_with_progress(&tc, |r| {
        eprintln!(
            "step {:>6}  interior {:.4e}  boundary {:.4e}  total {:.4e}",
            r.step, r.interior, r.boundary, r.total
        );
    })?;
    write(&cfg.out.join("model.json"), &model.to_json())?;
    write(&cfg.out.join("history.csv"), &history.to_csv())?;
    eprintln!("wrote {} ({} parameters)", cfg.out.join("model.json").display(), model.param_count());
    Ok(())
}

fn cmd_oracle(cfg: &RunConfig, heatmap: bool) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let field = oracle_grid(cfg.grid, cfg.n_terms)?;
    save_field(&field, &cfg.out, "oracle", heatmap, HeatmapRange::Fixed { lo: 0.0, hi: 1.0 })
}

fn cmd_eval(model_path: &Path, cfg: &RunConfig, heatmap: bool) -> Result<(), CliError> {
    let model = NetworkModel::load(model_path)
        .map_err(|e| CliError::Input(format!("{}: {e}", model_path.display())))?;
    prepare_out(cfg)?;
    let field = eval_grid(&model, cfg.grid)?;
    save_field(&field, &cfg.out, "field", heatmap, HeatmapRange::Fixed { lo: 0.0, hi: 1.0 })
}

fn cmd_compare(a: &Path, b: &Path, gate: f64, out: &Path, heatmap: bool) -> Result<(), CliError> {
    if !(gate >= 0.0) {
        return Err(CliError::Input(format!("gate must be non-negative, got {gate}")));
    }
    let load = |p: &Path| load_csv(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())));
    let (fa, fb) = (load(a)?, load(b)?);
    let (diff, stats) = abs_diff(&fa, &fb)?;
    create_dir(out)?;
    save_field(&diff, out, "diff", heatmap, HeatmapRange::Auto)?;
    println!("{}", stats.summary_line());
    if stats.max_abs_below_y95 <= gate {
        Ok(())
    } else {
        Err(CliError::GateExceeded {
            value: stats.max_abs_below_y95,
            gate,
        })
    }
}

fn save_field(field: &GridField, dir: &Path, stem: &str, heatmap: bool, range: HeatmapRange) -> Result<(), CliError> {
    save_csv(field, dir.join(format!("{stem}.csv")))?;
    if heatmap {
        save_heatmap(field, dir.join(format!("{stem}.pgm")), range)?;
    }
    eprintln!("wrote {}", dir.join(format!("{stem}.csv")).display());
    Ok(())
}
