//! `qutrit-lab` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qutrit_lab::device::linear_grid;
use qutrit_lab::harness::{self, ExperimentConfig, ResultBundle};
use qutrit_lab::mitigation::ConfusionMatrix;
use qutrit_lab::state::BasisLabel;
use qutrit_lab::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "qutrit-lab", version, about = "Two-qutrit transmon processor experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Simulate with relaxation, dephasing and cross-Kerr noise.
    #[arg(long, global = true)]
    noisy: bool,
    /// Number of measurement shots.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Report exact probabilities instead of sampling.
    #[arg(long, global = true, conflicts_with = "shots")]
    exact: bool,
    /// RNG seed; overrides the profile.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pass samples through the readout confusion matrix and undo it.
    #[arg(long, global = true)]
    mitigate: bool,
    /// TOML profile; the built-in device profile is used otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the JSON bundle and CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an algorithm over all its oracles or targets.
    Sim {
        #[arg(value_enum)]
        algorithm: Algorithm,
    },
    /// Compile gates into native pulses.
    Compile {
        #[command(subcommand)]
        what: CompileCmd,
    },
    /// Circuit-model numerics.
    Device {
        #[command(subcommand)]
        what: DeviceCmd,
    },
    /// Process tomography of compiled gates.
    Tomo {
        #[command(subcommand)]
        what: TomoCmd,
    },
    /// Correct measured counts for readout errors.
    Mitigate {
        /// Nine counts, bare or as `label count` lines.
        #[arg(long)]
        counts: PathBuf,
        /// Confusion matrix file; defaults to the profile's readout model.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Algorithm {
    Dj,
    Bv,
    Grover,
}

#[derive(Subcommand, Debug)]
enum CompileCmd {
    /// Controlled phase on one two-qutrit basis state.
    Cphase {
        /// Phase in radians.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Basis label such as `11` or `22`.
        #[arg(long)]
        target: String,
    },
}

#[derive(Subcommand, Debug)]
enum DeviceCmd {
    /// Spectrum, frequencies and cross-Kerr terms over a flux grid.
    Sweep {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 31)]
        /// Grid points, endpoints included.
        steps: usize,
    },
}

#[derive(Subcommand, Debug)]
enum TomoCmd {
    /// Chi-matrix tomography of one compiled single-qutrit gate.
    Process {
        /// I, H, Hdag, X, X2, Z or Z2.
        #[arg(long)]
        gate: String,
        /// 1 or 2.
        #[arg(long, default_value_t = 1)]
        qutrit: usize,
    },
}

fn load_config(g: &GlobalOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.noisy |= g.noisy;
    cfg.mitigate |= g.mitigate;
    if g.exact {
        cfg.shots = None;
    }
    if g.shots.is_some() {
        cfg.shots = g.shots;
    }
    if g.seed.is_some() {
        cfg.seed = g.seed;
    }
    if g.out.is_some() {
        cfg.out_dir = g.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ResultBundle> {
    let cfg = load_config(&cli.global)?;
    let bundle = match cli.command {
        Command::Sim { algorithm } => match algorithm {
            Algorithm::Dj => harness::run_dj(&cfg)?,
            Algorithm::Bv => harness::run_bv(&cfg)?,
            Algorithm::Grover => harness::run_grover(&cfg)?,
        },
        Command::Compile { what: CompileCmd::Cphase { theta, target } } => {
            let target: BasisLabel = target.parse()?;
            harness::run_compile_cphase(&cfg, theta, &target)?
        }
        Command::Device { what: DeviceCmd::Sweep { from, to, steps } } => {
            harness::run_device_report(&cfg, &linear_grid(from, to, steps)?)?
        }
        Command::Tomo { what: TomoCmd::Process { gate, qutrit } } => harness::run_process_tomo(&cfg, &gate, qutrit)?,
        Command::Mitigate { counts, matrix } => {
            let counts = harness::parse_counts(&read(&counts)?)?;
            let m = match matrix {
                Some(path) => ConfusionMatrix::from_text(&read(&path)?)?,
                None => cfg.confusion_matrix()?,
            };
            harness::run_mitigate(&cfg, &counts, &m)?
        }
    };
    if let Some(dir) = &cfg.out_dir {
        for path in bundle.write(dir)? {
            log::info!("wrote {}", path.display());
        }
    }
    Ok(bundle)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(bundle) => {
            println!("{}", bundle.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let doc = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{doc}");
            ExitCode::FAILURE
        }
    }
}
