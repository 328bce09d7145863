use std::path::PathBuf;
use std::process::ExitCode;

use blfq_vqe_cli::{commands, CliError, Result, RunConfig, StateSource};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blfq-vqe", version, about = "Pion VQE in a light-front basis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the J_z = 0 Hamiltonian, its spectrum and Pauli expansions.
    Hamiltonian(Common),
    /// Minimize the ansatz energy.
    Vqe(Common),
    /// Observables from the exact ground state, given angles, or a VQE run.
    Observables {
        #[command(flatten)]
        common: Common,
        /// Use the exact ground state instead of running the VQE.
        #[arg(long, conflicts_with = "angles")]
        exact: bool,
        /// Ansatz angles `t1,t2,t3` (radians) for the configured encoding.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Option<Vec<f64>>,
    },
    /// Shots versus relative error for every encoding at the ground-state angles.
    Scaling(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override any configuration key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_name = "direct|compact|bk")]
    encoding: Option<String>,
    #[arg(long, value_name = "exact|sampled|noisy")]
    mode: Option<String>,
    /// Shots per Pauli term.
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Probability of reading 1 when the qubit is 0.
    #[arg(long)]
    noise_p01: Option<String>,
    /// Probability of reading 0 when the qubit is 1.
    #[arg(long)]
    noise_p10: Option<String>,
    /// Invert the readout confusion matrices (needs `--mode noisy`).
    #[arg(long)]
    mitigate: bool,
    /// NJL coupling G_pi in MeV^-2.
    #[arg(long)]
    gpi: Option<String>,
    /// Output directory (default: $BLFQ_VQE_OUT, then ./results).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    /// Defaults, then the file, then `--set`, then the named flags.
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for pair in &self.set {
            cfg.set_pair(pair)?;
        }
        let flags = [
            ("encoding", &self.encoding),
            ("mode", &self.mode),
            ("shots", &self.shots),
            ("seed", &self.seed),
            ("noise_p01", &self.noise_p01),
            ("noise_p10", &self.noise_p10),
            ("g_pi", &self.gpi),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        if self.mitigate {
            cfg.mitigate = true;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn init_threads(&self) -> Result<()> {
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<Vec<String>> {
    let common = match &cli.command {
        Command::Hamiltonian(c) | Command::Vqe(c) | Command::Scaling(c) => c,
        Command::Observables { common, .. } => common,
    };
    common.init_threads()?;
    let cfg = common.resolve()?;
    match &cli.command {
        Command::Hamiltonian(_) => commands::hamiltonian(&cfg),
        Command::Vqe(_) => commands::vqe(&cfg),
        Command::Scaling(_) => commands::scaling(&cfg),
        Command::Observables { exact, angles, .. } => {
            let source = match (exact, angles) {
                (true, _) => StateSource::Exact,
                (false, Some(a)) => match a.as_slice() {
                    &[t1, t2, t3] => StateSource::Angles([t1, t2, t3]),
                    _ => return Err(CliError::Config(format!("--angles takes three values, got {}", a.len()))),
                },
                (false, None) => StateSource::Vqe,
            };
            commands::observables(&cfg, source)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            eprintln!("wrote {}", files.join(", "));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
