use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bergman_cli::config::{
    CommutatorConfig, ConstantsConfig, CoverRunConfig, ExperimentConfig, VerifyConfig,
};
use bergman_cli::{run, CliError};

/// Verification experiments on the Bergman space of the unit ball:
/// exact identity/inequality suites, truncated commutator spectra,
/// shell covers and empirical constants.
#[derive(Parser)]
#[command(name = "bergman", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOverrides {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ambient complex dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Master seed (every trial seed derives from it).
    #[arg(long)]
    seed: Option<u64>,
    /// Generator degree for random polynomial models.
    #[arg(long)]
    degree: Option<usize>,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker pool width (0 = default).
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity/inequality verifier suite.
    Verify {
        #[command(flatten)]
        common: CommonOverrides,
        /// Restrict to these claim ids (repeatable).
        #[arg(long)]
        claim: Vec<String>,
        /// Generator literal, e.g. "z1^2 - 2*z2".
        #[arg(long)]
        polynomial: Option<String>,
        /// Seeded trials per sampled claim.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Compute commutator spectra on a principal submodule.
    Commutator {
        #[command(flatten)]
        common: CommonOverrides,
        /// Generator literal, e.g. "z1*z2" or "1" for the full space.
        #[arg(long)]
        polynomial: Option<String>,
        /// Max multiplier degrees to sweep (repeatable).
        #[arg(long = "truncation")]
        b_list: Vec<usize>,
        /// First coordinate of [S_i, S_j*].
        #[arg(long)]
        i: Option<usize>,
        /// Second coordinate of [S_i, S_j*].
        #[arg(long)]
        j: Option<usize>,
        /// Also export the commutator matrices (CSV + binary).
        #[arg(long)]
        export_matrices: bool,
    },
    /// Run the greedy shell cover with diagnostics.
    Cover {
        #[command(flatten)]
        common: CommonOverrides,
        /// Shell inner radius.
        #[arg(long)]
        r: Option<f64>,
        /// Box scale factor in delta(z) = c (1 - |z|).
        #[arg(long)]
        c: Option<f64>,
        /// Number of shell samples to cover.
        #[arg(long)]
        samples: Option<usize>,
        /// Probe points for the overlap histogram.
        #[arg(long)]
        probes: Option<usize>,
    },
    /// Estimate the empirical shell-bound constants over an (n, m) grid.
    Constants {
        #[command(flatten)]
        common: CommonOverrides,
        /// Dimensions to sweep (repeatable).
        #[arg(long = "dim")]
        n_list: Vec<usize>,
        /// Generator degrees to sweep (repeatable).
        #[arg(long = "generator-degree")]
        m_list: Vec<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        kmax: Option<u32>,
    },
    /// Aggregate an existing JSON-lines report into a summary CSV.
    Report {
        /// Path to a report.jsonl file.
        input: PathBuf,
        /// Output CSV path (defaults to summary.csv next to the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config<T: serde::de::DeserializeOwned>(
    path: &Option<PathBuf>,
    fallback: T,
) -> Result<T, CliError> {
    match path {
        None => Ok(fallback),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let wrapper: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::config("config", e.to_string()))?;
            let value = serde_json::to_value(&wrapper)?;
            Ok(serde_json::from_value(value)?)
        }
    }
}

fn build_config(cli: Command) -> Result<ExperimentConfig, CliError> {
    Ok(match cli {
        Command::Verify {
            common,
            claim,
            polynomial,
            trials,
        } => {
            let fallback = VerifyConfig::defaults(common.n.unwrap_or(2));
            let wrapped = load_config(
                &common.config,
                ExperimentConfig::Verify(fallback),
            )?;
            let mut cfg = match wrapped {
                ExperimentConfig::Verify(c) => c,
                _ => return Err(CliError::config("config", "expected a verify config")),
            };
            if let Some(n) = common.n {
                cfg.n = n;
            }
            if let Some(s) = common.seed {
                cfg.seed = Some(s);
            }
            if let Some(d) = common.degree {
                cfg.degree = d;
            }
            if let Some(o) = common.out {
                cfg.out = Some(o);
            }
            if let Some(w) = common.parallelism {
                cfg.parallelism = w;
            }
            if !claim.is_empty() {
                cfg.claims = claim;
            }
            if let Some(p) = polynomial {
                cfg.polynomial = Some(p);
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            ExperimentConfig::Verify(cfg)
        }
        Command::Commutator {
            common,
            polynomial,
            b_list,
            i,
            j,
            export_matrices,
        } => {
            let fallback = CommutatorConfig::defaults(common.n.unwrap_or(2));
            let wrapped = load_config(&common.config, ExperimentConfig::Commutator(fallback))?;
            let mut cfg = match wrapped {
                ExperimentConfig::Commutator(c) => c,
                _ => return Err(CliError::config("config", "expected a commutator config")),
            };
            if let Some(n) = common.n {
                cfg.n = n;
            }
            if let Some(s) = common.seed {
                cfg.seed = Some(s);
            }
            if let Some(d) = common.degree {
                cfg.degree = d;
            }
            if let Some(o) = common.out {
                cfg.out = Some(o);
            }
            if let Some(w) = common.parallelism {
                cfg.parallelism = w;
            }
            if let Some(p) = polynomial {
                cfg.polynomial = Some(p);
            }
            if !b_list.is_empty() {
                cfg.b_list = b_list;
            }
            if let Some(i) = i {
                cfg.i = i;
            }
            if let Some(j) = j {
                cfg.j = j;
            }
            cfg.export_matrices |= export_matrices;
            ExperimentConfig::Commutator(cfg)
        }
        Command::Cover {
            common,
            r,
            c,
            samples,
            probes,
        } => {
            let fallback = CoverRunConfig::defaults(common.n.unwrap_or(2));
            let wrapped = load_config(&common.config, ExperimentConfig::Cover(fallback))?;
            let mut cfg = match wrapped {
                ExperimentConfig::Cover(c) => c,
                _ => return Err(CliError::config("config", "expected a cover config")),
            };
            if let Some(n) = common.n {
                cfg.n = n;
            }
            if let Some(s) = common.seed {
                cfg.seed = Some(s);
            }
            if let Some(o) = common.out {
                cfg.out = Some(o);
            }
            if let Some(w) = common.parallelism {
                cfg.parallelism = w;
            }
            if let Some(r) = r {
                cfg.r = r;
            }
            if let Some(c) = c {
                cfg.c = c;
            }
            if let Some(s) = samples {
                cfg.samples = s;
            }
            if let Some(p) = probes {
                cfg.probes = p;
            }
            ExperimentConfig::Cover(cfg)
        }
        Command::Constants {
            common,
            n_list,
            m_list,
            trials,
            kmax,
        } => {
            let fallback = ConstantsConfig::defaults();
            let wrapped = load_config(&common.config, ExperimentConfig::Constants(fallback))?;
            let mut cfg = match wrapped {
                ExperimentConfig::Constants(c) => c,
                _ => return Err(CliError::config("config", "expected a constants config")),
            };
            if let Some(s) = common.seed {
                cfg.seed = Some(s);
            }
            if let Some(o) = common.out {
                cfg.out = Some(o);
            }
            if let Some(w) = common.parallelism {
                cfg.parallelism = w;
            }
            if !n_list.is_empty() {
                cfg.n_list = n_list;
            }
            if !m_list.is_empty() {
                cfg.m_list = m_list;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(k) = kmax {
                cfg.k_max = k;
            }
            ExperimentConfig::Constants(cfg)
        }
        Command::Report { .. } => unreachable!("handled before build_config"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Command::Report { input, out } = &cli.command {
        return match run_report(input, out) {
            Ok(path) => {
                println!("summary written to {}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let mut config = match build_config(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = config.normalize() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&config) {
        Ok(output) => {
            let passed = output.reports.iter().filter(|r| r.pass).count();
            println!(
                "{} / {} checks passed; reports in {}",
                passed,
                output.reports.len(),
                config.out_dir().display()
            );
            if output.all_passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("some checks failed; see report.jsonl");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_report(input: &PathBuf, out: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(input)?;
    let reports = bergman_core::report::from_jsonl(&text)?;
    let csv = bergman_core::report::summary_csv(&reports);
    let path = out.clone().unwrap_or_else(|| {
        input
            .parent()
            .map(|p| p.join("summary.csv"))
            .unwrap_or_else(|| PathBuf::from("summary.csv"))
    });
    std::fs::write(&path, csv)?;
    Ok(path)
}
