//! Command-line surface: `build | spectra | kappa | distance | decode | sweep | selftest`.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 invariant
//! violation, 3 decoder failure in `decode`. Errors are a single JSON object
//! on stderr.

pub mod config;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::decoder::{flip_log_jsonl, DecodeError, Decoder, DecoderKind, Role, Status};
use crate::local_codes::{kappa_estimate, predicted_kappa, KappaMode, LocalCodeError, LocalRole};
use crate::sim::{self, ErrorModel, SimError};
use crate::tanner::{CodeError, DistanceMode, DistanceSide};

use config::{BuildError, ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "qtanner", version, about = "Quantum Tanner codes and their mismatch decoders")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ConfigArg {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KappaModeArg {
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistanceModeArg {
    Auto,
    Exact,
    Randomized,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RoleArg {
    Xerror,
    Zerror,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble the code and print its summary JSON.
    Build {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// λ of both Cayley graphs and both square graphs.
    Spectra {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Robustness of both local configurations against the random-code prediction.
    Kappa {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "auto")]
        mode: KappaModeArg,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Minimum distance, exact or randomized upper bound.
    Distance {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "z")]
        side: SideArg,
        #[arg(long, value_enum, default_value = "auto")]
        mode: DistanceModeArg,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decode one sampled error and print its trial record.
    Decode {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        seed: u64,
        /// Fixed-weight error of this weight (default: first grid point).
        #[arg(long)]
        weight: Option<usize>,
        #[arg(long, value_enum, default_value = "sequential")]
        decoder: KindArg,
        #[arg(long, value_enum)]
        role: Option<RoleArg>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Write the flip log as JSON lines.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Monte Carlo sweep over the experiment grid; CSV output.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// CSV destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-trial records as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Invariant suite on the given config, or on both shipped reference configs.
    Selftest {
        #[arg(long)]
        config: Vec<PathBuf>,
    },
}

/// A failed command and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub body: serde_json::Value,
}

impl Failure {
    fn config(e: ConfigError) -> Self {
        Self {
            code: 1,
            body: json!({ "error": "config", "pointer": e.pointer, "message": e.message }),
        }
    }

    fn usage(message: impl ToString) -> Self {
        Self {
            code: 1,
            body: json!({ "error": "usage", "message": message.to_string() }),
        }
    }

    fn invariant(message: impl ToString) -> Self {
        Self {
            code: 2,
            body: json!({ "error": "invariant", "message": message.to_string() }),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Config(c) => Failure::config(c),
            BuildError::Code(c @ CodeError::CssViolation { .. }) => Failure::invariant(c),
            BuildError::Code(c) => Failure::usage(c),
        }
    }
}

impl From<DecodeError> for Failure {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::ConsistencyViolation(_) | DecodeError::SyndromeMismatch => Failure::invariant(e),
            other => Failure::usage(other),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Decode(d) => d.into(),
            other => Failure::usage(other),
        }
    }
}

impl From<LocalCodeError> for Failure {
    fn from(e: LocalCodeError) -> Self {
        Failure::usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e)
    }
}

fn load(path: &PathBuf) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(ConfigError::new("/", format!("{}: {e}", path.display()))))?;
    RunConfig::from_json(&text).map_err(Failure::config)
}

fn print_json(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("values serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                writeln!(stderr, "{}", json!({ "error": "usage", "message": e.to_string() }))
            };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "{}", json!({ "error": "usage", "message": e.to_string() }));
            return 1;
        }
    };
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut buffer));
    let _ = stdout.write_all(&buffer);
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.body);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Build { config } => {
            let cfg = load(&config.config)?;
            let code = cfg.build_code()?;
            print_json(out, &code.summary(cfg.kappa.samples, cfg.kappa.seed))
        }
        Command::Spectra { config } => {
            let code = load(&config.config)?.build_code()?;
            print_json(out, &code.spectra())
        }
        Command::Kappa { config, mode, samples, seed } => {
            let cfg = load(&config.config)?;
            let code = cfg.build_code()?;
            let samples = samples.unwrap_or(cfg.kappa.samples);
            let seed = seed.unwrap_or(cfg.kappa.seed);
            let summary = code.kappa_report(samples, seed);
            let (x_side, z_side) = match mode {
                KappaModeArg::Auto => (summary.x_side, summary.z_side),
                KappaModeArg::Exact | KappaModeArg::Sampled => {
                    let m = match mode {
                        KappaModeArg::Exact => KappaMode::Exact,
                        _ => KappaMode::Sample { samples, seed },
                    };
                    let est = |role| kappa_estimate(&code.pair().product(role), m, cfg.decoder.budget);
                    (est(LocalRole::XSide)?, est(LocalRole::ZSide)?)
                }
            };
            let delta = code.pair().delta() as f64;
            let rho_a = code.pair().k_a() as f64 / delta;
            let rho_b = code.pair().k_b() as f64 / delta;
            print_json(
                out,
                &json!({
                    "x_side": x_side,
                    "z_side": z_side,
                    "rho": [rho_a, rho_b],
                    "predicted_rate": predicted_kappa(rho_a, rho_b).ok(),
                    "predicted_codim": predicted_kappa(1.0 - rho_a, 1.0 - rho_b).ok(),
                }),
            )
        }
        Command::Distance { config, side, mode, trials, seed } => {
            let cfg = load(&config.config)?;
            let code = cfg.build_code()?;
            let side = match side {
                SideArg::X => DistanceSide::X,
                SideArg::Z => DistanceSide::Z,
            };
            let randomized = DistanceMode::Randomized {
                trials: trials.unwrap_or(cfg.distance.trials),
                seed: seed.unwrap_or(cfg.distance.seed),
            };
            let est = match mode {
                DistanceModeArg::Exact => code.distance_estimate(side, DistanceMode::Exact),
                DistanceModeArg::Randomized => code.distance_estimate(side, randomized),
                DistanceModeArg::Auto => match code.distance_estimate(side, DistanceMode::Exact) {
                    Err(CodeError::DimensionTooLarge { .. }) => code.distance_estimate(side, randomized),
                    other => other,
                },
            }
            .map_err(Failure::usage)?;
            let bound = code.kappa_report(cfg.kappa.samples, cfg.kappa.seed).distance_bound;
            print_json(
                out,
                &json!({
                    "side": side,
                    "distance": est.distance,
                    "exact": est.exact,
                    "trials": est.trials,
                    "witness": est.witness,
                    "n": code.n(),
                    "k": code.k(),
                    "distance_bound_reported": bound,
                }),
            )
        }
        Command::Decode {
            config,
            seed,
            weight,
            decoder,
            role,
            epsilon,
            log,
        } => {
            let cfg = load(&config.config)?;
            let code = cfg.build_code()?;
            let mut dc = cfg.decoder.decoder_config();
            if let Some(e) = epsilon {
                dc.epsilon = e;
            }
            let role = match role {
                Some(RoleArg::Xerror) => Role::Xerror,
                Some(RoleArg::Zerror) => Role::Zerror,
                None => cfg.decoder.role,
            };
            let kind = match decoder {
                KindArg::Sequential => DecoderKind::Sequential,
                KindArg::Parallel => DecoderKind::Parallel,
            };
            let model = match weight {
                Some(w) => ErrorModel::FixedWeight { w },
                None => cfg
                    .experiment
                    .as_ref()
                    .and_then(|x| x.grid.first().copied())
                    .unwrap_or(ErrorModel::FixedWeight { w: 1 }),
            };
            let dec = Decoder::new(&code, role, dc)?;
            let e = sim::sample_error(&model, &code, seed)?;
            let (mut record, outcome) = sim::run_on_error(&dec, &e, kind)?;
            record.seed = seed;
            record.model = model;
            if let Some(path) = log {
                std::fs::write(path, flip_log_jsonl(&outcome.flips))?;
            }
            print_json(out, &record)?;
            if !record.mismatch.holds() {
                return Err(Failure::invariant("preprocessing identities violated"));
            }
            match record.status {
                Status::Success => Ok(()),
                Status::Failure(reason) => Err(Failure {
                    code: 3,
                    body: json!({ "error": "decoder_failure", "reason": reason, "seed": seed }),
                }),
            }
        }
        Command::Sweep {
            config,
            out: path,
            dump,
            seed,
            trials,
            epsilon,
        } => {
            let cfg = load(&config.config)?;
            let mut sweep = cfg
                .experiment
                .clone()
                .ok_or_else(|| Failure::config(ConfigError::new("/experiment", "sweep needs an experiment section")))?;
            if let Some(s) = seed {
                sweep.seed = s;
            }
            if let Some(t) = trials {
                sweep.trials = t;
            }
            let mut dc = cfg.decoder.decoder_config();
            if let Some(e) = epsilon {
                dc.epsilon = e;
            }
            let code = cfg.build_code()?;
            let dec = Decoder::new(&code, cfg.decoder.role, dc)?;
            let result = sim::sweep(&dec, &sweep)?;
            match path {
                Some(p) => sim::write_csv(&result.rows, std::fs::File::create(p)?)?,
                None => sim::write_csv(&result.rows, &mut *out)?,
            }
            if let Some(p) = dump {
                sim::write_jsonl(&result.records, std::io::BufWriter::new(std::fs::File::create(p)?))?;
            }
            Ok(())
        }
        Command::Selftest { config } => {
            let configs: Vec<(String, RunConfig)> = if config.is_empty() {
                vec![
                    ("ref-tiny".into(), RunConfig::from_json(config::REF_TINY).map_err(Failure::config)?),
                    ("ref-small".into(), RunConfig::from_json(config::REF_SMALL).map_err(Failure::config)?),
                ]
            } else {
                config
                    .iter()
                    .map(|p| load(p).map(|c| (p.display().to_string(), c)))
                    .collect::<Result<_, _>>()?
            };
            let mut all_passed = true;
            let mut report = Vec::new();
            for (name, cfg) in configs {
                let code = cfg.build_code()?;
                let checks = selftest::run_selftest(&code);
                all_passed &= checks.iter().all(|c| c.passed);
                report.push(json!({ "config": name, "n": code.n(), "k": code.k(), "checks": checks }));
            }
            print_json(out, &json!({ "passed": all_passed, "instances": report }))?;
            if all_passed {
                Ok(())
            } else {
                Err(Failure::invariant("selftest found violations"))
            }
        }
    }
}
