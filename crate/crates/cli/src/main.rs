use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use underlay_core::config::{ConfigError, ScenarioFile};
use underlay_core::geometry::DistanceProfile;
use underlay_core::inversion::{tradeoff_curve, write_tradeoff_csv, Family};
use underlay_core::montecarlo::{self, McConfig, OutageEstimator};
use underlay_core::network_metrics::{analyze, Analysis};
use underlay_core::{InterferenceKernel, Protocol, Scenario};

mod report;

use report::{Format, Row};

#[derive(Debug, Parser)]
#[command(
    name = "underlay",
    version,
    about = "Interference and outage analysis for underlay cognitive networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolKind {
    Full,
    #[value(alias = "guard_zone")]
    GuardZone,
    Threshold,
    Cooperation,
}

impl ProtocolKind {
    fn matches(self, p: &Protocol) -> bool {
        matches!(
            (self, p),
            (ProtocolKind::Full, Protocol::FullActivity)
                | (ProtocolKind::GuardZone, Protocol::GuardZone { .. })
                | (ProtocolKind::Threshold, Protocol::Threshold { .. })
                | (ProtocolKind::Cooperation, Protocol::Cooperation { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    #[value(alias = "guard_zone")]
    GuardZone,
    Threshold,
    Cooperation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Estimator {
    Conditional,
    Indicator,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic moments, cumulants, outage and mean active SUs.
    Analyze {
        scenario: PathBuf,
        /// Protocols to evaluate (default: all in the file). `full` is always available.
        #[arg(long = "protocol", value_enum)]
        protocols: Vec<ProtocolKind>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Monte Carlo estimates next to the analytic values.
    Simulate {
        scenario: PathBuf,
        #[arg(long = "protocol", value_enum)]
        protocols: Vec<ProtocolKind>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write one CSV row per trial (suffixed by protocol when several are run).
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "conditional")]
        estimator: Estimator,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Mean active SUs versus target outage, one CSV row per family and target.
    Tradeoff {
        scenario: PathBuf,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "guard-zone,threshold,cooperation"
        )]
        families: Vec<FamilyKind>,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        pout_grid: Vec<f64>,
        /// Cooperation range; defaults to the file's cooperation protocol.
        #[arg(long)]
        r_c: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance distribution table: r, angular measure, pdf, cdf.
    Profile {
        scenario: PathBuf,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
        points: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(path: &Path) -> Result<(Scenario, Vec<Protocol>), CliError> {
    Ok(ScenarioFile::load(path)?.validate()?)
}

fn select(listed: Vec<Protocol>, wanted: &[ProtocolKind]) -> Result<Vec<Protocol>, CliError> {
    if wanted.is_empty() {
        if listed.is_empty() {
            return Ok(vec![Protocol::FullActivity]);
        }
        return Ok(listed);
    }
    let mut out = Vec::new();
    for &kind in wanted {
        let found: Vec<Protocol> = listed.iter().copied().filter(|p| kind.matches(p)).collect();
        if found.is_empty() {
            if kind == ProtocolKind::Full {
                out.push(Protocol::FullActivity);
            } else {
                return Err(CliError::Usage(format!(
                    "scenario file has no {kind:?} protocol section"
                )));
            }
        }
        out.extend(found);
    }
    Ok(out)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            scenario,
            protocols,
            format,
        } => {
            let (s, listed) = load(&scenario)?;
            let protocols = select(listed, &protocols)?;
            let mut rows = Vec::new();
            for p in protocols {
                let a = analysis(&s, p)?;
                rows.push(Row::analytic(p, &a));
            }
            let mut out = output(None)?;
            report::write_analysis(&rows, format, &mut out)?;
            out.flush()?;
        }
        Command::Simulate {
            scenario,
            protocols,
            trials,
            seed,
            dump,
            estimator,
            format,
        } => {
            let (s, listed) = load(&scenario)?;
            let protocols = select(listed, &protocols)?;
            let several = protocols.len() > 1;
            let mut rows = Vec::new();
            for p in protocols {
                let a = analysis(&s, p)?;
                let config = McConfig {
                    trials,
                    seed,
                    estimator: match estimator {
                        Estimator::Conditional => OutageEstimator::Conditional,
                        Estimator::Indicator => OutageEstimator::Indicator,
                    },
                    keep_records: dump.is_some(),
                };
                let mc = montecarlo::run_with(&s, p, &config).map_err(runtime)?;
                if let (Some(path), Some(records)) = (&dump, &mc.records) {
                    let path = if several {
                        suffixed(path, p.name())
                    } else {
                        path.clone()
                    };
                    let mut w = BufWriter::new(File::create(&path)?);
                    montecarlo::write_records_csv(records, &mut w)?;
                    w.flush()?;
                }
                rows.push(Row::simulated(p, &a, &mc));
            }
            let mut out = output(None)?;
            report::write_simulation(&rows, format, &mut out)?;
            out.flush()?;
        }
        Command::Tradeoff {
            scenario,
            families,
            pout_grid,
            r_c,
            out,
        } => {
            if pout_grid.is_empty() {
                return Err(CliError::Usage("--pout-grid needs at least one value".into()));
            }
            if let Some(bad) = pout_grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
                return Err(CliError::Usage(format!("outage targets must lie in (0, 1), got {bad}")));
            }
            let (s, listed) = load(&scenario)?;
            let file_rc = listed.iter().find_map(|p| match p {
                Protocol::Cooperation { r_c, .. } => Some(*r_c),
                _ => None,
            });
            let mut w = output(out.as_deref())?;
            let mut header = true;
            for kind in families {
                let family = match kind {
                    FamilyKind::GuardZone => Family::GuardZone,
                    FamilyKind::Threshold => Family::Threshold,
                    FamilyKind::Cooperation => {
                        let r_c = r_c.or(file_rc).ok_or_else(|| {
                            CliError::Usage(
                                "cooperation family needs --r-c or a cooperation section in the file".into(),
                            )
                        })?;
                        Family::Cooperation { r_c }
                    }
                };
                let points = tradeoff_curve(&s, family, &pout_grid).map_err(runtime)?;
                write_tradeoff_csv(&points, &mut w, header)?;
                header = false;
            }
            w.flush()?;
        }
        Command::Profile { scenario, points, out } => {
            let (s, _) = load(&scenario)?;
            let profile = DistanceProfile::new(s.region());
            let mut w = output(out.as_deref())?;
            writeln!(w, "r,angular_measure,pdf,cdf")?;
            let (lo, hi) = (profile.epsilon(), profile.r_max());
            for i in 0..points {
                let r = lo + (hi - lo) * f64::from(i) / f64::from(points - 1);
                let lambda = profile.angular_measure(r).map_err(runtime)?;
                writeln!(w, "{:e},{:e},{:e},{:e}", r, lambda, profile.pdf(r), profile.cdf(r))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn analysis(s: &Scenario, p: Protocol) -> Result<Analysis<f64>, CliError> {
    let kernel = InterferenceKernel::new(s, p).map_err(runtime)?;
    analyze(&kernel, 3).map_err(runtime)
}

fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trials");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{tag}.{ext}"),
        None => format!("{stem}_{tag}"),
    };
    path.with_file_name(name)
}
