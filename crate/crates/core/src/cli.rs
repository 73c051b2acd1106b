//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::depth::{alpha_radii, trim_weights, RadiusProfile, TrimConfig};
use crate::error::{Error, Result};
use crate::estimators::{complement_mean, scores, trimmed_cov_pcs};
use crate::hilbert::sample_distances;
use crate::io::{self, format_f64, histogram, load_dataset, Dataset, RunManifest};
use crate::simulation::{run_study, SimConfig};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "TRIMDEPTH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "trimdepth",
    version,
    about = "Depth-based trimming for functional and multivariate data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Hard,
    Soft,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// α-radii and their ranks for one or more α.
    Radii {
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radii for an α sweep plus binned histograms of each.
    Screen {
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Writes `radii.csv` and `histogram.csv` here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Trimmed mean, complement mean and principal components.
    Trim {
        dataset: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        beta1: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Hard)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        components: usize,
        /// Output JSON; the manifest goes next to it as `<out>.manifest.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo study from a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Re-runs the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

/// Exit status for an error: 2 for unreadable input, 3 for a configuration
/// that leaves nothing to estimate, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_parse() {
        2
    } else if err.is_degenerate() {
        3
    } else {
        1
    }
}

/// Installs the global thread pool size from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.parse().map_err(|_| Error::Config {
        field: THREADS_ENV.into(),
        message: format!("`{value}` is not a thread count"),
    })?;
    // A pool may already exist when called twice in one process (tests).
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses `args` (without the program name) and runs the command.
pub fn run(args: Vec<String>) -> Result<()> {
    let argv = std::iter::once("trimdepth".to_owned()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(Error::Config {
                field: "arguments".into(),
                message: e.to_string().trim_end().to_owned(),
            })
        }
    };
    dispatch(cli.command, args)
}

fn dispatch(command: Command, args: Vec<String>) -> Result<()> {
    match command {
        Command::Radii {
            dataset,
            alpha,
            out,
        } => {
            let data = load_dataset(&dataset, None)?;
            let text = radii_csv(&data, &alpha)?;
            emit(out.as_deref(), &text)
        }
        Command::Screen {
            dataset,
            alpha,
            bins,
            out_dir,
        } => {
            let data = load_dataset(&dataset, None)?;
            let radii = radii_csv(&data, &alpha)?;
            let hist = histogram_csv(&profiles(&data, &alpha)?, bins);
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join("radii.csv"), radii)?;
                    fs::write(dir.join("histogram.csv"), hist)?;
                }
                None => print!("{hist}"),
            }
            Ok(())
        }
        Command::Trim {
            dataset,
            alpha,
            beta,
            beta1,
            mode,
            components,
            out,
        } => {
            let config = match mode {
                Mode::Hard => TrimConfig::hard(alpha, beta)?,
                Mode::Soft => {
                    let beta1 = beta1.ok_or_else(|| Error::Config {
                        field: "beta1".into(),
                        message: "soft mode requires --beta1".into(),
                    })?;
                    TrimConfig::soft(alpha, beta, beta1)?
                }
            };
            let data = load_dataset(&dataset, None)?;
            let report = trim_report(&data, &config, components)?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            emit(out.as_deref(), &text)?;
            if let Some(out) = out {
                let mut manifest = RunManifest::new("trim", args, serde_json::to_value(config)?);
                manifest.config["components"] = components.into();
                manifest.dataset = Some(dataset.display().to_string());
                manifest.dataset_sha256 = Some(io::file_sha256(&dataset)?);
                manifest.write(&sidecar(&out))?;
            }
            Ok(())
        }
        Command::Simulate { config, out_dir } => {
            let text = fs::read_to_string(&config)?;
            let sim: SimConfig = toml::from_str(&text).map_err(|e| Error::Config {
                field: config.display().to_string(),
                message: e.to_string().trim_end().to_owned(),
            })?;
            let start = Instant::now();
            let report = run_study(&sim)?;
            let stem = config
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("study")
                .to_owned();
            fs::create_dir_all(&out_dir)?;
            fs::write(out_dir.join(format!("{stem}.csv")), report.to_csv())?;
            fs::write(
                out_dir.join(format!("{stem}.json")),
                serde_json::to_string_pretty(&report)? + "\n",
            )?;
            let mut manifest = RunManifest::new("simulate", args, serde_json::to_value(&sim)?);
            manifest.seed = Some(sim.seed);
            manifest.dataset = Some(config.display().to_string());
            manifest.dataset_sha256 = Some(io::file_sha256(&config)?);
            manifest.write(&out_dir.join(format!("{stem}.manifest.json")))?;
            print!("{}", report.to_table());
            eprintln!(
                "{} replications in {:.1}s",
                sim.replications,
                start.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::Replay { manifest } => {
            let m = RunManifest::read(&manifest)?;
            if let (Some(path), Some(expected)) = (&m.dataset, &m.dataset_sha256) {
                let found = io::file_sha256(Path::new(path))?;
                if &found != expected {
                    return Err(Error::Config {
                        field: "dataset_sha256".into(),
                        message: format!("{path} changed since the manifest was written"),
                    });
                }
            }
            if m.args.first().is_some_and(|a| a == "replay") {
                return Err(Error::Config {
                    field: "args".into(),
                    message: "manifest records a replay".into(),
                });
            }
            run(m.args)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn profiles(data: &Dataset, alphas: &[f64]) -> Result<Vec<RadiusProfile>> {
    if alphas.is_empty() {
        return Err(Error::Config {
            field: "alpha".into(),
            message: "at least one alpha is required".into(),
        });
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let d = sample_distances(&data.sample);
    sorted.iter().map(|&a| alpha_radii(&d, a)).collect()
}

/// `id,alpha,radius,rank`, ordered by α then by observation.
pub fn radii_csv(data: &Dataset, alphas: &[f64]) -> Result<String> {
    let mut out = String::from("id,alpha,radius,rank\n");
    for p in profiles(data, alphas)? {
        for (i, id) in data.ids.iter().enumerate() {
            let _ = writeln!(
                out,
                "{id},{},{},{}",
                format_f64(p.alpha),
                format_f64(p.radii[i]),
                p.ranks[i]
            );
        }
    }
    Ok(out)
}

/// `alpha,bin,lower,upper,count` for each profile.
pub fn histogram_csv(profiles: &[RadiusProfile], bins: usize) -> String {
    let mut out = String::from("alpha,bin,lower,upper,count\n");
    for p in profiles {
        for (b, bin) in histogram(&p.radii, bins).iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{b},{},{},{}",
                format_f64(p.alpha),
                format_f64(bin.lower),
                format_f64(bin.upper),
                bin.count
            );
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct TrimReport {
    pub schema_version: u32,
    pub config: TrimConfig,
    pub ids: Vec<String>,
    pub radii: Vec<f64>,
    pub ranks: Vec<usize>,
    pub weights: Vec<f64>,
    pub effective_n: f64,
    pub mean: Vec<f64>,
    /// `null` when no observation was trimmed.
    pub complement_mean: Option<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub pc_values: Vec<Vec<f64>>,
    pub scores: Vec<Vec<f64>>,
    pub truncated: bool,
    pub degenerate: bool,
}

/// Full pipeline for `trim`. A degenerate weighting prints a histogram of the
/// radii to stderr to help pick a smaller β.
pub fn trim_report(data: &Dataset, config: &TrimConfig, components: usize) -> Result<TrimReport> {
    let sample = &data.sample;
    let d = sample_distances(sample);
    let profile = alpha_radii(&d, config.alpha)?;
    let weights = match trim_weights(&profile, config) {
        Ok(w) => w,
        Err(e) => {
            if e.is_degenerate() {
                eprintln!("radii at alpha = {}:", config.alpha);
                eprint!("{}", histogram_csv(std::slice::from_ref(&profile), 10));
            }
            return Err(e);
        }
    };
    let fit = trimmed_cov_pcs(sample, &weights, components)?;
    let complement = match complement_mean(sample, &weights) {
        Ok(m) => Some(m),
        Err(Error::NoTrimmedObservations) => None,
        Err(e) => return Err(e),
    };
    Ok(TrimReport {
        schema_version: io::SCHEMA_VERSION,
        config: *config,
        ids: data.ids.clone(),
        radii: profile.radii,
        ranks: profile.ranks,
        effective_n: weights.effective_n,
        weights: weights.w.clone(),
        complement_mean: complement,
        scores: scores(sample, &fit)?,
        mean: fit.mean,
        eigenvalues: fit.eigenvalues,
        pc_values: fit.pc_values,
        truncated: fit.truncated,
        degenerate: fit.degenerate,
    })
}
