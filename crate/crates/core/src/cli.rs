//! Command-line front end. The `relarm` binary is a thin wrapper over
//! [`run`], which tests drive directly.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::dataset::read_dataset;
use crate::error::{RelarmError, Result};
use crate::io::{read_file, write_file};
use crate::normalize::normalize_dataset;
use crate::pipeline::{fit_pipeline, write_run_outputs, FittedPipeline, ModelSnapshot};
use crate::rating::{parse_reference, parse_rating_list, score_agreement, AgreementReport, CollapseTable, RatingScale};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const DEFAULT_OUT_DIR: &str = "relarm-out";

#[derive(Debug, Parser)]
#[command(name = "relarm", version, about = "Relative PCA attribute rating model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the full model on a dataset and write the rating list.
    Run(RunArgs),
    /// Write the normalized indicator matrix.
    Normalize(InputArgs),
    /// Fit the model and write only the snapshot.
    Fit(FitArgs),
    /// Rate objects with a saved model snapshot.
    Assign(AssignArgs),
    /// Compare a rating list with reference agency ratings.
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    dump_intermediates: bool,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct AssignArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Rating list CSV with `object` and `category` columns.
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    /// Optional config supplying the label scale and collapse overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn load_config(path: &Path, overrides: Option<&Overrides>) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::load(path)?;
    if let Some(o) = overrides {
        if let Some(seed) = o.seed {
            config.seed = seed;
        }
        if let Some(k) = o.k {
            config.k = Some(k);
        }
        if let Some(t) = o.threshold {
            config.variance_threshold = t;
        }
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(flag: Option<&PathBuf>, config: Option<&PipelineConfig>) -> PathBuf {
    flag.cloned()
        .or_else(|| config.and_then(|c| c.out_dir.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn fit(input: &InputArgs, overrides: &Overrides, err: &mut dyn Write) -> Result<FittedPipeline> {
    let config = load_config(&input.config, Some(overrides))?;
    let raw = read_dataset(&input.data, &config.indicators)?;
    let fitted = fit_pipeline(&raw, &config)?;
    for w in &fitted.normalized.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    for (a, b) in &fitted.ratings.tie_flags {
        let _ = writeln!(
            err,
            "warning: clusters {} and {} have equal projections; ordered by index",
            a + 1,
            b + 1
        );
    }
    if !fitted.clustering.converged {
        let _ = writeln!(err, "warning: k-means stopped at the iteration cap");
    }
    Ok(fitted)
}

fn score_files(
    ratings: &Path,
    reference: &Path,
    config: Option<&PipelineConfig>,
    err: &mut dyn Write,
) -> Result<AgreementReport> {
    let model = parse_rating_list(&read_file(ratings)?)?;
    let refs = parse_reference(&read_file(reference)?)?;
    let (scale, collapse) = match config {
        Some(c) => (
            RatingScale::new(c.labels.clone())?,
            CollapseTable::with_overrides(&c.collapse),
        ),
        None => (RatingScale::standard(), CollapseTable::default()),
    };
    let report = score_agreement(&model, &refs, &collapse, &scale)?;
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(report)
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let fitted = fit(&args.input, &args.overrides, err)?;
            let config = &fitted.config;
            let dir = out_dir(args.input.out_dir.as_ref(), Some(config));
            let report = match &args.reference {
                Some(reference) => {
                    let refs = parse_reference(&read_file(reference)?)?;
                    let report = score_agreement(
                        &fitted.ratings.categories(),
                        &refs,
                        &CollapseTable::with_overrides(&config.collapse),
                        &fitted.scale(),
                    )?;
                    for w in &report.warnings {
                        let _ = writeln!(err, "warning: {w}");
                    }
                    Some(report)
                }
                None => None,
            };
            let dump = args.dump_intermediates || config.dump_intermediates;
            let files = write_run_outputs(&dir, &fitted, report.as_ref(), dump)?;
            let _ = writeln!(
                out,
                "rated {} objects into {} categories using {} components",
                fitted.ratings.objects.len(),
                fitted.clustering.k(),
                fitted.pca.d
            );
            if let Some(r) = &report {
                let _ = writeln!(out, "agreement: {}", r.status);
            }
            for p in files.paths {
                let _ = writeln!(out, "wrote {}", p.display());
            }
        }
        Command::Normalize(args) => {
            let config = PipelineConfig::load(&args.config)?;
            let raw = read_dataset(&args.data, &config.indicators)?;
            let b = normalize_dataset(&raw)?;
            for w in &b.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            emit(args.out_dir.as_ref(), "normalized.csv", &b.to_csv(), out)?;
        }
        Command::Fit(args) => {
            let fitted = fit(&args.input, &args.overrides, err)?;
            let dir = out_dir(args.input.out_dir.as_ref(), Some(&fitted.config));
            let path = dir.join("model.json");
            write_file(&path, fitted.snapshot().to_json())?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Command::Assign(args) => {
            let snapshot = ModelSnapshot::load(&args.model)?;
            let raw = read_dataset(&args.data, &snapshot.indicators)?;
            let ratings = snapshot.score(&raw)?;
            emit(args.out_dir.as_ref(), "ratings.csv", &ratings.to_csv(), out)?;
        }
        Command::Score(args) => {
            let config = args.config.as_deref().map(PipelineConfig::load).transpose()?;
            let report = score_files(&args.ratings, &args.reference, config.as_ref(), err)?;
            let dir = out_dir(args.out_dir.as_ref(), config.as_ref());
            let path = dir.join("agreement.json");
            write_file(&path, report.to_json())?;
            match report.match_fraction {
                Some(f) => {
                    let _ = writeln!(out, "match fraction: {f:.3} ({})", report.status);
                }
                None => {
                    let _ = writeln!(out, "match fraction: n/a ({})", report.status);
                }
            }
            let _ = writeln!(out, "wrote {}", path.display());
        }
    }
    Ok(())
}

// With an output directory the file is written there, otherwise to stdout.
fn emit(dir: Option<&PathBuf>, name: &str, contents: &str, out: &mut dyn Write) -> Result<()> {
    match dir {
        Some(d) => {
            let path = d.join(name);
            write_file(&path, contents)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
        None => {
            let _ = out.write_all(contents.as_bytes());
        }
    }
    Ok(())
}

pub fn exit_code(e: &RelarmError) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_VALIDATION;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
