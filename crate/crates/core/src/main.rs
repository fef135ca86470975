use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use corrcoef::distributions::{DistributionSpec, Family};
use corrcoef::error::{EstimatorError, ExperimentError};
use corrcoef::estimators;
use corrcoef::experiments::{self, ExperimentConfig, OutlierRule};
use corrcoef::io::{self, IoError, OutputRecord};

#[derive(Parser)]
#[command(name = "corrcoef", version, about = "Pearson, Spearman, Kendall and mixed rank correlation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients of a two-column CSV file.
    Analyze {
        csv_path: PathBuf,
        /// The first row is data, not a header.
        #[arg(long)]
        no_header: bool,
    },
    /// Population coefficients over a parameter grid.
    Theory {
        family: Family,
        #[arg(long = "t", allow_negative_numbers = true, required = true)]
        t: Vec<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiments.
    Simulate(SimulateArgs),
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(required_unless_present = "family_flag")]
    family: Option<Family>,
    #[arg(long = "family", conflicts_with = "family")]
    family_flag: Option<Family>,
    #[arg(long = "t", allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Sample size; for --bias, repeat to give several sizes.
    #[arg(long)]
    n: Vec<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed; drawn from entropy and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Append K outliers to every replicate.
    #[arg(long, value_name = "K")]
    contaminate: Option<usize>,
    /// Correlations between coefficients over groups of this size.
    #[arg(long, value_name = "GROUPSIZE")]
    meta: Option<usize>,
    /// Compare small-sample means with the exact expectations.
    #[arg(long)]
    bias: bool,
    /// Simulated Pearson coefficient with stability and trend diagnostics.
    #[arg(long)]
    extend_pearson: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Tie(String),
    Degenerate(String),
    Replicates(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Tie(_) => 3,
            Failure::Degenerate(_) => 4,
            Failure::Replicates(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Tie(m) | Failure::Degenerate(m) | Failure::Replicates(m) => m,
        }
    }
}

impl From<EstimatorError> for Failure {
    fn from(e: EstimatorError) -> Self {
        match e {
            EstimatorError::Tie { .. } => Failure::Tie(e.to_string()),
            EstimatorError::Degenerate(_) => Failure::Degenerate(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Estimator(e) => e.into(),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<corrcoef::SpecError> for Failure {
    fn from(e: corrcoef::SpecError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze { csv_path, no_header } => analyze(&csv_path, !no_header),
        Command::Theory { family, t, format, out } => theory(family, &t, format, out),
        Command::Simulate(args) => simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn analyze(path: &std::path::Path, header: bool) -> Result<(), Failure> {
    let sample = io::read_sample(path, header)?;
    let set = estimators::coefficient_set(&sample)?;
    println!("n         {}", sample.len());
    println!("pearson   {}", io::fmt4(Some(set.pearson)));
    println!("spearman  {}", io::fmt4(Some(set.spearman)));
    println!("kendall   {}", io::fmt4(Some(set.kendall)));
    println!("r         {}", io::fmt4(Some(set.r)));
    Ok(())
}

fn emit(record: &OutputRecord, format: Option<Format>, out: Option<PathBuf>) -> Result<(), Failure> {
    let Some(path) = out else {
        if let Some(format) = format {
            print!("{}", render(record, format));
        }
        return Ok(());
    };
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    });
    io::write_file(&path, &render(record, format))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn render(record: &OutputRecord, format: Format) -> String {
    match format {
        Format::Csv => record.to_csv(),
        Format::Json => record.to_json(),
    }
}

fn theory(family: Family, grid: &[f64], format: Option<Format>, out: Option<PathBuf>) -> Result<(), Failure> {
    let rows = grid
        .iter()
        .map(|&t| Ok((t, family.with_parameter(t)?.theoretical()?)))
        .collect::<Result<Vec<_>, corrcoef::SpecError>>()?;
    if out.is_some() || format.is_none() {
        print!("{}", io::theory_text(&rows));
    }
    emit(&io::theory_record(family.name(), &rows), format, out)
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let family = args.family.or(args.family_flag).expect("clap enforces one family source");
    let seed = args.seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        println!("seed {s}");
        s
    });
    let grid = if args.t.is_empty() {
        if family.is_parametric() {
            return Err(Failure::Config(format!("{family} needs at least one --t value")));
        }
        vec![0.0]
    } else {
        args.t.clone()
    };
    let modes = [args.meta.is_some(), args.bias, args.extend_pearson].iter().filter(|&&m| m).count();
    if modes > 1 {
        return Err(Failure::Config("--meta, --bias and --extend-pearson are mutually exclusive".into()));
    }
    let text_to_stdout = args.out.is_some() || args.format.is_none();

    if args.bias {
        let n_grid = if args.n.is_empty() { vec![5, 10] } else { args.n.clone() };
        let reps = args.reps.unwrap_or(100_000);
        let spec = single_spec(family, &grid)?;
        let report = experiments::check_bias_formulas(&spec, &n_grid, reps, seed)?;
        if text_to_stdout {
            print!("{}", io::bias_text(&report));
        }
        let rec = io::bias_record(&report, family.name())
            .config("family", family)
            .config("t", grid[0])
            .config("seed", seed);
        return emit(&rec, args.format, args.out);
    }

    let n = match args.n.as_slice() {
        [] => 1000,
        [n] => *n,
        _ => return Err(Failure::Config("--n may be repeated only with --bias".into())),
    };
    let reps = args.reps.unwrap_or(1000);

    if args.extend_pearson {
        let spec = single_spec(family, &grid)?;
        let ext = experiments::extend_pearson(&spec, n, reps, seed)?;
        if text_to_stdout {
            print!("{}", io::extension_text(&ext));
        }
        let rec = io::extension_record(&ext, family.name(), grid[0])
            .config("n", n)
            .config("reps", reps)
            .config("seed", seed);
        check_success(ext.succeeded, reps)?;
        return emit(&rec, args.format, args.out);
    }

    let mut cfg = ExperimentConfig::new(family, grid, n, reps, seed);
    if let Some(k) = args.contaminate {
        cfg = cfg.with_contamination(k, OutlierRule::default());
    }

    if let Some(g) = args.meta {
        if cfg.grid.len() != 1 {
            return Err(Failure::Config("--meta takes exactly one --t value".into()));
        }
        let report = experiments::run_meta_correlation(&cfg, g)?;
        if text_to_stdout {
            print!("{}", io::meta_text(&report));
        }
        let rec = io::meta_record(&report).config("seed", seed);
        let total = report.repetitions * report.group_size;
        check_success(total - report.failed_datasets, total)?;
        return emit(&rec, args.format, args.out);
    }

    let table = experiments::run_table(&cfg)?;
    if text_to_stdout {
        print!("{}", io::table_text(&table));
    }
    let experiment = if cfg.contamination.is_some() { "contaminated" } else { "table" };
    let mut rec = io::table_record(&table, experiment);
    if let Some(c) = &cfg.contamination {
        rec = rec.config("outliers", c.count).config("outlier_rule", c.rule.name());
    }
    for row in &table.rows {
        if row.failed > 0 {
            rec.notes.push(format!("t = {}: {} of {} replicates failed", row.t, row.failed, reps));
        }
    }
    emit(&rec, args.format, args.out)?;
    let worst = table.rows.iter().map(|r| r.succeeded).min().unwrap_or(0);
    check_success(worst, reps)
}

fn single_spec(family: Family, grid: &[f64]) -> Result<DistributionSpec, Failure> {
    if grid.len() != 1 {
        return Err(Failure::Config("this mode takes exactly one --t value".into()));
    }
    Ok(family.with_parameter(grid[0])?)
}

fn check_success(succeeded: usize, total: usize) -> Result<(), Failure> {
    if (succeeded as f64) < 0.99 * total as f64 {
        return Err(Failure::Replicates(format!("only {succeeded} of {total} replicates succeeded")));
    }
    Ok(())
}
