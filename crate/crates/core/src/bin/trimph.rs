//! Command-line interface for the trimming / persistence toolkit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trimph::bottleneck::bottleneck;
use trimph::error::Error;
use trimph::experiments::{
    convergence_experiment, run_case_study_1, run_case_study_2, run_trim_grid, stability_suite,
    ConvergenceConfig,
};
use trimph::flagph::flag_rips_persistence;
use trimph::io;
use trimph::metric::{hausdorff, DistanceMatrix, PointCloud};
use trimph::persistence::{persistent_homology, PersistenceDiagram};
use trimph::rips::{rips_filtration_with_budget, RipsThreshold, DEFAULT_SIMPLEX_BUDGET};
use trimph::select::{select_asymmetric, select_one_sided, SelectionConfig};
use trimph::synth::{gen_case_study_1, gen_case_study_2, gen_uniform_circle, Label};
use trimph::trim::{trim_asymmetric, trim_one_sided, TrimSpec};

#[derive(Parser)]
#[command(name = "trimph", version, about = "Robust persistent homology via trimming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trim a cloud by average pairwise distance; prints the result as JSON.
    Trim(TrimArgs),
    /// Build a Rips filtration and dump it as text.
    Rips(RipsArgs),
    /// Compute a persistence diagram; writes diagram CSV.
    Ph(PhArgs),
    /// Bottleneck distance between two diagram CSV files.
    Bottleneck(BottleneckArgs),
    /// Hausdorff distance between two point-cloud CSV files.
    Hausdorff(HausdorffArgs),
    /// Data-driven selection of trimming proportions; prints JSON.
    Select(SelectArgs),
    /// Generate simulation clouds.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run the quantitative experiments.
    #[command(subcommand)]
    Exp(ExpCommand),
    /// PDB utilities: parse heavy atoms, fetch structures.
    #[command(subcommand)]
    Pdb(PdbCommand),
}

#[derive(Args)]
struct InputArg {
    /// Input CSV file (point cloud unless --dist is given).
    #[arg(long)]
    input: PathBuf,
    /// Interpret the input as a precomputed distance matrix.
    #[arg(long)]
    dist: bool,
}

impl InputArg {
    fn matrix(&self) -> Result<DistanceMatrix, Error> {
        let text = fs::read_to_string(&self.input)?;
        if self.dist {
            io::parse_distance_csv(&text)
        } else {
            DistanceMatrix::from_cloud(&io::parse_points_csv(&text)?)
        }
    }
}

fn parse_threshold(s: &str) -> Result<RipsThreshold, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(RipsThreshold::Auto)
    } else {
        s.parse::<f64>()
            .map(RipsThreshold::Value)
            .map_err(|_| format!("expected a number or 'auto', got {s:?}"))
    }
}

#[derive(Args)]
struct TrimArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha2: f64,
    /// One-sided mode: trim only the largest average distances.
    #[arg(long)]
    one_sided: bool,
    /// Proportion for one-sided mode (in [0, 1)).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RipsArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long)]
    max_dim: usize,
    /// Distance threshold, or 'auto' for the enclosing radius.
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    threshold: RipsThreshold,
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
    budget: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Engine {
    /// Implicit coboundary reduction (default; low memory).
    Implicit,
    /// Explicit filtration plus boundary-matrix reduction.
    Explicit,
}

#[derive(Args)]
struct PhArgs {
    #[command(flatten)]
    input: InputArg,
    /// Highest simplex dimension of the filtration.
    #[arg(long)]
    max_dim: usize,
    /// Highest homology dimension to report (must be below max-dim).
    #[arg(long)]
    hom_dim: usize,
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    threshold: RipsThreshold,
    #[arg(long, value_enum, default_value_t = Engine::Implicit)]
    engine: Engine,
    /// Simplex budget for the explicit engine.
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
    budget: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BottleneckArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    dim: usize,
    /// Print the full result (value and matching) as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HausdorffArgs {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SelectMode {
    Asym,
    One,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: SelectMode,
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha2: f64,
    #[arg(long, default_value_t = 0.05)]
    step1: f64,
    #[arg(long, default_value_t = 0.05)]
    step2: f64,
    #[arg(long)]
    tau_min: f64,
    /// Homology dimension k.
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 10)]
    max_iter: usize,
    /// Filtration dimension cap (defaults to dim + 1).
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    threshold: RipsThreshold,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Circle with clustered contamination (n = 200, R^2).
    Case1(GenArgs),
    /// Sphere with clustered contamination (n = 400, R^3).
    Case2(GenArgs),
    /// Uniform points on the unit circle.
    Circle(GenCircleArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a per-point origin label CSV.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct GenCircleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExpCommand {
    /// Dominant-H1 comparison on the circle design.
    Case1(ExpCaseArgs),
    /// Dominant-H2 comparison on the sphere design.
    Case2(ExpCaseArgs),
    /// Convergence rate of the trimmed support in Hausdorff distance.
    Convergence(ExpConvergenceArgs),
    /// Randomized stability-inequality check.
    Stability(ExpStabilityArgs),
    /// Trim grid on a protein structure (PDB file).
    Protein(ExpProteinArgs),
}

#[derive(Args)]
struct ExpCaseArgs {
    /// Seeds: comma-separated values and inclusive ranges (e.g. 0..19).
    #[arg(long, default_value = "0..19")]
    seeds: String,
    /// Trim grid: alpha1:alpha2 pairs separated by commas
    /// (e.g. 0.3:0.08,0.1:0.01).
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-seed table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExpConvergenceArgs {
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value = "100,200,400,800,1600")]
    sizes: String,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha2: f64,
    #[arg(long, default_value_t = 5000)]
    reference_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpStabilityArgs {
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpProteinArgs {
    #[arg(long)]
    pdb: PathBuf,
    #[arg(long, default_value = "A")]
    chain: char,
    #[arg(long, default_value = "0.3:0.05")]
    grid: String,
    /// Rips threshold in Angstroms.
    #[arg(long, default_value_t = 13.0)]
    threshold: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PdbCommand {
    /// Extract a chain's heavy atoms to point-cloud CSV.
    Parse(PdbParseArgs),
    /// Download a structure from the public archive.
    Fetch(PdbFetchArgs),
}

#[derive(Args)]
struct PdbParseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "A")]
    chain: char,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PdbFetchArgs {
    #[arg(long)]
    id: String,
    #[arg(short, long)]
    output: PathBuf,
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn parse_seed_list(s: &str) -> Result<Vec<u64>, Error> {
    let mut seeds = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad seed range start {lo:?}")))?;
            let hi: u64 = hi
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad seed range end {hi:?}")))?;
            if hi < lo {
                return Err(Error::input(format!("empty seed range {part:?}")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(
                part.parse()
                    .map_err(|_| Error::input(format!("bad seed {part:?}")))?,
            );
        }
    }
    if seeds.is_empty() {
        return Err(Error::input("no seeds given"));
    }
    Ok(seeds)
}

fn parse_grid(s: &str) -> Result<Vec<TrimSpec>, Error> {
    let mut grid = Vec::new();
    for part in s.split([',', ';']) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (a1, a2) = part
            .split_once(':')
            .ok_or_else(|| Error::input(format!("grid entry {part:?} is not alpha1:alpha2")))?;
        let a1: f64 = a1
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("bad alpha1 in {part:?}")))?;
        let a2: f64 = a2
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("bad alpha2 in {part:?}")))?;
        grid.push(TrimSpec::new(a1, a2)?);
    }
    if grid.is_empty() {
        return Err(Error::input("empty trim grid"));
    }
    Ok(grid)
}

fn load_cloud(path: &Path) -> Result<PointCloud, Error> {
    io::parse_points_csv(&fs::read_to_string(path)?)
}

fn load_diagram(path: &Path) -> Result<PersistenceDiagram, Error> {
    io::parse_diagram_csv(&fs::read_to_string(path)?)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::input(format!("serialization failed: {e}")))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Trim(args) => {
            let d = args.input.matrix()?;
            let result = if args.one_sided {
                let alpha = args
                    .alpha
                    .ok_or_else(|| Error::input("--one-sided requires --alpha"))?;
                trim_one_sided(&d, alpha)?
            } else {
                trim_asymmetric(&d, &TrimSpec::new(args.alpha1, args.alpha2)?)?
            };
            emit(&args.output, &to_json(&result)?)
        }
        Command::Rips(args) => {
            let d = args.input.matrix()?;
            let f = rips_filtration_with_budget(&d, args.max_dim, args.threshold, args.budget)?;
            emit(&args.output, &f.dump_text())
        }
        Command::Ph(args) => {
            let d = args.input.matrix()?;
            if args.max_dim < args.hom_dim + 1 {
                return Err(Error::input(format!(
                    "--max-dim {} too small for --hom-dim {}",
                    args.max_dim, args.hom_dim
                )));
            }
            let dgm = match args.engine {
                Engine::Implicit => flag_rips_persistence(&d, args.threshold, args.hom_dim)?,
                Engine::Explicit => {
                    let f = rips_filtration_with_budget(
                        &d,
                        args.max_dim,
                        args.threshold,
                        args.budget,
                    )?;
                    persistent_homology(&f, args.hom_dim)?
                }
            };
            emit(&args.output, &io::write_diagram_csv(&dgm))
        }
        Command::Bottleneck(args) => {
            let a = load_diagram(&args.a)?;
            let b = load_diagram(&args.b)?;
            let result = bottleneck(&a, &b, args.dim);
            if args.json {
                emit(&None, &to_json(&result)?)
            } else {
                emit(&None, &format!("{}\n", result.value))
            }
        }
        Command::Hausdorff(args) => {
            let a = load_cloud(&args.a)?;
            let b = load_cloud(&args.b)?;
            emit(&None, &format!("{}\n", hausdorff(&a, &b)?))
        }
        Command::Select(args) => {
            let cloud = load_cloud(&args.input)?;
            let cfg = SelectionConfig {
                alpha1_init: args.alpha1,
                alpha2_init: args.alpha2,
                step1: args.step1,
                step2: args.step2,
                hom_dim: args.dim,
                tau_min: args.tau_min,
                max_iter: args.max_iter,
                rips_threshold: args.threshold,
                max_dim: args.max_dim.unwrap_or(args.dim + 1),
            };
            let outcome = match args.mode {
                SelectMode::Asym => select_asymmetric(&cloud, &cfg)?,
                SelectMode::One => select_one_sided(&cloud, &cfg)?,
            };
            emit(&args.output, &to_json(&outcome)?)
        }
        Command::Gen(cmd) => {
            let (labeled, args) = match cmd {
                GenCommand::Case1(args) => (gen_case_study_1(args.seed), args),
                GenCommand::Case2(args) => (gen_case_study_2(args.seed), args),
                GenCommand::Circle(args) => {
                    let cloud = gen_uniform_circle(args.n, args.seed)?;
                    return emit(&args.output, &io::write_points_csv(&cloud));
                }
            };
            emit(&args.output, &io::write_points_csv(&labeled.cloud))?;
            if let Some(path) = &args.labels {
                let mut text = String::from("index,label\n");
                for (i, l) in labeled.labels.iter().enumerate() {
                    let tag = match l {
                        Label::Signal => "signal".to_string(),
                        Label::Outlier(c) => format!("cluster{c}"),
                    };
                    text.push_str(&format!("{i},{tag}\n"));
                }
                fs::write(path, text)?;
            }
            Ok(())
        }
        Command::Exp(cmd) => run_experiment(cmd),
        Command::Pdb(cmd) => match cmd {
            PdbCommand::Parse(args) => {
                let text = fs::read_to_string(&args.input)?;
                let cloud = io::pdb_point_cloud(&text, args.chain)?;
                eprintln!("kept {} heavy atoms from chain {}", cloud.len(), args.chain);
                emit(&args.output, &io::write_points_csv(&cloud))
            }
            PdbCommand::Fetch(args) => {
                io::fetch_structure(&args.id, &args.output)?;
                eprintln!("saved {} to {}", args.id, args.output.display());
                Ok(())
            }
        },
    }
}

fn run_experiment(cmd: ExpCommand) -> Result<(), Error> {
    match cmd {
        ExpCommand::Case1(args) => {
            let report =
                run_case_study_1(&parse_seed_list(&args.seeds)?, &parse_grid(&args.grid)?)?;
            if let Some(path) = &args.csv {
                fs::write(path, report.to_csv())?;
            }
            emit(&args.out, &to_json(&report)?)
        }
        ExpCommand::Case2(args) => {
            let report =
                run_case_study_2(&parse_seed_list(&args.seeds)?, &parse_grid(&args.grid)?)?;
            if let Some(path) = &args.csv {
                fs::write(path, report.to_csv())?;
            }
            emit(&args.out, &to_json(&report)?)
        }
        ExpCommand::Convergence(args) => {
            let sizes: Result<Vec<usize>, Error> = args
                .sizes
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::input(format!("bad size {s:?}")))
                })
                .collect();
            let cfg = ConvergenceConfig {
                b: args.b,
                sample_sizes: sizes?,
                reps: args.reps,
                spec: TrimSpec::new(args.alpha1, args.alpha2)?,
                reference_size: args.reference_size,
                signal: trimph::synth::SignalModel::UniformCircle,
            };
            let result = convergence_experiment(&cfg, args.seed)?;
            emit(&args.out, &to_json(&result)?)
        }
        ExpCommand::Stability(args) => {
            let report = stability_suite(args.trials, args.seed)?;
            let summary = format!(
                "{} / {} trials satisfied the stability inequality\n",
                report.trials.iter().filter(|t| t.ok).count(),
                report.trials.len()
            );
            if let Some(path) = &args.out {
                fs::write(path, to_json(&report)?)?;
            }
            emit(&None, &summary)?;
            if report.all_pass {
                Ok(())
            } else {
                Err(Error::input("stability inequality violated"))
            }
        }
        ExpCommand::Protein(args) => {
            let text = fs::read_to_string(&args.pdb)?;
            let cloud = io::pdb_point_cloud(&text, args.chain)?;
            eprintln!(
                "chain {}: {} heavy atoms; threshold {} A",
                args.chain,
                cloud.len(),
                args.threshold
            );
            let report = run_trim_grid(
                &cloud,
                &parse_grid(&args.grid)?,
                args.dim,
                RipsThreshold::Value(args.threshold),
            )?;
            if let Some(path) = &args.csv {
                fs::write(path, report.to_csv())?;
            }
            emit(&args.out, &to_json(&report)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Input(_) | Error::Parse { .. } | Error::Io(_) => 1u8,
                Error::Resource(_) => 2,
                Error::Network(_) => 3,
            };
            ExitCode::from(code)
        }
    }
}
