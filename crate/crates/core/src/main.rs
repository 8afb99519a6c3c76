use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dea_bench::dataset::Rts;
use dea_bench::frontier::{classify, DmuStatus};
use dea_bench::metrics::{distance_matrix, DistanceKind};
use dea_bench::model::{BenchContext, ModelKind, SolveOptions};
use dea_bench::report::{
    dataset_digest, persist_run, render_classification_csv, render_classification_md,
    render_matrix_csv, render_matrix_md, render_series_csv, render_series_md, render_solution_csv,
    render_solution_md, RunRecord,
};
use dea_bench::sweep::{alpha_grid, alpha_series};
use dea_bench::Error;

#[derive(Parser)]
#[command(name = "dea-bench", version, about = "DEA benchmarking: closest targets and most similar peers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Directory for append-only run records.
    #[arg(long, global = true, default_value = "dea-runs")]
    runs_dir: PathBuf,
    /// Skip writing a run record.
    #[arg(long, global = true)]
    no_record: bool,
}

#[derive(Args)]
struct DataArgs {
    /// CSV dataset: id column first, then "in:"/"out:"-prefixed columns.
    #[arg(long)]
    data: PathBuf,
    /// Returns-to-scale of the technology.
    #[arg(long, value_enum, default_value_t = RtsArg::Vrs)]
    rts: RtsArg,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RtsArg {
    Vrs,
    Crs,
}

impl From<RtsArg> for Rts {
    fn from(value: RtsArg) -> Rts {
        match value {
            RtsArg::Vrs => Rts::Variable,
            RtsArg::Crs => Rts::Constant,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Md,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Closest,
    BiVrs,
    OrientedOut,
    OrientedIn,
    BiCrs,
}

impl From<ModelArg> for ModelKind {
    fn from(value: ModelArg) -> ModelKind {
        match value {
            ModelArg::Closest => ModelKind::ClosestVrs,
            ModelArg::BiVrs => ModelKind::BiVrs,
            ModelArg::OrientedOut => ModelKind::OrientedOutputVrs,
            ModelArg::OrientedIn => ModelKind::OrientedInputVrs,
            ModelArg::BiCrs => ModelKind::BiCrs,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    L1,
    Mix,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify every DMU and list the extreme efficient set E.
    Classify {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distance matrix from DMUs (default: the inefficient ones) to E.
    Distances {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Restrict the rows to these DMUs.
        #[arg(long)]
        dmu: Vec<String>,
        #[arg(long, value_enum, default_value_t = MetricArg::L1)]
        kind: MetricArg,
    },
    /// Solve one benchmarking model for one DMU at one alpha.
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        dmu: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Sweep the model over an alpha grid and report the change points.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// DMU to sweep; repeatable. Defaults to every inefficient DMU.
        #[arg(long)]
        dmu: Vec<String>,
        /// Sweep every DMU.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 0.1)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let solver_failure = matches!(
                e,
                Error::Solve { .. } | Error::NumericalBreakdown(_) | Error::NodeLimit(_)
            );
            if solver_failure {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

struct Loaded {
    data: dea_bench::Dataset,
    digest: String,
}

fn load(args: &DataArgs) -> Result<Loaded, Error> {
    let bytes = fs::read(&args.data)?;
    let digest = dataset_digest(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::InvalidDataset(format!("not UTF-8: {e}")))?;
    let data = dea_bench::dataset::load_csv_str(&text, None, args.rts.into())?;
    data.ensure_valid()?;
    Ok(Loaded { data, digest })
}

fn emit(output: &OutputArgs, body: &str) -> Result<(), Error> {
    match &output.out {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn record(cli: &Cli, digest: &str, command: &str, results: serde_json::Value) -> Result<(), Error> {
    if cli.no_record {
        return Ok(());
    }
    let rec = RunRecord::new(digest, command, results);
    persist_run(&cli.runs_dir, &rec)?;
    Ok(())
}

fn json_envelope(digest: &str, command: &str, results: serde_json::Value) -> String {
    serde_json::to_string_pretty(&json!({
        "dataset_digest": digest,
        "command": command,
        "results": results,
    }))
    .expect("serializable")
    + "\n"
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.cmd {
        Cmd::Classify { data, output } => {
            let loaded = load(data)?;
            let cls = classify(&loaded.data)?;
            let results = serde_json::to_value(&cls).expect("serializable");
            let body = match output.format {
                Format::Md => render_classification_md(&loaded.data, &cls),
                Format::Csv => render_classification_csv(&loaded.data, &cls),
                Format::Json => json_envelope(&loaded.digest, "classify", results.clone()),
            };
            emit(output, &body)?;
            record(cli, &loaded.digest, "classify", results)
        }
        Cmd::Distances {
            data,
            output,
            dmu,
            kind,
        } => {
            let loaded = load(data)?;
            let cls = classify(&loaded.data)?;
            let rows: Vec<String> = if dmu.is_empty() {
                loaded
                    .data
                    .dmus
                    .iter()
                    .zip(&cls.statuses)
                    .filter(|(_, st)| **st == DmuStatus::Inefficient)
                    .map(|(r, _)| r.id.clone())
                    .collect()
            } else {
                for id in dmu {
                    if loaded.data.index_of(id).is_none() {
                        return Err(Error::UnknownDmu(id.clone()));
                    }
                }
                dmu.clone()
            };
            let metric = match kind {
                MetricArg::L1 => DistanceKind::L1,
                MetricArg::Mix => DistanceKind::Mix,
            };
            let matrix = distance_matrix(&loaded.data, &cls.extreme, &rows, metric)?;
            let results = serde_json::to_value(&matrix).expect("serializable");
            let body = match output.format {
                Format::Md => render_matrix_md(&matrix),
                Format::Csv => render_matrix_csv(&matrix),
                Format::Json => json_envelope(&loaded.digest, "distances", results.clone()),
            };
            emit(output, &body)?;
            record(cli, &loaded.digest, "distances", results)
        }
        Cmd::Bench {
            data,
            output,
            model,
            dmu,
            alpha,
        } => {
            let loaded = load(data)?;
            let cls = classify(&loaded.data)?;
            let kind: ModelKind = (*model).into();
            let ctx = BenchContext::new(&loaded.data, &cls);
            let sol = ctx.solve(dmu, kind, &SolveOptions::new(*alpha))?;
            let results = json!([sol]);
            let command = format!("bench --model {kind} --dmu {dmu} --alpha {alpha}");
            let body = match output.format {
                Format::Md => render_solution_md(&loaded.data, &sol),
                Format::Csv => render_solution_csv(&loaded.data, &sol),
                Format::Json => json_envelope(&loaded.digest, &command, results.clone()),
            };
            emit(output, &body)?;
            record(cli, &loaded.digest, &command, results)
        }
        Cmd::Sweep {
            data,
            output,
            model,
            dmu,
            all,
            from,
            to,
            step,
        } => {
            let loaded = load(data)?;
            let cls = classify(&loaded.data)?;
            let kind: ModelKind = (*model).into();
            let grid = alpha_grid(*from, *to, *step)?;
            let ids: Vec<String> = if *all {
                loaded.data.dmus.iter().map(|r| r.id.clone()).collect()
            } else if dmu.is_empty() {
                loaded
                    .data
                    .dmus
                    .iter()
                    .zip(&cls.statuses)
                    .filter(|(_, st)| **st == DmuStatus::Inefficient)
                    .map(|(r, _)| r.id.clone())
                    .collect()
            } else {
                dmu.clone()
            };
            let mut bodies = Vec::new();
            let mut all_points = Vec::new();
            for id in &ids {
                let series = alpha_series(&loaded.data, &cls, id, kind, &grid)?;
                match output.format {
                    Format::Md => bodies.push(render_series_md(&loaded.data, &series)),
                    Format::Csv => bodies.push(render_series_csv(&loaded.data, &series)),
                    Format::Json => {}
                }
                for p in &series.points {
                    all_points.push(serde_json::to_value(p).expect("serializable"));
                }
            }
            let results = serde_json::Value::Array(all_points);
            let command = format!(
                "sweep --model {kind} --from {from} --to {to} --step {step} ({})",
                ids.join(",")
            );
            let body = match output.format {
                Format::Md => bodies.join("\n"),
                Format::Csv => {
                    // one header, concatenated rows
                    let mut merged = String::new();
                    for (k, b) in bodies.iter().enumerate() {
                        if k == 0 {
                            merged.push_str(b);
                        } else if let Some(pos) = b.find('\n') {
                            merged.push_str(&b[pos + 1..]);
                        }
                    }
                    merged
                }
                Format::Json => json_envelope(&loaded.digest, &command, results.clone()),
            };
            emit(output, &body)?;
            record(cli, &loaded.digest, &command, results)
        }
    }
}
