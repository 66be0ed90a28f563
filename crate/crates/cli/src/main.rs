use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use nas_landscape::analysis::{knn_distance_stats, pearson_correlations, top_k_densities};
use nas_landscape::bbob::{bbob_feature_table, BbobTableSettings, NUM_FUNCTIONS};
use nas_landscape::clustering::{classical_mds, hierarchical_cluster, purity, standardize};
use nas_landscape::design_space::{reduce_range, BuiltinRange, DesignSpace, EvaluatedDoe};
use nas_landscape::ela::FEATURE_NAMES;
use nas_landscape::io::{self, FeatureTable, NasFeatureRow};
use nas_landscape::pipeline::{bootstrap_plan, nas_sample, replicate_features};
use nas_landscape::sampling::{is_latin, lhs_sample, DoePlan};
use nas_landscape::{Error, Result};

mod manifest;

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "nas-landscape", version, about = "Landscape analysis of architecture search spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Latin hypercube design over a parameter space.
    Doe(DoeArgs),
    /// Landscape features of evaluated designs, optionally bootstrapped.
    Features(FeaturesArgs),
    /// Landscape features of the BBOB suite.
    Bbob(BbobArgs),
    /// Complete-linkage clustering of feature tables.
    Cluster(ClusterArgs),
    /// Two-dimensional classical MDS of evaluated designs.
    Mds(MdsArgs),
    /// Pearson correlation of each parameter with accuracy and CPU time.
    Correlate(CorrelateArgs),
    /// Reduced parameter ranges from the best designs.
    Reduce(ReduceArgs),
    /// Nearest-neighbour distance statistics between feature-table groups.
    Knn(KnnArgs),
    /// Kernel densities of each parameter over the best designs.
    Densities(DensitiesArgs),
    /// Writes a built-in parameter space as JSON.
    Space(SpaceArgs),
}

#[derive(Args, Serialize)]
struct SpaceSelection {
    /// `initial`, `reduced`, or the path of a space JSON file.
    #[arg(long, default_value = "initial")]
    space: String,
}

#[derive(Args, Serialize)]
struct DoeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceSelection,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct FeaturesArgs {
    /// Evaluated design CSV.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceSelection,
    /// Bootstrap subsample size and repetitions, e.g. `800x30`.
    #[arg(long)]
    bootstrap: Option<String>,
    /// Dataset name for inputs without a dataset column; defaults to the file stem.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct BbobArgs {
    #[arg(long, default_value_t = 23)]
    dim: usize,
    /// Instances 1 to this number are used.
    #[arg(long, default_value_t = 20)]
    instances: u32,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Comma-separated function ids; all 24 by default.
    #[arg(long, value_delimiter = ',')]
    fids: Option<Vec<u32>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ClusterArgs {
    /// Feature CSVs (dataset or BBOB layout).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Number of flat clusters to cut the dendrogram into.
    #[arg(long)]
    cut: Option<usize>,
    /// Cluster raw feature values instead of z-scores.
    #[arg(long)]
    no_standardize: bool,
    #[arg(long)]
    out: PathBuf,
    /// Where to write cut labels; defaults to `<out>.labels.csv`.
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DatasetInput {
    /// Evaluated design CSV.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceSelection,
    /// Dataset to use when the input holds several.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Args, Serialize)]
struct MdsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DatasetInput,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CorrelateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DatasetInput,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ReduceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DatasetInput,
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct DensitiesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DatasetInput,
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct KnnArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Only groups with this prefix serve as neighbours; the other groups are queried.
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long)]
    no_standardize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SpaceArgs {
    #[arg(default_value = "initial")]
    which: String,
    #[arg(long)]
    out: PathBuf,
}

fn load_space(selection: &str) -> Result<DesignSpace> {
    match selection {
        "initial" => Ok(DesignSpace::builtin(BuiltinRange::Initial)),
        "reduced" => Ok(DesignSpace::builtin(BuiltinRange::Reduced)),
        path => {
            let text = fs::read_to_string(path).map_err(|e| Error::from(e).context(format!("space file {path}")))?;
            DesignSpace::from_json(&text).map_err(|e| e.context(format!("space file {path}")))
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::from(e).context(path.display().to_string()))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::from(e).context(path.display().to_string()))
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned())
}

fn parse_bootstrap(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("bootstrap must look like SIZExREPS, got {text:?}"));
    let (size, reps) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((size.trim().parse().map_err(|_| bad())?, reps.trim().parse().map_err(|_| bad())?))
}

fn read_does(input: &DatasetInput) -> Result<(DesignSpace, Vec<EvaluatedDoe>)> {
    let space = load_space(&input.space.space)?;
    let does = io::read_evaluated_doe(open(&input.input)?, &space, &file_stem(&input.input))
        .map_err(|e| e.context(input.input.display().to_string()))?;
    Ok((space, does))
}

fn select_dataset(input: &DatasetInput) -> Result<(DesignSpace, EvaluatedDoe)> {
    let (space, does) = read_does(input)?;
    let chosen = match &input.dataset {
        Some(name) => does.into_iter().find(|d| &d.dataset == name).ok_or_else(|| {
            Error::InvalidInput(format!("dataset {name} not found in {}", input.input.display()))
        })?,
        None if does.len() == 1 => does.into_iter().next().expect("one dataset"),
        None => {
            let names: Vec<_> = does.iter().map(|d| d.dataset.as_str()).collect();
            return Err(Error::InvalidInput(format!(
                "input holds datasets [{}]; choose one with --dataset",
                names.join(", ")
            )));
        }
    };
    Ok((space, chosen))
}

fn read_tables(inputs: &[PathBuf]) -> Result<FeatureTable> {
    let mut table = FeatureTable::default();
    for path in inputs {
        let part = io::read_feature_table(open(path)?).map_err(|e| e.context(path.display().to_string()))?;
        table.extend(part);
    }
    if table.is_empty() {
        return Err(Error::InsufficientData("feature tables hold no rows".into()));
    }
    Ok(table)
}

fn run_doe(args: &DoeArgs, m: &mut RunManifest) -> Result<()> {
    let space = load_space(&args.space.space)?;
    let sample = lhs_sample(&DoePlan { space: space.clone(), n: args.n, seed: args.seed })?;
    let latin = is_latin(&sample.continuous, &space);
    let mut buf = Vec::new();
    io::write_design_csv(&mut buf, &space, &sample.design)?;
    write_output(&args.out, &buf)?;
    println!(
        "stratification: {} ({} rows x {} columns)",
        if latin { "ok" } else { "FAILED" },
        args.n,
        space.dim()
    );
    m.note("stratified", json!(latin));
    if !latin {
        return Err(Error::DegenerateSample("design is not Latin".into()));
    }
    Ok(())
}

fn run_features(args: &FeaturesArgs, m: &mut RunManifest) -> Result<()> {
    let space = load_space(&args.space.space)?;
    let default_name = args.dataset.clone().unwrap_or_else(|| file_stem(&args.input));
    let mut does = io::read_evaluated_doe(open(&args.input)?, &space, &default_name)
        .map_err(|e| e.context(args.input.display().to_string()))?;
    does.sort_by(|a, b| a.dataset.cmp(&b.dataset));
    let plan = args
        .bootstrap
        .as_deref()
        .map(parse_bootstrap)
        .transpose()?
        .map(|(size, reps)| bootstrap_plan(size, reps, args.seed));

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for doe in &does {
        let context = format!("dataset {}", doe.dataset);
        let sample = nas_sample(doe, &space).map_err(|e| e.context(&context))?;
        let outcomes = replicate_features(&sample, plan.as_ref(), args.seed)
            .map_err(|e| e.context(&context))?;
        for outcome in outcomes {
            match outcome.result {
                Ok(features) => rows.push(NasFeatureRow {
                    dataset: doe.dataset.clone(),
                    replicate: outcome.replicate,
                    features,
                }),
                Err(e) => {
                    let record = json!({
                        "dataset": doe.dataset,
                        "replicate": outcome.replicate,
                        "error": e.kind(),
                        "families": e.failed_families(),
                        "message": e.to_string(),
                    });
                    eprintln!("{}", json!({ "warning": record }));
                    failures.push(record);
                    first_error.get_or_insert(e.context(format!("{context}, replicate {}", outcome.replicate)));
                }
            }
        }
    }
    m.note("failed_replicates", json!(failures));
    m.note("kurtosis", json!("excess"));
    if rows.is_empty() {
        return Err(first_error.unwrap_or_else(|| Error::InsufficientData("no datasets".into())));
    }
    let mut buf = Vec::new();
    io::write_nas_features(&mut buf, &rows)?;
    write_output(&args.out, &buf)?;
    println!("{} feature rows written", rows.len());
    Ok(())
}

fn run_bbob(args: &BbobArgs, m: &mut RunManifest) -> Result<()> {
    let settings = BbobTableSettings {
        dim: args.dim,
        fids: args.fids.clone().unwrap_or_else(|| (1..=NUM_FUNCTIONS).collect()),
        instances: (1..=args.instances).collect(),
        n: args.n,
        seed: args.seed,
    };
    let rows = bbob_feature_table(&settings)?;
    let mut buf = Vec::new();
    io::write_bbob_features(&mut buf, &rows)?;
    write_output(&args.out, &buf)?;
    m.note("kurtosis", json!("excess"));
    println!("{} feature rows written", rows.len());
    Ok(())
}

fn dropped_names(indices: &[usize]) -> Vec<&'static str> {
    indices.iter().map(|&i| FEATURE_NAMES[i]).collect()
}

fn run_cluster(args: &ClusterArgs, m: &mut RunManifest) -> Result<()> {
    let table = read_tables(&args.inputs)?;
    let dendrogram = hierarchical_cluster(&table.matrix(), table.ids(), !args.no_standardize)?;
    let dropped = dropped_names(&dendrogram.dropped_columns);
    if !dropped.is_empty() {
        eprintln!("{}", json!({ "warning": { "constant_features_dropped": dropped } }));
    }
    m.note("dropped_features", json!(dropped));
    write_output(&args.out, dendrogram.to_json()?.as_bytes())?;
    println!("{} rows, {} merges", dendrogram.leaf_count(), dendrogram.merges.len());

    if let Some(k) = args.cut {
        let clusters = dendrogram.cut(k)?;
        let p = purity(&clusters, &table.groups())?;
        let labels_path = args
            .labels_out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.labels.csv", args.out.display())));
        let mut buf = Vec::new();
        io::write_cluster_labels(&mut buf, &table, &clusters)?;
        write_output(&labels_path, &buf)?;
        m.output(&labels_path);
        m.note("purity", json!(p));
        println!("purity at {k} clusters: {p}");
    }
    Ok(())
}

fn run_mds(args: &MdsArgs, m: &mut RunManifest) -> Result<()> {
    let (space, doe) = select_dataset(&args.data)?;
    let sample = nas_sample(&doe, &space)?;
    let embedding = classical_mds(sample.distances(), args.dims)?;
    let labels: Vec<String> = (0..doe.len()).map(|i| format!("{}-{i}", doe.dataset)).collect();
    let mut buf = Vec::new();
    io::write_embedding(&mut buf, &labels, &embedding, io::ACCURACY_COLUMN, &doe.accuracy)?;
    write_output(&args.out, &buf)?;
    m.note("eigenvalues", json!(embedding.eigenvalues));
    m.note("captured_fraction", json!(embedding.captured_fraction));
    m.note("clamped_mass", json!(embedding.clamped_mass));
    println!("{} points embedded", doe.len());
    Ok(())
}

fn run_correlate(args: &CorrelateArgs, _: &mut RunManifest) -> Result<()> {
    let (space, doe) = select_dataset(&args.data)?;
    let report = pearson_correlations(&doe, &space)?;
    let mut buf = Vec::new();
    io::write_correlations(&mut buf, &report)?;
    write_output(&args.out, &buf)
}

fn run_reduce(args: &ReduceArgs, _: &mut RunManifest) -> Result<()> {
    let (space, doe) = select_dataset(&args.data)?;
    let reduced = reduce_range(&doe, &space, args.k)?;
    write_output(&args.out, reduced.to_json()?.as_bytes())
}

fn run_densities(args: &DensitiesArgs, _: &mut RunManifest) -> Result<()> {
    let (space, doe) = select_dataset(&args.data)?;
    let densities = top_k_densities(&doe, &space, args.k)?;
    write_output(&args.out, serde_json::to_string_pretty(&densities)?.as_bytes())
}

fn run_knn(args: &KnnArgs, m: &mut RunManifest) -> Result<()> {
    let table = read_tables(&args.inputs)?;
    let matrix = if args.no_standardize {
        table.matrix()
    } else {
        let s = standardize(&table.matrix())?;
        m.note("dropped_features", json!(dropped_names(&s.dropped)));
        s.rows
    };
    let prefix = args.candidates.as_deref();
    let stats = knn_distance_stats(
        &matrix,
        &table.groups(),
        args.k,
        |label| prefix.is_none_or(|p| !label.starts_with(p)),
        |label| prefix.is_none_or(|p| label.starts_with(p)),
    )?;
    write_output(&args.out, serde_json::to_string_pretty(&stats)?.as_bytes())
}

fn run_space(args: &SpaceArgs, _: &mut RunManifest) -> Result<()> {
    let space = load_space(&args.which)?;
    write_output(&args.out, space.to_json()?.as_bytes())
}

fn error_report(e: &Error) -> serde_json::Value {
    let (row, column) = e.location();
    json!({
        "error": e.kind(),
        "message": e.to_string(),
        "row": row,
        "column": column,
        "families": e.failed_families(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut manifest, result) = match &cli.command {
        Command::Doe(a) => {
            let mut m = RunManifest::new("doe", a, &a.out, Some(a.seed), Some(&a.space.space));
            let r = run_doe(a, &mut m);
            (m, r)
        }
        Command::Features(a) => {
            let mut m = RunManifest::new("features", a, &a.out, Some(a.seed), Some(&a.space.space));
            m.input(&a.input);
            let r = run_features(a, &mut m);
            (m, r)
        }
        Command::Bbob(a) => {
            let mut m = RunManifest::new("bbob", a, &a.out, Some(a.seed), None);
            let r = run_bbob(a, &mut m);
            (m, r)
        }
        Command::Cluster(a) => {
            let mut m = RunManifest::new("cluster", a, &a.out, None, None);
            a.inputs.iter().for_each(|p| m.input(p));
            let r = run_cluster(a, &mut m);
            (m, r)
        }
        Command::Mds(a) => {
            let mut m = RunManifest::new("mds", a, &a.out, None, Some(&a.data.space.space));
            m.input(&a.data.input);
            let r = run_mds(a, &mut m);
            (m, r)
        }
        Command::Correlate(a) => {
            let mut m = RunManifest::new("correlate", a, &a.out, None, Some(&a.data.space.space));
            m.input(&a.data.input);
            let r = run_correlate(a, &mut m);
            (m, r)
        }
        Command::Reduce(a) => {
            let mut m = RunManifest::new("reduce", a, &a.out, None, Some(&a.data.space.space));
            m.input(&a.data.input);
            let r = run_reduce(a, &mut m);
            (m, r)
        }
        Command::Densities(a) => {
            let mut m = RunManifest::new("densities", a, &a.out, None, Some(&a.data.space.space));
            m.input(&a.data.input);
            let r = run_densities(a, &mut m);
            (m, r)
        }
        Command::Knn(a) => {
            let mut m = RunManifest::new("knn", a, &a.out, None, None);
            a.inputs.iter().for_each(|p| m.input(p));
            let r = run_knn(a, &mut m);
            (m, r)
        }
        Command::Space(a) => {
            let mut m = RunManifest::new("space", a, &a.out, None, Some(&a.which));
            let r = run_space(a, &mut m);
            (m, r)
        }
    };
    match result {
        Ok(()) => match manifest.write() {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", error_report(&e));
                ExitCode::FAILURE
            }
        },
        Err(e) => {
            manifest.note("error", error_report(&e));
            eprintln!("{}", error_report(&e));
            ExitCode::FAILURE
        }
    }
}
