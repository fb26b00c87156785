//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::clustering::{read_partition_csv, write_clusters_csv};
use crate::config::{simulation_config, simulation_config_text, snip_config, KeyValues};
use crate::metrics::{passes_cluster_count_guard, MetricReport};
use crate::pedigree::{read_csv, write_csv, ParseOptions, PedigreeSet};
use crate::pipeline::{check_pedigrees, run_snip, sha256_hex, RunManifest};
use crate::search::{search_candidates, SnipConfig};
use crate::simgen::{self, Duplicated, SimulationConfig};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "snip",
    version,
    about = "Sorted-neighborhood deduplication of pedigree data"
)]
struct Cli {
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deduplicate a pedigree CSV.
    Dedup(DedupArgs),
    /// Generate a labeled synthetic corpus with duplicates.
    Simulate(SimulateArgs),
    /// Compare a clustering with a truth partition.
    Evaluate(EvaluateArgs),
    /// Dump the candidate pairs of every relative type as CSV.
    InspectCandidates(InspectArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Pedigree CSV.
    #[arg(long)]
    input: PathBuf,
    /// Name of the proband indicator column.
    #[arg(long = "proband-column", default_value = crate::pedigree::IS_PROBAND)]
    proband_column: String,
    /// Treat unresolved or single parents as errors.
    #[arg(long)]
    strict: bool,
}

/// Overrides for the configuration file, named like its keys.
#[derive(Debug, Args, Default)]
struct SnipOverrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "keyVars")]
    key_vars: Option<String>,
    #[arg(long = "keyWeights")]
    key_weights: Option<String>,
    #[arg(long = "keyFallbacks")]
    key_fallbacks: Option<String>,
    #[arg(long = "femaleOnlyVars")]
    female_only_vars: Option<String>,
    #[arg(long = "maleOnlyVars")]
    male_only_vars: Option<String>,
    #[arg(long = "blockVars")]
    block_vars: Option<String>,
    #[arg(long = "numIter")]
    num_iter: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long = "keyLength")]
    key_length: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long = "priorityVar")]
    priority_var: Option<String>,
    #[arg(long = "priorityVarMin")]
    priority_var_min: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    scorer: Option<String>,
    #[arg(long)]
    percentile: Option<String>,
}

impl SnipOverrides {
    fn resolve(&self) -> Result<SnipConfig> {
        let mut kv = match &self.config {
            Some(p) => KeyValues::read(p)?,
            None => KeyValues::default(),
        };
        for (key, value) in [
            ("keyVars", &self.key_vars),
            ("keyWeights", &self.key_weights),
            ("keyFallbacks", &self.key_fallbacks),
            ("femaleOnlyVars", &self.female_only_vars),
            ("maleOnlyVars", &self.male_only_vars),
            ("blockVars", &self.block_vars),
            ("numIter", &self.num_iter),
            ("window", &self.window),
            ("keyLength", &self.key_length),
            ("threshold", &self.threshold),
            ("priorityVar", &self.priority_var),
            ("priorityVarMin", &self.priority_var_min),
            ("seed", &self.seed),
            ("scorer", &self.scorer),
            ("percentile", &self.percentile),
        ] {
            if let Some(v) = value {
                kv.set(key, v.clone());
            }
        }
        snip_config(&kv)
    }
}

#[derive(Debug, Args)]
struct DedupArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    snip: SnipOverrides,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write the pair scores.
    #[arg(long = "write-scores")]
    write_scores: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Generator configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "numFamilies")]
    num_families: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Clusters CSV (famID, clusterID, ...).
    #[arg(long)]
    clusters: PathBuf,
    /// Truth CSV (famID, originFamID).
    #[arg(long)]
    truth: PathBuf,
    /// Directory for report.txt and report.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip metrics when the clustering has fewer than half as many clusters
    /// as the truth.
    #[arg(long = "cluster-guard")]
    cluster_guard: bool,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    snip: SnipOverrides,
    /// Output CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_config_error() || matches!(err, Error::Io(_)) {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

fn io_context(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| io_context(path, e))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| io_context(path, e))
}

fn load_input(args: &InputArgs) -> Result<(Vec<u8>, PedigreeSet)> {
    let bytes = read_file(&args.input)?;
    let opts = ParseOptions {
        proband_column: args.proband_column.clone(),
        strict: args.strict,
    };
    let set = read_csv(bytes.as_slice(), &opts)?;
    for w in check_pedigrees(&set, args.strict)? {
        eprintln!("warning: {w}");
    }
    Ok((bytes, set))
}

fn dedup(args: &DedupArgs) -> Result<()> {
    let start = Instant::now();
    let cfg = args.snip.resolve()?;
    let (bytes, set) = load_input(&args.input)?;
    let out = run_snip(&set, &cfg)?;
    fs::create_dir_all(&args.out).map_err(|e| io_context(&args.out, e))?;

    let mut outputs = vec!["dedup.csv".to_string(), "clusters.csv".to_string()];
    write_csv(&out.deduplicated, create(&args.out.join("dedup.csv"))?)?;
    write_clusters_csv(
        &out.partition,
        &out.representatives,
        create(&args.out.join("clusters.csv"))?,
    )?;
    if args.write_scores {
        out.scores
            .write_csv(create(&args.out.join("scores.csv"))?)?;
        outputs.push("scores.csv".into());
    }
    let manifest = RunManifest {
        config: cfg,
        input_path: args.input.input.display().to_string(),
        input_sha256: sha256_hex(&bytes),
        outputs,
        runtime_seconds: start.elapsed().as_secs_f64(),
        input_families: set.len(),
        clusters: out.partition.len(),
        cluster_sizes: out.partition.size_histogram(),
    };
    let path = args.out.join("manifest.txt");
    fs::write(&path, manifest.to_text()).map_err(|e| io_context(&path, e))?;
    eprintln!(
        "{} families in, {} clusters, {} removed",
        manifest.input_families,
        manifest.clusters,
        manifest.removed_families()
    );
    Ok(())
}

fn write_truth<W: Write>(d: &Duplicated, w: W) -> Result<()> {
    let origin: std::collections::HashMap<&str, &str> = d
        .origins
        .iter()
        .map(|(c, o)| (c.as_str(), o.as_str()))
        .collect();
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["famID", "originFamID"])?;
    for id in d.set.fam_ids() {
        w.write_record([id.as_str(), origin.get(id.as_str()).copied().unwrap_or(id)])?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let (mut kv, base) = match &args.config {
        Some(p) => (
            KeyValues::read(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (KeyValues::default(), PathBuf::new()),
    };
    if let Some(n) = &args.num_families {
        kv.set("numFamilies", n.clone());
    }
    if let Some(s) = &args.seed {
        kv.set("seed", s.clone());
    }
    let mut cfg: SimulationConfig = simulation_config(&kv, &base)?;
    if cfg.generator.num_families == 0 {
        eprintln!("warning: numFamilies is 0; writing an empty corpus without duplicates");
        cfg.duplication.copies.clear();
    }
    let d = simgen::simulate(&cfg)?;

    fs::create_dir_all(&args.out).map_err(|e| io_context(&args.out, e))?;
    write_csv(&d.set, create(&args.out.join("corpus.csv"))?)?;
    write_truth(&d, create(&args.out.join("truth.csv"))?)?;
    let path = args.out.join("generator.txt");
    let pen = kv.get("penetranceFile");
    fs::write(&path, simulation_config_text(&cfg, pen)).map_err(|e| io_context(&path, e))?;
    eprintln!(
        "{} families ({} copies) written to {}",
        d.set.len(),
        d.origins.len(),
        args.out.display()
    );
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let alg = read_partition_csv(read_file(&args.clusters)?.as_slice())?;
    let truth = read_partition_csv(read_file(&args.truth)?.as_slice())?;
    alg.same_universe(&truth)?;
    let guard = passes_cluster_count_guard(&alg, &truth);
    let (text, csv) = if args.cluster_guard && !guard {
        (
            format!(
                "clusterCountGuard = fail\nclusters = {}\ntrueClusters = {}\nmetrics = skipped\n",
                alg.len(),
                truth.len()
            ),
            None,
        )
    } else {
        let report = MetricReport::compute(&alg, &truth)?;
        let g = if guard { "pass" } else { "fail" };
        (
            format!("clusterCountGuard = {g}\n{report}"),
            Some(format!(
                "{}\n{}\n",
                MetricReport::csv_header(),
                report.csv_row()
            )),
        )
    };
    print!("{text}");
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| io_context(dir, e))?;
        let p = dir.join("report.txt");
        fs::write(&p, &text).map_err(|e| io_context(&p, e))?;
        if let Some(csv) = csv {
            let p = dir.join("report.csv");
            fs::write(&p, csv).map_err(|e| io_context(&p, e))?;
        }
    }
    Ok(())
}

fn inspect(args: &InspectArgs) -> Result<()> {
    let cfg = args.snip.resolve()?;
    let (_, set) = load_input(&args.input)?;
    let cands = search_candidates(&set, &cfg)?;
    match &args.out {
        Some(p) => cands.write_csv(create(p)?),
        None => cands.write_csv(std::io::stdout().lock()),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Dedup(a) => dedup(a),
        Command::Simulate(a) => simulate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::InspectCandidates(a) => inspect(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(&cli))),
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
