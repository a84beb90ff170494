//! `treelimit`: generate random trees, compute limit constants, run
//! convergence studies and compare empirical distance-matrix samples.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use treelimit::analysis::constants::{chi_of_split, cmj_char_size};
use treelimit::analysis::limits::{limit_family, LimitFamily};
use treelimit::analysis::report::{default_sampling, run_converge, ConvergeConfig};
use treelimit::analysis::sampling::rho_r_samples;
use treelimit::analysis::stats::ks_two_sample;
use treelimit::analysis::{energy_distance_tau, EmpiricalTau, Scaling};
use treelimit::dendrons::DendronSpec;
use treelimit::generators::cmj::BirthSpec;
use treelimit::generators::model::{ModelConfig, ModelSpec};
use treelimit::generators::offspring::OffspringSpec;
use treelimit::rng::{replica_rng, seed_from_env};
use treelimit::Error;

#[derive(Parser)]
#[command(name = "treelimit", version, about = "Random trees and their distance-sampling limits")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample trees and write them as JSON lines.
    Generate(GenerateArgs),
    /// Print the limit family and its constants for a model.
    Limits(LimitsArgs),
    /// Run a convergence study and emit a JSON report (exit 1 on a failed verdict).
    Converge(ConvergeArgs),
    /// Sample r×r distance matrices from a model or a dendron.
    Tau(TauArgs),
    /// Compare two empirical distance-matrix files.
    Compare(CompareArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Preset name, path to a JSON spec file, or inline JSON.
    #[arg(long)]
    model: String,
    /// Offspring law for conditioned Galton–Watson models,
    /// e.g. `poisson:1`, `geometric:0.5`, `binary`, `powerlaw`.
    #[arg(long)]
    offspring: Option<String>,
}

#[derive(Args)]
struct SeedArgs {
    /// Master seed (falls back to TREELIMIT_SEED, then 1).
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArgs {
    fn resolve(&self) -> u64 {
        self.seed.unwrap_or_else(|| seed_from_env(1))
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    m_trees: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LimitsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Monte Carlo samples for split-tree entropy estimates.
    #[arg(long, default_value_t = 100_000)]
    mc_samples: usize,
    #[command(flatten)]
    seed: SeedArgs,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// A single size (shorthand for a one-point grid).
    #[arg(long, conflicts_with = "n_grid")]
    n: Option<usize>,
    /// Comma-separated, strictly increasing sizes.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Independent trees per size (default depends on the limit family).
    #[arg(long)]
    m_trees: Option<usize>,
    /// Vertex pairs per tree (default depends on the limit family).
    #[arg(long)]
    m_pairs: Option<usize>,
    /// none, 1/log, 1/sqrt, 1/n or a positive constant.
    #[arg(long)]
    scale: Option<String>,
    /// Matrix order for the restriction and four-point checks.
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Directory for report.json and histogram CSVs (default: report to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TauArgs {
    /// Sample from this model (preset, file or inline JSON).
    #[arg(long, conflicts_with = "dendron", required_unless_present = "dendron")]
    model: Option<String>,
    #[arg(long)]
    offspring: Option<String>,
    /// Sample from a dendron given as inline JSON or a file.
    #[arg(long)]
    dendron: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 20)]
    m_trees: usize,
    /// Matrix draws per tree (or per dendron realization).
    #[arg(long, default_value_t = 50)]
    m_pairs: usize,
    #[arg(long)]
    scale: Option<String>,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    tau_a: PathBuf,
    tau_b: PathBuf,
    /// Compare the restrictions to the first r points.
    #[arg(long)]
    r: Option<usize>,
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::RejectionCap { .. } | Error::Extinction { .. } | Error::WeightUnderflow { .. } => 3,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

fn runtime(message: String) -> Failure {
    Failure { code: 3, message }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

type CliResult<T> = Result<T, Failure>;

/// Reads a preset name, a JSON file, or inline JSON.
fn load_text(arg: &str) -> CliResult<Option<String>> {
    let path = Path::new(arg);
    if arg.trim_start().starts_with('{') {
        Ok(Some(arg.to_string()))
    } else if path.is_file() {
        fs::read_to_string(path).map(Some).map_err(|e| runtime(format!("cannot read {arg}: {e}")))
    } else {
        Ok(None)
    }
}

fn resolve_model(model: &str, offspring: Option<&str>) -> CliResult<ModelConfig> {
    let mut config = match load_text(model)? {
        Some(text) => {
            serde_json::from_str::<ModelConfig>(&text).map_err(|e| usage(format!("invalid model spec: {e}")))?
        }
        None => ModelConfig { model: ModelSpec::preset(model)?, n: None },
    };
    if let Some(text) = offspring {
        let law = OffspringSpec::parse(text)?;
        match &mut config.model {
            ModelSpec::Cgw { offspring, .. } => *offspring = law,
            _ => return Err(usage("--offspring applies only to conditioned Galton–Watson models".into())),
        }
    }
    config.model.validate()?;
    Ok(config)
}

fn size(explicit: Option<usize>, config: &ModelConfig) -> CliResult<usize> {
    explicit.or(config.n).ok_or_else(|| usage("a size is required: pass --n or put \"n\" in the spec".into()))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn generate(args: &GenerateArgs) -> CliResult<u8> {
    let config = resolve_model(&args.model.model, args.model.offspring.as_deref())?;
    let n = size(args.n, &config)?;
    let prepared = config.model.prepare(n)?;
    let seed = args.seed.resolve();
    let lines = (0..args.m_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i as u64);
            prepared
                .sample(&mut rng)
                .map(|t| t.to_json())
                .map_err(|e| Failure { message: format!("replica {i} (seed {seed}): {e}"), ..Failure::from(e) })
        })
        .collect::<CliResult<Vec<String>>>()?;
    let mut text = lines.join("\n");
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn limits(args: &LimitsArgs) -> CliResult<u8> {
    let config = resolve_model(&args.model.model, args.model.offspring.as_deref())?;
    let family = limit_family(&config.model)?;
    let mut out = json!({ "model": config.model, "family": family });
    match &config.model {
        ModelSpec::Split { split } => {
            let chi = chi_of_split(split, args.mc_samples, args.seed.resolve())?;
            out["chi"] = json!(chi);
            out["note"] = json!("a = 1/chi with chi the entropy of the split vector");
        }
        ModelSpec::Cmj { birth } => {
            out["cmj"] = json!(cmj_char_size(birth)?);
            out["note"] = json!("a = 1/(alpha beta) from the Malthusian parameter");
        }
        ModelSpec::Pa { chi, rho } => {
            out["cmj"] = json!(cmj_char_size(&BirthSpec::LinearWeight { chi: *chi, rho: *rho })?);
            out["note"] = json!("a = rho/(chi + rho) for attachment weights chi k + rho");
        }
        ModelSpec::Bst => {
            out["cmj"] = json!(cmj_char_size(&BirthSpec::bst())?);
        }
        _ => {}
    }
    match &family {
        LimitFamily::Logarithmic { a } | LimitFamily::Constant { a, .. } => {
            out["a"] = json!(a);
            out["two_a"] = json!(2.0 * a);
        }
        LimitFamily::Crt { sigma } => out["sigma"] = json!(sigma),
        LimitFamily::Condensation { kappa } => out["kappa"] = json!(kappa),
        _ => {}
    }
    print!("{}", pretty(&out));
    Ok(0)
}

fn parse_scale(text: Option<&str>) -> CliResult<Option<Scaling>> {
    text.map(Scaling::parse).transpose().map_err(Failure::from)
}

fn converge(args: &ConvergeArgs) -> CliResult<u8> {
    let config = resolve_model(&args.model.model, args.model.offspring.as_deref())?;
    let grid = match (&args.n_grid, args.n.or(config.n)) {
        (Some(g), _) => g.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => Vec::new(),
    };
    let (m_trees, m_pairs) = default_sampling(&limit_family(&config.model)?);
    let mut run = ConvergeConfig::new(config.model, grid);
    run.m_trees = args.m_trees.unwrap_or(m_trees);
    run.m_pairs = args.m_pairs.unwrap_or(m_pairs);
    run.scaling = parse_scale(args.scale.as_deref())?;
    run.r = args.r;
    run.seed = args.seed.resolve();
    let outcome = run_converge(&run)?;
    let text = pretty(&outcome.report);
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
            write_output(Some(&dir.join("report.json")), &text)?;
            for (name, hist) in &outcome.histograms {
                write_output(Some(&dir.join(format!("{name}.csv"))), &hist.to_csv())?;
            }
        }
        None => print!("{text}"),
    }
    let verdict = if outcome.report.passed { "PASS" } else { "FAIL" };
    eprintln!("verdict: {verdict}");
    Ok(if outcome.report.passed { 0 } else { 1 })
}

fn tau(args: &TauArgs) -> CliResult<u8> {
    let seed = args.seed.resolve();
    let tau = if let Some(model) = &args.model {
        let config = resolve_model(model, args.offspring.as_deref())?;
        let n = size(args.n, &config)?;
        let family = limit_family(&config.model)?;
        let scaling = parse_scale(args.scale.as_deref())?.unwrap_or(family.scaling());
        rho_r_samples(&config.model.prepare(n)?, args.r, scaling.factor(n), args.m_trees, args.m_pairs, seed)?
    } else {
        let text = load_text(args.dendron.as_deref().unwrap())?
            .ok_or_else(|| usage("--dendron expects inline JSON or a file".into()))?;
        let spec: DendronSpec = serde_json::from_str(&text).map_err(|e| usage(format!("invalid dendron: {e}")))?;
        spec.validate()?;
        let realizations = if spec.is_random() { args.m_trees } else { 1 };
        let per = if spec.is_random() { args.m_pairs } else { args.m_trees * args.m_pairs };
        let draws = (0..realizations)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_rng(seed, i as u64);
                let d = spec.realize(&mut rng)?;
                Ok((0..per).map(|_| d.rho_r(args.r, &mut rng)).collect::<Vec<_>>())
            })
            .collect::<treelimit::Result<Vec<_>>>()?;
        EmpiricalTau::new(args.r, draws.concat())?
    };
    let mut text = tau.to_json();
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn read_tau(path: &Path) -> CliResult<EmpiricalTau> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
    EmpiricalTau::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn compare(args: &CompareArgs) -> CliResult<u8> {
    let (mut a, mut b) = (read_tau(&args.tau_a)?, read_tau(&args.tau_b)?);
    if let Some(r) = args.r {
        a = a.restrict(r)?;
        b = b.restrict(r)?;
    }
    let energy = energy_distance_tau(&a, &b)?;
    let mut entries = Vec::new();
    for i in 0..a.r {
        for j in i + 1..a.r {
            let ks = ks_two_sample(&a.entries(i, j), &b.entries(i, j))?;
            entries.push(json!({ "i": i, "j": j, "ks": ks }));
        }
    }
    let out = json!({
        "r": a.r,
        "draws": [a.draws.len(), b.draws.len()],
        "energy_distance": energy,
        "entry_ks": entries,
    });
    print!("{}", pretty(&out));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Limits(a) => limits(a),
        Command::Converge(a) => converge(a),
        Command::Tau(a) => tau(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
