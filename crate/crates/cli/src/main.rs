use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pathpower::builder::{audit_certificate, build_from, BuildResult, PathPowerCertificate, Strategy};
use pathpower::experiment::{run_experiment, ExperimentConfig};
use pathpower::extraction::{audit_witness, certify_params, extract_step, StepOutcome};
use pathpower::oracle::{ell_exact, longest_path_power, EllScope, DEFAULT_BUDGET};
use pathpower::ordering::{
    forward_edge_count, local_search, read_ordering, write_ordering, Ordering, SearchPolicy,
};
use pathpower::params::{LemmaParams, Mode};
use pathpower::tournament::{gen_implicit, gen_random, gen_transitive, read_tournament, write_tournament, write_trn, Tournament};

#[derive(Parser)]
#[command(name = "pathpower", version, about = "Powers of directed paths in tournaments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a tournament (TRN file, or a descriptor file for implicit rules).
    Gen(GenArgs),
    /// Run local search on a vertex ordering and write it as an ORD file.
    Order(OrderArgs),
    /// Build a path power and write its certificate.
    Find(FindArgs),
    /// Audit a certificate against its tournament.
    Verify(VerifyArgs),
    /// Run one extraction step and audit the witness it returns.
    VerifyWitness(WitnessArgs),
    /// Exact longest path power on a small tournament.
    Oracle(OracleArgs),
    /// Exact (or sampled) minimum longest path power over all tournaments.
    Ell(EllArgs),
    /// Report whether parameter choices satisfy the counting inequality.
    Certify(CertifyArgs),
    /// Run an experiment described by a config file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Transitive,
    Random,
    Implicit,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Tournament input: a TRN / descriptor file, or an inline descriptor such as
/// `splitmix64:7:100000` or `transitive:500`.
#[derive(Args)]
struct Input {
    #[arg(long = "input", short = 'i')]
    input: String,
}

impl Input {
    fn load(&self) -> Result<Tournament> {
        if Path::new(&self.input).exists() {
            return read_tournament(&self.input).with_context(|| format!("reading {}", self.input));
        }
        Tournament::from_descriptor(&self.input)
            .with_context(|| format!("{:?} is neither a file nor a tournament descriptor", self.input))
    }
}

#[derive(Args)]
struct OrderArgs {
    #[command(flatten)]
    input: Input,
    /// Stop after this many passes instead of running to convergence.
    #[arg(long)]
    passes: Option<usize>,
    /// Start from a seeded random permutation instead of the identity.
    #[arg(long)]
    shuffle: Option<u64>,
    /// Start from an existing ORD file.
    #[arg(long, conflicts_with = "shuffle")]
    ord: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// `k` plus either all of `r`, `t`, `W` or none (the certified defaults).
#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, requires_all = ["t", "windows"])]
    r: Option<usize>,
    #[arg(long, requires_all = ["r", "windows"])]
    t: Option<usize>,
    #[arg(long = "W", id = "windows", requires_all = ["r", "t"])]
    windows: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> Result<LemmaParams> {
        Ok(match (self.r, self.t, self.windows) {
            (Some(r), Some(t), Some(w)) => LemmaParams::new(self.k, r, t, w)?,
            _ => LemmaParams::default_for(self.k)?,
        })
    }
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value = "heuristic")]
    mode: Mode,
    #[arg(long, default_value = "lazy")]
    strategy: Strategy,
    /// Starting ordering; identity if omitted.
    #[arg(long)]
    ord: Option<PathBuf>,
    /// Certificate JSON output.
    #[arg(long)]
    out: PathBuf,
    /// Also write the final ordering here.
    #[arg(long)]
    ord_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    cert: PathBuf,
    /// Final ordering written by `find --ord-out`; enables window checks.
    #[arg(long)]
    ord: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    params: ParamArgs,
    /// Window start `i`.
    #[arg(long = "at", default_value_t = 0)]
    at: usize,
    /// Ordering; identity if omitted.
    #[arg(long)]
    ord: Option<PathBuf>,
    /// Seed vertices (comma separated); defaults to the first `r` of the window.
    #[arg(long, value_delimiter = ',')]
    seed_set: Option<Vec<usize>>,
    #[arg(long, default_value = "heuristic")]
    mode: Mode,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct EllArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Sample this many random tournaments instead of enumerating all.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the CSV table and witness TRN files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Grid values; each omitted axis uses the certified default for `k`.
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long = "W", value_delimiter = ',')]
    windows: Vec<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `workers` from the config.
    #[arg(long)]
    workers: Option<usize>,
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn load_ordering(path: Option<&PathBuf>, n: usize) -> Result<Ordering> {
    let ord = match path {
        Some(p) => read_ordering(p).with_context(|| format!("reading {}", p.display()))?,
        None => Ordering::identity(n),
    };
    if ord.len() != n {
        bail!("ordering has {} vertices but the tournament has {n}", ord.len());
    }
    Ok(ord)
}

fn cmd_gen(a: &GenArgs) -> Result<ExitCode> {
    let t = match a.kind {
        Kind::Transitive => gen_transitive(a.n).materialize(),
        Kind::Random => gen_random(a.n, a.seed),
        Kind::Implicit => gen_implicit(a.n, a.seed),
    };
    match &a.out {
        Some(p) if matches!(a.kind, Kind::Implicit) => write_tournament(&t, p)?,
        Some(p) => write_trn(&t, p)?,
        None => {
            let text = t.to_implicit_descriptor_file().unwrap_or_else(|| t.to_trn());
            write_or_print(None, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_order(a: &OrderArgs) -> Result<ExitCode> {
    let t = a.input.load()?;
    let mut ord = match a.shuffle {
        Some(seed) => Ordering::shuffled(t.n(), seed),
        None => load_ordering(a.ord.as_ref(), t.n())?,
    };
    let before = forward_edge_count(&t, &ord);
    let policy = a.passes.map_or(SearchPolicy::ToConvergence, SearchPolicy::MaxPasses);
    let stats = local_search(&t, &mut ord, policy);
    write_ordering(&ord, &a.out)?;
    let report = json!({
        "n": t.n(),
        "passes": stats.passes,
        "moves": stats.moves,
        "converged": stats.converged,
        "forward_edges_before": before,
        "forward_edges": before + stats.gain,
        "digest": ord.digest(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_find(a: &FindArgs) -> Result<ExitCode> {
    let t = a.input.load()?;
    let params = a.params.params()?;
    let ord = load_ordering(a.ord.as_ref(), t.n())?;
    let out = build_from(&t, &params, a.mode, a.strategy, ord)?;
    if let Some(p) = &a.ord_out {
        write_ordering(&out.ordering, p)?;
    }
    match &out.result {
        BuildResult::Success(cert) => {
            cert.write(&a.out)?;
            eprintln!(
                "{} blocks, length {} (target {}), {} repairs",
                cert.blocks.len(),
                cert.length,
                cert.paper_bound,
                cert.repairs
            );
        }
        // A heuristic miss is a result, not an error.
        BuildResult::Failed { step, report } => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "success": false, "step": step, "failure": report }))?
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode> {
    let t = a.input.load()?;
    let cert = PathPowerCertificate::read(&a.cert).with_context(|| format!("reading {}", a.cert.display()))?;
    let ord = a.ord.as_ref().map(read_ordering).transpose()?;
    let lines = audit_certificate(&t, &cert, ord.as_ref())?;
    for l in &lines {
        println!("{l}");
    }
    Ok(if lines.iter().all(|l| l.pass) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_verify_witness(a: &WitnessArgs) -> Result<ExitCode> {
    let t = a.input.load()?;
    let params = a.params.params()?;
    let ord = load_ordering(a.ord.as_ref(), t.n())?;
    if a.at + params.r > t.n() {
        bail!("window start {} is out of range", a.at);
    }
    let seed = match &a.seed_set {
        Some(s) => s.clone(),
        None => ord.window(a.at, a.at + params.r).to_vec(),
    };
    match extract_step(&t, &ord, a.at, &seed, &params, &HashSet::new(), a.mode)? {
        StepOutcome::Witness(w) => {
            let lines = audit_witness(&t, &ord, a.at, &seed, &params, &w);
            for l in &lines {
                println!("{l}");
            }
            Ok(if lines.iter().all(|l| l.pass) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        StepOutcome::Failed(report) => {
            println!("no witness: stage {} failed: {}", report.stage, report.detail);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_oracle(a: &OracleArgs) -> Result<ExitCode> {
    let t = a.input.load()?;
    let r = longest_path_power(&t, a.k, a.budget)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_ell(a: &EllArgs) -> Result<ExitCode> {
    fs::create_dir_all(&a.out)?;
    let mut csv = String::from("n,k,value,exhaustive,witness_trn_path\n");
    for &n in &a.n {
        for &k in &a.k {
            let scope = match a.sample {
                Some(count) => EllScope::Sampled { count, seed: a.seed },
                None => EllScope::All,
            };
            let r = ell_exact(n, k, scope)?;
            let name = format!("witness_n{n}_k{k}.trn");
            write_trn(&r.witness, a.out.join(&name))?;
            csv += &format!("{n},{k},{},{},{name}\n", r.value, r.exhaustive);
        }
    }
    fs::write(a.out.join("ell.csv"), &csv)?;
    print!("{csv}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(a: &CertifyArgs) -> Result<ExitCode> {
    println!("k,r,t,W,guaranteed,extractable,lhs,rhs,margin");
    for &k in &a.k {
        let base = LemmaParams::default_for(k)?;
        let axis = |v: &Vec<usize>, d: usize| if v.is_empty() { vec![d] } else { v.clone() };
        for r in axis(&a.r, base.r) {
            for t in axis(&a.t, base.t) {
                for w in axis(&a.windows, base.windows) {
                    let p = LemmaParams::new(k, r, t, w)?;
                    let c = certify_params(&p);
                    println!(
                        "{k},{r},{t},{w},{},{},{:.6e},{:.6e},{:.6}",
                        c.guaranteed, c.extractable, c.lhs, c.rhs, c.margin
                    );
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::read(&a.config).with_context(|| format!("in {}", a.config.display()))?;
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    fs::create_dir_all(&a.out)?;
    let report = run_experiment(&cfg, &a.out)?;
    report.write(&a.out)?;
    let s = &report.summary;
    eprintln!("{} trials, success rate {:.3}", report.records.len(), s.success_rate);
    Ok(if report.exit_ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Order(a) => cmd_order(a),
        Command::Find(a) => cmd_find(a),
        Command::Verify(a) => cmd_verify(a),
        Command::VerifyWitness(a) => cmd_verify_witness(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Ell(a) => cmd_ell(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
