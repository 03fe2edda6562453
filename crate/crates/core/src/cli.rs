//! The `mdomain` command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 invalid channel,
//! 4 non-unital input to a unital-only analysis, 5 numerical failure or a
//! failed verification.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{wedderburn, OperatorSubspace};
use crate::analysis::{analyze, md_chain, md_power_domain, AnalysisReport};
use crate::channel::{convex_combine, tensor, Channel};
use crate::error::Error;
use crate::gallery::{
    dephasing_shift_channel, etb_channel, m3_example, omega_pair, random_mixed_unitary,
    schur_cycle_channel,
};
use crate::linalg::Tolerance;
use crate::mupsa::build_lattice;
use crate::verify::{run_suite, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_CHANNEL: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "mdomain", version, about = "Multiplicative-domain analysis of unital quantum channels")]
pub struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// Projector-distance threshold for subspace equality.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_subspace: f64,
    /// Distance from the unit circle for peripheral eigenvalues.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_spectral: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a channel file.
    Analyze {
        input: PathBuf,
        /// Also report `M_{E^k}` for every power up to this one.
        #[arg(long)]
        powers: Option<usize>,
        /// Include orthonormal bases of every reported subspace.
        #[arg(long)]
        full: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a gallery channel.
    Construct {
        family: Family,
        #[arg(long)]
        dim: Option<usize>,
        /// Target multiplicative index (etb).
        #[arg(long)]
        index: Option<usize>,
        /// Number of unitaries (random-mixed-unitary).
        #[arg(long, default_value_t = 3)]
        kraus: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Tensor product of two channel files.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Convex combination described by `{"terms": [{"weight": w, "channel": path-or-object}]}`.
    Convex {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a property suite.
    Verify {
        suite: SuiteArg,
        /// Random cases per dimension entry.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        /// `2x2,2x3`, `2..6` or `2,3`.
        #[arg(long)]
        dims: Option<String>,
        /// Largest power (convex-formula).
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Export the lattice of subalgebra types of `M_d`.
    Lattice {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = LatticeFormat::Dot)]
        format: LatticeFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Etb,
    SchurCycle,
    DephasingShift,
    OmegaPair,
    RandomMixedUnitary,
    M3Example,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuiteArg {
    MdSplitting,
    KappaBound,
    KappaTensor,
    FixSplitting,
    ConvexFormula,
    AdjointIndex,
    Ucc,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::MdSplitting => Suite::MdSplitting,
            SuiteArg::KappaBound => Suite::KappaBound,
            SuiteArg::KappaTensor => Suite::KappaTensor,
            SuiteArg::FixSplitting => Suite::FixSplitting,
            SuiteArg::ConvexFormula => Suite::ConvexFormula,
            SuiteArg::AdjointIndex => Suite::AdjointIndex,
            SuiteArg::Ucc => Suite::Ucc,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LatticeFormat {
    Dot,
    Json,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Json(_) | Error::Io(_) | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::DimensionMismatch { .. }
            | Error::NotSquare { .. }
            | Error::EmptyKraus
            | Error::NonFinite
            | Error::NotTracePreserving { .. } => EXIT_INVALID_CHANNEL,
            Error::NotUnital { .. } => EXIT_UNSUPPORTED,
            Error::NotAnAlgebra(_)
            | Error::IllConditioned(_)
            | Error::Construction(_)
            | Error::Decomposition(_) => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn tolerance(cli: &Cli) -> CliResult<Tolerance> {
    Tolerance::new(cli.tol_rank, cli.tol_subspace, cli.tol_spectral).map_err(|e| CliError::usage(e.to_string()))
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let tol = tolerance(cli)?;
    match &cli.command {
        Command::Analyze {
            input,
            powers,
            full,
            output,
        } => cmd_analyze(cli, &tol, input, *powers, *full, output.as_deref()),
        Command::Construct {
            family,
            dim,
            index,
            kraus,
            output,
        } => cmd_construct(cli, &tol, *family, *dim, *index, *kraus, output),
        Command::Tensor { a, b, output } => {
            let ch = tensor(&load_channel(a, &tol)?, &load_channel(b, &tol)?);
            write_channel(&ch, output)?;
            println!("wrote {} (d={})", output.display(), ch.dim());
            Ok(EXIT_OK)
        }
        Command::Convex { spec, output } => {
            let ch = load_convex(spec, &tol)?;
            write_channel(&ch, output)?;
            println!("wrote {} (d={})", output.display(), ch.dim());
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            seeds,
            dims,
            k,
        } => cmd_verify(cli, &tol, (*suite).into(), *seeds, dims.clone(), *k),
        Command::Lattice {
            dim,
            format,
            output,
        } => cmd_lattice(*dim, *format, output.as_deref()),
    }
}

/// Reads a channel file and requires trace preservation.
pub fn load_channel(path: &Path, tol: &Tolerance) -> CliResult<Channel> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let ch = Channel::from_json(&text).map_err(|e| match e {
        Error::Json(_) => CliError::usage(format!("{}: {e}", path.display())),
        other => CliError::from(other),
    })?;
    ch.require_trace_preserving(tol)?;
    Ok(ch)
}

fn write_channel(ch: &Channel, path: &Path) -> CliResult<()> {
    fs::write(path, ch.to_json()? + "\n")
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn write_or_print(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Deserialize)]
struct ConvexSpec {
    terms: Vec<ConvexTerm>,
}

#[derive(Deserialize)]
struct ConvexTerm {
    weight: f64,
    channel: Value,
}

fn load_convex(spec: &Path, tol: &Tolerance) -> CliResult<Channel> {
    let text = fs::read_to_string(spec)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", spec.display())))?;
    let parsed: ConvexSpec =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", spec.display())))?;
    let base = spec.parent().unwrap_or(Path::new("."));
    let mut channels = Vec::with_capacity(parsed.terms.len());
    for term in &parsed.terms {
        let ch = match &term.channel {
            Value::String(p) => load_channel(&base.join(p), tol)?,
            obj @ Value::Object(_) => {
                let ch = Channel::from_json(&obj.to_string())?;
                ch.require_trace_preserving(tol)?;
                ch
            }
            _ => return Err(CliError::usage("each term's channel must be a path or a channel object")),
        };
        channels.push((term.weight, ch));
    }
    let refs: Vec<(f64, &Channel)> = channels.iter().map(|(w, c)| (*w, c)).collect();
    Ok(convex_combine(&refs)?)
}

/// SHA-256 of the canonical serialization, so formatting differences in the
/// input file do not change the digest.
pub fn channel_digest(ch: &Channel) -> CliResult<String> {
    let canonical = ch.to_json()?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

fn subspace_json(sub: &OperatorSubspace) -> Value {
    let mats: Vec<Value> = sub
        .normalized_phases()
        .basis()
        .iter()
        .map(|m| {
            let rows: Vec<Value> = (0..m.nrows())
                .map(|i| Value::from((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect::<Vec<_>>()))
                .collect();
            Value::from(rows)
        })
        .collect();
    json!({ "dim": sub.dim(), "basis": mats })
}

fn cmd_analyze(
    cli: &Cli,
    tol: &Tolerance,
    input: &Path,
    powers: Option<usize>,
    full: bool,
    output: Option<&Path>,
) -> CliResult<i32> {
    let start = Instant::now();
    let ch = load_channel(input, tol)?;
    let report = analyze(&ch, tol, cli.seed)?;
    let mut extra_powers = Vec::new();
    if let Some(k) = powers {
        if k == 0 {
            return Err(CliError::usage("--powers must be at least 1"));
        }
        for p in 1..=k {
            let m = if p <= report.chain.domains.len() {
                report.chain.domains[p - 1].clone()
            } else {
                md_power_domain(&ch, p, tol)?
            };
            let ty = wedderburn(&m, tol, cli.seed)?.ty.to_string();
            extra_powers.push(json!({ "k": p, "type": ty, "dim": m.dim() }));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();

    let text = if cli.json {
        let mut body = serde_json::to_value(&report).map_err(Error::from)?;
        let obj = body.as_object_mut().expect("report serializes to an object");
        obj.insert(
            "envelope".into(),
            json!({
                "tool": "mdomain",
                "version": env!("CARGO_PKG_VERSION"),
                "input": input.display().to_string(),
                "input_digest": channel_digest(&ch)?,
                "tolerance": tol,
                "seed": cli.seed,
                "wall_time_s": elapsed,
            }),
        );
        if powers.is_some() {
            obj.insert("powers".into(), Value::from(extra_powers));
        }
        if full {
            obj.insert(
                "bases".into(),
                json!({
                    "fixed_points": subspace_json(&report.fix_space),
                    "md_chain": report.chain.domains.iter().map(subspace_json).collect::<Vec<_>>(),
                    "stabilized": subspace_json(&report.chain.stabilized),
                }),
            );
        }
        serde_json::to_string_pretty(&body).map_err(Error::from)? + "\n"
    } else {
        render_text(&report, &extra_powers, tol)
    };
    write_or_print(&text, output)?;
    Ok(EXIT_OK)
}

fn render_text(r: &AnalysisReport, powers: &[Value], tol: &Tolerance) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "channel: {} (d={})", r.label, r.dim);
    let _ = writeln!(
        s,
        "trace_preserving={} unital={}",
        r.validation.trace_preserving, r.validation.unital
    );
    let _ = writeln!(s, "fixed_points: {} (dim {})", r.fixed_points.ty, r.fixed_points.dim);
    let _ = writeln!(s, "md_chain:");
    for m in &r.md_chain {
        let _ = writeln!(s, "  k={} {} (dim {})", m.k.unwrap_or(0), m.ty, m.dim);
    }
    let _ = writeln!(s, "kappa={} (bound {})", r.kappa, r.kappa_bound);
    let _ = writeln!(s, "stabilized: {} (dim {})", r.stabilized.ty, r.stabilized.dim);
    let _ = writeln!(s, "peripheral: {} eigenvalue(s)", r.peripheral.len());
    for p in &r.peripheral {
        let _ = writeln!(s, "  {:+.6}{:+.6}i (dim {})", p.re, p.im, p.dim);
    }
    if !powers.is_empty() {
        let _ = writeln!(s, "powers:");
        for p in powers {
            let _ = writeln!(s, "  k={} {} (dim {})", p["k"], p["type"].as_str().unwrap_or(""), p["dim"]);
        }
    }
    let _ = writeln!(s, "irreducible={} primitive={}", r.irreducible, r.primitive);
    let _ = writeln!(s, "md_trivial={}", r.md_trivial);
    let _ = writeln!(
        s,
        "factorable_possible={} (threshold {})",
        r.factorable_possible, r.factorization.threshold
    );
    let _ = writeln!(
        s,
        "tolerance: rank_rel={:e} subspace_abs={:e} spectral_cluster={:e}",
        tol.rank_rel, tol.subspace_abs, tol.spectral_cluster
    );
    s
}

fn require(v: Option<usize>, flag: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::usage(format!("{flag} is required for this family")))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

fn cmd_construct(
    cli: &Cli,
    tol: &Tolerance,
    family: Family,
    dim: Option<usize>,
    index: Option<usize>,
    kraus: usize,
    output: &Path,
) -> CliResult<i32> {
    // Parameter problems are usage errors, whatever the constructor calls them.
    let built = |r: crate::error::Result<Channel>| -> CliResult<Channel> {
        r.map_err(|e| match e {
            Error::InvalidParameter(m) => CliError::usage(m),
            other => other.into(),
        })
    };
    let channels: Vec<(PathBuf, Channel)> = match family {
        Family::Etb => {
            let d = require(dim, "--dim")?;
            let r = require(index, "--index")?;
            vec![(output.to_path_buf(), built(etb_channel(d, r, None, tol))?)]
        }
        Family::SchurCycle => {
            vec![(output.to_path_buf(), built(schur_cycle_channel(require(dim, "--dim")?))?)]
        }
        Family::DephasingShift => {
            vec![(output.to_path_buf(), built(dephasing_shift_channel(require(dim, "--dim")?))?)]
        }
        Family::RandomMixedUnitary => {
            let d = require(dim, "--dim")?;
            vec![(output.to_path_buf(), built(random_mixed_unitary(d, kraus, cli.seed))?)]
        }
        Family::M3Example => vec![(output.to_path_buf(), m3_example())],
        Family::OmegaPair => {
            let (a, b) = omega_pair();
            vec![(sibling(output, "1"), a), (sibling(output, "2"), b)]
        }
    };
    for (path, ch) in &channels {
        write_channel(ch, path)?;
        let kappa = md_chain(ch, tol)?.kappa;
        println!("wrote {} ({})", path.display(), ch.label());
        println!("kappa={kappa}");
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    cli: &Cli,
    tol: &Tolerance,
    suite: Suite,
    seeds: usize,
    dims: Option<String>,
    k: usize,
) -> CliResult<i32> {
    let opts = VerifyOptions {
        seeds,
        dims,
        k,
        base_seed: cli.seed,
    };
    let results = run_suite(suite, &opts, tol)?;
    let failed = results.iter().filter(|r| !r.pass).count();
    if cli.json {
        let body = json!({
            "suite": suite.name(),
            "cases": results,
            "passed": results.len() - failed,
            "failed": failed,
        });
        println!("{}", serde_json::to_string_pretty(&body).map_err(Error::from)?);
    } else {
        for r in &results {
            println!(
                "{}\t{}\t{}\t{}",
                suite,
                if r.pass { "PASS" } else { "FAIL" },
                r.case,
                r.detail
            );
        }
        println!("{suite}: {} passed, {failed} failed", results.len() - failed);
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERICAL })
}

fn cmd_lattice(dim: usize, format: LatticeFormat, output: Option<&Path>) -> CliResult<i32> {
    let lattice = build_lattice(dim)?;
    let text = match format {
        LatticeFormat::Dot => lattice.to_dot(),
        LatticeFormat::Json => serde_json::to_string_pretty(&lattice.to_json()).map_err(Error::from)? + "\n",
    };
    write_or_print(&text, output)?;
    if output.is_some() {
        println!("nodes={}", lattice.nodes.len());
        println!("longest_chain={}", lattice.longest_chain_len());
    } else {
        eprintln!("nodes={}", lattice.nodes.len());
        eprintln!("longest_chain={}", lattice.longest_chain_len());
    }
    Ok(EXIT_OK)
}
