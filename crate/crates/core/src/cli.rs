//! The `subrank` command line.
//!
//! ```text
//! subrank generate greedy-trap --n 4 -o trap4.json
//! subrank solve trap4.json --algorithm aru --audit
//! subrank compare --suite greedy-trap:4,100,400 --reference identity --csv out.csv
//! ```
//!
//! Exit codes: 0 success, 2 bad parameters or invalid input, 3 audit failure,
//! 4 instance too large for brute force. The environment variable
//! `SUBRANK_TOLERANCE` overrides the threshold slack (default 1e-9).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    audit_chain_sum, audit_potential_sums, gamma_certificate, run_diagnostics, uncovered_chain, GammaCertificate,
    BOUND_TOLERANCE,
};
use crate::document::{parse_instance, to_canonical_json, InstanceDocument, TraceDocument};
use crate::error::Error;
use crate::generators::{
    from_set_cover, greedy_trap, min_sum_set_cover, multiple_intents, random_instance, random_suite, Family,
    RandomSpec, SetCoverInput,
};
use crate::instance::{cover_times, Instance, LinearOrdering, Producer};
use crate::solvers::{
    adaptive_residual_updates, brute_force_optimal, cumulative_greedy, RunTrace, BRUTE_FORCE_DEFAULT_LIMIT,
};
use crate::DEFAULT_TOLERANCE;

pub const TOLERANCE_ENV: &str = "SUBRANK_TOLERANCE";

pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_AUDIT_FAILED: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;

/// A failed command: message for stderr plus the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn bad_input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::bad_input(err.to_string())
    }
}

fn brute_force_error(err: Error) -> CliError {
    match err {
        Error::TooLarge { .. } => CliError {
            code: EXIT_TOO_LARGE,
            message: err.to_string(),
        },
        other => other.into(),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "subrank",
    version,
    about = "Rank elements to cover weighted submodular functions early"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance document.
    Generate(GenerateArgs),
    /// Solve one instance and print the ordering, cover times and cost.
    Solve(SolveArgs),
    /// Compare adaptive residual updates, cumulative greedy and a reference.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
    /// Output path; standard output when omitted.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// One coverage function built from a set cover instance.
    SetCover(SetCoverArgs),
    /// The instance family on which cumulative greedy fails.
    GreedyTrap {
        /// Number of functions; must be a perfect square >= 4.
        #[arg(long = "n")]
        n: usize,
    },
    /// Min-sum set cover: one 0/1 function per universe item.
    Msc(SetCoverArgs),
    /// Multiple intents ranking: modular rows with entries in {0, nu_i}.
    MultiIntent {
        /// Rows separated by ';', entries by ','.
        #[arg(long)]
        matrix: String,
        /// One intent value per row, comma separated.
        #[arg(long)]
        nu: String,
        /// One weight per row; all ones when omitted.
        #[arg(long)]
        weights: Option<String>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long = "m")]
        m: usize,
        #[arg(long = "n")]
        n: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::Modular)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-function universe size for coverage functions (default 2m).
        #[arg(long)]
        universe: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct SetCoverArgs {
    /// Universe size; items are 1..=universe.
    #[arg(long)]
    pub universe: usize,
    /// Sets separated by ';', 1-based items by ',', e.g. "1,2;2,3;3".
    #[arg(long)]
    pub sets: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Modular,
    Coverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Aru,
    Greedy,
    Brute,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Aru)]
    pub algorithm: Algorithm,
    /// Write the full run trace (aru and greedy only) to this path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the per-step table (t, R, Q, Lambda, Delta) here; JSON when the
    /// path ends in `.json`, CSV otherwise. aru and greedy only.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
    /// Run the bound audits and exit with 3 if any fails.
    #[arg(long)]
    pub audit: bool,
    /// Largest ground set for brute force.
    #[arg(long, default_value_t = BRUTE_FORCE_DEFAULT_LIMIT)]
    pub limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    /// Exact optimum by brute force.
    Brute,
    /// The ordering 1, 2, ..., m.
    Identity,
    None,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Instance documents.
    pub instances: Vec<PathBuf>,
    /// Generated suite: "greedy-trap:4,100,400" or
    /// "random:COUNT[:MAX_M[:MAX_N[:SEED]]]" (defaults 7, 4, 0).
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Brute)]
    pub reference: ReferenceArg,
    #[arg(long, default_value_t = BRUTE_FORCE_DEFAULT_LIMIT)]
    pub limit: usize,
    /// Write the table here; standard output gets a JSON summary instead.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Threshold slack from `SUBRANK_TOLERANCE`, or the default.
pub fn tolerance_from_env() -> Result<f64, CliError> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && (0.0..1.0).contains(t))
            .ok_or_else(|| CliError::bad_input(format!("{TOLERANCE_ENV} must be a number in [0, 1), got {raw:?}"))),
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

/// Runs a parsed command, writing regular output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let tolerance = tolerance_from_env()?;
    match cli.command {
        Command::Generate(args) => cmd_generate(args, out),
        Command::Solve(args) => cmd_solve(args, tolerance, out),
        Command::Compare(args) => cmd_compare(args, tolerance, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::bad_input(format!("cannot write output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::bad_input(format!("cannot write {}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::bad_input(format!("bad {what} entry {s:?}")))
        })
        .collect()
}

fn parse_rows<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<Vec<T>>, CliError> {
    raw.split(';').map(|row| parse_list(row, what)).collect()
}

fn set_cover_input(args: &SetCoverArgs) -> Result<SetCoverInput, CliError> {
    Ok(SetCoverInput::new(args.universe, parse_rows(&args.sets, "set")?)?)
}

pub fn cmd_generate(args: GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let instance = match &args.kind {
        GenerateKind::SetCover(sc) => from_set_cover(&set_cover_input(sc)?)?,
        GenerateKind::Msc(sc) => min_sum_set_cover(&set_cover_input(sc)?)?,
        GenerateKind::GreedyTrap { n } => greedy_trap(*n)?,
        GenerateKind::MultiIntent { matrix, nu, weights } => {
            let rows: Vec<Vec<f64>> = parse_rows(matrix, "matrix")?;
            let nu: Vec<f64> = parse_list(nu, "nu")?;
            let weights = match weights {
                Some(w) => parse_list(w, "weight")?,
                None => vec![1.0; rows.len()],
            };
            multiple_intents(&rows, &nu, &weights)?
        }
        GenerateKind::Random {
            m,
            n,
            family,
            density,
            seed,
            universe,
        } => random_instance(&RandomSpec {
            m: *m,
            n: *n,
            family: match family {
                FamilyArg::Modular => Family::Modular,
                FamilyArg::Coverage => Family::Coverage,
            },
            density: *density,
            seed: *seed,
            universe: *universe,
        })?,
    };
    let text = InstanceDocument::from_instance(&instance).to_canonical_string();
    match &args.output {
        Some(path) => write_file(path, &text),
        None => write_out(out, &text),
    }
}

fn load_instance(path: &Path, tolerance: f64) -> Result<Instance, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::bad_input(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text, tolerance).map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    algorithm: &'static str,
    ordering: Vec<usize>,
    cover_times: Vec<usize>,
    total_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<SolveAudit>,
}

#[derive(Debug, Serialize)]
struct SolveAudit {
    epsilon_hat: f64,
    gamma: f64,
    /// Per-function potential sums; adaptive runs only.
    potential_sums: Option<Vec<f64>>,
    potential_sums_ok: Option<bool>,
    width_bound_ok: Option<bool>,
    cost_identities_ok: Option<bool>,
    chain_sums_ok: Option<bool>,
    passed: bool,
}

fn audit_trace(instance: &Instance, trace: &RunTrace, certificate: GammaCertificate) -> Result<SolveAudit, CliError> {
    let adaptive = trace.rule == crate::solvers::PotentialRule::AdaptiveResidual;
    let diagnostics = run_diagnostics(instance, trace);
    let cost_identities_ok = diagnostics.is_ok();
    let (potential_sums, potential_sums_ok, width_bound_ok) = if adaptive {
        let sums = audit_potential_sums(trace, certificate.gamma)?;
        let width = diagnostics
            .as_ref()
            .map(|d| d.width_bound(certificate.gamma).iter().all(|&b| b))
            .unwrap_or(false);
        let ok = sums.all_passed();
        (Some(sums.sums), Some(ok), Some(width))
    } else {
        (None, None, None)
    };
    let mut chain_sums_ok = true;
    for i in 0..instance.num_functions() {
        let audit = audit_chain_sum(&uncovered_chain(trace, i))?;
        chain_sums_ok &= audit.ok;
    }
    let passed =
        cost_identities_ok && chain_sums_ok && potential_sums_ok != Some(false) && width_bound_ok != Some(false);
    Ok(SolveAudit {
        epsilon_hat: certificate.epsilon_hat,
        gamma: certificate.gamma,
        potential_sums,
        potential_sums_ok,
        width_bound_ok,
        cost_identities_ok: Some(cost_identities_ok),
        chain_sums_ok: Some(chain_sums_ok),
        passed,
    })
}

pub fn cmd_solve(args: SolveArgs, tolerance: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let instance = load_instance(&args.instance, tolerance)?;
    let (name, ordering, trace) = match args.algorithm {
        Algorithm::Aru => {
            let trace = adaptive_residual_updates(&instance);
            ("aru", trace.ordering.clone(), Some(trace))
        }
        Algorithm::Greedy => {
            let trace = cumulative_greedy(&instance);
            ("greedy", trace.ordering.clone(), Some(trace))
        }
        Algorithm::Brute => {
            let opt = brute_force_optimal(&instance, args.limit).map_err(brute_force_error)?;
            ("brute", opt.ordering, None)
        }
    };
    if let Some(path) = &args.trace {
        let trace = trace
            .as_ref()
            .ok_or_else(|| CliError::bad_input("--trace is only available for aru and greedy"))?;
        write_file(path, &to_canonical_json(&TraceDocument::from_trace(trace)?))?;
    }
    if let Some(path) = &args.diagnostics {
        let trace = trace
            .as_ref()
            .ok_or_else(|| CliError::bad_input("--diagnostics is only available for aru and greedy"))?;
        let diagnostics = run_diagnostics(&instance, trace)?;
        let text = if path.extension().is_some_and(|e| e == "json") {
            to_canonical_json(&diagnostics)
        } else {
            diagnostics.to_csv()
        };
        write_file(path, &text)?;
    }
    let report = cover_times(&instance, &ordering)?;
    let audit = if args.audit {
        let certificate = gamma_certificate(&instance)?;
        Some(match &trace {
            Some(trace) => audit_trace(&instance, trace, certificate)?,
            None => SolveAudit {
                epsilon_hat: certificate.epsilon_hat,
                gamma: certificate.gamma,
                potential_sums: None,
                potential_sums_ok: None,
                width_bound_ok: None,
                cost_identities_ok: None,
                chain_sums_ok: None,
                passed: true,
            },
        })
    } else {
        None
    };
    let failed = audit.as_ref().is_some_and(|a| !a.passed);
    let output = SolveOutput {
        algorithm: name,
        ordering: ordering.one_based(),
        cover_times: report.cover_times,
        total_cost: report.total_cost,
        audit,
    };
    let mut text = serde_json::to_string_pretty(&output).expect("solve output serializes");
    text.push('\n');
    write_out(out, &text)?;
    if failed {
        return Err(CliError {
            code: EXIT_AUDIT_FAILED,
            message: "audit failed".into(),
        });
    }
    Ok(())
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub epsilon_hat: f64,
    pub gamma: f64,
    pub four_gamma: f64,
    pub aru_cost: f64,
    pub greedy_cost: f64,
    pub reference_kind: &'static str,
    pub reference_cost: Option<f64>,
    pub aru_ratio: Option<f64>,
    pub greedy_ratio: Option<f64>,
    pub greedy_over_aru: f64,
    /// `aru_ratio <= 4γ`; only filled against the brute-force optimum.
    pub within_bound: Option<bool>,
    /// Potential sums, width bound, cost identities and chain sums of the ARU run.
    pub audits_passed: bool,
}

/// Column order of the comparison CSV.
pub const CSV_HEADER: [&str; 15] = [
    "name",
    "m",
    "n",
    "epsilon_hat",
    "gamma",
    "four_gamma",
    "aru_cost",
    "greedy_cost",
    "reference_kind",
    "reference_cost",
    "aru_ratio",
    "greedy_ratio",
    "greedy_over_aru",
    "within_bound",
    "audits_passed",
];

/// Evaluates one instance for `compare`.
pub fn compare_instance(
    name: &str,
    instance: &Instance,
    reference: ReferenceArg,
    limit: usize,
) -> Result<CompareRow, CliError> {
    let certificate = gamma_certificate(instance)?;
    let aru = adaptive_residual_updates(instance);
    let greedy = cumulative_greedy(instance);
    let aru_cost = aru.report(instance)?.total_cost;
    let greedy_cost = greedy.report(instance)?.total_cost;
    let audit = audit_trace(instance, &aru, certificate)?;

    let (reference_kind, reference_cost) = match reference {
        ReferenceArg::Brute => (
            "brute-force-opt",
            Some(
                brute_force_optimal(instance, limit)
                    .map_err(brute_force_error)?
                    .report
                    .total_cost,
            ),
        ),
        ReferenceArg::Identity => (
            "alternate-ordering",
            Some(
                cover_times(
                    instance,
                    &LinearOrdering::identity(instance.num_elements(), Producer::External),
                )?
                .total_cost,
            ),
        ),
        ReferenceArg::None => ("none", None),
    };
    let ratio = |cost: f64| reference_cost.filter(|&r| r > 0.0).map(|r| cost / r);
    let four_gamma = 4.0 * certificate.gamma;
    let aru_ratio = ratio(aru_cost);
    Ok(CompareRow {
        name: name.to_string(),
        m: instance.num_elements(),
        n: instance.num_functions(),
        epsilon_hat: certificate.epsilon_hat,
        gamma: certificate.gamma,
        four_gamma,
        aru_cost,
        greedy_cost,
        reference_kind,
        reference_cost,
        aru_ratio,
        greedy_ratio: ratio(greedy_cost),
        greedy_over_aru: greedy_cost / aru_cost,
        within_bound: match reference {
            ReferenceArg::Brute => aru_ratio.map(|r| r <= four_gamma + BOUND_TOLERANCE),
            _ => None,
        },
        audits_passed: audit.passed,
    })
}

/// Expands a `--suite` argument into named instances.
pub fn expand_suite(spec: &str) -> Result<Vec<(String, Instance)>, CliError> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::bad_input(format!("suite {spec:?} must look like KIND:PARAMS")))?;
    match kind {
        "greedy-trap" => {
            let sizes: Vec<usize> = parse_list(rest, "suite size")?;
            sizes
                .into_iter()
                .map(|n| Ok((format!("greedy-trap-{n:07}"), greedy_trap(n)?)))
                .collect()
        }
        "random" => {
            let parts: Vec<u64> = rest
                .split(':')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| CliError::bad_input(format!("bad suite parameter {p:?}")))
                })
                .collect::<Result<_, _>>()?;
            let get = |k: usize, default: u64| parts.get(k).copied().unwrap_or(default);
            if parts.is_empty() || parts.len() > 4 {
                return Err(CliError::bad_input("random suite takes COUNT[:MAX_M[:MAX_N[:SEED]]]"));
            }
            Ok(random_suite(
                get(0, 0) as usize,
                get(1, 7) as usize,
                get(2, 4) as usize,
                get(3, 0),
            )?)
        }
        other => Err(CliError::bad_input(format!("unknown suite kind {other:?}"))),
    }
}

pub fn cmd_compare(args: CompareArgs, tolerance: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let mut named: Vec<(String, Instance)> = Vec::new();
    for path in &args.instances {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        named.push((name, load_instance(path, tolerance)?));
    }
    if let Some(spec) = &args.suite {
        named.extend(expand_suite(spec)?);
    }
    if named.is_empty() {
        return Err(CliError::bad_input("nothing to compare: the suite is empty"));
    }
    named.sort_by(|a, b| a.0.cmp(&b.0));

    let rows = compare_all(&named, args.reference, args.limit, args.jobs.max(1))?;
    let table = render_csv(&rows)?;
    let failed = rows.iter().any(|r| !r.audits_passed || r.within_bound == Some(false));

    match &args.csv {
        Some(path) => {
            write_file(path, &table)?;
            let summary = serde_json::json!({
                "rows": rows.len(),
                "csv": path.display().to_string(),
                "max_aru_ratio": rows.iter().filter_map(|r| r.aru_ratio).fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r)))),
                "all_within_bound": rows.iter().all(|r| r.within_bound != Some(false)),
                "all_audits_passed": rows.iter().all(|r| r.audits_passed),
            });
            write_out(
                out,
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&summary).expect("summary serializes")
                ),
            )?;
        }
        None => write_out(out, &table)?,
    }
    if failed {
        return Err(CliError {
            code: EXIT_AUDIT_FAILED,
            message: "audit failed".into(),
        });
    }
    Ok(())
}

fn compare_all(
    named: &[(String, Instance)],
    reference: ReferenceArg,
    limit: usize,
    jobs: usize,
) -> Result<Vec<CompareRow>, CliError> {
    if jobs == 1 || named.len() < 2 {
        return named
            .iter()
            .map(|(name, inst)| compare_instance(name, inst, reference, limit))
            .collect();
    }
    let chunk = named.len().div_ceil(jobs);
    let results: Vec<Vec<Result<CompareRow, CliError>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = named
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|(name, inst)| compare_instance(name, inst, reference, limit))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    results.into_iter().flatten().collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The comparison table as CSV with a header row and LF line endings.
pub fn render_csv(rows: &[CompareRow]) -> Result<String, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let failed = |e: csv::Error| CliError::bad_input(format!("cannot render CSV: {e}"));
    writer.write_record(CSV_HEADER).map_err(failed)?;
    for r in rows {
        writer
            .write_record([
                r.name.clone(),
                r.m.to_string(),
                r.n.to_string(),
                r.epsilon_hat.to_string(),
                r.gamma.to_string(),
                r.four_gamma.to_string(),
                r.aru_cost.to_string(),
                r.greedy_cost.to_string(),
                r.reference_kind.to_string(),
                opt(r.reference_cost),
                opt(r.aru_ratio),
                opt(r.greedy_ratio),
                r.greedy_over_aru.to_string(),
                opt(r.within_bound),
                r.audits_passed.to_string(),
            ])
            .map_err(failed)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::bad_input(format!("cannot render CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}
