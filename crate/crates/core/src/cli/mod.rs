//! Command-line front end. Every command writing a file also writes `<out>.manifest.json`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arrangement::{random_generic, Arrangement, ArrangementError, Hyperplane};
use crate::deform::{
    build_with_progress, enumerate_obligations, verify, BuildOptions, CongruenceMethod, DeformError,
    DeformationTrace, EpsilonRule, GpMethod, Retention,
};
use crate::exactalg::Rat;
use crate::nevan::{certify_inequalities, conic_fit, interpolation_search, NevanError};
use crate::TOOL_VERSION;

/// Process exit codes; each outcome class maps to exactly one code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Ok = 0,
    Io = 1,
    Exhausted = 2,
    Predicate = 3,
    Guard = 4,
    Usage = 64,
    Parse = 65,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

fn err<T>(exit: Exit, message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError { exit, message: message.into() })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Parser, Debug)]
#[command(name = "hypdeform", version, about = "Generic arrangements, deformed hypersurfaces and their certificates")]
pub struct Cli {
    /// Worker threads for parallel checks (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Abort a build once a coefficient exceeds this many bits (0 disables the guard).
    #[arg(long, global = true)]
    pub max_coeff_bits: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a generic arrangement.
    Gen(GenArgs),
    /// Check general position or the generic condition of an arrangement file.
    Check(CheckArgs),
    /// Run the full deformation and write its trace.
    Build(BuildArgs),
    /// Re-check every step of a trace.
    Verify(VerifyArgs),
    /// List the hypothesis complements and starting rows for dimension n.
    Obligations(ObligationsArgs),
    /// Sweep the order-inequality inventory.
    Certify(CertifyArgs),
    /// Minimal interpolation parameters for m points.
    Interp(InterpArgs),
    /// Conic through four points tangent to a line.
    Conic(ConicArgs),
    /// Re-run a recorded command and compare outputs.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Family size (default 2n).
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 9)]
    pub bound: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_tries: usize,
    #[arg(long, default_value = "arrangement.json")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    General,
    Generic,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub arrangement: PathBuf,
    #[arg(long, value_enum, default_value_t = CheckMode::Generic)]
    pub mode: CheckMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RetentionArg {
    All,
    Digests,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub n: usize,
    /// Seed for the arrangement (ignored with --arrangement).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use this arrangement instead of sampling one.
    #[arg(long)]
    pub arrangement: Option<PathBuf>,
    #[arg(long, default_value_t = 9)]
    pub bound: i64,
    #[arg(long, default_value_t = 1000)]
    pub max_tries: usize,
    #[arg(long, default_value = "geometric:1/1000")]
    pub epsilon: EpsilonRule,
    #[arg(long, default_value_t = 0)]
    pub initial_seed: u64,
    #[arg(long, value_enum, default_value_t = RetentionArg::All)]
    pub retention: RetentionArg,
    /// Track intersection-point values incrementally instead of re-evaluating.
    #[arg(long)]
    pub incremental: bool,
    /// Establish congruences from the product structure instead of reducing.
    #[arg(long)]
    pub structural: bool,
    /// Print step progress on stderr.
    #[arg(long)]
    pub progress: bool,
    #[arg(long, default_value = "out.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ObligationsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 12)]
    pub bound: u32,
    #[arg(long, visible_alias = "report")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InterpArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConicArgs {
    /// JSON file: an array of 4 points, or {"points": [...], "tangent": [...], "at": i}.
    #[arg(long)]
    pub points: PathBuf,
    /// Tangent line coefficients, comma separated.
    #[arg(long)]
    pub tangent: Option<String>,
    /// Index (0-based) of the tangency point.
    #[arg(long)]
    pub at: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Everything needed to reproduce one output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// The arguments after the program name, without --out and --threads.
    pub argv: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub exit_code: i32,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError { exit: Exit::Io, message: format!("writing {}: {e}", path.display()) };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

struct Run {
    format: Format,
    max_coeff_bits: Option<u64>,
    inputs: BTreeMap<String, String>,
    seeds: Vec<u64>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError { exit: Exit::Io, message: format!("reading {}: {e}", path.display()) })?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError { exit: Exit::Parse, message: format!("parsing {}: {e}", path.display()) })
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Output text plus exit code of one command.
struct Outcome {
    text: String,
    exit: Exit,
    diagnostic: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, exit: Exit::Ok, diagnostic: None }
    }
}

fn format_rats(v: &[Rat]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn arrangement_table(a: &Arrangement) -> String {
    let mut s = format!("n = {}, q = {}\n", a.n(), a.q());
    for (i, h) in a.hyperplanes().iter().enumerate() {
        let c: Vec<String> = h.coeffs().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "h{i}: {}", c.join(" "));
    }
    s
}

fn arrangement_error(e: ArrangementError) -> CliError {
    match e {
        ArrangementError::ExhaustedTries { .. } => CliError { exit: Exit::Exhausted, message: e.to_string() },
        ArrangementError::TooFewHyperplanes { .. } => CliError { exit: Exit::Usage, message: e.to_string() },
        _ => CliError { exit: Exit::Predicate, message: e.to_string() },
    }
}

fn deform_error(e: DeformError) -> CliError {
    let exit = match &e {
        DeformError::InitialSeedExhausted { .. } | DeformError::GeneralPositionLost { .. } => Exit::Exhausted,
        DeformError::CoeffGuard { .. } => Exit::Guard,
        DeformError::UnsupportedDimension(_) => Exit::Usage,
        DeformError::Arrangement(ArrangementError::ExhaustedTries { .. }) => Exit::Exhausted,
        _ => Exit::Predicate,
    };
    CliError { exit, message: e.to_string() }
}

fn nevan_error(e: NevanError) -> CliError {
    CliError { exit: Exit::Predicate, message: e.to_string() }
}

fn cmd_gen(run: &mut Run, a: &GenArgs) -> Result<(Outcome, String), CliError> {
    if !(2..=6).contains(&a.n) {
        return err(Exit::Usage, format!("--n {} outside 2..=6", a.n));
    }
    let q = a.q.unwrap_or(2 * a.n);
    if q < a.n + 2 {
        return err(Exit::Usage, format!("--q {q} below n + 2 = {}", a.n + 2));
    }
    if a.bound < 1 {
        return err(Exit::Usage, "--bound must be at least 1");
    }
    run.seeds.push(a.seed);
    let g = random_generic(a.n, q, a.bound, a.seed, a.max_tries).map_err(arrangement_error)?;
    let stdout = match run.format {
        Format::Json => to_json(&serde_json::json!({ "n": a.n, "q": q, "seed": g.seed, "tries": g.tries })),
        Format::Table => format!("{}seed {} accepted after {} tries\n", arrangement_table(&g.arrangement), g.seed, g.tries),
    };
    Ok((Outcome::ok(to_json(&g.arrangement)), stdout))
}

fn cmd_check(run: &mut Run, a: &CheckArgs) -> Result<Outcome, CliError> {
    let arr: Arrangement = run.read_json(&a.arrangement)?;
    #[derive(Serialize)]
    struct Report<W: Serialize> {
        mode: &'static str,
        holds: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<W>,
    }
    let (text, holds) = match a.mode {
        CheckMode::General => {
            let v = arr.is_general_position().map_err(arrangement_error)?;
            let holds = v.holds();
            let text = match run.format {
                Format::Json => to_json(&Report { mode: "general", holds, witness: v.witness() }),
                Format::Table => match v.witness() {
                    None => "general position: holds\n".into(),
                    Some(w) => format!("general position: fails, dependent subset {w:?}\n"),
                },
            };
            (text, holds)
        }
        CheckMode::Generic => {
            let v = match arr.is_generic() {
                Ok(v) => v,
                Err(ArrangementError::NotInGeneralPosition(w)) => {
                    let text = match run.format {
                        Format::Json => to_json(&Report { mode: "generic", holds: false, witness: Some(w) }),
                        Format::Table => format!("generic: fails, not in general position at {w:?}\n"),
                    };
                    return Ok(Outcome { text, exit: Exit::Predicate, diagnostic: None });
                }
                Err(e) => return Err(arrangement_error(e)),
            };
            let holds = v.holds();
            let text = match run.format {
                Format::Json => to_json(&Report { mode: "generic", holds, witness: v.witness() }),
                Format::Table => match v.witness() {
                    None => "generic: holds\n".into(),
                    Some(w) => format!(
                        "generic: fails at I={:?} J={:?} partitions={:?} extra={:?} (codim {} expected {})\n",
                        w.i, w.j, w.partitions, w.extra, w.actual_codim, w.expected_codim
                    ),
                },
            };
            (text, holds)
        }
    };
    Ok(Outcome { text, exit: if holds { Exit::Ok } else { Exit::Predicate }, diagnostic: None })
}

#[derive(Serialize)]
struct BuildSummary {
    n: usize,
    steps: usize,
    initial_seed_used: u64,
    final_degree: u32,
    final_epsilon: Rat,
    final_digest: String,
    max_coeff_bits: u64,
}

fn cmd_build(run: &mut Run, a: &BuildArgs) -> Result<(Outcome, String), CliError> {
    if !(3..=6).contains(&a.n) {
        return err(Exit::Usage, format!("--n {} outside 3..=6", a.n));
    }
    let arr = match &a.arrangement {
        Some(p) => {
            let arr: Arrangement = run.read_json(p)?;
            if arr.n() != a.n {
                return err(Exit::Usage, format!("arrangement has n = {}, --n is {}", arr.n(), a.n));
            }
            arr
        }
        None => {
            run.seeds.push(a.seed);
            random_generic(a.n, 2 * a.n, a.bound, a.seed, a.max_tries).map_err(arrangement_error)?.arrangement
        }
    };
    let opts = BuildOptions {
        epsilon_rule: a.epsilon.clone(),
        initial_seed: a.initial_seed,
        max_coeff_bits: match run.max_coeff_bits {
            Some(0) => None,
            Some(b) => Some(b),
            None => BuildOptions::default().max_coeff_bits,
        },
        retention: match a.retention {
            RetentionArg::All => Retention::All,
            RetentionArg::Digests => Retention::DigestsOnly,
        },
        gp_method: if a.incremental { GpMethod::Incremental } else { GpMethod::Direct },
        congruence_method: if a.structural { CongruenceMethod::Structural } else { CongruenceMethod::Reduce },
        ..BuildOptions::default()
    };
    let progress = a.progress;
    let tr = build_with_progress(&arr, &opts, |t, total| {
        if progress {
            eprintln!("step {t}/{total}");
        }
    })
    .map_err(deform_error)?;
    run.seeds.push(tr.initial_seed_used);
    let summary = BuildSummary {
        n: tr.n,
        steps: tr.steps.len(),
        initial_seed_used: tr.initial_seed_used,
        final_degree: tr.final_sigma.degree(),
        final_epsilon: tr.final_epsilon.clone(),
        final_digest: tr.final_sigma.digest(),
        max_coeff_bits: tr.final_sigma.max_coeff_bits(),
    };
    let stdout = match run.format {
        Format::Json => to_json(&summary),
        Format::Table => format!(
            "n = {}: {} steps, final degree {}, ε = {}, digest {}\n",
            summary.n, summary.steps, summary.final_degree, summary.final_epsilon, summary.final_digest
        ),
    };
    let mut text = serde_json::to_string(&tr).expect("serializable");
    text.push('\n');
    Ok((Outcome::ok(text), stdout))
}

fn cmd_verify(run: &mut Run, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let tr: DeformationTrace = run.read_json(&a.trace)?;
    #[derive(Serialize)]
    struct Report {
        ok: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        report: Option<crate::deform::VerifyReport>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<crate::deform::VerifyError>,
    }
    match verify(&tr) {
        Ok(r) => {
            let text = match run.format {
                Format::Json => to_json(&Report { ok: true, report: Some(r), error: None }),
                Format::Table => format!(
                    "verified: n = {}, {} steps, {} intersection points, final degree {}\n",
                    r.n, r.steps_checked, r.intersection_points, r.final_degree
                ),
            };
            Ok(Outcome::ok(text))
        }
        Err(e) => {
            let diagnostic = Some(e.to_string());
            let text = match run.format {
                Format::Json => to_json(&Report { ok: false, report: None, error: Some(e) }),
                Format::Table => format!("verification failed: {e}\n"),
            };
            Ok(Outcome { text, exit: Exit::Predicate, diagnostic })
        }
    }
}

fn cmd_obligations(run: &mut Run, a: &ObligationsArgs) -> Result<Outcome, CliError> {
    if !(3..=6).contains(&a.n) {
        return err(Exit::Usage, format!("--n {} outside 3..=6", a.n));
    }
    let o = enumerate_obligations(a.n).map_err(deform_error)?;
    Ok(Outcome::ok(match run.format {
        Format::Json => to_json(&o),
        Format::Table => o.to_table(),
    }))
}

fn cmd_certify(run: &mut Run, a: &CertifyArgs) -> Result<Outcome, CliError> {
    if a.bound < 2 {
        return err(Exit::Usage, "--bound must be at least 2");
    }
    let r = certify_inequalities(a.bound).map_err(nevan_error)?;
    let exit = if r.all_pass { Exit::Ok } else { Exit::Predicate };
    let text = match run.format {
        Format::Json => to_json(&r),
        Format::Table => r.to_table(),
    };
    Ok(Outcome { text, exit, diagnostic: (!r.all_pass).then(|| "an inequality has counterexamples".into()) })
}

fn cmd_interp(run: &mut Run, a: &InterpArgs) -> Result<Outcome, CliError> {
    if a.m < 4 {
        return err(Exit::Usage, "--m must be at least 4");
    }
    match interpolation_search(a.m) {
        Ok(r) => Ok(Outcome::ok(match run.format {
            Format::Json => to_json(&r),
            Format::Table => format!("m = {}: M = {}, d = {}, k = {}, gap = {}\n", r.m, r.m_min, r.d, r.k, r.gap),
        })),
        Err(NevanError::Infeasible(reason)) => {
            #[derive(Serialize)]
            struct Infeasible<'a> {
                m: u64,
                feasible: bool,
                reason: &'a str,
            }
            let text = match run.format {
                Format::Json => to_json(&Infeasible { m: a.m, feasible: false, reason: &reason }),
                Format::Table => format!("infeasible: {reason}\n"),
            };
            Ok(Outcome { text, exit: Exit::Predicate, diagnostic: Some(reason) })
        }
        Err(e) => Err(nevan_error(e)),
    }
}

fn json_rat(v: &serde_json::Value) -> Result<Rat, String> {
    match v {
        serde_json::Value::String(s) => s.parse().map_err(|e| format!("{e}")),
        serde_json::Value::Number(n) => n.as_i64().map(Rat::from).ok_or_else(|| format!("{n} is not an integer")),
        _ => Err(format!("{v} is not a rational")),
    }
}

fn json_vec(v: &serde_json::Value) -> Result<Vec<Rat>, String> {
    v.as_array().ok_or_else(|| format!("{v} is not an array"))?.iter().map(json_rat).collect()
}

fn cmd_conic(run: &mut Run, a: &ConicArgs) -> Result<Outcome, CliError> {
    let v: serde_json::Value = run.read_json(&a.points)?;
    let parse = |m: String| CliError { exit: Exit::Parse, message: format!("{}: {m}", a.points.display()) };
    let (pts_v, tan_v, at_v) = match &v {
        serde_json::Value::Array(_) => (&v, None, None),
        serde_json::Value::Object(o) => (
            o.get("points").ok_or_else(|| parse("missing \"points\"".into()))?,
            o.get("tangent"),
            o.get("at").and_then(|x| x.as_u64()),
        ),
        _ => return Err(parse("expected an array or object".into())),
    };
    let points: Vec<Vec<Rat>> = pts_v
        .as_array()
        .ok_or_else(|| parse("points must be an array".into()))?
        .iter()
        .map(json_vec)
        .collect::<Result<_, _>>()
        .map_err(parse)?;
    let tangent: Vec<Rat> = match (&a.tangent, tan_v) {
        (Some(s), _) => s
            .split(',')
            .map(|x| x.trim().parse::<Rat>().map_err(|e| format!("{e}")))
            .collect::<Result<_, _>>()
            .map_err(|m| CliError { exit: Exit::Usage, message: format!("--tangent: {m}") })?,
        (None, Some(t)) => json_vec(t).map_err(parse)?,
        (None, None) => return err(Exit::Usage, "no tangent line given"),
    };
    let line = Hyperplane::from_rats(&tangent).ok_or_else(|| CliError {
        exit: Exit::Usage,
        message: "tangent line has no nonzero coefficient".into(),
    })?;
    let at = a.at.or(at_v.map(|x| x as usize)).unwrap_or(0);
    let c = conic_fit(&points, &line, at).map_err(nevan_error)?;
    #[derive(Serialize)]
    struct Report<'a> {
        monomials: [&'static str; 6],
        coeffs: &'a [Rat],
        determinant: Rat,
    }
    Ok(Outcome::ok(match run.format {
        Format::Json => to_json(&Report {
            monomials: ["z0^2", "z0*z1", "z0*z2", "z1^2", "z1*z2", "z2^2"],
            coeffs: c.coeffs(),
            determinant: c.determinant(),
        }),
        Format::Table => format!("conic coefficients (z0², z0z1, z0z2, z1², z1z2, z2²): {}\n", format_rats(c.coeffs())),
    }))
}

/// Arguments to record: drop --out/--report/--threads and their values.
fn recorded_argv(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(a) = it.next() {
        if ["--out", "--report", "--threads"].contains(&a.as_str()) {
            it.next();
            continue;
        }
        if ["--out=", "--report=", "--threads="].iter().any(|p| a.starts_with(p)) {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn parameters(argv: &[String]) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut i = 0;
    while i < argv.len() {
        if let Some(k) = argv[i].strip_prefix("--") {
            if let Some((k, v)) = k.split_once('=') {
                m.insert(k.to_string(), v.to_string());
            } else if i + 1 < argv.len() && !argv[i + 1].starts_with("--") {
                m.insert(k.to_string(), argv[i + 1].clone());
                i += 1;
            } else {
                m.insert(k.to_string(), "true".into());
            }
        }
        i += 1;
    }
    m
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Check(_) => "check",
        Command::Build(_) => "build",
        Command::Verify(_) => "verify",
        Command::Obligations(_) => "obligations",
        Command::Certify(_) => "certify",
        Command::Interp(_) => "interp",
        Command::Conic(_) => "conic",
        Command::Replay(_) => "replay",
    }
}

fn output_path(c: &Command) -> Option<&Path> {
    match c {
        Command::Gen(a) => Some(&a.out),
        Command::Check(a) => a.out.as_deref(),
        Command::Build(a) => Some(&a.out),
        Command::Verify(a) => a.out.as_deref(),
        Command::Obligations(a) => a.out.as_deref(),
        Command::Certify(a) => a.out.as_deref(),
        Command::Interp(a) => a.out.as_deref(),
        Command::Conic(a) => a.out.as_deref(),
        Command::Replay(_) => None,
    }
}

fn cmd_replay(a: &ReplayArgs, format: Format) -> Result<Outcome, CliError> {
    let bytes = std::fs::read(&a.manifest)
        .map_err(|e| CliError { exit: Exit::Io, message: format!("reading {}: {e}", a.manifest.display()) })?;
    let m: RunManifest = serde_json::from_slice(&bytes)
        .map_err(|e| CliError { exit: Exit::Parse, message: format!("parsing {}: {e}", a.manifest.display()) })?;
    let mut mismatches = Vec::new();
    for (p, d) in &m.inputs {
        match std::fs::read(p) {
            Ok(b) if &sha256_hex(&b) == d => {}
            Ok(_) => mismatches.push(format!("input {p} changed")),
            Err(e) => return err(Exit::Io, format!("reading input {p}: {e}")),
        }
    }
    let dir = tempfile::tempdir().map_err(|e| CliError { exit: Exit::Io, message: e.to_string() })?;
    let mut replayed = BTreeMap::new();
    for (orig, digest) in &m.outputs {
        let tmp = dir.path().join("replay.out");
        let mut argv: Vec<OsString> = vec!["hypdeform".into()];
        argv.extend(m.argv.iter().map(OsString::from));
        argv.push("--out".into());
        argv.push(tmp.as_os_str().to_owned());
        let code = run_quiet(argv);
        if code != m.exit_code {
            mismatches.push(format!("exit code {code}, recorded {}", m.exit_code));
        }
        let got = std::fs::read(&tmp).map(|b| sha256_hex(&b)).unwrap_or_default();
        if &got != digest {
            mismatches.push(format!("output {orig} digest {got}, recorded {digest}"));
        }
        replayed.insert(orig.clone(), got);
    }
    #[derive(Serialize)]
    struct Report<'a> {
        identical: bool,
        command: &'a str,
        outputs: BTreeMap<String, String>,
        mismatches: &'a [String],
    }
    let identical = mismatches.is_empty();
    let text = match format {
        Format::Json => {
            to_json(&Report { identical, command: &m.command, outputs: replayed, mismatches: &mismatches })
        }
        Format::Table if identical => format!("replay of {}: identical\n", m.command),
        Format::Table => format!("replay of {}: {}\n", m.command, mismatches.join("; ")),
    };
    Ok(Outcome {
        text,
        exit: if identical { Exit::Ok } else { Exit::Predicate },
        diagnostic: (!identical).then(|| mismatches.join("; ")),
    })
}

fn execute(cli: &Cli, raw: &[String], quiet: bool) -> Result<Exit, CliError> {
    if let Command::Replay(a) = &cli.command {
        let o = cmd_replay(a, cli.format)?;
        if !quiet {
            print!("{}", o.text);
        }
        if let Some(d) = o.diagnostic {
            eprintln!("hypdeform: {d}");
        }
        return Ok(o.exit);
    }
    let mut run = Run { format: cli.format, max_coeff_bits: cli.max_coeff_bits, inputs: BTreeMap::new(), seeds: Vec::new() };
    let mut stdout_extra = None;
    let o = match &cli.command {
        Command::Gen(a) => {
            let (o, s) = cmd_gen(&mut run, a)?;
            stdout_extra = Some(s);
            o
        }
        Command::Check(a) => cmd_check(&mut run, a)?,
        Command::Build(a) => {
            let (o, s) = cmd_build(&mut run, a)?;
            stdout_extra = Some(s);
            o
        }
        Command::Verify(a) => cmd_verify(&mut run, a)?,
        Command::Obligations(a) => cmd_obligations(&mut run, a)?,
        Command::Certify(a) => cmd_certify(&mut run, a)?,
        Command::Interp(a) => cmd_interp(&mut run, a)?,
        Command::Conic(a) => cmd_conic(&mut run, a)?,
        Command::Replay(_) => unreachable!(),
    };
    match output_path(&cli.command) {
        Some(out) => {
            write_atomic(out, o.text.as_bytes())?;
            let argv = recorded_argv(raw);
            let mut params = parameters(&argv);
            if let Some(t) = cli.threads {
                params.insert("threads".into(), t.to_string());
            }
            let manifest = RunManifest {
                command: command_name(&cli.command).into(),
                argv,
                parameters: params,
                seeds: run.seeds.clone(),
                tool_version: TOOL_VERSION.into(),
                inputs: run.inputs.clone(),
                outputs: [(out.display().to_string(), sha256_hex(o.text.as_bytes()))].into_iter().collect(),
                exit_code: o.exit.code(),
            };
            write_atomic(&manifest_path(out), to_json(&manifest).as_bytes())?;
            if !quiet {
                match stdout_extra {
                    Some(s) => print!("{s}"),
                    None if cli.format == Format::Table => print!("{}", o.text),
                    None => {}
                }
            }
        }
        None => {
            if !quiet {
                print!("{}", o.text);
            }
        }
    }
    if let Some(d) = o.diagnostic {
        eprintln!("hypdeform: {d}");
    }
    Ok(o.exit)
}

fn dispatch(args: Vec<OsString>, quiet: bool) -> i32 {
    let raw: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => Exit::Usage.code(),
            };
            let _ = e.print();
            return code;
        }
    };
    let body = || match execute(&cli, &raw, quiet) {
        Ok(x) => x.code(),
        Err(e) => {
            eprintln!("hypdeform: {}", e.message);
            e.exit.code()
        }
    };
    match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(body),
            Err(e) => {
                eprintln!("hypdeform: thread pool: {e}");
                Exit::Usage.code()
            }
        },
        None => body(),
    }
}

fn run_quiet(args: Vec<OsString>) -> i32 {
    dispatch(args, true)
}

/// Entry point; the first element is the program name. Returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    dispatch(args.into_iter().collect(), false)
}
