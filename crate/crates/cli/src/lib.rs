//! Command-line front end for the `adic` engine.
//!
//! [`run`] takes the full argument vector and returns the exit code with the
//! text destined for stdout and stderr, so the binary is a thin wrapper and
//! tests can drive every command in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use adic::decay::{hom_apply, series_sum, DecayStream, TermOracle};
use adic::gallery::{self, GalleryReport};
use adic::lift::{basis_lift, nakayama_lift, AdicSystem};
use adic::{
    parse_poly, theorem6_check, AdicIdeal, Error, Field, ModulePresentation, OrderValue, Polynomial, StreamSpec,
    TowerElement, WitnessStrategy,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Exit status plus captured output of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "adic", version, about = "Exact computations in adic completions at finite truncation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Coefficient field: `Q` or `Fp <p>`.
    #[arg(long, default_value = "Q")]
    field: String,
    /// Adic ideal, e.g. `vars t1, t2`, `vars *`, or `gens t1^2 - t2; t1*t2`.
    #[arg(long)]
    ideal: Option<String>,
    /// Deepest truncation level inspected.
    #[arg(long, default_value_t = 8)]
    cap: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Adic order of an element or of the sum of a stream.
    Ord {
        #[command(flatten)]
        common: Common,
        /// Presentation file; the element is a comma-separated coordinate list.
        #[arg(long)]
        module: Option<PathBuf>,
        /// Stream whose series sum is measured instead of an element.
        #[arg(long)]
        stream: Option<String>,
        /// Certify the order in the completion by killing t1..tn for n <= N.
        #[arg(long)]
        kill: Option<usize>,
        #[arg(allow_hyphen_values = true)]
        expr: Option<String>,
    },
    /// Adic distance between two elements (the second defaults to 0).
    Dist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long)]
        kill: Option<usize>,
        #[arg(allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// Normal form modulo a^(level+1).
    Nf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long)]
        level: usize,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Truncations of the series sum of a stream at levels <= cap.
    Sum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        stream: String,
    },
    /// Applies the homomorphism g -> sum_z g(z) m_z to a ring stream.
    Hom {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: PathBuf,
        /// One module element per line: the family m_0, m_1, ...
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        stream: String,
    },
    /// Writes an element as a combination of a family, level by level.
    Nakayama {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Lifts a basis through an adic system file and verifies flatness.
    BasisLift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: PathBuf,
    },
    /// Verification commands.
    Check {
        #[command(subcommand)]
        what: Check,
    },
    /// Runs the verification gallery.
    Gallery {
        #[arg(long, default_value_t = 8)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a single item, e.g. `example7`.
        #[arg(long)]
        only: Option<String>,
    },
    /// Parses and prints canonically.
    Parse {
        #[arg(long, default_value = "Q")]
        field: String,
        /// Treat the input as a stream.
        #[arg(long)]
        stream: bool,
        /// Treat the input as an ideal spec.
        #[arg(long)]
        ideal: bool,
        /// Print a presentation or adic system file instead.
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(allow_hyphen_values = true)]
        text: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Check {
    /// The completeness criterion at every level <= cap.
    Thm6 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: PathBuf,
        /// Extra truncation depth inspected past each level.
        #[arg(long, default_value_t = 1)]
        extra: usize,
    },
}

/// Why a command stopped.
enum Failure {
    /// Exit 1: the computation ran and a verification failed.
    Verify(String),
    /// Exit 2: bad usage, input or files.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse { .. }
            | Error::Format { .. }
            | Error::InvalidField(_)
            | Error::DomainMismatch(..)
            | Error::Precondition(_)
            | Error::Unsupported(_)
            | Error::CapTooSmall { .. }
            | Error::DegreeCapExceeded { .. } => Failure::Usage(e.to_string()),
            other => Failure::Verify(other.to_string()),
        }
    }
}

type CmdResult = Result<String, Failure>;

/// Parse errors get the input echoed with a caret under the offset.
fn parse_failure(input: &str, base: usize, e: Error) -> Failure {
    match e {
        Error::Parse { offset, expected } => {
            let at = base + offset;
            let e = Error::Parse { offset: at, expected };
            Failure::Usage(format!("{e}\n  {input}\n  {}^", " ".repeat(at)))
        }
        other => other.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn field(text: &str) -> Result<Field, Failure> {
    text.parse::<Field>().map_err(Failure::from)
}

fn poly(text: &str, field: Field) -> Result<Polynomial, Failure> {
    parse_poly(text, field).map_err(|e| parse_failure(text, 0, e))
}

/// Comma-separated coordinates; error offsets refer to the whole input.
fn element(text: &str, field: Field, rank: usize) -> Result<Vec<Polynomial>, Failure> {
    let mut coords = Vec::new();
    let mut base = 0;
    for part in text.split(',') {
        let lead = part.len() - part.trim_start().len();
        coords.push(parse_poly(part.trim(), field).map_err(|e| parse_failure(text, base + lead, e))?);
        base += part.len() + 1;
    }
    if coords.len() != rank {
        return Err(Failure::Usage(format!("expected {rank} coordinates, found {}", coords.len())));
    }
    Ok(coords)
}

fn stream_spec(text: &str, field: Field) -> Result<StreamSpec, Failure> {
    StreamSpec::parse(text, field).map_err(|e| parse_failure(text, 0, e))
}

impl Common {
    fn field(&self) -> Result<Field, Failure> {
        field(&self.field)
    }

    fn ideal(&self, field: Field, fallback: Option<AdicIdeal>) -> Result<AdicIdeal, Failure> {
        match &self.ideal {
            Some(s) => AdicIdeal::parse(s, field).map_err(|e| parse_failure(s, 0, e)),
            None => fallback.ok_or_else(|| Failure::Usage("no ideal given; pass --ideal".into())),
        }
    }

    /// The presentation from `--module`, or the ring over `--ideal`.
    fn module(&self, path: Option<&Path>, fallback: Option<AdicIdeal>) -> Result<ModulePresentation, Failure> {
        match path {
            Some(p) => {
                let m = ModulePresentation::parse(&read(p)?)?;
                if self.ideal.is_some() {
                    return Err(Failure::Usage("--ideal conflicts with the ideal in --module".into()));
                }
                Ok(m)
            }
            None => {
                let f = self.field()?;
                Ok(ModulePresentation::ring(f, self.ideal(f, fallback)?))
            }
        }
    }

    fn ring_stream(&self, text: &str) -> Result<DecayStream, Failure> {
        let spec = stream_spec(text, self.field()?)?;
        let ideal = self.ideal(spec.field(), spec.default_ideal())?;
        Ok(spec.to_stream(Arc::new(ModulePresentation::ring(spec.field(), ideal)))?)
    }
}

/// The measured tower: a stream sum or a module element.
fn subject(
    common: &Common,
    module: Option<&Path>,
    stream: Option<&str>,
    expr: Option<&str>,
) -> Result<TowerElement, Failure> {
    match (stream, expr) {
        (Some(s), None) => Ok(series_sum(&common.ring_stream(s)?, common.cap)?),
        (None, Some(e)) => {
            let m = Arc::new(common.module(module, None)?);
            Ok(TowerElement::from_element(element(e, m.field(), m.rank())?, m)?)
        }
        (Some(_), Some(_)) => Err(Failure::Usage("give either --stream or an expression, not both".into())),
        (None, None) => Err(Failure::Usage("nothing to measure: give an expression or --stream".into())),
    }
}

fn order(x: &TowerElement, cap: usize, kill: Option<usize>) -> Result<OrderValue, Failure> {
    if !x.module().is_finitely_generated_ideal() {
        if let Some(n) = kill {
            let (lo, hi) = x.ord_adic_bounds(cap, WitnessStrategy::SubstitutionKill { max_kill: n })?;
            if lo != hi {
                return Err(Failure::Verify(format!("order only bounded: between {lo} and {hi}")));
            }
            return Ok(lo);
        }
    } else if let Some(src) = x.source() {
        return Ok(x.module().ord_module(src, cap)?);
    }
    Ok(x.ord_prime(cap)?)
}

fn cmd_ord(
    common: &Common,
    module: Option<&Path>,
    stream: Option<&str>,
    kill: Option<usize>,
    expr: Option<&str>,
) -> CmdResult {
    let x = subject(common, module, stream, expr)?;
    Ok(format!("{}\n", order(&x, common.cap, kill)?))
}

fn cmd_dist(
    common: &Common,
    module: Option<&Path>,
    stream: Option<&str>,
    kill: Option<usize>,
    exprs: &[String],
) -> CmdResult {
    let (first, second) = match (stream, exprs) {
        (Some(_), []) => (None, None),
        (Some(_), [b]) => (None, Some(b.as_str())),
        (None, [a]) => (Some(a.as_str()), None),
        (None, [a, b]) => (Some(a.as_str()), Some(b.as_str())),
        _ => return Err(Failure::Usage("dist takes one or two elements (or --stream and at most one)".into())),
    };
    let x = subject(common, module, stream, first)?;
    let y = match second {
        Some(b) => TowerElement::from_element(element(b, x.module().field(), x.module().rank())?, x.module().clone())?,
        None => TowerElement::zero(x.module().clone()),
    };
    let o = order(&x.sub(&y)?, common.cap, kill)?;
    Ok(format!("{}\n", o.distance()))
}

fn cmd_nf(common: &Common, module: Option<&Path>, level: usize, expr: &str) -> CmdResult {
    let m = common.module(module, None)?;
    let v = element(expr, m.field(), m.rank())?;
    Ok(format!("{}\n", m.truncate(&v, level)?))
}

fn print_levels(x: &TowerElement, cap: usize) -> CmdResult {
    let mut out = String::new();
    for i in 0..=cap {
        writeln!(out, "{i}: {}", x.project(i)?).unwrap();
    }
    Ok(out)
}

fn cmd_sum(common: &Common, stream: &str) -> CmdResult {
    let s = common.ring_stream(stream)?;
    print_levels(&series_sum(&s, common.cap)?, common.cap)
}

/// One element per nonblank line; `#` starts a comment.
fn family(path: &Path, m: &Arc<ModulePresentation>) -> Result<Vec<TowerElement>, Failure> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let v = element(line, m.field(), m.rank()).map_err(|f| match f {
            Failure::Usage(msg) | Failure::Verify(msg) => {
                Failure::Usage(format!("{}:{}: {msg}", path.display(), n + 1))
            }
        })?;
        out.push(TowerElement::from_element(v, m.clone())?);
    }
    Ok(out)
}

fn cmd_hom(common: &Common, module: &Path, gens: &Path, stream: &str) -> CmdResult {
    let m = Arc::new(ModulePresentation::parse(&read(module)?)?);
    let fam = family(gens, &m)?;
    let spec = stream_spec(stream, m.field())?;
    let g = spec.to_stream(Arc::new(ModulePresentation::ring(m.field(), m.ideal().clone())))?;
    let zero = TowerElement::zero(m.clone());
    let oracle: TermOracle = Arc::new(move |z| Ok(fam.get(z).cloned().unwrap_or_else(|| zero.clone())));
    print_levels(&hom_apply(&g, m, oracle, common.cap)?, common.cap)
}

fn cmd_nakayama(common: &Common, module: &Path, gens: &Path, expr: &str) -> CmdResult {
    let m = Arc::new(ModulePresentation::parse(&read(module)?)?);
    let fam = family(gens, &m)?;
    let x = TowerElement::from_element(element(expr, m.field(), m.rank())?, m.clone())?;
    let lift = nakayama_lift(&x, &fam, common.cap)?;
    let mut out = String::new();
    for (z, c) in lift.coefficients.iter().enumerate() {
        writeln!(out, "g({z}) = {c}").unwrap();
    }
    if !lift.succeeded() {
        let bad: Vec<usize> = (0..=common.cap).filter(|&i| !lift.residual_zero[i]).collect();
        return Err(Failure::Verify(format!("{out}residual nonzero at levels {bad:?}")));
    }
    writeln!(out, "residual: 0 at levels 0..={}", common.cap).unwrap();
    Ok(out)
}

fn cmd_basis_lift(common: &Common, module: &Path) -> CmdResult {
    let system = AdicSystem::parse(&read(module)?)?;
    let cap = common.cap.min(system.len().saturating_sub(1));
    let b = basis_lift(&system, cap)?;
    let mut out = String::new();
    writeln!(out, "rank: {}", b.rank).unwrap();
    for (k, e) in b.basis.iter().enumerate() {
        let levels: Vec<String> = e.levels.iter().map(|v| adic::poly::fmt_vector(v)).collect();
        writeln!(out, "b{}: {}", k + 1, levels.join(" <- ")).unwrap();
    }
    for c in &b.checks {
        writeln!(out, "level {}: dim M_i = {} = {} x {}, inverse verified", c.level, c.module_dim, b.rank, c.ring_dim)
            .unwrap();
    }
    Ok(out)
}

fn cmd_thm6(common: &Common, module: &Path, extra: usize) -> CmdResult {
    let m = ModulePresentation::parse(&read(module)?)?;
    let mut out = String::new();
    let mut ok = true;
    for level in 0..=common.cap {
        let r = theorem6_check(&m, level, extra)?;
        ok &= r.passed();
        match r.witness {
            None => writeln!(out, "PASS level {level} (depth {})", r.depth).unwrap(),
            Some(w) => writeln!(out, "FAIL level {level}: {w}").unwrap(),
        }
    }
    if ok {
        Ok(out)
    } else {
        Err(Failure::Verify(out))
    }
}

fn report(r: GalleryReport) -> CmdResult {
    if r.passed() {
        Ok(format!("{r}\n"))
    } else {
        // The report goes to stdout either way; the exit code carries the verdict.
        Err(Failure::Verify(format!("{r}\n")))
    }
}

fn cmd_gallery(cap: usize, seed: u64, only: Option<&str>) -> CmdResult {
    let r = match only {
        Some(id) => gallery::run_selected(cap, seed, &[id])?,
        None => gallery::run_all(cap, seed)?,
    };
    report(r)
}

fn cmd_parse(field_name: &str, stream: bool, ideal: bool, module: Option<&Path>, text: Option<&str>) -> CmdResult {
    let f = field(field_name)?;
    if let Some(p) = module {
        let body = read(p)?;
        return match ModulePresentation::parse(&body) {
            Ok(m) => Ok(m.to_string()),
            Err(first) => AdicSystem::parse(&body).map(|s| s.to_string()).map_err(|_| first.into()),
        };
    }
    let text = text.ok_or_else(|| Failure::Usage("nothing to parse".into()))?;
    match (stream, ideal) {
        (true, true) => Err(Failure::Usage("--stream and --ideal are exclusive".into())),
        (true, false) => Ok(format!("{}\n", stream_spec(text, f)?)),
        (false, true) => Ok(format!("{}\n", AdicIdeal::parse(text, f).map_err(|e| parse_failure(text, 0, e))?)),
        (false, false) => Ok(format!("{}\n", poly(text, f)?)),
    }
}

fn dispatch(cmd: &Command) -> (CmdResult, bool) {
    let res = match cmd {
        Command::Ord { common, module, stream, kill, expr } => {
            cmd_ord(common, module.as_deref(), stream.as_deref(), *kill, expr.as_deref())
        }
        Command::Dist { common, module, stream, kill, exprs } => {
            cmd_dist(common, module.as_deref(), stream.as_deref(), *kill, exprs)
        }
        Command::Nf { common, module, level, expr } => cmd_nf(common, module.as_deref(), *level, expr),
        Command::Sum { common, stream } => cmd_sum(common, stream),
        Command::Hom { common, module, gens, stream } => cmd_hom(common, module, gens, stream),
        Command::Nakayama { common, module, gens, expr } => cmd_nakayama(common, module, gens, expr),
        Command::BasisLift { common, module } => cmd_basis_lift(common, module),
        Command::Check { what: Check::Thm6 { common, module, extra } } => cmd_thm6(common, module, *extra),
        Command::Gallery { cap, seed, only } => cmd_gallery(*cap, *seed, only.as_deref()),
        Command::Parse { field, stream, ideal, module, text } => {
            cmd_parse(field, *stream, *ideal, module.as_deref(), text.as_deref())
        }
    };
    // Reports belong on stdout even when they fail.
    let report_on_stdout = matches!(cmd, Command::Gallery { .. } | Command::Check { .. });
    (res, report_on_stdout)
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli.command) {
        (Ok(stdout), _) => Outcome { code: 0, stdout, stderr: String::new() },
        (Err(Failure::Verify(msg)), true) => Outcome { code: 1, stdout: msg, stderr: String::new() },
        (Err(Failure::Verify(msg)), false) => {
            Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
        (Err(Failure::Usage(msg)), _) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}
