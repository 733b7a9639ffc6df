//! The `siphons` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::arith::{conservation_basis, format_rational, parse_rational, RationalVector};
use crate::cas::{export_cas_script, CasFlavor, CasOptions};
use crate::dynamics::{build_rhs, check_face_invariance, check_steady_face, CheckOutcome, MassActionSystem};
use crate::geometry::{face_dimension, network_cone, vertex_supports, InvariantPolytope};
use crate::network::{parse_network, ReactionNetwork};
use crate::relevance::{analyze, AnalysisOptions, RelevanceContext, RelevanceError, Witness};
use crate::report::{render_text, JsonReport};
use crate::set::IndexSet;
use crate::siphons::{
    brute_force_minimal_siphons, count_minimal_siphons, minimal_siphons, EnumConfig, SiphonError,
    SizeHistogram,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<RelevanceError> for CliError {
    fn from(e: RelevanceError) -> Self {
        match e {
            RelevanceError::RouteDisagreement(_) => CliError::Invariant(e.to_string()),
            RelevanceError::Enumeration(SiphonError::BudgetExceeded { .. }) => {
                CliError::Budget(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "siphons", version, about = "Siphons, conservation laws and boundary steady states of reaction networks")]
pub struct Cli {
    /// Time budget for siphon enumeration in milliseconds (overrides SIPHON_BUDGET_MS).
    #[arg(long, global = true)]
    pub budget_ms: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a network and print it in canonical form.
    Parse { network: PathBuf },
    /// Enumerate minimal siphons.
    Siphons(SiphonsArgs),
    /// Facets of the cone of conservation-law columns.
    Facets { network: PathBuf },
    /// Vertex supports of the invariant polyhedron through c0.
    Vertices {
        network: PathBuf,
        #[command(flatten)]
        c0: C0Args,
    },
    /// Relevance of the minimal siphons (or of one given siphon).
    Relevance(RelevanceArgs),
    /// Dimension of the face of the invariant polyhedron cut out by a siphon.
    FaceDim {
        network: PathBuf,
        #[command(flatten)]
        c0: C0Args,
        #[arg(long)]
        siphon: String,
    },
    /// Full analysis report.
    Analyze(AnalyzeArgs),
    /// Print the mass-action right-hand side.
    Ode {
        network: PathBuf,
        /// File with `reaction_index rate` lines (0-based indices).
        #[arg(long)]
        kappa: PathBuf,
    },
    /// Randomized exact check that a siphon face is forward-invariant.
    InvarianceCheck {
        network: PathBuf,
        #[arg(long)]
        siphon: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also check that the face consists of steady states.
        #[arg(long)]
        steady: bool,
    },
    /// Macaulay2 script for the ideal-theoretic computation.
    ExportCas {
        network: PathBuf,
        #[arg(long, default_value = "ig")]
        flavor: CasFlavor,
        #[arg(long)]
        lowercase: bool,
    },
}

#[derive(Debug, Args)]
pub struct SiphonsArgs {
    pub network: PathBuf,
    /// List every minimal siphon (the default).
    #[arg(long)]
    pub minimal: bool,
    /// Print only the total.
    #[arg(long)]
    pub count_only: bool,
    /// Print the size histogram.
    #[arg(long)]
    pub histogram: bool,
    /// Use literal subset enumeration.
    #[arg(long)]
    pub brute_force: bool,
}

#[derive(Debug, Args, Default)]
pub struct C0Args {
    /// Initial condition as comma-separated rationals in species order.
    #[arg(long)]
    pub c0: Option<String>,
    /// Initial condition entry `name=value`; repeat for every species.
    #[arg(long = "assign")]
    pub assign: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RelevanceArgs {
    pub network: PathBuf,
    #[command(flatten)]
    pub c0: C0Args,
    /// File of sample initial conditions, one per line.
    #[arg(long, conflicts_with_all = ["c0", "assign"])]
    pub omega: Option<PathBuf>,
    /// Query one siphon instead of all minimal siphons.
    #[arg(long)]
    pub siphon: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub network: PathBuf,
    #[command(flatten)]
    pub c0: C0Args,
    #[arg(long)]
    pub omega: Option<PathBuf>,
    /// File of species permutations, one per line, for orbit grouping.
    #[arg(long)]
    pub symmetry: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_network(path: &Path) -> Result<ReactionNetwork, CliError> {
    parse_network(&read(path)?).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Comma-separated rationals; decimals are rejected.
pub fn parse_c0_list(text: &str, s: usize) -> Result<RationalVector, String> {
    let v: RationalVector = text
        .split(',')
        .map(|t| parse_rational(t).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if v.len() != s {
        return Err(format!("expected {s} values, got {}", v.len()));
    }
    Ok(v)
}

fn parse_assignments(net: &ReactionNetwork, items: &[String]) -> Result<RationalVector, String> {
    let s = net.num_species();
    let mut v: Vec<Option<_>> = vec![None; s];
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, got `{item}`"))?;
        let i = net
            .species()
            .index_of(name.trim())
            .ok_or_else(|| format!("unknown species `{}`", name.trim()))?;
        v[i] = Some(parse_rational(value).map_err(|e| e.to_string())?);
    }
    v.into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| format!("no value for species {}", net.species().name(i))))
        .collect()
}

fn c0_of(net: &ReactionNetwork, args: &C0Args) -> Result<Option<RationalVector>, CliError> {
    match (&args.c0, args.assign.is_empty()) {
        (Some(_), false) => Err(CliError::Usage("give either --c0 or --assign".into())),
        (Some(t), true) => parse_c0_list(t, net.num_species())
            .map(Some)
            .map_err(|e| CliError::Usage(format!("--c0: {e}"))),
        (None, false) => parse_assignments(net, &args.assign)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("--assign: {e}"))),
        (None, true) => Ok(None),
    }
}

fn require_c0(net: &ReactionNetwork, args: &C0Args) -> Result<RationalVector, CliError> {
    c0_of(net, args)?.ok_or_else(|| CliError::Usage("an initial condition (--c0 or --assign) is required".into()))
}

fn parse_error(path: &Path, line: usize, message: impl std::fmt::Display) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        message: format!("line {line}: {message}"),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One initial condition per line.
pub fn load_omega(net: &ReactionNetwork, path: &Path) -> Result<Vec<RationalVector>, CliError> {
    let text = read(path)?;
    content_lines(&text)
        .map(|(n, l)| parse_c0_list(l, net.num_species()).map_err(|e| parse_error(path, n, e)))
        .collect()
}

/// `reaction_index rate` per line; every reaction needs a rate.
pub fn load_kappa(net: &ReactionNetwork, path: &Path) -> Result<RationalVector, CliError> {
    let text = read(path)?;
    let m = net.reactions().len();
    let mut kappa = vec![None; m];
    for (n, l) in content_lines(&text) {
        let mut parts = l.split_whitespace();
        let (Some(idx), Some(rate), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_error(path, n, "expected `reaction_index rate`"));
        };
        let idx: usize = idx
            .parse()
            .ok()
            .filter(|&i| i < m)
            .ok_or_else(|| parse_error(path, n, format!("reaction index must be below {m}")))?;
        kappa[idx] = Some(parse_rational(rate).map_err(|e| parse_error(path, n, e))?);
    }
    kappa
        .into_iter()
        .enumerate()
        .map(|(i, k)| k.ok_or_else(|| parse_error(path, 0, format!("no rate for reaction {i}"))))
        .collect()
}

/// One permutation per line: the images of the species in declaration order.
pub fn load_symmetries(net: &ReactionNetwork, path: &Path) -> Result<Vec<Vec<usize>>, CliError> {
    let text = read(path)?;
    content_lines(&text)
        .map(|(n, l)| {
            let perm: Vec<usize> = l
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    net.species()
                        .index_of(t)
                        .ok_or_else(|| parse_error(path, n, format!("unknown species `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            if perm.len() != net.num_species() {
                return Err(parse_error(path, n, "permutation must list every species once"));
            }
            Ok(perm)
        })
        .collect()
}

fn parse_siphon_arg(net: &ReactionNetwork, text: &str) -> Result<IndexSet, CliError> {
    net.species()
        .parse_set(text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()))
        .map_err(CliError::Usage)
}

fn enum_config(cli: &Cli) -> EnumConfig {
    let ms = cli.budget_ms.or_else(|| {
        std::env::var("SIPHON_BUDGET_MS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    EnumConfig {
        max_results: None,
        time_limit: ms.map(Duration::from_millis),
    }
}

fn budget_error(e: SiphonError) -> CliError {
    match e {
        SiphonError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn write_histogram(out: &mut dyn Write, h: &SizeHistogram, with_rows: bool) -> std::io::Result<()> {
    writeln!(out, "total {}", h.total)?;
    if with_rows {
        for (size, count) in &h.by_size {
            writeln!(out, "{size} {count}")?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("write failed: {e}"));
    match &cli.command {
        Command::Parse { network } => {
            let net = load_network(network)?;
            write!(out, "{}", net.to_canonical_text()).map_err(io)?;
        }
        Command::Siphons(a) => {
            let net = load_network(&a.network)?;
            let cfg = enum_config(cli);
            let sets: Vec<IndexSet> = if a.brute_force {
                brute_force_minimal_siphons(&net).map_err(budget_error)?
            } else if a.count_only {
                let h = count_minimal_siphons(&net, &cfg).map_err(budget_error)?;
                return write_histogram(out, &h, a.histogram).map_err(io);
            } else {
                minimal_siphons(&net, &cfg)
                    .map_err(budget_error)?
                    .into_iter()
                    .map(|z| z.members().clone())
                    .collect()
            };
            if a.count_only || a.histogram {
                write_histogram(out, &SizeHistogram::of(&sets), a.histogram).map_err(io)?;
            }
            if !a.count_only {
                for z in &sets {
                    writeln!(out, "{}", net.species().format_set(z)).map_err(io)?;
                }
            }
        }
        Command::Facets { network } => {
            let net = load_network(network)?;
            let cone = network_cone(&net);
            writeln!(out, "dimension {}", cone.dim).map_err(io)?;
            match &cone.facets {
                None => writeln!(out, "not pointed").map_err(io)?,
                Some(fs) => {
                    for f in fs {
                        writeln!(
                            out,
                            "facet {} | complement {} | normal {}",
                            net.species().format_set(&f.generators),
                            net.species().format_set(&f.complement(net.num_species())),
                            f.normal.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
                        )
                        .map_err(io)?;
                    }
                }
            }
        }
        Command::Vertices { network, c0 } => {
            let net = load_network(network)?;
            let p = InvariantPolytope::for_network(&net, require_c0(&net, c0)?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            for v in vertex_supports(&p) {
                writeln!(out, "{}", net.species().format_set(&v)).map_err(io)?;
            }
        }
        Command::Relevance(a) => relevance(cli, a, out)?,
        Command::FaceDim { network, c0, siphon } => {
            let net = load_network(network)?;
            let z = parse_siphon_arg(&net, siphon)?;
            crate::siphons::is_siphon(&net, &z).map_err(|e| CliError::Usage(e.to_string()))?;
            let p = InvariantPolytope::for_network(&net, require_c0(&net, c0)?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            match face_dimension(&p, &z) {
                Some(d) => writeln!(out, "{d}").map_err(io)?,
                None => writeln!(out, "empty").map_err(io)?,
            }
        }
        Command::Analyze(a) => {
            let net = load_network(&a.network)?;
            let opts = AnalysisOptions {
                c0: c0_of(&net, &a.c0)?,
                omega: a.omega.as_ref().map(|p| load_omega(&net, p)).transpose()?.unwrap_or_default(),
                symmetries: a
                    .symmetry
                    .as_ref()
                    .map(|p| load_symmetries(&net, p))
                    .transpose()?
                    .unwrap_or_default(),
                enumeration: enum_config(cli),
            };
            let report = analyze(&net, &opts)?;
            match a.format {
                OutputFormat::Json => {
                    let json = serde_json::to_string_pretty(&JsonReport::from_report(&report, a.timing))
                        .expect("report serializes");
                    writeln!(out, "{json}").map_err(io)?;
                }
                OutputFormat::Text => write!(out, "{}", render_text(&report)).map_err(io)?,
            }
            if !report.complete {
                return Err(CliError::Budget("siphon enumeration incomplete".into()));
            }
        }
        Command::Ode { network, kappa } => {
            let net = load_network(network)?;
            let k = load_kappa(&net, kappa)?;
            let sys = MassActionSystem::new(&net, k).map_err(|e| CliError::Usage(e.to_string()))?;
            write!(out, "{}", build_rhs(&sys).format(&net)).map_err(io)?;
        }
        Command::InvarianceCheck {
            network,
            siphon,
            trials,
            seed,
            steady,
        } => {
            let net = load_network(network)?;
            let z = parse_siphon_arg(&net, siphon)?;
            let run = |f: fn(&ReactionNetwork, &IndexSet, usize, u64) -> Result<CheckOutcome, _>,
                       what: &str,
                       out: &mut dyn Write|
             -> Result<(), CliError> {
                let outcome: CheckOutcome = f(&net, &z, *trials, *seed)
                    .map_err(|e: crate::dynamics::DynamicsError| CliError::Usage(e.to_string()))?;
                match outcome {
                    CheckOutcome::Pass { trials } => {
                        writeln!(out, "{what}: pass ({trials} trials)").map_err(io)
                    }
                    other => Err(CliError::Invariant(format!("{what}: {other:?}"))),
                }
            };
            run(check_face_invariance, "face invariance", out)?;
            if *steady {
                run(check_steady_face, "steady face", out)?;
            }
        }
        Command::ExportCas {
            network,
            flavor,
            lowercase,
        } => {
            let net = load_network(network)?;
            let opts = CasOptions {
                flavor: *flavor,
                lowercase: *lowercase,
            };
            write!(out, "{}", export_cas_script(&net, &opts)).map_err(io)?;
        }
    }
    Ok(())
}

fn relevance(cli: &Cli, a: &RelevanceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("write failed: {e}"));
    let net = load_network(&a.network)?;
    let basis = conservation_basis(&net);
    let samples: Vec<RationalVector> = match (&a.omega, c0_of(&net, &a.c0)?) {
        (Some(p), _) => load_omega(&net, p)?,
        (None, Some(c)) => vec![c],
        (None, None) => Vec::new(),
    };
    let polys: Vec<InvariantPolytope> = samples
        .into_iter()
        .map(|c| InvariantPolytope::new(&basis, c).map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    let ctx = RelevanceContext::new(&net);
    let sets: Vec<IndexSet> = match &a.siphon {
        Some(t) => vec![parse_siphon_arg(&net, t)?],
        None => minimal_siphons(&net, &enum_config(cli))
            .map_err(budget_error)?
            .into_iter()
            .map(|z| z.members().clone())
            .collect(),
    };
    for z in &sets {
        let v = if polys.is_empty() {
            ctx.checked(z)?
        } else {
            ctx.omega(&polys, z)?
        };
        if !ctx.verify(&v, &polys) {
            return Err(CliError::Invariant(format!("witness for {:?} failed to verify", z)));
        }
        let mut line = format!(
            "{}: {}",
            net.species().format_set(z),
            if v.relevant { "relevant" } else { "not relevant" }
        );
        match &v.witness {
            Witness::ConservationLaw(l) => {
                line.push_str(&format!(
                    " (law {})",
                    l.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
                ));
            }
            Witness::FacePoint { sample, point } => {
                line.push_str(&format!(
                    " (sample {sample}, point {})",
                    point.iter().map(format_rational).collect::<Vec<_>>().join(",")
                ));
            }
            _ => {}
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("SIPHON_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    configure_threads();
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
