use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use khknot::audit::{
    alexander, audit_table, infer_s, max_knight_matching, unknotting_bound_from_certificates, AuditError,
    FoxMilnor, KnightMoveReport,
};
use khknot::grading::{kauffman_jones, poincare_series, BracketError, TableError};
use khknot::khcomplex::{khovanov_homology_with_budget, ComplexError, DEFAULT_MAX_DIRECT};
use khknot::knotio::{catalog_entry, catalog_names, from_braid, parse_pd, DiagramError};
use khknot::lee::{decomposition_from_pages, lee_with_budget, LeeError};
use khknot::scan::{scan_with, ScanBudget, ScanError, ScanOptions};
use khknot::{Bigrading, Diagram, DimTable, Rat};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_INVARIANT: u8 = 6;

#[derive(Parser)]
#[command(name = "khtool", version, about = "Khovanov homology, Lee pages and knight-move audits")]
struct Cli {
    /// Worker threads for batch mode (default: all cores).
    #[arg(long, global = true, env = "KHTOOL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Khovanov homology table.
    Kh(KhArgs),
    /// Lee spectral sequence pages, s and the decomposition.
    Lee(KhArgs),
    /// Knight-move audit with forced higher differentials.
    Audit(AuditArgs),
    /// Alexander polynomial and Fox-Milnor test.
    Alexander(InputArgs),
    /// Unnormalized Jones polynomial (Kauffman bracket).
    Jones(InputArgs),
    /// Audit every .pd file in a directory; CSV summary.
    Batch(BatchArgs),
    /// List catalog entries, or print one as PD.
    Catalog { name: Option<String> },
}

#[derive(Args, Clone, Default)]
struct InputArgs {
    /// Bundled catalog entry.
    #[arg(long, group = "input")]
    catalog: Option<String>,
    /// PD file.
    #[arg(long, group = "input")]
    pd: Option<PathBuf>,
    /// Braid word, e.g. "1,-2,1".
    #[arg(long, group = "input", requires = "strands", allow_hyphen_values = true)]
    braid: Option<String>,
    #[arg(long)]
    strands: Option<usize>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Grid,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct ComputeArgs {
    #[arg(long, value_enum, default_value_t = Format::Grid)]
    format: Format,
    /// Largest crossing count handled by the direct cube; larger diagrams are scanned.
    #[arg(long, default_value_t = DEFAULT_MAX_DIRECT, value_parser = positive_usize)]
    max_direct: usize,
    /// Scan checkpoint file (saved every step, resumed when present).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Scan memory budget in MB.
    #[arg(long, value_parser = positive_usize)]
    budget_mem: Option<usize>,
    /// Scan time budget in seconds.
    #[arg(long, value_parser = positive_f64)]
    budget_time: Option<f64>,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Args, Clone)]
struct KhArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    compute: ComputeArgs,
}

#[derive(Args, Clone)]
struct AuditArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    compute: ComputeArgs,
    /// Imported table (DimTable JSON, or CSV by extension) instead of a diagram.
    #[arg(long, conflicts_with_all = ["catalog", "pd", "braid"])]
    table: Option<PathBuf>,
    /// Rasmussen s (even); required with --table.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<i64>,
}

#[derive(Args, Clone)]
struct BatchArgs {
    dir: PathBuf,
    #[command(flatten)]
    compute: ComputeArgs,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        CliError { code, msg: msg.into() }
    }
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        let code = match e {
            DiagramError::Malformed(_) | DiagramError::Empty => EXIT_PARSE,
            _ => EXIT_VALIDATION,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        let code = match e {
            ComplexError::Budget { .. } => EXIT_BUDGET,
            ComplexError::NotAKnot(_) | ComplexError::Length { .. } => EXIT_VALIDATION,
            ComplexError::Homology(_) => EXIT_INVARIANT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        let code = match e {
            ScanError::Budget { .. } => EXIT_BUDGET,
            ScanError::NotAKnot(_) => EXIT_VALIDATION,
            ScanError::Checkpoint(_) => EXIT_IO,
            ScanError::Invariant(_) | ScanError::NotInvertible(..) => EXIT_INVARIANT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<LeeError> for CliError {
    fn from(e: LeeError) -> Self {
        match e {
            LeeError::Complex(c @ ComplexError::Budget { .. }) => CliError::new(
                EXIT_BUDGET,
                format!("{c}; Lee pages need the direct cube, use `audit` for a table-level analysis"),
            ),
            LeeError::Complex(c) => c.into(),
            other => CliError::new(EXIT_INVARIANT, other.to_string()),
        }
    }
}

impl From<AuditError> for CliError {
    fn from(e: AuditError) -> Self {
        CliError::new(EXIT_VALIDATION, e.to_string())
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        CliError::new(EXIT_PARSE, e.to_string())
    }
}

impl From<BracketError> for CliError {
    fn from(e: BracketError) -> Self {
        CliError::new(EXIT_BUDGET, e.to_string())
    }
}

type Res<T> = Result<T, CliError>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_diagram(input: &InputArgs) -> Res<(String, Diagram)> {
    if let Some(name) = &input.catalog {
        let e = catalog_entry(name)?;
        return Ok((e.name.to_string(), parse_pd(e.text)?));
    }
    if let Some(p) = &input.pd {
        return Ok((p.display().to_string(), parse_pd(&read(p)?)?));
    }
    if let (Some(w), Some(n)) = (&input.braid, input.strands) {
        let word = w
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i32>().map_err(|_| CliError::new(EXIT_PARSE, format!("bad braid letter `{t}`"))))
            .collect::<Res<Vec<_>>>()?;
        return Ok((format!("braid {w}"), from_braid(&word, n)?));
    }
    Err(CliError::new(EXIT_VALIDATION, "one of --catalog, --pd or --braid is required"))
}

fn compute_table(d: &Diagram, c: &ComputeArgs) -> Res<DimTable> {
    d.require_knot()?;
    if d.crossing_count() <= c.max_direct {
        return Ok(khovanov_homology_with_budget(d, c.max_direct)?);
    }
    let opts = ScanOptions {
        budget: ScanBudget { max_objects: None, max_seconds: c.budget_time, max_memory_mb: c.budget_mem },
        checkpoint: c.checkpoint.clone(),
        ..Default::default()
    };
    let (t, stats) = scan_with::<Rat>(d, &opts)?;
    log::info!("scan: {stats:?}");
    Ok(t)
}

fn render_table(t: &DimTable, f: Format, marked: &[Bigrading]) -> String {
    match f {
        Format::Grid => t.render_grid(marked),
        Format::Json => t.to_json() + "\n",
        Format::Csv => t.to_csv(),
    }
}

fn cmd_kh(a: &KhArgs) -> Res<String> {
    let (_, d) = load_diagram(&a.input)?;
    Ok(render_table(&compute_table(&d, &a.compute)?, a.compute.format, &[]))
}

fn cmd_lee(a: &KhArgs) -> Res<String> {
    let (_, d) = load_diagram(&a.input)?;
    d.require_knot()?;
    let res = lee_with_budget(&d, a.compute.max_direct)?;
    let kh = poincare_series(&res.pages.pages[0].dims);
    let dec = decomposition_from_pages(&res.pages, &kh)?;
    let fams: serde_json::Map<String, serde_json::Value> =
        dec.f.iter().map(|(l, f)| (format!("f{}", 2 * l), f.to_string().into())).collect();
    if let Format::Json = a.compute.format {
        let v = serde_json::json!({
            "s": res.s,
            "last_nonzero_differential": res.pages.last_nonzero(),
            "knight_move": dec.is_knight_move(),
            "decomposition": fams,
            "spectral_sequence": res.pages.to_json(),
        });
        return Ok(serde_json::to_string_pretty(&v).unwrap() + "\n");
    }
    let mut out = String::new();
    for p in &res.pages.pages {
        let _ = writeln!(out, "E{} (total {}):", p.n, p.dims.total());
        out += &render_table(&p.dims, a.compute.format, &[]);
        for ((i, j), r) in &p.diff_ranks {
            let _ = writeln!(out, "  d{}: ({i},{j}) -> ({},{}) rank {r}", p.n, i + 1, j + 4 * p.n as i64);
        }
    }
    let _ = writeln!(out, "E_inf:");
    out += &render_table(&res.pages.e_infinity, a.compute.format, &[]);
    let _ = writeln!(out, "s = {}", res.s);
    for (k, v) in &fams {
        let _ = writeln!(out, "{k} = {}", v.as_str().unwrap_or_default());
    }
    Ok(out)
}

struct AuditOutcome {
    table: DimTable,
    s: i64,
    s_source: &'static str,
    report: KnightMoveReport,
    survivors: DimTable,
    bound: usize,
}

fn audit_diagram_or_table(
    d: Option<&Diagram>,
    table: Option<DimTable>,
    s: Option<i64>,
    c: &ComputeArgs,
) -> Res<AuditOutcome> {
    let table = match (table, d) {
        (Some(t), _) => t,
        (None, Some(d)) => compute_table(d, c)?,
        (None, None) => unreachable!(),
    };
    let (s, s_source) = match (s, d) {
        (Some(s), _) => (s, "given"),
        (None, Some(d)) if d.crossing_count() <= c.max_direct => (lee_with_budget(d, c.max_direct)?.s, "lee"),
        (None, Some(_)) => match infer_s(&table) {
            Some(s) => (s, "inferred"),
            None => return Err(CliError::new(EXIT_VALIDATION, "s is ambiguous for this table; pass --s")),
        },
        (None, None) => return Err(CliError::new(EXIT_VALIDATION, "--s is required with --table")),
    };
    let report = audit_table(&table, s)?;
    let pawn = DimTable::from_cells([((0, s - 1), 1), ((0, s + 1), 1)]);
    let mut survivors = max_knight_matching(&table, s)?;
    for (g, k) in pawn.iter() {
        survivors.add(g.i, g.j, k);
    }
    let bound = unknotting_bound_from_certificates(&report.certificates);
    Ok(AuditOutcome { table, s, s_source, report, survivors, bound })
}

fn cmd_audit(a: &AuditArgs) -> Res<String> {
    let (table, d) = match &a.table {
        Some(p) => {
            let text = read(p)?;
            let t = if p.extension().is_some_and(|e| e == "csv") {
                DimTable::from_csv(&text)?
            } else {
                DimTable::from_json(&text)?
            };
            (Some(t), None)
        }
        None => (None, Some(load_diagram(&a.input)?.1)),
    };
    if table.is_some() && a.s.is_none() {
        return Err(CliError::new(EXIT_VALIDATION, "--s is required with --table"));
    }
    if let Some(s) = a.s {
        if s % 2 != 0 {
            return Err(AuditError::OddS(s).into());
        }
    }
    let o = audit_diagram_or_table(d.as_ref(), table, a.s, &a.compute)?;
    if let Format::Json = a.compute.format {
        let mut v = o.report.to_json();
        v["s_source"] = o.s_source.into();
        v["e2_survivors"] = o.survivors.to_json_value();
        v["unknotting_lower_bound"] = o.bound.into();
        return Ok(serde_json::to_string_pretty(&v).unwrap() + "\n");
    }
    let mut out = String::new();
    let marked: Vec<Bigrading> = o.report.witness.into_iter().collect();
    out += &render_table(&o.table, a.compute.format, &marked);
    let _ = writeln!(out, "s = {} ({})", o.s, o.s_source);
    match &o.report.f2 {
        Some(f2) => {
            let _ = writeln!(out, "knight move: holds, f2 = {f2}");
        }
        None => {
            let w = o.report.witness.unwrap();
            let _ = writeln!(out, "knight move: fails at ({}, {}): {}", w.i, w.j, o.report.reason.as_deref().unwrap_or(""));
        }
    }
    let cells: Vec<String> = o.survivors.iter().map(|(g, k)| format!("({},{})x{k}", g.i, g.j)).collect();
    let _ = writeln!(out, "E2 survivors: {}", cells.join(" "));
    for c in &o.report.certificates {
        let _ = writeln!(
            out,
            "forced d{}: ({},{}) -> ({},{})",
            c.n, c.source.i, c.source.j, c.target.i, c.target.j
        );
    }
    if o.bound > 0 {
        let _ = writeln!(out, "unknotting number >= {}", o.bound);
    }
    Ok(out)
}

fn fmt_fox_milnor(f: &FoxMilnor) -> String {
    match f {
        FoxMilnor::Passes(c) => format!("passes (f coefficients {c:?})"),
        FoxMilnor::Fails { .. } => "fails".into(),
        FoxMilnor::Undecided { span, bound } => format!("undecided (span {span} > bound {bound})"),
    }
}

fn cmd_alexander(a: &InputArgs) -> Res<String> {
    let (_, d) = load_diagram(a)?;
    let r = alexander(&d)?;
    Ok(format!("Delta(t) = {}\nFox-Milnor: {}\n", r.delta.fmt_var("t"), fmt_fox_milnor(&r.fox_milnor)))
}

fn cmd_jones(a: &InputArgs) -> Res<String> {
    let (_, d) = load_diagram(a)?;
    Ok(format!("{}\n", kauffman_jones(&d)?.fmt_var("q")))
}

fn cmd_catalog(name: &Option<String>) -> Res<String> {
    match name {
        Some(n) => Ok(format!("{}\n", parse_pd(catalog_entry(n)?.text)?.to_pd_string())),
        None => {
            let mut out = String::new();
            for n in catalog_names() {
                let e = catalog_entry(n)?;
                let crossings = parse_pd(e.text).map(|d| d.crossing_count().to_string()).unwrap_or("?".into());
                let _ = writeln!(out, "{n}\t{crossings}\t{}", if e.alternating { "alternating" } else { "" });
            }
            Ok(out)
        }
    }
}

fn cmd_batch(a: &BatchArgs) -> Res<String> {
    let rd = std::fs::read_dir(&a.dir).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", a.dir.display())))?;
    let mut files: Vec<PathBuf> =
        rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "pd")).collect();
    files.sort();
    let rows: Vec<String> = files
        .par_iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().to_string();
            let run = || -> Res<String> {
                let d = parse_pd(&read(p)?)?;
                let o = audit_diagram_or_table(Some(&d), None, None, &a.compute)?;
                let verdict = if o.report.holds() { "holds" } else { "fails" };
                let witness = o.report.witness.map(|w| format!("({};{})", w.i, w.j)).unwrap_or_default();
                let forced: Vec<String> = o
                    .report
                    .certificates
                    .iter()
                    .map(|c| format!("d{}:({};{})->({};{})", c.n, c.source.i, c.source.j, c.target.i, c.target.j))
                    .collect();
                let flag = o.report.certificates.iter().map(|c| c.n).max().map(|n| format!("d{n}")).unwrap_or_default();
                Ok(format!(
                    "{name},{},{},{},{verdict},{witness},{},{},{flag}",
                    d.crossing_count(),
                    o.s,
                    o.s_source,
                    forced.join(" "),
                    o.bound
                ))
            };
            run().unwrap_or_else(|e| {
                log::error!("{name}: {}", e.msg);
                format!("{name},,,,error,,,,")
            })
        })
        .collect();
    let mut out = String::from("knot,crossings,s,s_source,verdict,witness,forced,unknotting_bound,flag\n");
    for r in rows {
        out += &r;
        out.push('\n');
    }
    Ok(out)
}

fn run(cli: &Cli) -> Res<String> {
    match &cli.cmd {
        Command::Kh(a) => cmd_kh(a),
        Command::Lee(a) => cmd_lee(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Alexander(a) => cmd_alexander(a),
        Command::Jones(a) => cmd_jones(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Catalog { name } => cmd_catalog(name),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    match run(&cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

