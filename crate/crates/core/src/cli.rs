//! The `slopekit` command line.
//!
//! Exit codes: 0 on success, 1 when a precondition or verification fails,
//! 2 on malformed input (bad flags, unreadable files, malformed records).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cusp::{self, area_threshold, CuspTorus};
use crate::error::Error;
use crate::search::{self, SearchConfig};
use crate::sets::{self, SlopeSet, Window};
use crate::slope::Slope;
use crate::verifier;

#[derive(Debug, Parser)]
#[command(name = "slopekit", version, about = "Slope-set combinatorics and cusp-torus geometry")]
pub struct RunConfig {
    /// Tab-separated key/value output instead of text tables.
    #[arg(long, global = true)]
    pub tsv: bool,
    /// Extra diagnostics (node counts, traces).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cardinality, diameter, distance matrix and centers of a `.slopes` file.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        center_k: u64,
        /// Center window denominator bound (default: 2 * diameter).
        #[arg(long)]
        q_max: Option<u32>,
        /// Center window numerator bound (default: 4 * (diameter + 1) * q_max).
        #[arg(long)]
        p_bound: Option<u32>,
    },
    /// Maximum slope sets with diameter at most D.
    Search {
        #[arg(long)]
        diameter: u64,
        #[arg(long)]
        center_k: Option<u64>,
        #[arg(long)]
        all_witnesses: bool,
        /// Write witnesses as `.slopes` files and the certificate next to them.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Normalize the center to 1/0 instead of an element (needs --center-k).
        #[arg(long)]
        center_at_meridian: bool,
        /// Search beyond the diameter guard.
        #[arg(long)]
        allow_large: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Classify a `.slopes` file around a center and replay the counting argument.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        diameter: u64,
    },
    /// Replay the counting argument on every maximum witness of a search.
    CrossCheck {
        #[arg(long)]
        diameter: u64,
        #[arg(long)]
        center_k: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Geometry of a `.cusp` file: area, shortest slope, width, 6-theorem candidates.
    Cusp {
        file: PathBuf,
        /// Print the area proposition verdict.
        #[arg(long)]
        report: bool,
        /// Print the table of slopes of length at most 6.
        #[arg(long)]
        candidates: bool,
    },
    /// Write bundled example data.
    Fixtures {
        #[arg(long)]
        emit: PathBuf,
        #[arg(long, value_enum, default_value_t = Fixture::PaperExample)]
        name: Fixture,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// Twelve slopes of diameter 8.
    PaperExample,
    /// 1/0 and the integers 0..8.
    IntegerWitness,
    /// Square torus of side 3.
    Square3,
    /// Hexagonal torus with unit meridian.
    Hexagonal,
}

enum Failure {
    Verification(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Duplicate { .. } | Error::BadLiteral(_) | Error::Degenerate(_) => {
                Failure::Input(e.to_string())
            }
            Error::GuardExceeded { .. } | Error::Unsupported(_) => Failure::Input(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_slopes(path: &Path) -> std::result::Result<SlopeSet, Failure> {
    sets::load_set(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Input(e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cfg, out) {
        Ok(()) => 0,
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "slopekit: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "slopekit: {msg}");
            2
        }
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    match &cfg.command {
        Command::Analyze { file, center_k, q_max, p_bound } => {
            analyze(cfg, out, &load_slopes(file)?, *center_k, *q_max, *p_bound)
        }
        Command::Search { diameter, center_k, all_witnesses, emit, center_at_meridian, allow_large, jobs } => {
            let mut sc = SearchConfig::new(*diameter, *center_k);
            sc.assume_meridian = !center_at_meridian;
            sc.allow_large = *allow_large;
            sc.jobs = *jobs;
            run_search(cfg, out, &sc, *all_witnesses, emit.as_deref())
        }
        Command::Verify { file, diameter } => verify(cfg, out, &load_slopes(file)?, *diameter),
        Command::CrossCheck { diameter, center_k, jobs } => {
            let mut sc = SearchConfig::new(*diameter, Some(*center_k));
            sc.jobs = *jobs;
            cross_check(cfg, out, &sc)
        }
        Command::Cusp { file, report, candidates } => {
            let text = read(file)?;
            let t = cusp::load_cusp(&text).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
            cusp_cmd(cfg, out, &t, *report, *candidates)
        }
        Command::Fixtures { emit, name } => {
            let text = match name {
                Fixture::PaperExample => sets::PAPER_EXAMPLE_TEXT.to_string(),
                Fixture::IntegerWitness => sets::save_set(
                    &std::iter::once(Slope::MERIDIAN).chain((0..=8).map(Slope::integer)).collect(),
                ),
                Fixture::Square3 => cusp::save_cusp(&CuspTorus::new([3.0, 0.0], [0.0, 3.0])?),
                Fixture::Hexagonal => cusp::save_cusp(&CuspTorus::hexagonal(1.0)),
            };
            write_file(emit, &text)?;
            writeln!(out, "wrote {}", emit.display()).map_err(io_err)
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn analyze(
    cfg: &RunConfig,
    out: &mut dyn Write,
    s: &SlopeSet,
    k: u64,
    q_max: Option<u32>,
    p_bound: Option<u32>,
) -> Outcome {
    let default = s.default_window();
    let q_max = q_max.unwrap_or(default.q_max);
    let p_bound = p_bound.unwrap_or_else(|| {
        let d = u32::try_from(s.diameter()).unwrap_or(u32::MAX);
        4u32.saturating_mul(d + 1).saturating_mul(q_max)
    });
    let window = Window { q_max, p_bound };
    let centers = s.centers(k, window);
    let elements = s.to_vec();
    let matrix = s.distance_matrix();
    if cfg.tsv {
        writeln!(out, "cardinality\t{}", s.len()).map_err(io_err)?;
        writeln!(out, "diameter\t{}", s.diameter()).map_err(io_err)?;
        for (r, row) in elements.iter().zip(&matrix) {
            writeln!(out, "row\t{r}\t{}", row.iter().map(u64::to_string).collect::<Vec<_>>().join("\t"))
                .map_err(io_err)?;
        }
        writeln!(out, "center_k\t{k}\nwindow\t{q_max}\t{p_bound}").map_err(io_err)?;
        for c in &centers {
            writeln!(out, "center\t{c}").map_err(io_err)?;
        }
        return Ok(());
    }
    writeln!(out, "cardinality {}, diameter {}", s.len(), s.diameter()).map_err(io_err)?;
    if let Some((a, b, d)) = s.diameter_pair() {
        writeln!(out, "diameter realized by Δ({a}, {b}) = {d}").map_err(io_err)?;
    }
    if !elements.is_empty() {
        let width = elements.iter().map(|r| r.to_string().len()).max().unwrap_or(1).max(3);
        writeln!(out, "distance matrix").map_err(io_err)?;
        write!(out, "{:>width$}", "").map_err(io_err)?;
        for r in &elements {
            write!(out, " {:>width$}", r.to_string()).map_err(io_err)?;
        }
        writeln!(out).map_err(io_err)?;
        for (r, row) in elements.iter().zip(&matrix) {
            write!(out, "{:>width$}", r.to_string()).map_err(io_err)?;
            for d in row {
                write!(out, " {d:>width$}").map_err(io_err)?;
            }
            writeln!(out).map_err(io_err)?;
        }
    }
    let listed = if centers.is_empty() { "none".to_string() } else { join(&centers) };
    writeln!(out, "centers within Δ <= {k} (window q <= {q_max}, |p| <= {p_bound}): {listed}").map_err(io_err)
}

fn witness_path(base: &Path, i: usize, n: usize) -> PathBuf {
    if n == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("witness");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{i}.{ext}"),
        None => format!("{stem}-{i}"),
    };
    base.with_file_name(name)
}

fn run_search(
    cfg: &RunConfig,
    out: &mut dyn Write,
    sc: &SearchConfig,
    all: bool,
    emit: Option<&Path>,
) -> Outcome {
    let result = search::search(sc)?;
    let shown: &[SlopeSet] = if all { &result.witnesses } else { &result.witnesses[..1] };
    if cfg.tsv {
        writeln!(out, "max_cardinality\t{}", result.max_cardinality).map_err(io_err)?;
        writeln!(out, "witness_classes\t{}", result.witnesses.len()).map_err(io_err)?;
        for w in shown {
            writeln!(out, "witness\t{}", w.iter().map(Slope::to_string).collect::<Vec<_>>().join("\t"))
                .map_err(io_err)?;
        }
    } else {
        let k = sc.center_k.map_or("none".to_string(), |k| k.to_string());
        writeln!(out, "diameter bound {}, center k {k}", sc.diameter_bound).map_err(io_err)?;
        writeln!(out, "max cardinality {}", result.max_cardinality).map_err(io_err)?;
        writeln!(out, "witness classes {}", result.witnesses.len()).map_err(io_err)?;
        for w in shown {
            writeln!(out, "witness {w}  (diameter {})", w.diameter()).map_err(io_err)?;
        }
        if cfg.verbose > 0 {
            writeln!(out, "nodes explored {}", result.nodes_explored).map_err(io_err)?;
        }
    }
    if let Some(base) = emit {
        for (i, w) in shown.iter().enumerate() {
            write_file(&witness_path(base, i + 1, shown.len()), &sets::save_set(w))?;
        }
        let cert = base.with_extension("certificate.txt");
        write_file(&cert, &result.certificate.to_string())?;
        if !cfg.tsv {
            writeln!(out, "certificate {}", cert.display()).map_err(io_err)?;
        }
    }
    Ok(())
}

fn verify(cfg: &RunConfig, out: &mut dyn Write, s: &SlopeSet, diameter: u64) -> Outcome {
    let c = verifier::classify_any(s)?;
    let replay = verifier::proof_bound(&c, diameter);
    if cfg.tsv {
        writeln!(out, "cardinality\t{}\ndiameter\t{}", s.len(), s.diameter()).map_err(io_err)?;
        writeln!(out, "k\t{}\nl\t{}", c.k(), c.l()).map_err(io_err)?;
        if let Some(n) = c.n_k() {
            writeln!(out, "N_k\t{n}").map_err(io_err)?;
        }
        writeln!(out, "integrals\t{}", join(&c.integrals)).map_err(io_err)?;
        writeln!(out, "halves\t{}", join(&c.halves)).map_err(io_err)?;
    } else {
        writeln!(out, "set          {s}").map_err(io_err)?;
        writeln!(out, "diameter     {}", s.diameter()).map_err(io_err)?;
        writeln!(out, "{c}").map_err(io_err)?;
        writeln!(out, "trace").map_err(io_err)?;
    }
    let trace = match &replay {
        Ok(b) => &b.trace,
        Err(v) => &v.trace,
    };
    for line in trace {
        if cfg.tsv {
            writeln!(out, "trace\t{line}").map_err(io_err)?;
        } else {
            writeln!(out, "  {line}").map_err(io_err)?;
        }
    }
    match replay {
        Ok(b) if b.actual <= b.bound => {
            if cfg.tsv {
                writeln!(out, "bound\t{}", b.bound).map_err(io_err)
            } else {
                writeln!(out, "bound {} >= cardinality {}", b.bound, b.actual).map_err(io_err)
            }
        }
        Ok(b) => Err(Failure::Verification(format!("cardinality {} exceeds bound {}", b.actual, b.bound))),
        Err(v) => Err(Failure::Verification(format!("inequality fails: {}", v.inequality))),
    }
}

fn cross_check(cfg: &RunConfig, out: &mut dyn Write, sc: &SearchConfig) -> Outcome {
    match verifier::exhaustive_cross_check(sc)? {
        Ok(r) => {
            if cfg.tsv {
                writeln!(out, "max_cardinality\t{}\nwitnesses\t{}", r.max_cardinality, r.checked.len())
                    .map_err(io_err)?;
                for (w, b) in &r.checked {
                    writeln!(out, "checked\t{b}\t{}", w.iter().map(Slope::to_string).collect::<Vec<_>>().join("\t"))
                        .map_err(io_err)?;
                }
                return Ok(());
            }
            writeln!(
                out,
                "diameter bound {}, center k {}: max cardinality {}",
                r.diameter_bound, r.center_k, r.max_cardinality
            )
            .map_err(io_err)?;
            for (w, b) in &r.checked {
                writeln!(out, "  {w}  size {} <= bound {b}", w.len()).map_err(io_err)?;
            }
            writeln!(out, "cross-check passed on {} witness classes", r.checked.len()).map_err(io_err)
        }
        Err(d) => Err(Failure::Verification(d.to_string())),
    }
}

fn cusp_cmd(cfg: &RunConfig, out: &mut dyn Write, t: &CuspTorus, report: bool, candidates: bool) -> Outcome {
    let r = t.proposition_check();
    let ties: Vec<String> = r.ties.iter().map(Slope::to_string).collect();
    if cfg.tsv {
        writeln!(out, "area\t{}\nhypothesis\t{}", r.area, r.hypothesis).map_err(io_err)?;
        writeln!(out, "gamma\t{}\nties\t{}\nh\t{}\nw\t{}", r.gamma, ties.join(" "), r.h, r.w).map_err(io_err)?;
        if candidates {
            for c in &r.candidates {
                writeln!(out, "candidate\t{}\t{}\t{}", c.slope, c.length, c.distance_from_shortest)
                    .map_err(io_err)?;
            }
        }
        if report {
            let verdict = match r.holds() {
                None => "no_claim",
                Some(true) => "holds",
                Some(false) => "fails",
            };
            writeln!(out, "proposition\t{verdict}").map_err(io_err)?;
        }
    } else {
        writeln!(out, "area {:.6} (8/√3 = {:.6})", r.area, area_threshold()).map_err(io_err)?;
        writeln!(out, "shortest slope {} (ties: {}), h = {:.6}", r.gamma, ties.join(" "), r.h).map_err(io_err)?;
        writeln!(out, "width w = area/h = {:.6}", r.w).map_err(io_err)?;
        if let Some(b) = &r.branch {
            writeln!(out, "width case: {b}").map_err(io_err)?;
        }
        if candidates {
            writeln!(out, "slopes of length <= 6:").map_err(io_err)?;
            writeln!(out, "  {:>8} {:>12} {:>6}", "slope", "length", "Δ(γ,·)").map_err(io_err)?;
            for c in &r.candidates {
                let flag = if c.marginal { "  marginal" } else { "" };
                writeln!(out, "  {:>8} {:>12.6} {:>6}{flag}", c.slope.to_string(), c.length, c.distance_from_shortest)
                    .map_err(io_err)?;
            }
        }
        for m in &r.marginal {
            writeln!(out, "marginal: {m}").map_err(io_err)?;
        }
        if report {
            match r.holds() {
                None => writeln!(
                    out,
                    "area {} <= 8/√3: hypothesis fails, no claim",
                    fmt_num(r.area)
                )
                .map_err(io_err)?,
                Some(true) => writeln!(
                    out,
                    "area {} > 8/√3: proposition holds; candidates within Δ <= 2 of {}",
                    fmt_num(r.area),
                    ties.join(", ")
                )
                .map_err(io_err)?,
                Some(false) => {}
            }
        }
    }
    if r.holds() == Some(false) {
        let detail = if !r.width_exceeds_two {
            format!("w = {} is not above 2", r.w)
        } else {
            let (g, s, len) = r.violations[0];
            format!("slope {s} has length {len} <= 6 and Δ({g}, {s}) = {} > 2", g.distance(&s))
        };
        return Err(Failure::Verification(detail));
    }
    Ok(())
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.6}")
    }
}
