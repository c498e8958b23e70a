//! Command-line front end: matrix files, subcommands and report output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{ReesError, Result};
use crate::field::{Field, FieldSpec, PrimeField, Rationals, DEFAULT_PRIME};
use crate::groebner::{GbBudget, Ideal};
use crate::harness::{run_batch, BatchOptions, InstanceSpec};
use crate::polymatrix::PolyMatrix;
use crate::polyring::{PolyRing, Polynomial};
use crate::reescore::{
    dual_at_level, rees_via_saturation, run_full_report, sort_generators, special_fiber,
    symmetric_generators, DualMethod, DualOptions, PivotRule, PresentationInput, ReesReport, ReportOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
/// Unexpected failure inside a batch (not a law violation).
pub const EXIT_INTERNAL: i32 = 1;

/// A parsed matrix file, entries still as text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub d: usize,
    pub t: usize,
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries with the line each came from.
    pub entries: Vec<(String, usize)>,
}

fn at_line(line: usize, e: ReesError) -> ReesError {
    e.context(format!("line {line}"))
}

fn invalid(line: usize, msg: impl Into<String>) -> ReesError {
    at_line(line, ReesError::Validation(msg.into()))
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_count(word: &str, what: &str, line: usize) -> Result<usize> {
    word.parse::<usize>()
        .map_err(|_| invalid(line, format!("{what} must be a non-negative integer, got `{word}`")))
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l)))
            .filter(|(_, l)| !l.is_empty());

        let (ring_line, ring_text) = lines
            .next()
            .ok_or_else(|| ReesError::Validation("empty input: expected a `ring` line".into()))?;
        let mut words = ring_text.split_whitespace();
        if words.next() != Some("ring") {
            return Err(invalid(ring_line, "expected `ring d=<int> T=<int> field=<prime|QQ>`"));
        }
        let (mut d, mut t, mut field) = (None, None, None);
        for word in words {
            let (key, value) = word
                .split_once('=')
                .ok_or_else(|| invalid(ring_line, format!("expected key=value, got `{word}`")))?;
            match key {
                "d" => d = Some(parse_count(value, "d", ring_line)?),
                "T" => t = Some(parse_count(value, "T", ring_line)?),
                "field" => {
                    field = Some(if value == "QQ" {
                        FieldSpec::Rational
                    } else {
                        let p = value
                            .parse::<u64>()
                            .map_err(|_| invalid(ring_line, format!("field must be a prime or QQ, got `{value}`")))?;
                        FieldSpec::prime(p).map_err(|e| at_line(ring_line, e))?
                    })
                }
                other => return Err(invalid(ring_line, format!("unknown ring key `{other}`"))),
            }
        }
        let d = d.ok_or_else(|| invalid(ring_line, "ring line lacks d="))?;
        let t = t.ok_or_else(|| invalid(ring_line, "ring line lacks T="))?;
        let field = field.unwrap_or(FieldSpec::Prime(DEFAULT_PRIME));

        let (matrix_line, matrix_text) = lines
            .next()
            .ok_or_else(|| invalid(ring_line, "missing `matrix <rows> <cols>` line"))?;
        let words: Vec<&str> = matrix_text.split_whitespace().collect();
        if words.len() != 3 || words[0] != "matrix" {
            return Err(invalid(matrix_line, "expected `matrix <rows> <cols>`"));
        }
        let rows = parse_count(words[1], "row count", matrix_line)?;
        let cols = parse_count(words[2], "column count", matrix_line)?;

        let mut entries = Vec::with_capacity(rows * cols);
        let mut seen_rows = 0;
        for (line, text) in lines {
            if seen_rows == rows {
                return Err(invalid(line, format!("more than the declared {rows} rows")));
            }
            let row: Vec<&str> = text.split_whitespace().collect();
            if row.len() != cols {
                return Err(invalid(
                    line,
                    format!("row has {} entries, the matrix line declares {cols}", row.len()),
                ));
            }
            entries.extend(row.into_iter().map(|e| (e.to_string(), line)));
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(invalid(
                matrix_line,
                format!("declared {rows} rows but found {seen_rows}"),
            ));
        }
        Ok(MatrixFile {
            d,
            t,
            field,
            rows,
            cols,
            entries,
        })
    }

    /// Parses the entries in a ring with the declared shape.
    pub fn to_matrix<F: Field>(&self, field: F) -> Result<PolyMatrix<F>> {
        let ring = PolyRing::new(self.d, self.t, field)?;
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, (text, line))| {
                Polynomial::parse(text, &ring).map_err(|e| {
                    e.context(format!("entry ({}, {})", k / self.cols + 1, k % self.cols + 1))
                        .context(format!("line {line}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PolyMatrix::new(&ring, self.rows, self.cols, entries)
    }
}

/// Renders `phi` in the matrix file format, with `header` lines as comments.
pub fn format_matrix_file<F: Field>(phi: &PolyMatrix<F>, header: &[String]) -> String {
    let ring = phi.ring();
    let mut out = String::new();
    for h in header {
        out.push_str(&format!("# {h}\n"));
    }
    out.push_str(&format!(
        "ring d={} T={} field={}\n",
        ring.d(),
        ring.m(),
        ring.field().spec()
    ));
    out.push_str(&format!("matrix {} {}\n", phi.rows(), phi.cols()));
    let cells: Vec<String> = phi.entries().iter().map(|e| e.to_compact_string()).collect();
    let widths: Vec<usize> = (0..phi.cols())
        .map(|c| (0..phi.rows()).map(|r| cells[r * phi.cols() + c].len()).max().unwrap_or(0))
        .collect();
    for r in 0..phi.rows() {
        let row: Vec<String> = (0..phi.cols())
            .map(|c| format!("{:<w$}", cells[r * phi.cols() + c], w = widths[c]))
            .collect();
        out.push_str(row.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Parser, Debug)]
#[command(name = "rees", version, about = "Defining equations of Rees algebras of almost linearly presented ideals")]
pub struct Cli {
    /// Maximum S-pairs per Groebner basis before giving up.
    #[arg(long, global = true, default_value_t = GbBudget::default().max_pairs)]
    pub max_pairs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    General,
    Restricted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PivotArg {
    Smallest,
    Largest,
}

#[derive(Args, Debug)]
pub struct DualArgs {
    #[arg(long, value_enum, default_value = "general")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "smallest")]
    pub pivot: PivotArg,
}

impl DualArgs {
    fn options(&self) -> DualOptions {
        DualOptions {
            method: match self.method {
                MethodArg::General => DualMethod::General,
                MethodArg::Restricted => DualMethod::Restricted,
            },
            pivot: match self.pivot {
                PivotArg::Smallest => PivotRule::Smallest,
                PivotArg::Largest => PivotRule::Largest,
            },
            reversed_generators: false,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signed maximal minors of the matrix.
    Gens { file: PathBuf },
    /// Generators of the symmetric algebra ideal with bidegrees.
    Sym { file: PathBuf },
    /// The iterated Jacobian dual at a level and its dual ideal.
    Dual {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[command(flatten)]
        dual: DualArgs,
    },
    /// The colon ladder L : (x)^i.
    Saturate {
        file: PathBuf,
        #[arg(long, conflicts_with = "infinity")]
        power: Option<u32>,
        #[arg(long)]
        infinity: bool,
    },
    /// Special fiber generators and degree.
    Fiber { file: PathBuf },
    /// Full report.
    Report {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        dual: DualArgs,
        /// Highest dual level to compute (default 2n).
        #[arg(long)]
        level_cap: Option<u32>,
        /// Also run the second-form check when m = d + 1.
        #[arg(long)]
        second_form: bool,
    },
    /// Batch of random instances.
    Random {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// A prime or QQ.
        #[arg(long, default_value = "32003")]
        field: String,
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for counterexample files.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        #[arg(long)]
        second_form: bool,
        #[arg(long)]
        json: bool,
    },
}

/// JSON form of a report.
#[derive(Serialize, Debug)]
pub struct ReportJson {
    pub n: u32,
    pub gd: bool,
    pub heights: BTreeMap<String, usize>,
    pub sat_index: u32,
    pub stabilization_level: Option<u32>,
    pub forms_equal: bool,
    pub fiber_degree: Option<u32>,
    pub relation_type: u32,
    pub generators: Vec<String>,
}

impl ReportJson {
    pub fn from_report<F: Field>(report: &ReesReport<F>) -> Self {
        ReportJson {
            n: report.n,
            gd: report.gd_ok,
            heights: report.heights.clone(),
            sat_index: report.sat_index(),
            stabilization_level: report.stabilization_level,
            forms_equal: report.forms_equal,
            fiber_degree: report.fiber.degree,
            relation_type: report.relation_type,
            generators: report.generators.iter().map(|g| g.to_compact_string()).collect(),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String> {
    let mut text = String::new();
    let outcome = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    };
    outcome.map_err(|e| ReesError::Validation(format!("cannot read input: {e}")))?;
    Ok(text)
}

fn bidegree_label<F: Field>(p: &Polynomial<F>) -> String {
    match p.bidegree() {
        Some((a, b)) => format!("({a},{b})"),
        None => "(mixed)".into(),
    }
}

fn write_generators<F: Field>(out: &mut dyn Write, gens: &[Polynomial<F>]) -> std::io::Result<()> {
    for g in gens {
        writeln!(out, "  {} {}", bidegree_label(g), g)?;
    }
    Ok(())
}

fn sorted_minimal<F: Field>(ideal: &Ideal<F>) -> Result<Vec<Polynomial<F>>> {
    let mut gens = ideal.minimal_generators()?;
    sort_generators(&mut gens);
    Ok(gens)
}

fn io_err(e: std::io::Error) -> ReesError {
    ReesError::Validation(format!("output error: {e}"))
}

fn budget(cli: &Cli) -> GbBudget {
    GbBudget {
        max_pairs: cli.max_pairs,
    }
}

fn execute_on_file<F: Field>(cli: &Cli, file: &MatrixFile, field: F, out: &mut dyn Write) -> Result<i32> {
    let phi = file.to_matrix(field)?;
    let budget = budget(cli);
    let presentation = || -> Result<PresentationInput<F>> { PresentationInput::new(phi.clone()) };
    match &cli.command {
        Command::Gens { .. } => {
            for g in phi.hilbert_burch_generators()? {
                writeln!(out, "{g}").map_err(io_err)?;
            }
        }
        Command::Sym { .. } => {
            for g in symmetric_generators(&phi)? {
                writeln!(out, "{} {}", bidegree_label(&g), g).map_err(io_err)?;
            }
        }
        Command::Dual { level, dual, .. } => {
            let input = presentation()?;
            let state = dual_at_level(&input, dual.options(), *level, budget)?;
            writeln!(out, "B_{} ({}x{}):", state.level, state.b.rows(), state.b.cols()).map_err(io_err)?;
            writeln!(out, "{}", state.b).map_err(io_err)?;
            writeln!(out, "generators of L + I_{}(B_{}):", input.d(), state.level).map_err(io_err)?;
            write_generators(out, &sorted_minimal(&state.dual_ideal)?).map_err(io_err)?;
        }
        Command::Saturate { power, .. } => {
            let input = presentation()?;
            match power {
                Some(p) => {
                    let sym = Ideal::new(input.ring(), symmetric_generators(&phi)?)?.with_budget(budget);
                    let ladder = sym.colon_ladder(&Ideal::x_ideal(input.ring()), *p)?;
                    let last = ladder.last().expect("ladder includes power 0");
                    writeln!(out, "L : (x)^{p}:").map_err(io_err)?;
                    write_generators(out, &sorted_minimal(last)?).map_err(io_err)?;
                }
                None => {
                    let sat = rees_via_saturation(&input, budget)?;
                    for (i, ideal) in sat.ladder.iter().enumerate() {
                        writeln!(out, "L : (x)^{i}: {} minimal generators", ideal.minimal_generators()?.len())
                            .map_err(io_err)?;
                    }
                    writeln!(out, "sat_index = {}", sat.sat_index).map_err(io_err)?;
                    writeln!(out, "L : (x)^inf:").map_err(io_err)?;
                    write_generators(out, &sorted_minimal(sat.saturated())?).map_err(io_err)?;
                }
            }
        }
        Command::Fiber { .. } => {
            let input = presentation()?;
            let sat = rees_via_saturation(&input, budget)?;
            let fiber = special_fiber(sat.saturated())?;
            writeln!(out, "principal: {}", fiber.is_principal).map_err(io_err)?;
            match fiber.degree {
                Some(deg) => writeln!(out, "degree: {deg}"),
                None => writeln!(out, "degree: none (fiber ideal has {} generators)", fiber.generators.len()),
            }
            .map_err(io_err)?;
            writeln!(out, "generators:").map_err(io_err)?;
            write_generators(out, &fiber.generators).map_err(io_err)?;
        }
        Command::Report {
            json,
            dual,
            level_cap,
            second_form,
            ..
        } => {
            let input = presentation()?;
            let options = ReportOptions {
                dual: dual.options(),
                level_cap: *level_cap,
                budget,
                second_form: *second_form,
            };
            let report = run_full_report(&input, &options)?;
            if *json {
                let text = serde_json::to_string_pretty(&ReportJson::from_report(&report))
                    .map_err(|e| ReesError::Validation(e.to_string()))?;
                writeln!(out, "{text}").map_err(io_err)?;
            } else {
                write_report(out, &report).map_err(io_err)?;
            }
        }
        Command::Random { .. } => unreachable!("random does not read a matrix file"),
    }
    Ok(EXIT_OK)
}

fn write_report<F: Field>(out: &mut dyn Write, r: &ReesReport<F>) -> std::io::Result<()> {
    writeln!(out, "d = {}, m = {}, n = {}", r.d, r.m, r.n)?;
    for w in &r.warnings {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "G_d: {}", r.gd_ok)?;
    writeln!(out, "linear type: {}", r.linear_type)?;
    for (key, h) in &r.heights {
        let zero = if r.zero_ideals.contains(key) { " (zero ideal)" } else { "" };
        writeln!(out, "height {key}: {h}{zero}")?;
    }
    writeln!(out, "sat_index: {}", r.sat_index())?;
    let stab = r
        .stabilization_level
        .map_or_else(|| "not reached".to_string(), |s| s.to_string());
    writeln!(out, "stabilization_level: {stab}")?;
    for s in &r.dual_chain {
        writeln!(out, "  level {}: B has {} columns{}", s.level, s.b.cols(), if s.stabilized { ", stabilized" } else { "" })?;
    }
    writeln!(out, "forms_equal: {}", r.forms_equal)?;
    writeln!(out, "first_colon_equal: {}", r.first_colon_equal)?;
    if let Some(sf) = r.second_form {
        writeln!(out, "second_form: {sf}")?;
    }
    let degree = r.fiber.degree.map_or_else(|| "none".to_string(), |d| d.to_string());
    writeln!(out, "fiber: principal = {}, degree = {degree}", r.fiber.is_principal)?;
    writeln!(out, "relation_type: {}", r.relation_type)?;
    writeln!(out, "generators of A:")?;
    write_generators(out, &r.generators)
}

fn parse_field(text: &str) -> Result<FieldSpec> {
    if text == "QQ" {
        return Ok(FieldSpec::Rational);
    }
    let p = text
        .parse::<u64>()
        .map_err(|_| ReesError::Validation(format!("field must be a prime or QQ, got `{text}`")))?;
    FieldSpec::prime(p)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let file_path = match &cli.command {
        Command::Gens { file }
        | Command::Sym { file }
        | Command::Dual { file, .. }
        | Command::Saturate { file, .. }
        | Command::Fiber { file }
        | Command::Report { file, .. } => file,
        Command::Random {
            d,
            m,
            n,
            seed,
            trials,
            field,
            threads,
            dump_dir,
            second_form,
            json,
        } => {
            let spec = InstanceSpec::new(*d, *m, *n, parse_field(field)?, *seed, *trials)?;
            let options = BatchOptions {
                threads: *threads,
                dump_dir: dump_dir.clone(),
                budget: budget(cli),
                dual: DualOptions::default(),
                second_form: *second_form,
            };
            let summary = run_batch(&spec, &options)?;
            if *json {
                let text = serde_json::to_string_pretty(&summary).map_err(|e| ReesError::Validation(e.to_string()))?;
                writeln!(out, "{text}").map_err(io_err)?;
            } else {
                writeln!(out, "trials_run: {}", summary.trials_run).map_err(io_err)?;
                writeln!(out, "gd_pass_count: {}", summary.gd_pass_count).map_err(io_err)?;
                writeln!(out, "gd_retry_exhausted: {}", summary.gd_retry_exhausted).map_err(io_err)?;
                writeln!(out, "forms_equal_count: {}", summary.forms_equal_count).map_err(io_err)?;
                writeln!(out, "sat_index_histogram: {:?}", summary.sat_index_histogram).map_err(io_err)?;
                writeln!(out, "height_violation_count: {}", summary.height_violation_count).map_err(io_err)?;
                writeln!(out, "budget_exceeded_count: {}", summary.budget_exceeded_count).map_err(io_err)?;
                for v in &summary.violations {
                    writeln!(out, "violation: instance {} {}: {}", v.index, v.law, v.detail).map_err(io_err)?;
                }
                for e in &summary.errors {
                    writeln!(out, "error: {e}").map_err(io_err)?;
                }
                for p in &summary.counterexample_dumps {
                    writeln!(out, "dump: {p}").map_err(io_err)?;
                }
            }
            return Ok(if !summary.violations.is_empty() {
                EXIT_VIOLATION
            } else if !summary.errors.is_empty() {
                EXIT_INTERNAL
            } else {
                EXIT_OK
            });
        }
    };
    let label = file_path.display().to_string();
    let text = read_input(file_path).map_err(|e| e.context(label.clone()))?;
    let file = MatrixFile::parse(&text).map_err(|e| e.context(label.clone()))?;
    let result = match file.field {
        FieldSpec::Prime(p) => execute_on_file(cli, &file, PrimeField::new(p)?, out),
        FieldSpec::Rational => execute_on_file(cli, &file, Rationals, out),
    };
    result.map_err(|e| e.context(label))
}

/// Exit code for an error.
pub fn exit_code(e: &ReesError) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_INVALID
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
