//! The `sqfree` command line.
//!
//! Every subcommand writes either CSV (header always present) or a single
//! JSON document to standard output. Exit status is 0 on success, 2 when an
//! argument violates a precondition and 1 when a computation fails.

use std::io::{self, BufRead, Write};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Number, Value};
use thiserror::Error;

use crate::counting::{self, CountError, CountReport};
use crate::detmethod::{self, DetError, IntervalSpec, SweepOutcome};
use crate::lattice::{self, LatticeError};
use crate::solutions::{self, BihomForm, DyadicBox, SolutionError, SolutionTriple};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Validation(String),
    #[error("{0}")]
    Operational(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Operational(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::DegenerateFit { .. } => CliError::Operational(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SolutionError> for CliError {
    fn from(e: SolutionError) -> Self {
        match e {
            SolutionError::BadTriple { .. } | SolutionError::InvalidForm(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Operational(e.to_string()),
        }
    }
}

impl From<DetError> for CliError {
    fn from(e: DetError) -> Self {
        match e {
            DetError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            DetError::Solution(s) => s.into(),
            DetError::FullRank { .. } => CliError::Operational(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::InvalidArgument(_) | LatticeError::DegenerateLattice(..) => {
                CliError::Validation(e.to_string())
            }
            LatticeError::NonIntegralPreimage(..) => CliError::Operational(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sqfree", version, about = "Square-free values of n^2 + 1")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Worker threads for the parallel stages.
    #[arg(long, default_value_t = 1, global = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMethod {
    Direct,
    Sieve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstantChoice {
    Product,
    Series,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CensusMode {
    Dyadic,
    TSide,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count n <= x with n^2 + 1 square-free.
    Count {
        x: u64,
        #[arg(long, value_enum, default_value = "sieve")]
        method: CountMethod,
    },
    /// Split N(2x) - N(x) at d = D into progressions and a tail.
    Split {
        x: u64,
        /// Cut point; defaults to floor(sqrt(x)).
        d: Option<u64>,
    },
    /// Estimate the density constant c0.
    Constant {
        #[arg(long, value_enum, default_value = "product")]
        method: ConstantChoice,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// N(x) - c0 x on a log-spaced grid, with the fitted slope.
    Scan {
        #[arg(long, default_value_t = 1_000)]
        lo: u64,
        #[arg(long, default_value_t = 10_000_000)]
        hi: u64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Evaluate or maximize the exponent bound.
    Exponent {
        #[arg(long, conflicts_with = "optimize")]
        psi: Option<f64>,
        #[arg(long)]
        optimize: bool,
        /// Use the variant capped by 1 - 2 psi / 3.
        #[arg(long)]
        v7: bool,
    },
    /// Enumerate e^2 f = n^2 + 1 with E/2 < e <= E and F/2 < f <= F.
    Mef { e: u64, f: u64 },
    /// Solutions of n^2 - f e^2 = -1 with e <= bound.
    Pell {
        f: u64,
        #[arg(long)]
        bound: String,
    },
    /// Gaussian decomposition of triples given as `e f n` or read from stdin.
    Decompose { triple: Vec<String> },
    /// Auxiliary curves on one interval or on every non-empty interval.
    Detcurve {
        x: u64,
        e: u64,
        f: u64,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value_t = detmethod::DEFAULT_L)]
        l: u32,
        #[arg(long, allow_hyphen_values = true)]
        x3: Option<i64>,
    },
    /// Reduced interval lattice, or a randomized invariant sweep.
    Lattice {
        #[arg(allow_hyphen_values = true, required_unless_present = "random")]
        x3: Option<i64>,
        #[arg(required_unless_present = "random")]
        m: Option<u64>,
        #[arg(required_unless_present = "random")]
        e: Option<u64>,
        /// Check invariants on this many random (x3, M, E).
        #[arg(long)]
        random: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_m: u64,
        #[arg(long, default_value_t = 1_000_000_000_000)]
        max_e: u64,
    },
    /// Census of intervals by their first successive minimum.
    Census {
        e: u64,
        m: u64,
        #[arg(long, value_enum, default_value = "dyadic")]
        mode: CensusMode,
        /// F for the t-side census.
        #[arg(long)]
        f: Option<u64>,
    },
    /// Count zeros of a bi-homogeneous form.
    Bihom {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        /// Comma-separated coefficients, x1 power outer, y1 power inner.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        coeffs: Vec<i64>,
        #[arg(long = "x")]
        x_max: i64,
    },
}

/// Formats with 15 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.14e}").parse().expect("valid float");
    let mag = rounded.abs();
    if mag != 0.0 && !(1e-5..1e16).contains(&mag) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(fmt_f64(v).parse::<Number>().expect("finite number"))
    } else {
        Value::String(v.to_string())
    }
}

fn big(v: impl ToString) -> Value {
    Value::Number(v.to_string().parse::<Number>().expect("integer"))
}

/// Rows of string cells with their header.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.clone()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// Output of one command: a table plus optional summary fields for JSON.
struct Output {
    table: Table,
    summary: Option<Map<String, Value>>,
}

impl Output {
    fn table(table: Table) -> Self {
        Output {
            table,
            summary: None,
        }
    }

    fn write(self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.table.write_csv(out),
            Format::Json => {
                let doc = match self.summary {
                    None => self.table.to_json(),
                    Some(mut s) => {
                        s.insert("rows".into(), self.table.to_json());
                        Value::Object(s)
                    }
                };
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&doc).map_err(io::Error::other)?
                )
            }
        }
    }
}

fn report_row(r: &CountReport) -> Vec<Value> {
    vec![big(r.x), big(r.count), num(r.main), num(r.error)]
}

fn count_table(reports: &[CountReport]) -> Table {
    let mut t = Table::new(&["x", "count", "main", "error"]);
    debug_assert_eq!(t.header.join(","), CountReport::CSV_HEADER);
    for r in reports {
        t.push(report_row(r));
    }
    t
}

fn triple_table(triples: &[SolutionTriple]) -> Table {
    let mut t = Table::new(&["e", "f", "n"]);
    for tr in triples {
        t.push(vec![big(&tr.e), big(&tr.f), big(&tr.n)]);
    }
    t
}

fn parse_big(s: &str, name: &str) -> Result<BigUint, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("{name} = {s:?} is not a non-negative integer")))
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Validation(msg()))
    }
}

fn curve_json(c: &detmethod::AuxiliaryCurve, cfg: &detmethod::DetConfig) -> Vec<Value> {
    let coeffs = Value::Array(
        c.poly
            .coeffs
            .iter()
            .map(|row| Value::Array(row.iter().map(big).collect()))
            .collect(),
    );
    vec![
        big(c.interval.x3),
        big(cfg.m),
        big(c.points),
        big(cfg.k),
        big(cfg.l),
        coeffs,
        big(&c.max_abs_coeff),
        Value::Bool(c.verified),
        num(c.kappa),
    ]
}

const CURVE_HEADER: [&str; 9] = [
    "x3",
    "M",
    "J",
    "K",
    "L",
    "coeffs",
    "max_abs_coeff",
    "verified",
    "kappa",
];

fn lattice_row(x3: i64, rb: &lattice::ReducedBasis) -> Vec<Value> {
    vec![
        big(x3),
        big(rb.g1[0]),
        big(rb.g1[1]),
        big(rb.g2[0]),
        big(rb.g2[1]),
        num(rb.l1),
        num(rb.l2),
    ]
}

fn census_table(bins: &[lattice::CensusBin]) -> Table {
    let mut t = Table::new(&["l_lo", "l_hi", "count", "envelope", "within_envelope"]);
    for b in bins {
        t.push(vec![
            num(b.l_lo),
            num(b.l_hi),
            big(b.count),
            num(b.envelope),
            Value::Bool(b.within_envelope()),
        ]);
    }
    t
}

fn read_triples(input: &mut dyn BufRead) -> Result<Vec<SolutionTriple>, CliError> {
    let mut triples = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('e') {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        require(parts.len() == 3, || {
            format!("expected `e f n`, got {line:?}")
        })?;
        triples.push(SolutionTriple::new(
            parse_big(parts[0], "e")?,
            parse_big(parts[1], "f")?,
            parse_big(parts[2], "n")?,
        )?);
    }
    Ok(triples)
}

fn execute(cfg: &RunConfig, input: &mut dyn BufRead) -> Result<Output, CliError> {
    let threads = cfg.threads as usize;
    match &cfg.command {
        Command::Count { x, method } => {
            require(*x >= 1, || "x must be >= 1".into())?;
            let r = match method {
                CountMethod::Direct => counting::count_direct(*x)?,
                CountMethod::Sieve => {
                    require(*x <= counting::REFERENCE_CUTOFF, || {
                        format!("x = {x} exceeds {}", counting::REFERENCE_CUTOFF)
                    })?;
                    counting::count_sieve_threads(*x, threads)
                }
            };
            Ok(Output::table(count_table(&[r])))
        }
        Command::Split { x, d } => {
            let s = match d {
                Some(d) => counting::estermann_split(*x, *d)?,
                None => counting::estermann_split_default(*x)?,
            };
            let mut t = Table::new(&[
                "x",
                "D",
                "main_sum",
                "progression_total",
                "tail_triples",
                "tail_signed",
                "exact",
                "discrepancy",
            ]);
            t.push(vec![
                big(s.x),
                big(s.d_cut),
                num(s.main_sum),
                big(s.progression_total),
                big(s.tail_triples),
                big(s.tail_signed),
                big(s.exact),
                big(s.discrepancy()),
            ]);
            Ok(Output::table(t))
        }
        Command::Constant { method, cutoff } => {
            let c = match method {
                ConstantChoice::Product => counting::c0_product(*cutoff)?,
                ConstantChoice::Series => counting::c0_series(*cutoff)?,
                ConstantChoice::Reference => *counting::c0_reference(),
            };
            let mut t = Table::new(&["method", "cutoff", "value", "tail_bound", "lower", "upper"]);
            t.push(vec![
                Value::String(c.method.to_string()),
                big(c.cutoff),
                num(c.value),
                num(c.tail_bound),
                num(c.lower()),
                num(c.upper()),
            ]);
            Ok(Output::table(t))
        }
        Command::Scan { lo, hi, points } => {
            require(*lo >= 1 && hi > lo && *points >= 2, || {
                format!("need 1 <= lo < hi and points >= 2; got lo = {lo}, hi = {hi}, points = {points}")
            })?;
            let grid = counting::log_grid(*lo, *hi, *points);
            let reports = counting::error_scan_with_limit(&grid, counting::DIRECT_LIMIT, threads)?;
            let slope = counting::fit_exponent(&reports)?;
            let mut summary = Map::new();
            summary.insert("slope".into(), num(slope));
            Ok(Output {
                table: count_table(&reports),
                summary: Some(summary),
            })
        }
        Command::Exponent { psi, optimize, v7 } => match (psi, optimize) {
            (Some(psi), false) => {
                let p = if *v7 {
                    counting::exponent_bound_v7(*psi)?
                } else {
                    counting::exponent_bound(*psi)?
                };
                let mut t = Table::new(&["psi", "bound"]);
                t.push(vec![num(p.psi), num(p.bound)]);
                Ok(Output::table(t))
            }
            (None, true) => {
                let o = if *v7 {
                    counting::exponent_optimum_v7()
                } else {
                    counting::exponent_optimum()
                };
                let mut t = Table::new(&["psi", "value", "grid_psi", "grid_value"]);
                t.push(vec![
                    num(o.psi),
                    num(o.value),
                    num(o.grid_psi),
                    num(o.grid_value),
                ]);
                Ok(Output::table(t))
            }
            _ => Err(CliError::Validation(
                "give exactly one of --psi or --optimize".into(),
            )),
        },
        Command::Mef { e, f } => {
            require(*e >= 1 && *f >= 1, || "E and F must be >= 1".into())?;
            let triples = solutions::enumerate_mef_threads(DyadicBox::new(*e, *f), threads);
            Ok(Output::table(triple_table(&triples)))
        }
        Command::Pell { f, bound } => {
            let bound = parse_big(bound, "bound")?;
            let sols = solutions::pell_solutions(*f, &bound);
            let mut t = Table::new(&["n", "e"]);
            for (n, e) in &sols {
                t.push(vec![big(n), big(e)]);
            }
            Ok(Output::table(t))
        }
        Command::Decompose { triple } => {
            let triples = match triple.len() {
                0 => read_triples(input)?,
                3 => vec![SolutionTriple::new(
                    parse_big(&triple[0], "e")?,
                    parse_big(&triple[1], "f")?,
                    parse_big(&triple[2], "n")?,
                )?],
                k => {
                    return Err(CliError::Validation(format!(
                        "decompose takes `e f n` or no arguments (stdin); got {k} values"
                    )))
                }
            };
            let mut t = Table::new(&["e", "f", "n", "x1", "x2", "y1", "y2"]);
            for tr in &triples {
                let q = solutions::decompose(tr)?;
                t.push(vec![
                    big(&tr.e),
                    big(&tr.f),
                    big(&tr.n),
                    big(&q.x1),
                    big(&q.x2),
                    big(&q.y1),
                    big(&q.y2),
                ]);
            }
            Ok(Output::table(t))
        }
        Command::Detcurve {
            x,
            e,
            f,
            eta,
            l,
            x3,
        } => {
            let dc = detmethod::choose_m_with_l(*x, *e, *f, *eta, *l)?;
            let triples = solutions::enumerate_mef_threads(dc.dyadic_box(), threads);
            let mut t = Table::new(&CURVE_HEADER);
            let mut failures = Vec::new();
            match x3 {
                Some(x3) => {
                    let iv = IntervalSpec::new(*x3, dc.m);
                    let c = detmethod::auxiliary_curve(&triples, &dc, &iv)?;
                    t.push(curve_json(&c, &dc));
                }
                None => {
                    for o in detmethod::sweep_intervals(&triples, &dc)? {
                        match o {
                            SweepOutcome::Curve(c) => t.push(curve_json(&c, &dc)),
                            SweepOutcome::Failed {
                                interval,
                                points,
                                error,
                            } => failures.push(json!({
                                "x3": interval.x3,
                                "J": points,
                                "error": error.to_string(),
                            })),
                        }
                    }
                }
            }
            let mut summary = Map::new();
            summary.insert("x".into(), big(dc.x));
            summary.insert("E".into(), big(dc.e_top));
            summary.insert("F".into(), big(dc.f_top));
            summary.insert("eta".into(), num(dc.eta));
            summary.insert("M".into(), big(dc.m));
            summary.insert("K".into(), big(dc.k));
            summary.insert("L".into(), big(dc.l));
            summary.insert("triples".into(), big(triples.len()));
            summary.insert("failures".into(), Value::Array(failures));
            Ok(Output {
                table: t,
                summary: Some(summary),
            })
        }
        Command::Lattice {
            x3,
            m,
            e,
            random,
            max_m,
            max_e,
        } => {
            let mut t = Table::new(&["x3", "g1x", "g1y", "g2x", "g2y", "L1", "L2"]);
            if let Some(n) = random {
                require(*max_m >= 1 && *max_e >= 1, || {
                    "max-m and max-e must be >= 1".into()
                })?;
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let mut violations = Vec::new();
                for _ in 0..*n {
                    let m = rng.random_range(1..=*max_m);
                    let x3 = rng.random_range(0..m) as i64;
                    let e = rng.random_range(1..=*max_e);
                    let (_, rb) = lattice::interval_lattice(x3, m, e)?;
                    if let Some(why) = lattice::check_invariants(&rb, x3, m, e) {
                        violations.push(json!({ "x3": x3, "M": m, "E": e, "reason": why }));
                    }
                }
                let mut s = Table::new(&["samples", "seed", "violations"]);
                s.push(vec![big(n), big(cfg.seed), big(violations.len())]);
                let mut summary = Map::new();
                summary.insert("details".into(), Value::Array(violations));
                return Ok(Output {
                    table: s,
                    summary: Some(summary),
                });
            }
            let (x3, m, e) = (
                x3.expect("required"),
                m.expect("required"),
                e.expect("required"),
            );
            require(m >= 1 && e >= 1, || "M and E must be >= 1".into())?;
            let (_, rb) = lattice::interval_lattice(x3, m, e)?;
            t.push(lattice_row(x3, &rb));
            Ok(Output::table(t))
        }
        Command::Census { e, m, mode, f } => {
            require(*e >= 1 && *m >= 1, || "E and M must be >= 1".into())?;
            match mode {
                CensusMode::Dyadic => {
                    let bins = lattice::census_dyadic(*e, *m, threads)?;
                    let mut summary = Map::new();
                    summary.insert("E".into(), big(e));
                    summary.insert("M".into(), big(m));
                    summary.insert("constant".into(), num(lattice::CENSUS_CONSTANT));
                    Ok(Output {
                        table: census_table(&bins),
                        summary: Some(summary),
                    })
                }
                CensusMode::TSide => {
                    let f =
                        f.ok_or_else(|| CliError::Validation("t-side census needs --f".into()))?;
                    let bx = DyadicBox::new(*e, f);
                    let triples = solutions::enumerate_mef_threads(bx, threads);
                    let points = detmethod::label_points(&triples, bx)?;
                    let c = lattice::t_side_census(f, *m, &points)?;
                    let mut summary = Map::new();
                    summary.insert("E".into(), big(e));
                    summary.insert("F".into(), big(f));
                    summary.insert("M".into(), big(m));
                    summary.insert("intervals".into(), big(c.intervals));
                    summary.insert("singular".into(), big(c.singular));
                    summary.insert("max_multiplicity".into(), big(c.max_multiplicity));
                    summary.insert("cap".into(), big(lattice::T3_MULTIPLICITY_CAP));
                    Ok(Output {
                        table: census_table(&c.bins),
                        summary: Some(summary),
                    })
                }
            }
        }
        Command::Bihom {
            a,
            b,
            coeffs,
            x_max,
        } => {
            let g = BihomForm::new(*a, *b, coeffs)?;
            let count = solutions::bihom_count(&g, *x_max)?;
            let envelope = 20.0 * (*x_max as f64).powf(2.0 / *b as f64);
            let mut t = Table::new(&["a", "b", "X", "count", "envelope"]);
            t.push(vec![big(a), big(b), big(x_max), big(count), num(envelope)]);
            Ok(Output::table(t))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let result = execute(&cfg, input).and_then(|o| Ok(o.write(cfg.format, out)?));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs against the process's standard streams.
pub fn main_with_std() -> i32 {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    run(std::env::args_os(), &mut input, &mut out, &mut err)
}
