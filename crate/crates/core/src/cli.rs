//! Command-line front end.
//!
//! Every subcommand writes records, one per line, either as
//! `kind key=value ...` text (default) or as JSON objects
//! (`--format json`). All integers are rendered as base-10 strings so no
//! precision is lost. Record kinds and keys:
//!
//! | kind       | keys                                                      |
//! |------------|-----------------------------------------------------------|
//! | `solution` | `p x y z m w`                                             |
//! | `tuple`    | `p e f g l q n r`                                         |
//! | `trace`    | `p a b c d h u q r e l f g n` (`l f g n` absent if e = 0) |
//! | `report`   | `counts` or `checks`                                      |
//! | `error`    | `error` (stable code) and `message`                       |
//!
//! Exit codes: 0 success, 1 internal error, 2 domain precondition
//! violation, 64 usage error, 74 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::{exact_div, Int};
use crate::decomposition::{decompose, DecompositionTrace, PartialTrace};
use crate::error::Error;
use crate::oracle::{
    for_each_m, identity_fuzz, roundtrip_check_par, scan_m, Failure, SearchBounds, SearchReport,
    Subject,
};
use crate::parametrization::{generate, ParameterTuple, PrimeExp, Solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Generate and decompose integral solutions of x^p - m*y^p = z*w.
#[derive(Debug, Parser)]
#[command(name = "zwsolve", version)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print the full decomposition trace
    #[arg(long, global = true)]
    pub trace: bool,
    /// Worker threads for search and roundtrip
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Seed for the identity fuzzer
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate (x, y, z, m, w) from a prime p and (e, f, g, l, q, n, r)
    Generate {
        #[arg(long, value_parser = parse_prime)]
        p: PrimeExp,
        /// Comma-separated e,f,g,l,q,n,r
        #[arg(long, allow_hyphen_values = true, value_parser = parse_tuple)]
        tuple: SevenInts,
    },
    /// Recover (e, f, g, l, q, n, r) from a solution
    Decompose {
        #[arg(long, value_parser = parse_prime)]
        p: PrimeExp,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        x: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        y: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        z: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        m: Int,
        /// Computed as (x^p - m*y^p)/z when omitted
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        w: Option<Int>,
    },
    /// Check x^p - m*y^p = z*w and the theorem hypotheses
    Verify {
        #[arg(long, value_parser = parse_prime)]
        p: PrimeExp,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        x: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        y: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        z: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        m: Int,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        w: Int,
    },
    /// Enumerate every theorem-grade solution in a box
    Search {
        #[arg(long, value_parser = parse_prime)]
        p: PrimeExp,
        /// Maximum |x|, |y|, |z|
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Inclusive range lo..hi
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        m: MRange,
        /// Write records here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round-trip every solution in a box and fuzz the forward identities
    Roundtrip {
        #[arg(long, value_parser = parse_prime)]
        p: PrimeExp,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        m: MRange,
        /// Number of sampled parameter tuples
        #[arg(long, default_value_t = 1000)]
        fuzz_count: usize,
        /// Sampled entries lie in [-fuzz-range, fuzz-range]
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        fuzz_range: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SevenInts(pub [Int; 7]);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MRange {
    pub lo: Int,
    pub hi: Int,
}

fn parse_int(s: &str) -> Result<Int, String> {
    Int::from_str(s.trim()).map_err(|_| format!("'{s}' is not an integer"))
}

fn parse_prime(s: &str) -> Result<PrimeExp, String> {
    let v: u32 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a small positive integer"))?;
    PrimeExp::new(v).map_err(|e| e.to_string())
}

fn parse_tuple(s: &str) -> Result<SevenInts, String> {
    let vals = s.split(',').map(parse_int).collect::<Result<Vec<_>, _>>()?;
    let arr: [Int; 7] = vals
        .try_into()
        .map_err(|v: Vec<Int>| format!("expected 7 values e,f,g,l,q,n,r, got {}", v.len()))?;
    Ok(SevenInts(arr))
}

fn parse_range(s: &str) -> Result<MRange, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("'{s}' is not of the form lo..hi"))?;
    let (lo, hi) = (parse_int(lo)?, parse_int(hi)?);
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(MRange { lo, hi })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Solution(SolutionRecord),
    Tuple(TupleRecord),
    Trace(TraceRecord),
    Report(ReportRecord),
    Error(ErrorRecord),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionRecord {
    pub p: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub m: String,
    pub w: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleRecord {
    pub p: String,
    pub e: String,
    pub f: String,
    pub g: String,
    pub l: String,
    pub q: String,
    pub n: String,
    pub r: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub p: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub h: String,
    pub u: String,
    pub q: String,
    pub r: String,
    pub e: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Counts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Checks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub instances_checked: String,
    pub solutions_found: String,
    pub decompose_success: String,
    pub degenerate_e: String,
    pub identity_verified: String,
    pub failures: String,
    pub filtered_m_zero: String,
    pub filtered_w_zero: String,
    pub skipped_zero_z: String,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzCounts>,
}

/// Identity-fuzz counts reported alongside a round-trip sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzCounts {
    pub fuzz_tuples: String,
    pub fuzz_verified: String,
    pub fuzz_skipped_zero_z: String,
    pub fuzz_failures: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub identity: bool,
    pub nonzero: bool,
    pub pairwise_coprime: bool,
    pub theorem_grade: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
}

impl Record {
    pub fn solution(s: &Solution) -> Self {
        Record::Solution(SolutionRecord {
            p: s.p.to_string(),
            x: s.x.to_string(),
            y: s.y.to_string(),
            z: s.z.to_string(),
            m: s.m.to_string(),
            w: s.w.to_string(),
        })
    }

    pub fn tuple(t: &ParameterTuple) -> Self {
        Record::Tuple(TupleRecord {
            p: t.p.to_string(),
            e: t.e.to_string(),
            f: t.f.to_string(),
            g: t.g.to_string(),
            l: t.l.to_string(),
            q: t.q.to_string(),
            n: t.n.to_string(),
            r: t.r.to_string(),
        })
    }

    pub fn trace(p: PrimeExp, t: &DecompositionTrace) -> Self {
        Record::Trace(TraceRecord {
            p: p.to_string(),
            a: t.a.to_string(),
            b: t.b.to_string(),
            c: t.c.to_string(),
            d: t.d.to_string(),
            h: t.h.to_string(),
            u: t.u.to_string(),
            q: t.q.to_string(),
            r: t.r.to_string(),
            e: t.e.to_string(),
            l: Some(t.l.to_string()),
            f: Some(t.f.to_string()),
            g: Some(t.g.to_string()),
            n: Some(t.n.to_string()),
        })
    }

    pub fn partial_trace(p: PrimeExp, t: &PartialTrace) -> Self {
        Record::Trace(TraceRecord {
            p: p.to_string(),
            a: t.a.to_string(),
            b: t.b.to_string(),
            c: t.c.to_string(),
            d: t.d.to_string(),
            h: t.h.to_string(),
            u: t.u.to_string(),
            q: t.q.to_string(),
            r: t.r.to_string(),
            e: t.e.to_string(),
            l: None,
            f: None,
            g: None,
            n: None,
        })
    }

    pub fn counts(r: &SearchReport) -> Self {
        Record::Report(ReportRecord {
            counts: Some(Counts {
                instances_checked: r.instances_checked.to_string(),
                solutions_found: r.solutions_found.to_string(),
                decompose_success: r.decompose_success.to_string(),
                degenerate_e: r.degenerate_e.to_string(),
                identity_verified: r.identity_verified.to_string(),
                failures: r.failures.len().to_string(),
                filtered_m_zero: r.filtered_m_zero.to_string(),
                filtered_w_zero: r.filtered_w_zero.to_string(),
                skipped_zero_z: r.skipped_zero_z.to_string(),
                fuzz: None,
            }),
            checks: None,
        })
    }

    /// A round-trip sweep report with the fuzz run's counts kept apart.
    /// `failures` covers both runs.
    pub fn roundtrip_counts(sweep: &SearchReport, fuzz: &SearchReport) -> Self {
        let mut rec = Record::counts(sweep);
        if let Record::Report(ReportRecord {
            counts: Some(c), ..
        }) = &mut rec
        {
            c.failures = (sweep.failures.len() + fuzz.failures.len()).to_string();
            c.fuzz = Some(FuzzCounts {
                fuzz_tuples: fuzz.instances_checked.to_string(),
                fuzz_verified: fuzz.identity_verified.to_string(),
                fuzz_skipped_zero_z: fuzz.skipped_zero_z.to_string(),
                fuzz_failures: fuzz.failures.len().to_string(),
            });
        }
        rec
    }

    pub fn error(err: &Error) -> Self {
        Record::Error(ErrorRecord {
            error: err.code().to_string(),
            message: err.to_string(),
        })
    }

    /// Renders the record as one line without the trailing newline.
    pub fn render(&self, format: Format) -> String {
        let value = serde_json::to_value(self).expect("records serialize");
        match format {
            Format::Json => value.to_string(),
            Format::Text => {
                let mut line = String::new();
                if let serde_json::Value::Object(map) = value {
                    for (key, v) in map {
                        if key == "kind" {
                            line.push_str(v.as_str().unwrap_or_default());
                        } else {
                            push_text_field(&mut line, &key, &v);
                        }
                    }
                }
                line
            }
        }
    }
}

fn push_text_field(line: &mut String, key: &str, v: &serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Object(inner) => {
            for (k, v) in inner {
                push_text_field(line, k, v);
            }
        }
        Value::String(s) if s.contains(char::is_whitespace) => {
            line.push_str(&format!(" {key}={s:?}"));
        }
        Value::String(s) => line.push_str(&format!(" {key}={s}")),
        other => line.push_str(&format!(" {key}={other}")),
    }
}

struct Emitter<'a> {
    out: &'a mut dyn Write,
    format: Format,
}

impl Emitter<'_> {
    fn emit(&mut self, rec: &Record) -> io::Result<()> {
        writeln!(self.out, "{}", rec.render(self.format))
    }

    fn failures(&mut self, failures: &[Failure]) -> io::Result<()> {
        for f in failures {
            match &f.subject {
                Subject::Solution(s) => self.emit(&Record::solution(s))?,
                Subject::Tuple(t) => self.emit(&Record::tuple(t))?,
            }
            self.emit(&Record::error(&f.error))?;
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "I/O error: {e}");
            EXIT_IO
        }
    }
}

fn exit_for(err: &Error) -> i32 {
    if err.is_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_INTERNAL
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> io::Result<i32> {
    let jobs = usize::from(cli.jobs);
    match &cli.command {
        Command::Generate { p, tuple } => {
            let mut em = Emitter {
                out: stdout,
                format: cli.format,
            };
            let t = ParameterTuple::new(*p, tuple.0.clone());
            em.emit(&Record::tuple(&t))?;
            match generate(&t) {
                Ok(sol) => {
                    em.emit(&Record::solution(&sol))?;
                    Ok(EXIT_OK)
                }
                Err(err) => {
                    em.emit(&Record::error(&err))?;
                    Ok(exit_for(&err))
                }
            }
        }
        Command::Decompose { p, x, y, z, m, w } => {
            let mut em = Emitter {
                out: stdout,
                format: cli.format,
            };
            cmd_decompose(&mut em, *p, [x, y, z, m], w.as_ref(), cli.trace)
        }
        Command::Verify { p, x, y, z, m, w } => {
            let mut em = Emitter {
                out: stdout,
                format: cli.format,
            };
            let sol = Solution {
                p: *p,
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                m: m.clone(),
                w: w.clone(),
            };
            let checks = Checks {
                identity: sol.identity_holds(),
                nonzero: sol.all_nonzero(),
                pairwise_coprime: sol.pairwise_coprime(),
                theorem_grade: sol.is_theorem_grade(),
            };
            em.emit(&Record::solution(&sol))?;
            em.emit(&Record::Report(ReportRecord {
                counts: None,
                checks: Some(checks.clone()),
            }))?;
            Ok(if checks.identity {
                EXIT_OK
            } else {
                EXIT_DOMAIN
            })
        }
        Command::Search { p, bound, m, out } => {
            let bounds = match SearchBounds::new(*p, *bound, m.lo.clone(), m.hi.clone()) {
                Ok(b) => b,
                Err(err) => {
                    let mut em = Emitter {
                        out: stdout,
                        format: cli.format,
                    };
                    em.emit(&Record::error(&err))?;
                    return Ok(EXIT_USAGE);
                }
            };
            match out {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    cmd_search(&bounds, jobs, cli.format, &mut file)?;
                    file.flush()?;
                }
                None => cmd_search(&bounds, jobs, cli.format, stdout)?,
            }
            Ok(EXIT_OK)
        }
        Command::Roundtrip {
            p,
            bound,
            m,
            fuzz_count,
            fuzz_range,
        } => {
            let mut em = Emitter {
                out: stdout,
                format: cli.format,
            };
            let bounds = match SearchBounds::new(*p, *bound, m.lo.clone(), m.hi.clone()) {
                Ok(b) => b,
                Err(err) => {
                    em.emit(&Record::error(&err))?;
                    return Ok(EXIT_USAGE);
                }
            };
            let sweep = match roundtrip_check_par(&bounds, jobs) {
                Ok(r) => r,
                Err(err) => {
                    em.emit(&Record::error(&err))?;
                    return Ok(EXIT_INTERNAL);
                }
            };
            let fuzz = identity_fuzz(*p, *fuzz_range, *fuzz_count, cli.seed);
            em.failures(&sweep.failures)?;
            em.failures(&fuzz.failures)?;
            em.emit(&Record::roundtrip_counts(&sweep, &fuzz))?;
            let clean = sweep.failures.is_empty() && fuzz.failures.is_empty();
            Ok(if clean && sweep.is_consistent() && fuzz.is_consistent() {
                EXIT_OK
            } else {
                EXIT_INTERNAL
            })
        }
    }
}

fn cmd_decompose(
    em: &mut Emitter<'_>,
    p: PrimeExp,
    [x, y, z, m]: [&Int; 4],
    w: Option<&Int>,
    with_trace: bool,
) -> io::Result<i32> {
    let mut sol = Solution {
        p,
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        m: m.clone(),
        w: Int::default(),
    };
    let implied = match exact_div(&sol.lhs(), z) {
        Ok(v) => v,
        Err(Error::ZeroDivisor) => {
            let err = Error::NotTheoremGrade("z must be nonzero".into());
            em.emit(&Record::error(&err))?;
            return Ok(EXIT_DOMAIN);
        }
        Err(_) => {
            let err = Error::NotTheoremGrade("z does not divide x^p - m*y^p".into());
            em.emit(&Record::error(&err))?;
            return Ok(EXIT_DOMAIN);
        }
    };
    if let Some(given) = w {
        if *given != implied {
            em.emit(&Record::Error(ErrorRecord {
                error: "WMismatch".into(),
                message: format!("given w = {given} but (x^p - m*y^p)/z = {implied}"),
            }))?;
            return Ok(EXIT_DOMAIN);
        }
    }
    sol.w = implied;
    match decompose(&sol) {
        Ok(d) => {
            em.emit(&Record::tuple(&d.tuple))?;
            if with_trace {
                em.emit(&Record::trace(p, &d.trace))?;
            }
            Ok(EXIT_OK)
        }
        Err(err) => {
            em.emit(&Record::error(&err))?;
            if let Error::DegenerateE(Some(partial)) = &err {
                em.emit(&Record::partial_trace(p, partial))?;
            }
            Ok(exit_for(&err))
        }
    }
}

fn cmd_search(
    bounds: &SearchBounds,
    jobs: usize,
    format: Format,
    out: &mut dyn Write,
) -> io::Result<()> {
    let mut em = Emitter { out, format };
    let mut report = SearchReport::default();
    let mut io_err = None;
    let scanned = for_each_m(
        bounds,
        jobs,
        |m| scan_m(bounds, m),
        |slices| {
            for slice in slices {
                for sol in &slice.solutions {
                    if let Err(e) = em.emit(&Record::solution(sol)) {
                        io_err = Some(e);
                        return Err(Error::Precondition("write failed".into()));
                    }
                }
                report.instances_checked += slice.instances_checked;
                report.solutions_found += slice.solutions.len() as u64;
                report.filtered_m_zero += slice.filtered_m_zero;
                report.filtered_w_zero += slice.filtered_w_zero;
            }
            Ok(())
        },
    );
    if let Some(e) = io_err {
        return Err(e);
    }
    if let Err(e) = scanned {
        return Err(io::Error::other(e.to_string()));
    }
    em.emit(&Record::counts(&report))
}
