//! Command-line front end. Every result is written to stdout as CSV or
//! JSON. Floats in CSV carry 17 significant digits; JSON numbers use the
//! shortest representation that round-trips.
//!
//! Exit codes: 0 success, 1 failed verification or computation, 2 usage,
//! domain or contract error.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::acceptance;
use crate::bernoulli::RationalTable;
use crate::error::{Error, Result};
use crate::expansions::{
    barnesg_remainder, cm_fixture, loggamma, loggamma2, loggamma2_remainder, FixtureName,
};
use crate::kernels::{v_integral, v_recursion, v_series, v_value};
use crate::monotonicity::{cm_order_check, log_grid, CMOrderSpec, MonotonicityReport};
use crate::quadrature::{binet_residual, QuadOptions, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(
    name = "cmgamma",
    version,
    about = "Gamma-type remainders and complete monotonicity checks"
)]
pub struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a function or remainder.
    #[command(subcommand)]
    Eval(Eval),
    /// Print exact tables.
    #[command(subcommand)]
    Table(Table),
    /// Run numerical checks.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Debug, Subcommand)]
pub enum Eval {
    /// Bracket for log Γ(x).
    Loggamma {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Main part and remainder of the log Γ₂ expansion with M terms.
    Loggamma2 {
        #[arg(long)]
        w: f64,
        #[arg(long = "M")]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// The kernel V_n(t).
    Vkernel {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: f64,
        /// Representation; by default the most accurate one for (n, t).
        #[arg(long, value_enum)]
        rep: Option<Rep>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Remainder after n terms of an expansion.
    Remainder(RemainderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rep {
    Series,
    Recursion,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// log Γ(x) minus its Stirling partial sum
    Euler,
    /// P_n(x) of the Barnes G expansion
    Barnesg,
    /// R_{2,2n}(x) of the log Γ₂ expansion
    Gamma2,
}

#[derive(Debug, Args)]
pub struct RemainderArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Table {
    /// Bernoulli numbers B_k (or B_{2,k} with --double) for k ≤ max.
    Bernoulli {
        #[arg(long)]
        max: usize,
        #[arg(long)]
        double: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureArg {
    Rn,
    Pn,
    R2,
    Fn,
}

impl From<FixtureArg> for FixtureName {
    fn from(f: FixtureArg) -> Self {
        match f {
            FixtureArg::Rn => FixtureName::RN,
            FixtureArg::Pn => FixtureName::PN,
            FixtureArg::R2 => FixtureName::R22N,
            FixtureArg::Fn => FixtureName::FN,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Complete monotonicity of order r for a remainder fixture.
    Cm {
        #[arg(long, value_enum)]
        fixture: FixtureArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        order: f64,
        #[arg(long)]
        max_diff: Option<u32>,
    },
    /// Positivity of the kernels and helpers for one n.
    Kernels {
        #[arg(long)]
        n: u32,
    },
    /// The full acceptance suite.
    All,
}

// Building the exact table costs about 3 s at this size and grows steeply
// beyond it.
const TABLE_CAP: usize = 500;

// Column name and value of one output field.
type Record = Vec<(&'static str, Value)>;

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    // non-finite values have no JSON number form
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

fn write_records(out: &mut dyn Write, format: Format, records: &[Record]) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.iter().map(|(k, _)| *k))?;
            }
            for r in records {
                w.write_record(r.iter().map(|(_, v)| csv_cell(v)))?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|r| {
                    Value::Object(
                        r.iter()
                            .map(|(k, v)| (k.to_string(), v.clone()))
                            .collect::<Map<_, _>>(),
                    )
                })
                .collect();
            let v = if rows.len() == 1 {
                rows[0].clone()
            } else {
                Value::Array(rows)
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)
        }
    }
}

fn margin_records(check: Option<&str>, report: &MonotonicityReport) -> Vec<Record> {
    report
        .margins
        .iter()
        .map(|m| {
            let mut r: Record = Vec::new();
            if let Some(c) = check {
                r.push(("check", json!(c)));
            }
            r.extend([
                ("order", json!(m.order)),
                ("x", num(m.x)),
                ("step", num(m.step)),
                ("margin", num(m.margin)),
                ("scaled", num(m.scaled)),
            ]);
            r
        })
        .collect()
}

/// What a subcommand produced, and whether it counts as success.
struct Output {
    ok: bool,
    summary: Option<String>,
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Output> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    let fmt = cli.format;
    let done = Output {
        ok: true,
        summary: None,
    };
    match &cli.command {
        Command::Eval(Eval::Loggamma { x, tol }) => {
            let b = loggamma(*x, *tol)?;
            let rec = vec![
                ("x", num(*x)),
                ("lower", num(b.lower)),
                ("upper", num(b.upper)),
                ("midpoint", num(b.midpoint())),
                ("width", num(b.width())),
                ("n_used", json!(b.n_used)),
                ("reduction_shift", json!(b.reduction_shift)),
            ];
            write_records(out, fmt, &[rec]).map_err(io)?;
            Ok(done)
        }
        Command::Eval(Eval::Loggamma2 { w, m, tol }) => {
            let e = loggamma2(*w, *m, *tol)?;
            // no bound on R_{2,M} is known; the change from M to M + 2 stands in
            let delta = (loggamma2(*w, *m + 2, *tol)?.total() - e.total()).abs();
            let rec = vec![
                ("w", num(*w)),
                ("M", json!(e.m)),
                ("main", num(e.main)),
                ("remainder", num(e.remainder)),
                ("total", num(e.total())),
                ("sign_check", json!(e.sign_check)),
                ("delta_m_plus_2", num(delta)),
            ];
            write_records(out, fmt, &[rec]).map_err(io)?;
            Ok(done)
        }
        Command::Eval(Eval::Vkernel { n, t, rep, tol }) => {
            let (name, value, bound) = match rep {
                None => ("default", v_value(*n, *t)?, None),
                Some(Rep::Series) => {
                    let e = v_series(*n, *t, *tol)?;
                    ("series", e.value, Some(e.error_bound))
                }
                Some(Rep::Recursion) => ("recursion", v_recursion(*n, *t)?, None),
                Some(Rep::Integral) => ("integral", v_integral(*n, *t)?, None),
            };
            let rec = vec![
                ("n", json!(n)),
                ("t", num(*t)),
                ("rep", json!(name)),
                ("value", num(value)),
                ("error_bound", bound.map_or(Value::Null, num)),
            ];
            write_records(out, fmt, &[rec]).map_err(io)?;
            Ok(done)
        }
        Command::Eval(Eval::Remainder(a)) => {
            let value = match a.family {
                Family::Euler => binet_residual(a.n, a.x, QuadOptions::absolute(a.tol))?.value,
                Family::Barnesg => barnesg_remainder(a.n, a.x, a.tol)?,
                Family::Gamma2 => loggamma2_remainder(a.x, 2 * a.n, a.tol)?,
            };
            let family = match a.family {
                Family::Euler => "euler",
                Family::Barnesg => "barnesg",
                Family::Gamma2 => "gamma2",
            };
            let rec = vec![
                ("family", json!(family)),
                ("n", json!(a.n)),
                ("x", num(a.x)),
                ("value", num(value)),
            ];
            write_records(out, fmt, &[rec]).map_err(io)?;
            Ok(done)
        }
        Command::Table(Table::Bernoulli { max, double }) => {
            if *max > TABLE_CAP {
                return Err(Error::TableLimit {
                    index: *max,
                    max: TABLE_CAP,
                });
            }
            let table = RationalTable::new((*max).max(2));
            match fmt {
                Format::Csv => table.write_csv(out, *max, *double)?,
                Format::Json => {
                    let mut rows = Vec::new();
                    for k in 0..=*max {
                        let b = if *double {
                            table.double_bernoulli_number(k)?
                        } else {
                            table.bernoulli_number(k)?
                        };
                        rows.push(vec![
                            ("index", json!(k)),
                            ("numerator", json!(b.numer().to_string())),
                            ("denominator", json!(b.denom().to_string())),
                        ]);
                    }
                    write_records(out, fmt, &rows).map_err(io)?;
                }
            }
            Ok(done)
        }
        Command::Verify(Verify::Cm {
            fixture,
            n,
            order,
            max_diff,
        }) => {
            let f = cm_fixture((*fixture).into(), *n)?;
            let mut spec = CMOrderSpec::with_order(*order);
            if let Some(m) = max_diff {
                spec.max_diff_order = *m;
            }
            let mut report = cm_order_check(&*f, &spec)?;
            if let Value::Object(map) = &mut report.spec {
                map.insert(
                    "fixture".into(),
                    json!(format!("{:?}", FixtureName::from(*fixture))),
                );
                map.insert("n".into(), json!(n));
            }
            match fmt {
                Format::Json => writeln!(out, "{}", report.to_json()).map_err(io)?,
                Format::Csv => {
                    write_records(out, fmt, &margin_records(None, &report)).map_err(io)?
                }
            }
            Ok(Output {
                ok: report.passed(),
                summary: Some(format!(
                    "verdict {:?}, min scaled margin {:.3e}, tolerance {:.0e}",
                    report.verdict, report.min_margin, report.tolerance_used
                )),
            })
        }
        Command::Verify(Verify::Kernels { n }) => {
            let grid = log_grid(1e-3, 50.0, 20);
            let reports = acceptance::kernel_suite(*n, &grid)?;
            let ok = reports.iter().all(|(_, r)| r.passed());
            match fmt {
                Format::Json => {
                    let v: Map<String, Value> = reports
                        .iter()
                        .map(|(name, r)| {
                            (
                                name.clone(),
                                serde_json::to_value(r).expect("report is serializable"),
                            )
                        })
                        .collect();
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&v).map_err(|e| io(e.into()))?
                    )
                    .map_err(io)?;
                }
                Format::Csv => {
                    let rows: Vec<Record> = reports
                        .iter()
                        .flat_map(|(name, r)| margin_records(Some(name), r))
                        .collect();
                    write_records(out, fmt, &rows).map_err(io)?;
                }
            }
            let failed: Vec<&str> = reports
                .iter()
                .filter(|(_, r)| !r.passed())
                .map(|(n, _)| n.as_str())
                .collect();
            Ok(Output {
                ok,
                summary: Some(if ok {
                    format!("{} checks pass", reports.len())
                } else {
                    format!("failing: {}", failed.join(", "))
                }),
            })
        }
        Command::Verify(Verify::All) => {
            let outcomes = acceptance::run_all();
            let ok = outcomes.iter().all(|o| o.passed);
            match fmt {
                Format::Json => {
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&outcomes).map_err(|e| io(e.into()))?
                    )
                    .map_err(io)?;
                }
                Format::Csv => {
                    let rows: Vec<Record> = outcomes
                        .iter()
                        .map(|o| {
                            vec![
                                ("criterion", json!(o.id)),
                                ("name", json!(o.name)),
                                ("verdict", json!(if o.passed { "pass" } else { "fail" })),
                                ("detail", json!(o.detail)),
                            ]
                        })
                        .collect();
                    write_records(out, fmt, &rows).map_err(io)?;
                }
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            Ok(Output {
                ok,
                summary: Some(format!("{passed}/{} criteria pass", outcomes.len())),
            })
        }
    }
}

/// Exit code for an error: 1 when a computation failed, 2 when the input
/// was unusable.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Convergence { .. } | Error::Accuracy { .. } => 1,
        Error::TableLimit { .. }
        | Error::Domain(_)
        | Error::Contract(_)
        | Error::InvalidArgument(_) => 2,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(o) => {
            if let Some(s) = o.summary {
                let _ = writeln!(err, "{s}");
            }
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("cmgamma").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn loggamma_csv() {
        let (code, out, _) = call(&["eval", "loggamma", "--x", "6", "--tol", "1e-12"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        let mid: f64 = row[3].parse().unwrap();
        assert!((mid - 120f64.ln()).abs() < 5e-13);
        assert_eq!(
            row[3].split('e').next().unwrap().len(),
            18,
            "17 significant digits"
        );
    }

    #[test]
    fn bernoulli_table() {
        let (code, out, _) = call(&["table", "bernoulli", "--max", "8"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "4,-1,30"));
        let (_, out, _) = call(&["table", "bernoulli", "--max", "3", "--double"]);
        assert!(out.lines().any(|l| l == "2,5,6"));
    }

    #[test]
    fn usage_and_domain_errors_exit_2() {
        assert_eq!(call(&["eval"]).0, 2);
        assert_eq!(call(&["eval", "loggamma", "--x", "-1"]).0, 2);
        assert_eq!(
            call(&[
                "verify",
                "cm",
                "--fixture",
                "xx",
                "--n",
                "1",
                "--order",
                "1"
            ])
            .0,
            2
        );
        assert_eq!(
            call(&[
                "eval",
                "vkernel",
                "--n",
                "1",
                "--t",
                "0.001",
                "--rep",
                "recursion"
            ])
            .0,
            2
        );
    }

    #[test]
    fn json_output() {
        let (code, out, _) = call(&[
            "--format",
            "json",
            "eval",
            "loggamma2",
            "--w",
            "3",
            "--M",
            "4",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["M"], 4);
        assert_eq!(v["sign_check"], true);
    }

    #[test]
    fn remainder_families() {
        let (code, out, _) = call(&[
            "eval",
            "remainder",
            "--family",
            "euler",
            "--n",
            "1",
            "--x",
            "10",
        ]);
        assert_eq!(code, 0);
        let v: f64 = out
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(3)
            .unwrap()
            .parse()
            .unwrap();
        // log Γ(10) - partial_1(10) = -R_1(10)
        assert!(v < 0.0 && v.abs() < 1.0 / (360.0 * 1000.0));
        for family in ["barnesg", "gamma2"] {
            assert_eq!(
                call(&[
                    "eval",
                    "remainder",
                    "--family",
                    family,
                    "--n",
                    "2",
                    "--x",
                    "3"
                ])
                .0,
                0
            );
        }
    }
}
