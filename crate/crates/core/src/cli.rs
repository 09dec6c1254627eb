//! The `umgh` command line tool.
//!
//! Exit codes: 0 on success, 1 on domain errors (invalid input, budgets),
//! 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::approx::{abs_ultrametricity, approx_dgh, single_linkage};
use crate::dgh::{check_fgc, dgh_exact, gamma_sgc, Correspondence, DghOptions, Method};
use crate::error::{Error, Result};
use crate::io::{matrix_to_csv, read_input, InputDocument};
use crate::oracle::brute_dghp;
use crate::pgh::{dghp, dghp_approx, PExponent, RootValue};
use crate::scalar::Scalar;
use crate::space::{spectrum, validate, FiniteSpace, MetricSpace, SpaceKind, UltraDissimilaritySpace, UltrametricSpace};
use crate::tree::{open_partition, SubspaceRef, UMTree};
use crate::ugh::{treegram_closed_quotient, ugh_dissimilarity_with, ugh_with, Search};

#[derive(Parser, Debug)]
#[command(name = "umgh", version, about = "Gromov-Hausdorff distances between finite ultrametric spaces")]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Render numbers as decimals with this many fractional digits.
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,
    /// Worker threads for the exact distance search.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a matrix against the axioms of a space kind.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ultrametric")]
        kind: Kind,
    },
    /// Distinct distance values, ascending.
    Spectrum { file: PathBuf },
    /// Closed quotient (as a matrix) or open partition (as blocks) at level t.
    Quotient {
        file: PathBuf,
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value = "closed")]
        mode: Mode,
    },
    /// Gromov-Hausdorff ultrametric.
    Ugh {
        x: PathBuf,
        y: PathBuf,
        /// Scan levels in order instead of binary search.
        #[arg(long)]
        linear: bool,
    },
    /// Exact Gromov-Hausdorff distance with a witness correspondence.
    Dgh {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_enum, default_value = "dp")]
        method: DghMethod,
    },
    /// The p-Gromov-Hausdorff distance; p is a positive integer or "inf".
    Dghp {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long, value_enum, default_value = "dp")]
        method: PMethod,
    },
    /// Single-linkage ultrametric of a metric.
    Slink { file: PathBuf },
    /// Absolute ultrametricity of a metric.
    Ultrametricity { file: PathBuf },
    /// Distance between single-linkage ultrametrics with its additive error bound.
    ApproxDgh { x: PathBuf, y: PathBuf },
    /// Growth parameter at a given epsilon.
    Gamma {
        file: PathBuf,
        #[arg(long)]
        eps: String,
        /// Also check the first growth condition with this gamma.
        #[arg(long, value_name = "G")]
        fgc: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Metric,
    Ultrametric,
    UltraDissimilarity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Closed,
    Open,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DghMethod {
    Dp,
    Rec,
    Brute,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PMethod {
    Dp,
    Brute,
}

/// An input that is either an ultrametric or carries birth times.
enum Loaded {
    Ultra(UltrametricSpace),
    Diss(UltraDissimilaritySpace),
}

impl Loaded {
    fn to_dissimilarity(&self) -> UltraDissimilaritySpace {
        match self {
            Loaded::Ultra(u) => u.as_dissimilarity(),
            Loaded::Diss(d) => d.clone(),
        }
    }
}

fn load_any(path: &Path) -> Result<Loaded> {
    Ok(match read_input(path)? {
        InputDocument::Tree(t) if t.has_births() => Loaded::Diss(t.to_dissimilarity()),
        InputDocument::Tree(t) => Loaded::Ultra(t.to_matrix()),
        InputDocument::Matrix { rows, labels } => {
            if rows.iter().enumerate().all(|(i, r)| r.get(i).is_none_or(Scalar::is_zero)) {
                Loaded::Ultra(UltrametricSpace::new(rows, labels)?)
            } else {
                Loaded::Diss(UltraDissimilaritySpace::new(rows, labels)?)
            }
        }
    })
}

fn load_ultrametric(path: &Path) -> Result<UltrametricSpace> {
    match read_input(path)? {
        InputDocument::Tree(t) if t.has_births() => {
            Err(Error::InvalidTree("leaves carry birth times; an ultrametric tree was expected".into()))
        }
        InputDocument::Tree(t) => Ok(t.to_matrix()),
        InputDocument::Matrix { rows, labels } => UltrametricSpace::new(rows, labels),
    }
}

fn load_metric(path: &Path) -> Result<MetricSpace> {
    match read_input(path)? {
        InputDocument::Tree(t) if t.has_births() => {
            Err(Error::InvalidTree("leaves carry birth times; a metric was expected".into()))
        }
        InputDocument::Tree(t) => Ok(t.to_matrix().as_metric()),
        InputDocument::Matrix { rows, labels } => MetricSpace::new(rows, labels),
    }
}

fn parse_scalar(flag: &str, text: &str) -> Result<Scalar> {
    text.parse().map_err(|_| Error::Parse(format!("--{flag}: not a number: {text:?}")))
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    json: bool,
    decimal: Option<usize>,
}

impl Printer<'_> {
    fn num(&self, v: &Scalar) -> String {
        match self.decimal {
            Some(k) => v.to_decimal(k),
            None => v.to_string(),
        }
    }

    fn root(&self, v: &RootValue) -> String {
        match self.decimal {
            Some(k) => v.to_decimal(k),
            None => v.to_string(),
        }
    }

    fn emit(&mut self, text: impl FnOnce(&Self) -> String, value: impl FnOnce(&Self) -> Value) -> Result<()> {
        let line = if self.json { value(self).to_string() } else { text(self) };
        let line = line.trim_end_matches('\n');
        writeln!(self.out, "{line}").map_err(|e| Error::Io(e.to_string()))
    }

    fn matrix<S: FiniteSpace>(&mut self, space: &S) -> Result<()> {
        self.emit(
            |_| matrix_to_csv(space),
            |p| {
                let rows: Vec<Vec<String>> = space.to_rows().iter().map(|r| r.iter().map(|v| p.num(v)).collect()).collect();
                json!({ "labels": space.labels(), "matrix": rows })
            },
        )
    }
}

fn correspondence_json<X: FiniteSpace, Y: FiniteSpace>(c: &Correspondence, x: &X, y: &Y) -> Value {
    Value::Array(c.labeled(x, y).into_iter().map(|(a, b)| json!([a, b])).collect())
}

fn correspondence_text<X: FiniteSpace, Y: FiniteSpace>(c: &Correspondence, x: &X, y: &Y) -> String {
    c.labeled(x, y).into_iter().map(|(a, b)| format!("{a}\t{b}\n")).collect()
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut opts = DghOptions::from_env();
    if let Some(t) = cli.threads {
        opts.threads = t.max(1);
    }
    let mut p = Printer { out, json: cli.json, decimal: cli.decimal };
    match cli.command {
        Command::Validate { file, kind } => {
            let (rows, labels) = match read_input(&file)? {
                InputDocument::Matrix { rows, labels } => (rows, labels),
                InputDocument::Tree(t) => {
                    let m = t.to_dissimilarity();
                    (m.to_rows(), Some(m.labels().to_vec()))
                }
            };
            let kind = match kind {
                Kind::Metric => SpaceKind::Metric,
                Kind::Ultrametric => SpaceKind::Ultrametric,
                Kind::UltraDissimilarity => SpaceKind::UltraDissimilarity,
            };
            let n = rows.len();
            validate(rows, labels, kind)?;
            let name = match kind {
                SpaceKind::Metric => "metric",
                SpaceKind::Ultrametric => "ultrametric",
                SpaceKind::UltraDissimilarity => "ultra-dissimilarity",
            };
            p.emit(|_| format!("ok {name} {n}"), |_| json!({ "valid": true, "kind": name, "points": n }))
        }
        Command::Spectrum { file } => {
            let spec = match load_any(&file)? {
                Loaded::Ultra(u) => spectrum(&u),
                Loaded::Diss(d) => spectrum(&d),
            };
            p.emit(
                |p| spec.values().iter().map(|v| p.num(v)).collect::<Vec<_>>().join(" "),
                |p| json!(spec.values().iter().map(|v| p.num(v)).collect::<Vec<_>>()),
            )
        }
        Command::Quotient { file, t, mode } => {
            let t = parse_scalar("t", &t)?;
            if t.is_negative() {
                return Err(Error::Parse("--t: level must be nonnegative".into()));
            }
            let loaded = load_any(&file)?;
            match (mode, loaded) {
                (Mode::Closed, Loaded::Ultra(u)) => p.matrix(&UMTree::from_space(&u).closed_quotient(&t).to_matrix()),
                (Mode::Closed, Loaded::Diss(d)) => p.matrix(&treegram_closed_quotient(&d, &t)),
                (Mode::Open, Loaded::Ultra(u)) => {
                    let tree = Arc::new(UMTree::from_space(&u));
                    let blocks: Vec<Vec<String>> = open_partition(&SubspaceRef::whole(&tree), &t)
                        .blocks
                        .iter()
                        .map(|b| b.labels().into_iter().map(str::to_string).collect())
                        .collect();
                    p.emit(
                        |_| blocks.iter().map(|b| b.join(" ")).collect::<Vec<_>>().join("\n"),
                        |_| json!(blocks),
                    )
                }
                (Mode::Open, Loaded::Diss(_)) => {
                    Err(Error::PreconditionViolated("open partitions need an ultrametric input".into()))
                }
            }
        }
        Command::Ugh { x, y, linear } => {
            let search = if linear { Search::Linear } else { Search::Binary };
            let v = match (load_any(&x)?, load_any(&y)?) {
                (Loaded::Ultra(a), Loaded::Ultra(b)) => ugh_with(&a, &b, search),
                (a, b) => ugh_dissimilarity_with(&a.to_dissimilarity(), &b.to_dissimilarity(), search),
            };
            p.emit(|p| p.num(&v), |p| json!({ "distance": p.num(&v) }))
        }
        Command::Dgh { x, y, method } => {
            let (x, y) = (load_ultrametric(&x)?, load_ultrametric(&y)?);
            let (distance, c) = match method {
                DghMethod::Dp | DghMethod::Rec => {
                    let m = if matches!(method, DghMethod::Dp) { Method::Dp } else { Method::Rec };
                    let r = dgh_exact(&x, &y, m, &opts)?;
                    (r.distance, r.correspondence)
                }
                DghMethod::Brute => {
                    let r = brute_dghp(&x, &y, &PExponent::finite(1))?;
                    (r.value.as_rational().expect("p = 1 values are rational"), r.correspondence)
                }
            };
            p.emit(
                |p| format!("{}\n{}", p.num(&distance), correspondence_text(&c, &x, &y)),
                |p| json!({ "distance": p.num(&distance), "correspondence": correspondence_json(&c, &x, &y) }),
            )
        }
        Command::Dghp { x, y, p: exponent, method } => {
            let (x, y) = (load_ultrametric(&x)?, load_ultrametric(&y)?);
            let e: PExponent = exponent.parse()?;
            match (e.integer(), method) {
                (Err(_), PMethod::Dp) => {
                    let PExponent::Finite(q) = &e else { unreachable!("infinity is an integer exponent") };
                    let v = dghp_approx(&x, &y, q.to_f64(), &opts)?;
                    p.emit(|_| format!("{v}"), |_| json!({ "distance": v, "p": exponent, "approximate": true }))
                }
                (Err(err), PMethod::Brute) => Err(err),
                (Ok(_), m) => {
                    let v = match m {
                        PMethod::Dp => dghp(&x, &y, &e, &opts)?,
                        PMethod::Brute => brute_dghp(&x, &y, &e)?.value,
                    };
                    p.emit(
                        |p| p.root(&v),
                        |p| {
                            json!({
                                "distance": p.root(&v),
                                "p": e.to_string(),
                                "radicand": v.radicand.to_string(),
                                "degree": v.degree,
                            })
                        },
                    )
                }
            }
        }
        Command::Slink { file } => {
            let m = load_metric(&file)?;
            p.matrix(&single_linkage(&m))
        }
        Command::Ultrametricity { file } => {
            let v = abs_ultrametricity(&load_metric(&file)?);
            p.emit(|p| p.num(&v), |p| json!({ "ultrametricity": p.num(&v) }))
        }
        Command::ApproxDgh { x, y } => {
            let r = approx_dgh(&load_metric(&x)?, &load_metric(&y)?, &opts)?;
            p.emit(
                |p| format!("value {}\nadditive_bound {}", p.num(&r.value), p.num(&r.additive_bound)),
                |p| {
                    json!({
                        "value": p.num(&r.value),
                        "additive_bound": p.num(&r.additive_bound),
                        "delta": p.num(&r.delta),
                    })
                },
            )
        }
        Command::Gamma { file, eps, fgc } => {
            let x = load_ultrametric(&file)?;
            let eps = parse_scalar("eps", &eps)?;
            if eps.is_negative() {
                return Err(Error::Parse("--eps: must be nonnegative".into()));
            }
            let report = gamma_sgc(&x, &eps);
            let fgc = fgc.map(|g| (g, check_fgc(&x, &eps, g)));
            p.emit(
                |_| match fgc {
                    Some((g, ok)) => format!("{}\nfgc({g}) {ok}", report.gamma),
                    None => report.gamma.to_string(),
                },
                |p| {
                    let mut v = json!({ "epsilon": p.num(&report.epsilon), "gamma": report.gamma });
                    if let Some((g, ok)) = fgc {
                        v["fgc"] = json!({ "gamma": g, "holds": ok });
                    }
                    v
                },
            )
        }
    }
}

/// Run the tool on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            1
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
