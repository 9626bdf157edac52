//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for computation errors (domain, conditioning,
//! ...) and failed verifications, 2 for unusable invocations.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use polykernel_core::kernelseries::{product_kernel, product_point_bound};
use polykernel_core::orthopoly::build_basis;
use polykernel_core::{
    Error, KernelParams, MeasureSpec, ReproducingKernel, SeriesKernel, TruncationPolicy,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::parse_point;
use crate::suites::{self, AnyKernel, Method, Suite};

pub const SCHEMA: &str = "polykernel/1";

#[derive(Debug, Parser)]
#[command(
    name = "polykernel",
    version,
    about = "Reproducing kernels of polyanalytic spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate K(z, w) at one point pair or over a grid of z.
    Eval(EvalArgs),
    /// Closed form against the series on a grid of point pairs.
    Compare(CompareArgs),
    /// Diagonal values K(r, r) along the positive axis.
    Table(TableArgs),
    /// Run verification suites; exit code 0 iff all asserted checks pass.
    Verify(VerifyArgs),
    /// Moments s_0..s_D of the radial profile.
    Moments(MomentsArgs),
    /// Coefficients of the orthonormal polynomials P_{d,0..n}.
    Basis(BasisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Bergman,
    Fock,
    Atoms,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Radial profile; a comma list gives one per coordinate.
    #[arg(long, value_delimiter = ',', default_value = "bergman")]
    measure: Vec<Kind>,
    /// Weight exponent (> -1); a comma list gives one per coordinate.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0",
        allow_negative_numbers = true
    )]
    alpha: Vec<f64>,
    /// Atoms as "t:w,t:w,..."; groups separated by ';' per coordinate.
    #[arg(long)]
    atoms: Option<String>,
    /// Raw moments s_0,s_1,...
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    moments: Vec<f64>,
    /// File of raw moments, one per line.
    #[arg(long)]
    moments_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Polyanalytic order.
    #[arg(long, default_value_t = 1)]
    q: usize,
    /// Hard cap on the number of series terms.
    #[arg(long, env = "POLYKERNEL_MAX_TERMS")]
    max_terms: Option<usize>,
    /// Relative size below which a series term counts as small.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, value_enum, default_value = "series")]
    method: Method,
    /// First point; comma-separated coordinates for product kernels.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Second point.
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    /// Grid of z as "re0:re1:im0:im1:step", scanned row by row from im0.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "z")]
    grid: Option<String>,
    /// Also report the point-evaluation bound at z.
    #[arg(long)]
    bound: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, value_enum, default_value = "closed")]
    method: Method,
    /// Radius of the point set.
    #[arg(long)]
    radius: Option<f64>,
    /// Number of points; all ordered pairs are compared.
    #[arg(long, default_value_t = 9)]
    points: usize,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Largest r.
    #[arg(long, default_value_t = 0.9)]
    rmax: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Kernel backends to check; defaults to series and, where one exists, closed.
    #[arg(long, value_enum, value_delimiter = ',')]
    method: Vec<Method>,
    /// Emit the reports but never fail.
    #[arg(long)]
    report_only: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Largest d.
    #[arg(long, default_value_t = 10)]
    max_d: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct BasisArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long, default_value_t = 0)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// Why a run stopped.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parameter(_) => "parameter",
        Error::Domain { .. } => "domain",
        Error::Conditioning { .. } => "conditioning",
        Error::Rank { .. } => "rank",
        Error::MomentUnavailable(_) => "moment_unavailable",
        Error::Estimation { .. } => "estimation",
        Error::Index(_) => "index",
        Error::Shape { .. } => "shape",
        Error::Unsupported(_) => "unsupported",
        Error::Configuration(_) => "configuration",
    }
}

fn parse_atoms(group: &str) -> Result<MeasureSpec, Failure> {
    let mut pairs = Vec::new();
    for item in group.split(',') {
        let (t, w) = item
            .split_once(':')
            .ok_or_else(|| usage(format!("atom {item:?} is not of the form t:w")))?;
        let t: f64 = t
            .parse()
            .map_err(|_| usage(format!("bad atom position {t:?}")))?;
        let w: f64 = w
            .parse()
            .map_err(|_| usage(format!("bad atom weight {w:?}")))?;
        pairs.push((t, w));
    }
    Ok(MeasureSpec::atoms(pairs)?)
}

impl MeasureArgs {
    /// One spec per coordinate; single values are broadcast to `p` coordinates.
    fn specs(&self, p: usize) -> Result<Vec<MeasureSpec>, Failure> {
        let pick = |len: usize, what: &str| -> Result<(), Failure> {
            if len == 1 || len == p {
                Ok(())
            } else {
                Err(usage(format!(
                    "{len} values for --{what} but the points have {p} coordinates"
                )))
            }
        };
        pick(self.measure.len(), "measure")?;
        pick(self.alpha.len(), "alpha")?;
        let atom_groups: Vec<&str> = self
            .atoms
            .as_deref()
            .map(|s| s.split(';').collect())
            .unwrap_or_default();
        if !atom_groups.is_empty() {
            pick(atom_groups.len(), "atoms")?;
        }
        let mut out = Vec::with_capacity(p);
        for j in 0..p {
            let kind = self.measure[j.min(self.measure.len() - 1)];
            let alpha = self.alpha[j.min(self.alpha.len() - 1)];
            let spec = match kind {
                Kind::Bergman => MeasureSpec::bergman(alpha)?,
                Kind::Fock => MeasureSpec::fock(alpha)?,
                Kind::Atoms => {
                    let group = atom_groups
                        .get(j.min(atom_groups.len().saturating_sub(1)))
                        .ok_or_else(|| usage("--measure atoms needs --atoms"))?;
                    parse_atoms(group)?
                }
                Kind::Raw => MeasureSpec::raw_moments(self.raw_moments()?)?,
            };
            out.push(spec);
        }
        Ok(out)
    }

    fn raw_moments(&self) -> Result<Vec<f64>, Failure> {
        if let Some(path) = &self.moments_file {
            let text = std::fs::read_to_string(path)?;
            return text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| {
                    l.parse::<f64>()
                        .map_err(|_| usage(format!("bad moment {l:?}")))
                })
                .collect();
        }
        if self.moments.is_empty() {
            return Err(usage("--measure raw needs --moments or --moments-file"));
        }
        Ok(self.moments.clone())
    }

    fn single(&self) -> Result<MeasureSpec, Failure> {
        if self.measure.len() > 1 || self.alpha.len() > 1 {
            return Err(usage("this subcommand takes a single measure"));
        }
        Ok(self.specs(1)?.remove(0))
    }
}

impl KernelArgs {
    fn policy(&self) -> Result<TruncationPolicy, Failure> {
        let mut policy = TruncationPolicy::default();
        if let Some(m) = self.max_terms {
            policy.max_terms = m;
        }
        if let Some(t) = self.rel_tol {
            policy.rel_tol = t;
        }
        Ok(policy)
    }

    fn series(&self, spec: &MeasureSpec) -> Result<SeriesKernel, Failure> {
        Ok(SeriesKernel::new(KernelParams::with_policy(
            spec.clone(),
            self.q,
            self.policy()?,
        )?))
    }

    fn kernel(&self, spec: &MeasureSpec, method: Method) -> Result<AnyKernel, Failure> {
        Ok(match method {
            Method::Series => AnyKernel::Series(self.series(spec)?),
            _ => AnyKernel::new(spec, self.q, method)?,
        })
    }
}

#[derive(Debug, Serialize)]
struct EvalPoint {
    z: Vec<[f64; 2]>,
    re: f64,
    im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
}

fn parse_grid(s: &str) -> Result<Vec<Complex64>, Failure> {
    let bad = || usage(format!("grid {s:?} is not re0:re1:im0:im1:step"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [x0, x1, y0, y1, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(x1 >= x0) || !(y1 >= y0) {
        return Err(bad());
    }
    // tolerate round-off in the span so the end points are included
    let count = |a: f64, b: f64| ((b - a) / step + 1e-9).floor() as usize + 1;
    let (nx, ny) = (count(x0, x1), count(y0, y1));
    if nx * ny > 1_000_000 {
        return Err(usage("grid has more than a million points"));
    }
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push(Complex64::new(x0 + i as f64 * step, y0 + j as f64 * step));
        }
    }
    Ok(out)
}

fn eval(args: &EvalArgs, out: &mut dyn Write) -> Outcome {
    let w = parse_point(&args.w).map_err(|e| usage(e.to_string()))?;
    let p = w.len();
    let zs: Vec<Vec<Complex64>> = match (&args.z, &args.grid) {
        (Some(z), None) => vec![parse_point(z).map_err(|e| usage(e.to_string()))?],
        (None, Some(g)) => {
            if p != 1 {
                return Err(usage("--grid needs a one-dimensional --w"));
            }
            parse_grid(g)?.into_iter().map(|z| vec![z]).collect()
        }
        _ => return Err(usage("give exactly one of --z and --grid")),
    };
    if zs.iter().any(|z| z.len() != p) {
        return Err(usage("--z and --w have different numbers of coordinates"));
    }
    let specs = args.kernel.measure.specs(p)?;
    let points: Vec<EvalPoint> = if args.method == Method::Series {
        let kernels: Vec<SeriesKernel> = specs
            .iter()
            .map(|s| args.kernel.series(s))
            .collect::<Result<_, _>>()?;
        zs.par_iter()
            .map(|z| {
                let v = product_kernel(&kernels, z, &w)?;
                let bound = if args.bound {
                    Some(product_point_bound(&kernels, z)?)
                } else {
                    None
                };
                Ok(EvalPoint {
                    z: z.iter().map(|c| [c.re, c.im]).collect(),
                    re: v.value.re,
                    im: v.value.im,
                    terms_used: Some(v.terms_used),
                    truncated: Some(v.truncated),
                    bound,
                })
            })
            .collect::<Result<_, Error>>()?
    } else {
        if args.bound {
            return Err(usage(
                "--bound is computed from the series; use --method series",
            ));
        }
        let kernels: Vec<AnyKernel> = specs
            .iter()
            .map(|s| args.kernel.kernel(s, args.method))
            .collect::<Result<_, _>>()?;
        zs.par_iter()
            .map(|z| {
                let mut v = Complex64::new(1.0, 0.0);
                for ((k, &zj), &wj) in kernels.iter().zip(z).zip(&w) {
                    v *= k.value(zj, wj)?;
                }
                Ok(EvalPoint {
                    z: z.iter().map(|c| [c.re, c.im]).collect(),
                    re: v.re,
                    im: v.im,
                    terms_used: None,
                    truncated: None,
                    bound: None,
                })
            })
            .collect::<Result<_, Error>>()?
    };
    let truncated = points.iter().any(|p| p.truncated == Some(true));
    match args.format {
        Format::Json => {
            let value = if args.grid.is_none() {
                let mut v = serde_json::to_value(&points[0]).expect("serializable");
                let obj = v.as_object_mut().expect("object");
                obj.remove("z");
                obj.insert("schema".into(), json!(SCHEMA));
                v
            } else {
                json!({ "schema": SCHEMA, "w": [w[0].re, w[0].im], "points": points })
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string(&value).expect("serializable")
            )?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            let mut header = Vec::new();
            for j in 0..p {
                header.push(format!("z{j}_re"));
                header.push(format!("z{j}_im"));
            }
            header.extend(["re", "im", "terms_used", "truncated"].map(String::from));
            if args.bound {
                header.push("bound".into());
            }
            wtr.write_record(&header)?;
            for pt in &points {
                let mut row: Vec<String> =
                    pt.z.iter()
                        .flat_map(|c| [c[0].to_string(), c[1].to_string()])
                        .collect();
                row.push(pt.re.to_string());
                row.push(pt.im.to_string());
                row.push(pt.terms_used.map(|t| t.to_string()).unwrap_or_default());
                row.push(pt.truncated.map(|t| t.to_string()).unwrap_or_default());
                if let Some(b) = pt.bound {
                    row.push(b.to_string());
                }
                wtr.write_record(&row)?;
            }
            wtr.flush()?;
        }
    }
    if truncated {
        eprintln!("warning: series hit the term cap before converging; values may be inaccurate");
    }
    Ok(0)
}

fn compare(args: &CompareArgs, out: &mut dyn Write) -> Outcome {
    let spec = args.kernel.measure.single()?;
    if args.method == Method::Series {
        return Err(usage("compare needs --method closed or published"));
    }
    if args.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let radius = match args.radius {
        Some(r) => r,
        None => suites::test_radius(&spec, args.kernel.q)?,
    };
    let series = args.kernel.series(&spec)?;
    let other = args.kernel.kernel(&spec, args.method)?;
    let grid = suites::spiral_points(radius, args.points);
    let (max_rel_err, argmax, truncated) = suites::compare_on(&series, &other, &grid)?;
    let value = json!({
        "schema": SCHEMA,
        "method": args.method,
        "grid": { "radius": radius, "points": args.points, "pairs": args.points * args.points },
        "max_rel_err": max_rel_err,
        "argmax_point": argmax,
        "any_truncated": truncated,
        "exact_formula": other.is_exact(),
    });
    writeln!(
        out,
        "{}",
        serde_json::to_string(&value).expect("serializable")
    )?;
    Ok(0)
}

fn table(args: &TableArgs, out: &mut dyn Write) -> Outcome {
    let spec = args.kernel.measure.single()?;
    if args.steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    let series = args.kernel.series(&spec)?;
    let closed = match spec {
        MeasureSpec::Bergman { .. } | MeasureSpec::Fock { .. } => {
            Some(args.kernel.kernel(&spec, Method::Closed)?)
        }
        _ => None,
    };
    let rows: Vec<(f64, f64, Option<f64>, usize, bool)> = (0..=args.steps)
        .into_par_iter()
        .map(|k| {
            let r = args.rmax * k as f64 / args.steps as f64;
            let z = Complex64::new(r, 0.0);
            let s = series.eval(z, z)?;
            let c = closed.as_ref().map(|c| c.value(z, z)).transpose()?;
            Ok((r, s.value.re, c.map(|c| c.re), s.terms_used, s.truncated))
        })
        .collect::<Result<_, Error>>()?;
    match args.format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            wtr.write_record([
                "r",
                "series",
                "closed",
                "rel_err",
                "terms_used",
                "truncated",
            ])?;
            for (r, s, c, terms, trunc) in &rows {
                let rel = c.map(|c| ((s - c) / c).abs());
                wtr.write_record([
                    r.to_string(),
                    s.to_string(),
                    c.map(|c| c.to_string()).unwrap_or_default(),
                    rel.map(|e| e.to_string()).unwrap_or_default(),
                    terms.to_string(),
                    trunc.to_string(),
                ])?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(r, s, c, terms, trunc)| {
                    json!({ "r": r, "series": s, "closed": c, "terms_used": terms, "truncated": trunc })
                })
                .collect();
            writeln!(out, "{}", json!({ "schema": SCHEMA, "rows": rows }))?;
        }
    }
    Ok(0)
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let spec = args.kernel.measure.single()?;
    if args.kernel.max_terms.is_some() || args.kernel.rel_tol.is_some() {
        eprintln!("warning: verify runs with the default truncation policy; --max-terms/--rel-tol ignored");
    }
    let methods = if args.method.is_empty() {
        vec![Method::Series, Method::Closed]
    } else {
        args.method.clone()
    };
    let mut reports = suites::run(args.suite, &spec, args.kernel.q, &methods, args.seed);
    if args.report_only {
        for r in &mut reports {
            r.report_only = true;
        }
    }
    let failed = reports.iter().any(|r| r.failed());
    let value = json!({ "schema": SCHEMA, "all_pass": !failed, "reports": reports });
    writeln!(
        out,
        "{}",
        serde_json::to_string(&value).expect("serializable")
    )?;
    Ok(if failed { 1 } else { 0 })
}

fn moments(args: &MomentsArgs, out: &mut dyn Write) -> Outcome {
    let spec = args.measure.single()?;
    let mut rows = Vec::with_capacity(args.max_d + 1);
    for d in 0..=args.max_d {
        let s = spec.moment(d)?;
        let exact = spec.exact_moment(d).map(|r| r.to_string());
        rows.push((d, s, exact));
    }
    match args.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(d, s, e)| json!({ "d": d, "s": s, "s_exact": e }))
                .collect();
            writeln!(out, "{}", json!({ "schema": SCHEMA, "moments": rows }))?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            wtr.write_record(["d", "s", "s_exact"])?;
            for (d, s, e) in &rows {
                wtr.write_record([d.to_string(), s.to_string(), e.clone().unwrap_or_default()])?;
            }
            wtr.flush()?;
        }
    }
    Ok(0)
}

fn basis(args: &BasisArgs, out: &mut dyn Write) -> Outcome {
    let spec = args.measure.single()?;
    let basis = build_basis(&spec, args.d, args.n)?;
    let table = basis.coefficient_table();
    match args.format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            let mut header = vec!["degree".to_string()];
            header.extend((0..=args.n).map(|j| format!("c{j}")));
            wtr.write_record(&header)?;
            for (k, row) in table.iter().enumerate() {
                let mut rec = vec![k.to_string()];
                rec.extend(row.iter().map(|c| c.to_string()));
                wtr.write_record(&rec)?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            let value = json!({
                "schema": SCHEMA,
                "d": args.d,
                "n": args.n,
                "cond_estimate": basis.cond_estimate(),
                "coefficients": table,
            });
            writeln!(out, "{value}")?;
        }
    }
    Ok(0)
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Eval(a) => eval(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Table(a) => table(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Moments(a) => moments(a, out),
        Command::Basis(a) => basis(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            let value = json!({
                "schema": SCHEMA,
                "error": { "kind": error_kind(&e), "message": e.to_string() },
            });
            let _ = writeln!(out, "{value}");
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
