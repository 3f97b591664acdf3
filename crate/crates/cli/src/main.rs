//! `bergman`: command-line front end for the kernel, transform and weight
//! computations of `bergman-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod suites;
mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_core::domains::{DomainSpec, Point};
use bergman_core::kernels::{
    bergman_fourier, bergman_mellin, bergman_up_via_series, oracle_kernel, KernelEstimate, MellinOptions, Method,
    Oracle,
};
use bergman_core::transforms::{
    isometry_rotation, isometry_scaling, isometry_translation, IsometryCheck, IsometryOptions,
};
use bergman_core::transforms1d::{strip_forward, strip_inverse, InverseOptions, Profile1D};
use bergman_core::weights::{lambda_weight, omega};
use bergman_core::{Complex64, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use suites::Suite;
use table::Table;

#[derive(Parser)]
#[command(name = "bergman", version, about = "Bergman kernels and Paley-Wiener transforms of polynomial half-spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Domain spec (polynomial JSON); defaults to p = |w|².
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Accuracy threshold for flags.
    #[arg(long)]
    tol: Option<f64>,
    /// Exit with status 3 when an accuracy flag is raised.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.json` writes JSON records, anything else CSV. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelMethod {
    Series,
    Fourier,
    Mellin,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Transform {
    Rotation,
    Translation,
    Scaling,
}

#[derive(Subcommand)]
enum Command {
    /// Bergman kernel of U_p at every ordered pair of points.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "fourier")]
        method: KernelMethod,
        /// JSON array of points `{"z": [re, im], "w": [[re, im], ...]}`.
        #[arg(long)]
        points: PathBuf,
        /// Truncation degree of the series method.
        #[arg(long, default_value_t = 200)]
        terms: usize,
    },
    /// All kernel methods at every pair, with pairwise relative deviations.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Restrict to one method against the others.
        #[arg(long, value_enum)]
        method: Option<KernelMethod>,
        /// Points file; defaults to a fixed 3-point grid.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 400)]
        terms: usize,
    },
    /// Isometry checks on seeded test elements.
    Isometry {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        transform: Transform,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Strip transform of t·e^{−t} followed by the inverse transform.
    Roundtrip {
        #[command(flatten)]
        common: Common,
        /// Strip bounds `a b`; `b` may be `inf`.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, required = true)]
        strip: Vec<f64>,
        /// Height of the inversion line; defaults to 0.1 when inside the strip.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Weight functions λ(s,t) or ω_{a,b}(t); list arguments give a grid.
    Weights {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "omega", required_unless_present = "omega")]
        lambda: bool,
        #[arg(long)]
        omega: bool,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        t: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
    },
}

enum Failure {
    Validation(String),
    Accuracy(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Accuracy(_) | Error::Conditioning(_) => Failure::Accuracy(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<Vec<String>, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = match &cli.command {
        Command::Kernel { common, .. }
        | Command::Compare { common, .. }
        | Command::Isometry { common, .. }
        | Command::Roundtrip { common, .. }
        | Command::Weights { common, .. } => common.strict,
    };
    let result = match cli.command {
        Command::Kernel { common, method, points, terms } => kernel(&common, method, &points, terms),
        Command::Compare { common, method, points, terms } => compare(&common, method, points.as_deref(), terms),
        Command::Isometry { common, transform, count } => isometry(&common, transform, count),
        Command::Roundtrip { common, strip, c, t_min, t_max, samples } => {
            roundtrip(&common, (strip[0], strip[1]), c, (t_min, t_max, samples))
        }
        Command::Weights { common, lambda, s, t, a, b, .. } => weights(&common, lambda, &s, &t, a, b),
    };
    match result {
        Ok(flags) if flags.is_empty() => ExitCode::SUCCESS,
        Ok(flags) => {
            for f in &flags {
                eprintln!("accuracy flag: {f}");
            }
            if strict {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Accuracy(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn check_tol(common: &Common, default: f64) -> Result<f64, Failure> {
    let tol = common.tol.unwrap_or(default);
    if !(tol > 0.0) {
        return Err(Failure::Validation(format!("--tol must be positive, got {tol}")));
    }
    Ok(tol)
}

/// 1-based line of the first occurrence of `key` in `text`.
fn line_of(text: &str, key: &str) -> usize {
    text.lines().position(|l| l.contains(key)).map_or(1, |i| i + 1)
}

fn load_spec(common: &Common) -> Result<DomainSpec, Failure> {
    let Some(path) = &common.spec else {
        return Ok(DomainSpec::standard(vec![1])?);
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    match DomainSpec::from_json_str(&text) {
        Ok((spec, added)) => {
            if added > 0 {
                eprintln!("note: {}: added {added} conjugate terms to make p Hermitian", path.display());
            }
            Ok(spec)
        }
        Err(Error::Parse(msg)) => Err(Failure::Validation(format!("{}: {msg}", path.display()))),
        Err(e) => {
            let line = line_of(&text, if matches!(e, Error::InvalidPolynomial(_)) { "\"terms\"" } else { "\"m\"" });
            Err(Failure::Validation(format!("{}: line {line}: {e}", path.display())))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointJson {
    z: [f64; 2],
    #[serde(default)]
    w: Vec<[f64; 2]>,
}

fn load_points(path: &Path, spec: &DomainSpec) -> Result<Vec<Point>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let raw: Vec<PointJson> = serde_json::from_str(&text).map_err(|e| {
        Failure::Validation(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    if raw.is_empty() {
        return Err(Failure::Validation(format!("{}: no points", path.display())));
    }
    raw.iter()
        .enumerate()
        .map(|(i, p)| {
            if p.w.len() != spec.dim() {
                return Err(Failure::Validation(format!(
                    "{}: point {i} has {} w-coordinates, the spec has {}",
                    path.display(),
                    p.w.len(),
                    spec.dim()
                )));
            }
            let x =
                Point::new(Complex64::new(p.z[0], p.z[1]), p.w.iter().map(|w| Complex64::new(w[0], w[1])).collect());
            if !spec.in_up(&x)? {
                return Err(Failure::Validation(format!("{}: point {i} is not in U_p", path.display())));
            }
            Ok(x)
        })
        .collect()
}

fn default_points(spec: &DomainSpec) -> Vec<Point> {
    let n = spec.dim().max(1) as f64;
    let w0 = [Complex64::new(0.0, 0.0), Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.5)];
    [Complex64::new(0.0, 1.0), Complex64::new(0.5, 1.5), Complex64::new(-0.7, 0.8)]
        .into_iter()
        .zip(w0)
        .map(|(z, w)| Point::new(z, vec![w / n.sqrt(); spec.dim()]))
        .collect()
}

fn oracle_for(spec: &DomainSpec) -> Option<Oracle> {
    if spec.dim() == 0 {
        return Some(Oracle::HalfPlane);
    }
    let siegel = DomainSpec::standard(vec![1; spec.dim()]).ok()?;
    (spec.poly() == siegel.poly()).then_some(Oracle::Siegel)
}

fn evaluate(
    spec: &DomainSpec,
    method: KernelMethod,
    x: &Point,
    y: &Point,
    terms: usize,
) -> bergman_core::Result<KernelEstimate> {
    match method {
        KernelMethod::Series => bergman_up_via_series(spec, x, y, terms),
        KernelMethod::Fourier => bergman_fourier(spec, x, y),
        KernelMethod::Mellin => bergman_mellin(spec, x, y, &MellinOptions::default()),
        KernelMethod::Oracle => match oracle_for(spec) {
            Some(o) => Ok(KernelEstimate::exact(oracle_kernel(o, x, y)?, Method::Oracle)),
            None => Err(Error::InvalidArgument("no closed-form oracle for this spec".into())),
        },
    }
}

fn kernel(common: &Common, method: KernelMethod, points: &Path, terms: usize) -> Outcome {
    let tol = check_tol(common, 1e-6)?;
    let spec = load_spec(common)?;
    let pts = load_points(points, &spec)?;
    let mut table = Table::new(vec!["i", "j", "re", "im", "error_estimate", "method"]);
    let mut flags = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            let k = evaluate(&spec, method, x, y, terms)?;
            if k.exceeds(tol) {
                flags.push(format!("pair ({i},{j}): error estimate {:e} above tolerance", k.error_estimate));
            }
            table.push(vec![
                i.into(),
                j.into(),
                k.value.re.into(),
                k.value.im.into(),
                k.error_estimate.into(),
                k.method.as_str().into(),
            ]);
        }
    }
    table.write(common.out.as_deref())?;
    Ok(flags)
}

fn compare(common: &Common, only: Option<KernelMethod>, points: Option<&Path>, terms: usize) -> Outcome {
    let tol = check_tol(common, 1e-4)?;
    let spec = load_spec(common)?;
    let pts = match points {
        Some(p) => load_points(p, &spec)?,
        None => default_points(&spec),
    };
    let mut methods = vec![KernelMethod::Series, KernelMethod::Fourier, KernelMethod::Mellin];
    if oracle_for(&spec).is_some() {
        methods.push(KernelMethod::Oracle);
    }
    let mut table = Table::new(vec![
        "i",
        "j",
        "method",
        "other",
        "re",
        "im",
        "other_re",
        "other_im",
        "rel_deviation",
        "error_estimate",
    ]);
    let mut worst = 0.0f64;
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            let values =
                methods.iter().map(|&m| evaluate(&spec, m, x, y, terms)).collect::<bergman_core::Result<Vec<_>>>()?;
            for a in 0..values.len() {
                for b in a + 1..values.len() {
                    if only.is_some_and(|m| m != methods[a] && m != methods[b]) {
                        continue;
                    }
                    let (ka, kb) = (&values[a], &values[b]);
                    let dev = (ka.value - kb.value).norm() / ka.value.norm().max(kb.value.norm());
                    worst = worst.max(dev);
                    table.push(vec![
                        i.into(),
                        j.into(),
                        ka.method.as_str().into(),
                        kb.method.as_str().into(),
                        ka.value.re.into(),
                        ka.value.im.into(),
                        kb.value.re.into(),
                        kb.value.im.into(),
                        dev.into(),
                        ka.error_estimate.max(kb.error_estimate).into(),
                    ]);
                }
            }
        }
    }
    table.write(common.out.as_deref())?;
    eprintln!("max pairwise relative deviation {worst:e}");
    Ok(if worst < tol { Vec::new() } else { vec![format!("max deviation {worst:e} not below {tol:e}")] })
}

fn isometry(common: &Common, transform: Transform, count: usize) -> Outcome {
    let tol = check_tol(
        common,
        match transform {
            Transform::Scaling => 1e-4,
            _ => 1e-6,
        },
    )?;
    let spec = load_spec(common)?;
    let mut suite = Suite::new(&spec, common.seed);
    let opts = IsometryOptions::default();
    let tag = match transform {
        Transform::Rotation => "rotation",
        Transform::Translation => "translation",
        Transform::Scaling => "scaling",
    };
    let mut table = Table::new(vec!["test_id", "lhs", "rhs", "rel_error", "error_estimate", "method"]);
    let mut flags = Vec::new();
    for id in 0..count {
        let check: IsometryCheck = match transform {
            Transform::Rotation => isometry_rotation(&spec, &suite.rotation()?, &opts)?,
            Transform::Translation => isometry_translation(&suite.translation()?, &opts)?,
            Transform::Scaling => isometry_scaling(&suite.scaling()?, &opts)?,
        };
        let rel = check.rel_error();
        if !(rel < tol) {
            flags.push(format!("test {id}: relative error {rel:e} not below {tol:e}"));
        }
        table.push(vec![
            id.into(),
            check.lhs.into(),
            check.rhs.into(),
            rel.into(),
            check.error_estimate.into(),
            tag.into(),
        ]);
    }
    table.write(common.out.as_deref())?;
    Ok(flags)
}

fn roundtrip(
    common: &Common,
    (a, b): (f64, f64),
    c: Option<f64>,
    (t_min, t_max, samples): (f64, f64, usize),
) -> Outcome {
    let tol = check_tol(common, 1e-6)?;
    if samples < 2 || !(t_min < t_max) {
        return Err(Failure::Validation("need t_min < t_max and at least 2 samples".into()));
    }
    let c = c.unwrap_or(if a < 0.1 && 0.1 < b {
        0.1
    } else if b.is_finite() {
        0.5 * (a + b)
    } else {
        a + 0.1
    });
    let f = Profile1D::one_sided(Complex64::new(1.0, 0.0), 1.0, Complex64::new(1.0, 0.0))?;
    let big_f = strip_forward(&f, a, b)?;
    let ts: Vec<f64> = (0..samples).map(|i| t_min + (t_max - t_min) * i as f64 / (samples - 1) as f64).collect();
    let sampled = strip_inverse(&big_f, c, &ts, &InverseOptions::default())?;
    let mut table = Table::new(vec!["t", "f", "reconstructed", "abs_error", "error_estimate", "method"]);
    let mut flags = Vec::new();
    for (k, &t) in ts.iter().enumerate() {
        let exact = f.eval(t);
        let err = (sampled.values[k] - exact).norm();
        if !(err < tol) {
            flags.push(format!("t = {t}: error {err:e} not below {tol:e}"));
        }
        table.push(vec![
            t.into(),
            exact.re.into(),
            sampled.values[k].re.into(),
            err.into(),
            sampled.errors[k].into(),
            "strip-inverse".into(),
        ]);
    }
    table.write(common.out.as_deref())?;
    Ok(flags)
}

fn weights(common: &Common, lambda: bool, s: &[f64], t: &[f64], a: Option<f64>, b: Option<f64>) -> Outcome {
    let mut table;
    if lambda {
        table = Table::new(vec!["s", "t", "value", "method", "error_estimate"]);
        for &si in s {
            for &ti in t {
                table.push(vec![si.into(), ti.into(), lambda_weight(si, ti)?.into(), "closed".into(), 0.0.into()]);
            }
        }
    } else {
        let (Some(a), Some(b)) = (a, b) else {
            return Err(Failure::Validation("--omega needs --a and --b".into()));
        };
        table = Table::new(vec!["a", "b", "t", "value", "method", "error_estimate"]);
        for &ti in t {
            table.push(vec![a.into(), b.into(), ti.into(), omega(a, b, ti)?.into(), "closed".into(), 0.0.into()]);
        }
    }
    table.write(common.out.as_deref())?;
    Ok(Vec::new())
}
