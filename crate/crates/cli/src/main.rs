//! `heights`: command-line front end for the height-counting computations.
//!
//! Grids are written as CSV with a `# schema: heights/<kind>/v1` first line,
//! single results as JSON objects with a `schema` field. Exit status is 0 on
//! success, 1 on invalid input or a domain error and 2 when a budget guard
//! refuses the computation.

mod output;
mod parse;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heights::adelic::{
    adelic_ball_series, global_height, persistence_check, pgl2_measure_pair_with, prediction_n,
    primitive_from_rationals, regularity_report, tree_ball, DEFAULT_EPS,
};
use heights::archimedean::ball_volume_numeric;
use heights::building::{
    ball_size, enumerate_classes_with, sl2_sphere_size, sphere_size, vertex_sphere_size, BuildingParams,
    EnumerationOptions, DEFAULT_CLASS_LIMIT,
};
use heights::counting::{compare_report_with, DEFAULT_ENUMERATION_LIMIT, TIE_TOLERANCE};
use heights::dirichlet::{
    coeff_sieve_with, l_closed_pgl2, l_closed_sl2, l_euler_kind, poles_table, residue_estimate, ResidueVariant,
    SeriesKind, DEFAULT_SIEVE_LIMIT,
};
use heights::format::{fmt_fixed, fmt_num};
use heights::samples::CumulativeSamples;
use heights::verify::{self, Tier, VerifyConfig};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::json;

use output::{opt_cell, write_json, Csv, Sink};

#[derive(Debug, Parser)]
#[command(name = "heights", version, about = "Height counting on PGL_d and SL_2 over the rationals")]
struct Cli {
    /// Resource limit for the subcommand: lattice classes (default 1e7),
    /// sieve length (default 1e6) or enumeration cells (default 1e9).
    #[arg(long, global = true, env = "HEIGHTS_BUDGET", value_parser = parse_budget)]
    budget: Option<u128>,

    /// Write the artifact to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Number of lattice classes at distance k from a vertex.
    Sphere(SphereArgs),
    /// Sphere and ball sizes for 0..=k.
    Ball(BuildingArgs),
    /// Lattice classes within distance k_max, as JSON lines.
    Classes(ClassesArgs),
    /// Coefficients D(m) and partial sums Σ D(n) n^{-B}.
    Dcoeff(DcoeffArgs),
    /// L(s) from the Euler product, optionally against the closed form.
    Lseries(LseriesArgs),
    /// Leading pole abscissas s_2 and s_3 for n = 2..=d_max.
    PolesTable(PolesArgs),
    /// Residue at the rightmost pole.
    Residue(ResidueArgs),
    /// Archimedean ball volume on a grid of radii.
    BallVolume(BallVolumeArgs),
    /// Adelic ball volume b(T) on a grid.
    BallAdelic(BallAdelicArgs),
    /// Global height of a rational matrix.
    Height(HeightArgs),
    /// Counting asymptotic with both exponent conventions.
    Predict(PredictArgs),
    /// Exact count π(x) of PGL_2(Q) elements of height ≤ x.
    Count(CountArgs),
    /// Shift ratios b(T ± ε)/b(T) and a regularity verdict.
    Regularity(RegularityArgs),
    /// d(T) against C·e^{2T} for the PGL_2 measure pair.
    Persistence(PersistenceArgs),
    /// Run the acceptance checks and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Group {
    Pgl,
    Sl2,
}

#[derive(Debug, Args)]
struct BuildingArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
}

#[derive(Debug, Args)]
struct SphereArgs {
    #[arg(long, value_enum, default_value = "pgl")]
    group: Group,
    /// Matrix size (ignored for sl2).
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
}

#[derive(Debug, Args)]
struct ClassesArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: u64,
    #[arg(long = "kmax")]
    k_max: u32,
}

#[derive(Debug, Args)]
struct DcoeffArgs {
    #[arg(long)]
    d: usize,
    #[arg(long = "xmax")]
    x_max: u64,
    /// Exponent of the partial-sum weights.
    #[arg(long = "B", default_value_t = 0.0)]
    b: f64,
}

#[derive(Debug, Args)]
struct LseriesArgs {
    #[arg(long, value_enum, default_value = "pgl")]
    group: Group,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Complex argument as "re,im" or "re".
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    s: Complex64,
    /// Largest prime in the Euler product.
    #[arg(long, default_value_t = 100_000)]
    cutoff: u64,
    /// Also evaluate the zeta closed form (d = 2 or sl2).
    #[arg(long)]
    closed_form: bool,
}

#[derive(Debug, Args)]
struct PolesArgs {
    #[arg(long = "dmax", default_value_t = 6)]
    d_max: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    Pgl2,
    Sl2,
}

#[derive(Debug, Args)]
struct ResidueArgs {
    #[arg(long, value_enum, default_value = "pgl2")]
    variant: Variant,
}

#[derive(Debug, Args)]
struct BallVolumeArgs {
    #[arg(long)]
    d: usize,
    #[arg(long = "B")]
    b: f64,
    #[arg(long = "Rmax")]
    r_max: f64,
    /// Number of radii R = R_max·i/samples, i = 1..=samples.
    #[arg(long, default_value_t = 50)]
    samples: usize,
}

#[derive(Debug, Args)]
struct BallAdelicArgs {
    #[arg(long)]
    d: usize,
    #[arg(long = "B")]
    b: f64,
    #[arg(long = "Tmax")]
    t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Debug, Args)]
struct HeightArgs {
    /// Rows separated by ';', entries by ','; entries may be fractions p/q.
    #[arg(long, allow_hyphen_values = true)]
    matrix: String,
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    d: usize,
    #[arg(long = "B")]
    b: f64,
    #[arg(long = "T")]
    t: f64,
    /// Volume of the automorphic quotient; 1 gives relative predictions.
    #[arg(long, default_value_t = 1.0)]
    covolume: f64,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long = "xmax")]
    x_max: f64,
    /// Spacing of the x grid, which starts at this value.
    #[arg(long = "xstep", default_value_t = 0.5)]
    x_step: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    covolume: f64,
    /// Write the table to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VolumeFunction {
    /// x·e^{2x}
    XExp,
    /// e^{⌊x⌋}
    FloorExp,
    /// Ball of radius ⌊x⌋ in the (q+1)-regular tree.
    Tree,
    /// Adelic ball volume b(T).
    Adelic,
}

#[derive(Debug, Args)]
struct RegularityArgs {
    #[arg(long, value_enum)]
    function: VolumeFunction,
    /// Tree valency parameter.
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    #[arg(long = "Tmin", default_value_t = 8.0)]
    t_min: f64,
    #[arg(long = "Tmax", default_value_t = 14.0)]
    t_max: f64,
    /// Spacing of the evaluation points T.
    #[arg(long = "Tstep", default_value_t = 0.01)]
    t_step: f64,
    /// Sampling grid step.
    #[arg(long, default_value_t = 5e-4)]
    step: f64,
    /// Comma-separated shifts ε.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct PersistenceArgs {
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    #[arg(long = "Tmax", default_value_t = 12.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Comma-separated evaluation points (default: T_max).
    #[arg(long = "T", value_delimiter = ',')]
    t: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    #[arg(long)]
    full: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Core(heights::Error),
    Input(String),
    Io(io::Error),
    ChecksFailed,
}

impl From<heights::Error> for CliError {
    fn from(e: heights::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_budget() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "invalid input: {s}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::ChecksFailed => write!(f, "some acceptance checks failed"),
        }
    }
}

type CliResult = Result<(), CliError>;

fn parse_budget(s: &str) -> Result<u128, String> {
    if let Ok(n) = s.parse::<u128>() {
        return if n > 0 { Ok(n) } else { Err("budget must be positive".into()) };
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if x >= 1.0 && x.fract() == 0.0 && x < 1e38 {
        Ok(x as u128)
    } else {
        Err(format!("budget must be a positive integer, got {s:?}"))
    }
}

fn sieve_budget(budget: Option<u128>) -> u64 {
    budget.map_or(DEFAULT_SIEVE_LIMIT, |b| b.min(u64::MAX as u128) as u64)
}

/// `start, start + step, …` up to `end` inclusive, computed by multiplication.
fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !end.is_finite() || end < start {
        return Err(CliError::Input(format!("need step > 0 and {start} ≤ {end}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn run(cli: Cli) -> CliResult {
    let mut sink = Sink::open(cli.output.as_deref())?;
    let budget = cli.budget;
    match cli.command {
        Command::Sphere(a) => {
            let value = match a.group {
                Group::Pgl => {
                    let params = BuildingParams::new(a.d, a.p)?;
                    json!({
                        "group": "pgl",
                        "d": a.d,
                        "p": a.p,
                        "k": a.k,
                        "size": sphere_size(params, a.k).to_string(),
                        "vertex_count": vertex_sphere_size(params, a.k).to_string(),
                    })
                }
                Group::Sl2 => json!({
                    "group": "sl2",
                    "p": a.p,
                    "k": a.k,
                    "size": sl2_sphere_size(a.p, a.k)?.to_string(),
                }),
            };
            write_json(&mut sink, "sphere", &value)?;
        }
        Command::Ball(a) => {
            let params = BuildingParams::new(a.d, a.p)?;
            let mut csv = Csv::new("ball", &["k", "sphere", "ball"]);
            for k in 0..=a.k {
                csv.row(vec![
                    k.to_string(),
                    sphere_size(params, k).to_string(),
                    ball_size(params, k).to_string(),
                ]);
            }
            csv.write(&mut sink)?;
        }
        Command::Classes(a) => {
            let params = BuildingParams::new(a.d, a.p)?;
            let opts = EnumerationOptions {
                limit: budget.unwrap_or(DEFAULT_CLASS_LIMIT),
            };
            let classes = enumerate_classes_with(params, a.k_max, opts)?;
            let header = output::to_json(
                "classes",
                &json!({"d": a.d, "p": a.p, "k_max": a.k_max, "count": classes.len()}),
            )
            .map_err(|e| CliError::Io(io::Error::other(e)))?;
            sink.line(&header.to_string())?;
            for c in &classes {
                sink.line(&c.to_json_line())?;
            }
        }
        Command::Dcoeff(a) => {
            let table = coeff_sieve_with(a.d, a.x_max, sieve_budget(budget))?;
            let xs: Vec<u64> = (1..=a.x_max).collect();
            let sums = table.partial_sums(a.b, &xs)?;
            let mut csv = Csv::new("dcoeff", &["m", "D", "partial_sum"]);
            for (v, (m, s)) in table.values().iter().zip(xs.iter().zip(sums)) {
                csv.row(vec![m.to_string(), v.to_string(), fmt_num(s)]);
            }
            csv.write(&mut sink)?;
        }
        Command::Lseries(a) => {
            let kind = match a.group {
                Group::Pgl => SeriesKind::Pgl { d: a.d },
                Group::Sl2 => SeriesKind::Sl2,
            };
            let euler = l_euler_kind(kind, a.s, a.cutoff)?;
            let mut value = json!({ "euler": euler });
            if a.closed_form {
                let closed = match kind {
                    SeriesKind::Pgl { d: 2 } => l_closed_pgl2(a.s)?,
                    SeriesKind::Sl2 => l_closed_sl2(a.s)?,
                    SeriesKind::Pgl { d } => {
                        return Err(CliError::Input(format!("no closed form is available for d = {d}")));
                    }
                };
                value["closed_form"] = json!([closed.re, closed.im]);
                value["relative_difference"] = json!(((euler.value - closed) / closed).norm());
            }
            write_json(&mut sink, "lseries", &value)?;
        }
        Command::PolesTable(a) => {
            let mut csv = Csv::new("poles-table", &["n", "s_2", "s_3"]);
            for row in poles_table(a.d_max)? {
                csv.row(vec![row.n.to_string(), fmt_fixed(row.s_2, 10), fmt_fixed(row.s_3, 10)]);
            }
            csv.write(&mut sink)?;
        }
        Command::Residue(a) => {
            let variant = match a.variant {
                Variant::Pgl2 => ResidueVariant::Pgl2,
                Variant::Sl2 => ResidueVariant::Sl2,
            };
            write_json(&mut sink, "residue", &residue_estimate(variant)?)?;
        }
        Command::BallVolume(a) => {
            if a.samples == 0 || !a.r_max.is_finite() || a.r_max <= 0.0 {
                return Err(CliError::Input("need R_max > 0 and at least one sample".into()));
            }
            let mut csv = Csv::new("ball-volume", &["R", "volume", "log_volume"]);
            for i in 1..=a.samples {
                let r = a.r_max * i as f64 / a.samples as f64;
                let v = ball_volume_numeric(a.d, a.b, r, 4)?;
                csv.row(vec![fmt_num(r), fmt_num(v), fmt_num(v.ln())]);
            }
            csv.write(&mut sink)?;
        }
        Command::BallAdelic(a) => {
            let series = adelic_ball_series(a.d, a.b, a.t_max, a.step, sieve_budget(budget))?;
            let mut csv = Csv::new("ball-adelic", &["T", "b"]);
            for (t, v) in series.t_grid.iter().zip(&series.values) {
                csv.row(vec![fmt_num(*t), fmt_num(*v)]);
            }
            csv.write(&mut sink)?;
        }
        Command::Height(a) => {
            let rationals = parse::rational_matrix(&a.matrix).map_err(CliError::Input)?;
            let m = primitive_from_rationals(&rationals)?;
            write_json(&mut sink, "height", &json!({"matrix": m, "B": a.b, "profile": global_height(&m, a.b)?}))?;
        }
        Command::Predict(a) => {
            write_json(&mut sink, "predict", &prediction_n(a.d, a.b, a.t, a.covolume)?)?;
        }
        Command::Count(a) => {
            let xs = grid(a.x_step, a.x_max, a.x_step)?;
            let report = compare_report_with(&xs, a.b, a.covolume, budget.unwrap_or(DEFAULT_ENUMERATION_LIMIT))?;
            let mut csv = Csv::new(
                "count",
                &["x", "pi", "predicted_convA", "predicted_convB", "lower_sandwich", "upper_sandwich"],
            );
            for (i, &x) in xs.iter().enumerate() {
                csv.row(vec![
                    fmt_num(x),
                    report.pi_values[i].to_string(),
                    opt_cell(report.predicted_conv_a[i]),
                    opt_cell(report.predicted_conv_b[i]),
                    fmt_num(report.lower_sandwich[i]),
                    fmt_num(report.upper_sandwich[i]),
                ]);
            }
            if let Some(path) = &a.csv {
                let mut file = Sink::open(Some(path))?;
                csv.write(&mut file)?;
                file.finish()?;
            } else {
                csv.write(&mut sink)?;
            }
            if !report.ties.is_empty() {
                eprintln!(
                    "note: {} elements have height within {:e} (relative) of a grid point and were counted as ≤ x",
                    report.ties.len(),
                    TIE_TOLERANCE
                );
            }
            if report.predicted_conv_a.iter().any(Option::is_none) {
                eprintln!("note: the exponential moment diverges for B ≥ 1; predicted_convA is left empty");
            }
        }
        Command::Regularity(a) => {
            let eps = a.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
            let max_eps = eps.iter().cloned().fold(0.0, f64::max);
            let t_list = grid(a.t_min, a.t_max, a.t_step)?;
            let reach = a.t_max + max_eps + a.step;
            let n = (reach / a.step).ceil() as usize + 1;
            let samples = match a.function {
                VolumeFunction::XExp => CumulativeSamples::from_fn(0.0, a.step, n, |x| x * (2.0 * x).exp())?,
                VolumeFunction::FloorExp => CumulativeSamples::from_fn(0.0, a.step, n, |x| (x + 1e-9).floor().exp())?,
                VolumeFunction::Tree => {
                    tree_ball(a.q, 0.0)?;
                    CumulativeSamples::from_fn(0.0, a.step, n, |x| {
                        tree_ball(a.q, x + 1e-9).ok().and_then(|v| v.to_f64()).unwrap_or(f64::NAN)
                    })?
                }
                VolumeFunction::Adelic => {
                    adelic_ball_series(a.d, a.b, reach, a.step, sieve_budget(budget))?.to_samples()?
                }
            };
            let report = regularity_report(&samples, &eps, &t_list)?;
            let function = a.function.to_possible_value().expect("no skipped variants").get_name().to_string();
            write_json(&mut sink, "regularity", &json!({"function": function, "report": report}))?;
        }
        Command::Persistence(a) => {
            let pair = pgl2_measure_pair_with(a.b, a.t_max, a.step, sieve_budget(budget))?;
            let ts = a.t.clone().unwrap_or_else(|| vec![a.t_max]);
            let points = ts
                .iter()
                .map(|&t| persistence_check(&pair, t))
                .collect::<Result<Vec<_>, _>>()?;
            let value = json!({
                "B": a.b,
                "alpha": pair.alpha(),
                "beta": pair.beta(),
                "c": pair.c(),
                "c_tail_bound": pair.c_tail_bound(),
                "masses": pair.masses().len(),
                "points": points,
            });
            write_json(&mut sink, "persistence", &value)?;
        }
        Command::Verify(a) => {
            let tier = if a.full { Tier::Full } else { Tier::Quick };
            let report = verify::run(VerifyConfig {
                tier,
                workers: a.workers,
            })?;
            for line in report.to_text().lines() {
                sink.line(line)?;
            }
            sink.finish()?;
            return if report.all_passed() { Ok(()) } else { Err(CliError::ChecksFailed) };
        }
    }
    sink.finish()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
