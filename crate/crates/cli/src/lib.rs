//! Command-line front end for qubitline: channel spec parsing, report
//! formatting and the Monte Carlo sweep.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::{Matrix3, Vector3};
use qubitline::capacity::{optimize_capacity, DEFAULT_REFINE_TOL};
use qubitline::channel::DEFAULT_CP_TOL;
use qubitline::region::DEFAULT_SAMPLES;
use qubitline::sampling::sample_cptp_channel;
use qubitline::{compare, generate_region, optimize_pc, AffineChannel, TransitionPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

/// Worker-count environment variable; `0` or unset means one per core.
pub const THREADS_ENV: &str = "QUBITLINE_THREADS";

pub const REGION_HEADER: &str = "k,axis_x,axis_y,axis_z,p11,p00,objective";
pub const BORDER_HEADER: &str = "p11,p00";
pub const SWEEP_HEADER: &str = "name,a,b,c,bx,by,bz,c_bin,pc_half,area";

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Spec { path: String, source: SpecError },
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qubitline::Error),
}

impl CliError {
    /// `2` for rejected input, `1` for failures inside a computation.
    pub fn exit_code(&self) -> i32 {
        use qubitline::Error as E;
        match self {
            CliError::Spec { .. } | CliError::Read { .. } | CliError::Usage(_) => 2,
            CliError::Core(
                E::NotCompletelyPositive { .. }
                | E::OutOfRange { .. }
                | E::InvalidArgument(_)
                | E::InfeasibleConstraint { .. }
                | E::InvalidState { .. }
                | E::NonUnitAxis { .. },
            ) => 2,
            CliError::Core(_) | CliError::Write { .. } => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(rename = "T")]
    t: Option<[[f64; 3]; 3]>,
    diag: Option<[f64; 3]>,
    b: [f64; 3],
    name: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub name: Option<String>,
    pub channel: AffineChannel,
}

/// Parses a channel spec: a JSON object with `T` (3×3, row-major) or
/// `diag`, the shift `b` and an optional `name`.
pub fn parse_channel_spec(text: &str, allow_noncp: bool) -> Result<ChannelSpec, SpecError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let t = match (raw.t, raw.diag) {
        (Some(rows), None) => Matrix3::from_fn(|i, j| rows[i][j]),
        (None, Some(d)) => Matrix3::from_diagonal(&Vector3::from(d)),
        (Some(_), Some(_)) => {
            return Err(SpecError::Field {
                field: "T",
                message: "give either `T` or `diag`, not both".into(),
            })
        }
        (None, None) => {
            return Err(SpecError::Field {
                field: "T",
                message: "missing; give `T` or `diag`".into(),
            })
        }
    };
    let channel = AffineChannel::new(t, Vector3::from(raw.b));
    if !allow_noncp {
        let report = channel.choi_cptp_check(DEFAULT_CP_TOL);
        if !report.is_cp {
            return Err(SpecError::NotCompletelyPositive {
                min_eigenvalue: report.min_eigenvalue,
            });
        }
    }
    Ok(ChannelSpec {
        name: raw.name,
        channel,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load_spec(path: &Path, allow_noncp: bool) -> Result<ChannelSpec> {
    parse_channel_spec(&read_text(path)?, allow_noncp).map_err(|source| CliError::Spec {
        path: path.display().to_string(),
        source,
    })
}

/// Sets up the global worker pool from [`THREADS_ENV`].
pub fn configure_threads() -> Result<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a nonnegative integer, got {v:?}"
            ))
        })?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

#[derive(Debug, Parser)]
#[command(
    name = "qubitline",
    version,
    about = "Binary codes and measurements for qubit channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check complete positivity and print the diagonal frame.
    Validate {
        spec: PathBuf,
        /// Exit successfully even if the map is not completely positive.
        #[arg(long)]
        allow_noncp: bool,
    },
    /// Write the sampled generating curve and the region border as CSV.
    Region {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Sample CSV path; the border goes to `<out>.border.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal probability of correct decision.
    Pc {
        spec: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
    },
    /// Binary capacity with optimal code and measurement.
    Capacity {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE_TOL)]
        tol: f64,
    },
    /// Compare two binary channels, given as points or as channel specs.
    Order {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE_TOL)]
        tol: f64,
    },
    /// Monte Carlo over random completely positive channels.
    Sweep {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a command, writing reports to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Validate { spec, allow_noncp } => validate(spec, *allow_noncp, out),
        Command::Region {
            spec,
            samples,
            out: path,
        } => {
            let spec = load_spec(spec, false)?;
            let region = generate_region(&spec.channel, *samples)?;
            let samples_csv = region_csv(&region);
            let border_csv = border_csv(&region.border);
            match path {
                Some(path) => {
                    write_file(path, &samples_csv)?;
                    write_file(&border_path(path), &border_csv)?;
                }
                None => emit(out, &format!("{samples_csv}\n{border_csv}"))?,
            }
            Ok(0)
        }
        Command::Pc { spec, p0 } => {
            let spec = load_spec(spec, false)?;
            let report = optimize_pc(&spec.channel, *p0)?;
            print_json(
                out,
                &Named {
                    name: spec.name,
                    report,
                },
            )?;
            Ok(0)
        }
        Command::Capacity { spec, samples, tol } => {
            let spec = load_spec(spec, false)?;
            let report = optimize_capacity(&spec.channel, *samples, *tol)?;
            print_json(
                out,
                &Named {
                    name: spec.name,
                    report,
                },
            )?;
            Ok(0)
        }
        Command::Order { a, b, samples, tol } => {
            let pa = load_point(a, *samples, *tol)?;
            let pb = load_point(b, *samples, *tol)?;
            let value = json!({
                "a": pa,
                "b": pb,
                "a_relative_to_b": compare(&pa, &pb)?,
                "b_relative_to_a": compare(&pb, &pa)?,
            });
            print_json(out, &value)?;
            Ok(0)
        }
        Command::Sweep {
            count,
            seed,
            samples,
            out: path,
        } => {
            let rows = run_sweep(&SweepConfig {
                count: *count,
                seed: *seed,
                samples: *samples,
            })?;
            let csv = sweep_csv(&rows);
            match path {
                Some(path) => write_file(path, &csv)?,
                None => emit(out, &csv)?,
            }
            Ok(0)
        }
    }
}

fn validate(path: &Path, allow_noncp: bool, out: &mut dyn Write) -> Result<i32> {
    let spec = load_spec(path, true)?;
    let report = spec.channel.choi_cptp_check(DEFAULT_CP_TOL);
    let frame = spec.channel.diagonalize();
    let rows = |m: &Matrix3<f64>| -> Vec<[f64; 3]> {
        (0..3).map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]]).collect()
    };
    let value = json!({
        "name": spec.name,
        "is_cp": report.is_cp,
        "min_eigenvalue": report.min_eigenvalue,
        "allow_noncp": allow_noncp,
        "frame": {
            "u": rows(&frame.u),
            "s": frame.s.as_slice(),
            "v": rows(&frame.v),
            "xi": frame.xi.as_slice(),
        },
    });
    print_json(out, &value)?;
    Ok(if report.is_cp || allow_noncp { 0 } else { 2 })
}

/// A point file holds `{"p11": .., "p00": ..}`; anything else is read as a
/// channel spec and replaced by its capacity-optimal point.
fn load_point(path: &Path, samples: usize, tol: f64) -> Result<TransitionPoint> {
    let text = read_text(path)?;
    let spec_err = |source| CliError::Spec {
        path: path.display().to_string(),
        source,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        spec_err(SpecError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    })?;
    if value.get("p11").is_some() || value.get("p00").is_some() {
        let p: TransitionPoint = serde_json::from_value(value).map_err(|e| {
            spec_err(SpecError::Field {
                field: "p11",
                message: e.to_string(),
            })
        })?;
        return Ok(p);
    }
    let spec = parse_channel_spec(&text, false).map_err(spec_err)?;
    Ok(optimize_capacity(&spec.channel, samples, tol)?.point)
}

#[derive(Serialize)]
struct Named<T: Serialize> {
    name: Option<String>,
    #[serde(flatten)]
    report: T,
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    emit(out, &format!("{text}\n"))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Write {
            path: "stdout".into(),
            source,
        })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn border_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".border.csv");
    PathBuf::from(s)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn region_csv(region: &qubitline::Region) -> String {
    let mut s = String::from(REGION_HEADER);
    s.push('\n');
    for smp in &region.samples {
        let a = smp.axis.vector();
        let fields = [
            smp.k,
            a.x,
            a.y,
            a.z,
            smp.point.p11,
            smp.point.p00,
            smp.objective,
        ];
        s.push_str(&fields.map(num).join(","));
        s.push('\n');
    }
    s
}

pub fn border_csv(border: &[TransitionPoint]) -> String {
    let mut s = String::from(BORDER_HEADER);
    s.push('\n');
    for p in border {
        s.push_str(&format!("{},{}\n", num(p.p11), num(p.p00)));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub count: usize,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub name: String,
    pub radii: Vector3<f64>,
    pub b: Vector3<f64>,
    pub c_bin: f64,
    pub pc_half: f64,
    pub area: f64,
}

/// Channel `i` of a sweep: drawn from stream `i` of a ChaCha8 generator
/// seeded with `seed`, so rows do not depend on scheduling.
pub fn sweep_channel(seed: u64, i: usize) -> AffineChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    sample_cptp_channel(&mut rng)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    (0..config.count)
        .into_par_iter()
        .map(|i| {
            let ch = sweep_channel(config.seed, i);
            let cap = optimize_capacity(&ch, config.samples, DEFAULT_REFINE_TOL)?;
            let pc = optimize_pc(&ch, 0.5)?;
            let region = generate_region(&ch, config.samples)?;
            Ok(SweepRow {
                name: format!("sweep-{i}"),
                radii: ch.diagonalize().s,
                b: ch.b,
                c_bin: cap.c_bin,
                pc_half: pc.pc,
                area: region.area(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let fields = [
            r.radii.x, r.radii.y, r.radii.z, r.b.x, r.b.y, r.b.z, r.c_bin, r.pc_half, r.area,
        ];
        s.push_str(&r.name);
        for f in fields {
            s.push(',');
            s.push_str(&num(f));
        }
        s.push('\n');
    }
    s
}
