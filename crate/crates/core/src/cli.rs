//! Command-line front end.
//!
//! Every invocation ends its stdout with a status line, `status: ok` or
//! `status: error: <message>`, and exits non-zero iff an operation failed.
//! When `--out` is given the report goes to that file and stdout carries only
//! a notice and the status line.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use crate::angle::{format_angle, parse_angle};
use crate::codec::{sweep, GrayImage, Parallelism, SweepConfig};
use crate::cordic::{apply_plan_counted, ideal_rotation_matrix, Vector2};
use crate::dct8::{dct2d_oracle, dct8_oracle, Block8, DctEngine, EngineConfig, ROTATOR_ANGLES};
use crate::error::{Error, Result};
use crate::fixed::{ArithmeticMode, FixedPointFormat, OverflowPolicy};
use crate::ops::OpCounts;
use crate::planner::{
    decompose, generate_table, table_to_json, write_table_csv, IndexPolicy, TableRow,
};
use crate::{pgm, testimage};

#[derive(Debug, Parser)]
#[command(
    name = "cordic-dct",
    version,
    about = "CORDIC angle decomposition, shift-add DCT and PSNR evaluation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Angle tolerance of the micro-rotation plans, in radians.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::Nearest)]
    pub policy: PolicyArg,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    pub mode: ModeArg,
    /// Fixed-point word length (default depends on the command).
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    /// Fixed-point fractional bits (default depends on the command).
    #[arg(long, global = true)]
    pub frac: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Literal,
    Nearest,
}

impl From<PolicyArg> for IndexPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Literal => IndexPolicy::PaperLiteral,
            PolicyArg::Nearest => IndexPolicy::NearestIndex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Float,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose one angle into micro-rotations.
    Decompose {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
    },
    /// Rotator parameter table over angles and tolerances.
    Table {
        /// Use the DCT rotator angles (π/4, 3π/8, π/16, 3π/16) at 1e-3 and 1e-4.
        #[arg(long)]
        rotators: bool,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
    },
    /// Rotate a vector through a plan.
    Rotate {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Skip the gain compensation.
        #[arg(long)]
        no_compensate: bool,
    },
    /// Transform 8 (1-D) or 64 (8×8) samples read from a file or stdin.
    Dct {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Compress an image across tolerances and quality factors and report PSNR.
    Eval {
        /// Binary PGM (P5, maxval 255). Omit to use --synthetic.
        image: Option<PathBuf>,
        /// Bundled synthetic image: scene, gradient, zone_plate, texture, noise.
        #[arg(long, default_value = "scene")]
        synthetic: String,
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = testimage::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [95, 90, 85, 80, 75])]
        qualities: Vec<u32>,
        /// Defaults to 1e-3,1e-4.
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
        /// Merge post-scaling into the quantizer.
        #[arg(long)]
        fold: bool,
        /// Process blocks on one thread.
        #[arg(long)]
        serial: bool,
    },
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    execute(&cli, &mut stdin.lock(), &mut stdout.lock())
}

/// Parses `args` (including the program name) and runs against the given streams.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdin, stdout),
        Err(e) => {
            let _ = write!(stdout, "{e}");
            if e.use_stderr() {
                let _ = writeln!(stdout, "status: error: invalid arguments");
                2
            } else {
                0
            }
        }
    }
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> i32 {
    let outcome = dispatch(cli, stdin).and_then(|report| emit(&cli.global, &report, stdout));
    match outcome {
        Ok(()) => {
            let _ = writeln!(stdout, "status: ok");
            0
        }
        Err(e) => {
            let _ = writeln!(stdout, "status: error: {e}");
            1
        }
    }
}

fn emit(global: &GlobalOpts, report: &str, stdout: &mut dyn Write) -> Result<()> {
    match &global.out {
        Some(path) => {
            std::fs::write(path, report)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        None => stdout.write_all(report.as_bytes())?,
    }
    Ok(())
}

fn mode_for(
    global: &GlobalOpts,
    default: FixedPointFormat,
    overflow: OverflowPolicy,
) -> Result<ArithmeticMode> {
    match global.mode {
        ModeArg::Float => Ok(ArithmeticMode::ExactFloat),
        ModeArg::Fixed => {
            let format = FixedPointFormat::new(
                global.bits.unwrap_or(default.total_bits()),
                global.frac.unwrap_or(default.frac_bits()),
            )?;
            Ok(ArithmeticMode::fixed(format, overflow))
        }
    }
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Decompose { angle } => cmd_decompose(g, parse_angle(angle)?),
        Command::Table {
            rotators,
            angles,
            epsilons,
        } => {
            let mut angle_list: Vec<f64> = angles
                .iter()
                .map(|a| parse_angle(a))
                .collect::<Result<_>>()?;
            let mut eps_list = epsilons.clone();
            if *rotators {
                angle_list = ROTATOR_ANGLES.to_vec();
                if eps_list.is_empty() {
                    eps_list = vec![1e-3, 1e-4];
                }
            }
            if eps_list.is_empty() {
                eps_list.push(g.eps);
            }
            cmd_table(g, &angle_list, &eps_list)
        }
        Command::Rotate {
            angle,
            x,
            y,
            no_compensate,
        } => cmd_rotate(g, parse_angle(angle)?, Vector2::new(*x, *y), !no_compensate),
        Command::Dct { input } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(path)?,
                None => {
                    let mut s = String::new();
                    stdin.read_to_string(&mut s)?;
                    s
                }
            };
            cmd_dct(g, &parse_samples(&text)?)
        }
        Command::Eval {
            image,
            synthetic,
            size,
            seed,
            qualities,
            epsilons,
            fold,
            serial,
        } => {
            let img = match image {
                Some(path) => pgm::read(path)?,
                None => testimage::by_name(synthetic, *size, *size, *seed).ok_or_else(|| {
                    Error::Parse(format!("unknown synthetic image {synthetic:?}"))
                })?,
            };
            let config = SweepConfig {
                epsilons: if epsilons.is_empty() {
                    vec![1e-3, 1e-4]
                } else {
                    epsilons.clone()
                },
                qualities: qualities.clone(),
                policy: g.policy.into(),
                mode: mode_for(g, FixedPointFormat::DCT, OverflowPolicy::Saturate)?,
                fold_into_quantizer: *fold,
                parallelism: if *serial {
                    Parallelism::Serial
                } else {
                    Parallelism::Blocks
                },
            };
            cmd_eval(g, &img, &config)
        }
    }
}

fn table_text(rows: &[TableRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let sigma: Vec<String> = r.directions_string().chars().map(String::from).collect();
        let _ = writeln!(
            out,
            "angle: {}  eps: {:e}  i: {}  sigma: {}  residual: {:e}  gain: {:?}",
            format_angle(r.angle_rad),
            r.epsilon,
            if r.indices.is_empty() {
                "(none)".to_string()
            } else {
                r.indices_string()
            },
            if sigma.is_empty() {
                "(none)".to_string()
            } else {
                sigma.join(" ")
            },
            r.residual_rad,
            r.gain
        );
    }
    out
}

fn render_rows(format: FormatArg, rows: &[TableRow]) -> Result<String> {
    Ok(match format {
        FormatArg::Csv => {
            let mut buf = Vec::new();
            write_table_csv(rows, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        FormatArg::Json => table_to_json(rows) + "\n",
        FormatArg::Text => table_text(rows),
    })
}

pub fn cmd_decompose(g: &GlobalOpts, angle: f64) -> Result<String> {
    let plan = decompose(angle, g.eps, g.policy.into())?;
    let row = TableRow::from_plan(&plan);
    Ok(match g.format {
        FormatArg::Text => {
            let mut out = format!(
                "angle: {} rad  epsilon: {:e}  policy: {}\n",
                format_angle(angle),
                g.eps,
                plan.policy()
            );
            if plan.is_empty() {
                out.push_str("empty plan: angle already within tolerance\n");
            } else {
                let sigma: Vec<String> =
                    plan.directions_string().chars().map(String::from).collect();
                let _ = writeln!(
                    out,
                    "i: {}  sigma: {}",
                    plan.indices_string(),
                    sigma.join(" ")
                );
            }
            let _ = writeln!(
                out,
                "residual: {:e} rad\ngain: {:?}",
                plan.residual(),
                plan.gain()
            );
            out
        }
        FormatArg::Json => serde_json::to_string_pretty(&row).expect("row serializes") + "\n",
        FormatArg::Csv => render_rows(FormatArg::Csv, &[row])?,
    })
}

pub fn cmd_table(g: &GlobalOpts, angles: &[f64], epsilons: &[f64]) -> Result<String> {
    let rows = generate_table(angles, epsilons, g.policy.into())?;
    if rows.is_empty() && g.format == FormatArg::Text {
        return Ok("angle  eps  i  sigma  residual  gain\n".to_string());
    }
    render_rows(g.format, &rows)
}

#[derive(Debug, Serialize)]
struct RotateReport {
    angle_rad: f64,
    epsilon: f64,
    indices: Vec<u32>,
    directions: String,
    compensated: bool,
    input: Vector2,
    output: Vector2,
    ideal: Vector2,
    error: f64,
    ops: OpCounts,
}

pub fn cmd_rotate(g: &GlobalOpts, angle: f64, v: Vector2, compensate: bool) -> Result<String> {
    let plan = decompose(angle, g.eps, g.policy.into())?;
    let mode = mode_for(g, FixedPointFormat::UNIT, OverflowPolicy::Error)?;
    let mut ops = OpCounts::new();
    let output = apply_plan_counted(v, &plan, mode, compensate, &mut ops)?;
    let ideal = ideal_rotation_matrix(angle).apply(v);
    let ideal = if compensate {
        ideal
    } else {
        Vector2::new(ideal.x / plan.gain(), ideal.y / plan.gain())
    };
    let report = RotateReport {
        angle_rad: angle,
        epsilon: g.eps,
        indices: plan.indices(),
        directions: plan.directions_string(),
        compensated: compensate,
        input: v,
        output,
        ideal,
        error: output.distance(&ideal),
        ops,
    };
    Ok(match g.format {
        FormatArg::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        FormatArg::Csv => format!(
            "angle_rad,epsilon,indices,directions,x,y,out_x,out_y,ideal_x,ideal_y,error,adds,shifts,multiplies\n{:?},{:e},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:e},{},{},{}\n",
            angle, g.eps, plan.indices_string(), plan.directions_string(), v.x, v.y, output.x, output.y,
            ideal.x, ideal.y, report.error, ops.adds, ops.shifts, ops.multiplies
        ),
        FormatArg::Text => format!(
            "angle: {} rad  i: {}  sigma: {}\nin:    ({:?}, {:?})\nout:   ({:?}, {:?})\nideal: ({:?}, {:?}){}\nerror: {:e}\nops: adds={} shifts={} multiplies={}\n",
            format_angle(angle),
            plan.indices_string(),
            plan.directions_string(),
            v.x, v.y, output.x, output.y, ideal.x, ideal.y,
            if compensate { "" } else { "  (scaled by 1/gain)" },
            report.error,
            ops.adds, ops.shifts, ops.multiplies
        ),
    })
}

/// Whitespace- or comma-separated numbers; exactly 8 or 64 of them.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad sample {t:?}")))
        })
        .collect::<Result<_>>()?;
    match values.len() {
        8 | 64 => Ok(values),
        n => Err(Error::DimensionMismatch(format!(
            "expected 8 or 64 samples, got {n}"
        ))),
    }
}

#[derive(Debug, Serialize)]
struct DctReport {
    epsilon: f64,
    coefficients: Vec<f64>,
    oracle: Vec<f64>,
    max_abs_error: f64,
    ops_per_8_point: OpCounts,
    ops_total: OpCounts,
}

pub fn cmd_dct(g: &GlobalOpts, samples: &[f64]) -> Result<String> {
    let engine = DctEngine::new(EngineConfig {
        epsilon: g.eps,
        policy: g.policy.into(),
        mode: mode_for(g, FixedPointFormat::DCT, OverflowPolicy::Error)?,
        fold_into_quantizer: false,
    })?;
    let mut ops = OpCounts::new();
    let (coefficients, oracle): (Vec<f64>, Vec<f64>) = if samples.len() == 8 {
        let x: [f64; 8] = samples.try_into().expect("length checked");
        (
            engine.forward_counted(&x, &mut ops)?.to_vec(),
            dct8_oracle(&x).to_vec(),
        )
    } else {
        let block = Block8(samples.try_into().expect("length checked"));
        (
            engine.forward_2d_counted(&block, &mut ops)?.0.to_vec(),
            dct2d_oracle(&block).0.to_vec(),
        )
    };
    let max_abs_error = coefficients
        .iter()
        .zip(&oracle)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let report = DctReport {
        epsilon: g.eps,
        coefficients,
        oracle,
        max_abs_error,
        ops_per_8_point: engine.op_count_report()?,
        ops_total: ops,
    };
    Ok(match g.format {
        FormatArg::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        FormatArg::Csv => {
            let mut out = String::from("index,cordic,oracle,abs_error\n");
            for (i, (c, o)) in report.coefficients.iter().zip(&report.oracle).enumerate() {
                let _ = writeln!(out, "{i},{c:?},{o:?},{:e}", (c - o).abs());
            }
            out
        }
        FormatArg::Text => {
            let mut out = String::new();
            for row in report.coefficients.chunks(8) {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>11.5}")).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
            let p = report.ops_per_8_point;
            let _ = writeln!(out, "max |cordic - oracle|: {:e}", report.max_abs_error);
            let _ = writeln!(
                out,
                "ops per 8-point transform: adds={} shifts={} multiplies={}",
                p.adds, p.shifts, p.multiplies
            );
            let _ = writeln!(out, "saturations: {}", report.ops_total.saturations);
            out
        }
    })
}

pub fn cmd_eval(g: &GlobalOpts, img: &GrayImage, config: &SweepConfig) -> Result<String> {
    let report = sweep(img, config)?;
    Ok(match g.format {
        FormatArg::Csv => report.to_csv(),
        FormatArg::Json => report.to_json(),
        FormatArg::Text => report.to_text(),
    })
}
