//! Experiment front end: configures a protocol, sweeps a noise grid, and
//! writes one CSV row per grid point. Seeds are mandatory so every run is
//! reproducible byte for byte, independent of worker count.

mod csv;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use csv::{format_sig6, write_csv};
use qdistill::bits::BitMatrix;
use qdistill::block::StabilizerCode;
use qdistill::check::standard_form;
use qdistill::circuit::{
    synthesize_block_circuit, synthesize_conv_frame_circuit, CircuitMetrics,
    UNITARY_RATE_THIRD_REFERENCE,
};
use qdistill::conv::{conv_standard_form, run_conv_distillation, ConvCode};
use qdistill::distill::{
    classical_code_protocol, run_block_protocol, run_recurrence, NoiseSpec, ProtocolResult,
    SyndromeMode,
};
use qdistill::exec::{Execution, RunCfg};
use qdistill::planar::{
    decode_error_prob, measurement_threshold, run_resource_protocol, threshold_curve,
};

#[derive(Parser)]
#[command(
    name = "qdistill",
    about = "Stabilizer entanglement distillation experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Block-code distillation under Werner noise
    Distill(DistillArgs),
    /// n-to-(n-1) recurrence protocol with bilateral Hadamard iterations
    Recurrence(RecurrenceArgs),
    /// Classical-code adaptation: bit-flip iteration, then phase-flip
    Classical(ClassicalArgs),
    /// Streaming convolutional-code distillation
    Conv(ConvArgs),
    /// Planar-code resource protocol under measurement-flip noise
    Surface(SurfaceArgs),
    /// Analytic measurement-error threshold curve
    Threshold(ThresholdArgs),
    /// Standard form and logical operators of a code
    StandardForm(StandardFormArgs),
    /// Circuit metrics of the synthesized measurement circuit
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct CommonRun {
    /// Monte Carlo trials per grid point
    #[arg(long)]
    trials: u64,
    /// RNG seed (mandatory; results are reproducible)
    #[arg(long)]
    seed: u64,
    /// Run trials on a single thread
    #[arg(long)]
    sequential: bool,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

impl CommonRun {
    fn cfg(&self, trials: u64, seed: u64) -> RunCfg {
        RunCfg {
            trials,
            seed,
            execution: if self.sequential { Execution::Sequential } else { Execution::Parallel },
        }
    }
}

#[derive(Args)]
struct NoiseGrid {
    /// Depolarizing probability grid, `p` or `start:stop:step`
    #[arg(long, conflicts_with = "fidelity")]
    p: Option<String>,
    /// Input fidelity grid, `F` or `start:stop:step` (p = 1 - F)
    #[arg(long)]
    fidelity: Option<String>,
}

impl NoiseGrid {
    fn probabilities(&self) -> Result<Vec<f64>> {
        match (&self.p, &self.fidelity) {
            (Some(p), None) => parse_grid(p),
            (None, Some(f)) => Ok(parse_grid(f)?.into_iter().map(|f| 1.0 - f).collect()),
            (None, None) => bail!("one of --p or --fidelity is required"),
            (Some(_), Some(_)) => unreachable!("clap conflict"),
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Correct,
    Detect,
}

#[derive(Copy, Clone, ValueEnum)]
enum BuiltinCode {
    FiveOneThree,
    NineFourTwo,
}

#[derive(Args)]
struct DistillArgs {
    /// Code file: one generator per line over I, X, Y, Z
    #[arg(long, conflicts_with = "builtin")]
    code: Option<PathBuf>,
    /// Declared code distance (required with --code)
    #[arg(long)]
    distance: Option<usize>,
    /// Builtin code
    #[arg(long)]
    builtin: Option<BuiltinCode>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[command(flatten)]
    noise: NoiseGrid,
    #[command(flatten)]
    run: CommonRun,
}

#[derive(Args)]
struct RecurrenceArgs {
    /// Block width n
    #[arg(long)]
    n: usize,
    #[arg(long)]
    iterations: usize,
    #[command(flatten)]
    noise: NoiseGrid,
    #[command(flatten)]
    run: CommonRun,
}

#[derive(Args)]
struct ClassicalArgs {
    /// Parity-check matrix for the bit-flip iteration (rows of 0/1)
    #[arg(long)]
    h1: PathBuf,
    /// Parity-check matrix for the phase-flip iteration
    #[arg(long)]
    h2: PathBuf,
    #[command(flatten)]
    noise: NoiseGrid,
    #[command(flatten)]
    run: CommonRun,
}

#[derive(Args)]
struct ConvArgs {
    /// Convolutional code file (rows `x,... | z,...`); defaults to the
    /// rate-1/3 code
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    frames: usize,
    #[command(flatten)]
    noise: NoiseGrid,
    #[command(flatten)]
    run: CommonRun,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Lattice length L
    #[arg(long)]
    l: usize,
    /// Measurement flip probability grid
    #[arg(long)]
    meas_flip: String,
    #[command(flatten)]
    run: CommonRun,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    lmin: usize,
    #[arg(long)]
    lmax: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StandardFormArgs {
    /// Code file
    #[arg(long)]
    code: PathBuf,
    /// Treat the file as a convolutional check matrix
    #[arg(long)]
    conv: bool,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Block-code file (one generator per line)
    #[arg(long, conflicts_with = "builtin")]
    code: Option<PathBuf>,
    #[arg(long)]
    distance: Option<usize>,
    #[arg(long)]
    builtin: Option<BuiltinCode>,
    /// Use the rate-1/3 convolutional frame circuit
    #[arg(long)]
    conv: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single
            .parse::<f64>()
            .with_context(|| format!("bad number {single:?}"))?]),
        [start, stop, step] => {
            let start: f64 = start.parse().with_context(|| format!("bad start {start:?}"))?;
            let stop: f64 = stop.parse().with_context(|| format!("bad stop {stop:?}"))?;
            let step: f64 = step.parse().with_context(|| format!("bad step {step:?}"))?;
            if step <= 0.0 || stop < start {
                bail!("grid must satisfy start <= stop with positive step");
            }
            let mut out = Vec::new();
            let mut x = start;
            while x <= stop + 1e-12 {
                out.push(x.min(stop));
                x += step;
            }
            Ok(out)
        }
        _ => bail!("grid syntax is `value` or `start:stop:step`"),
    }
}

const DISTILL_HEADER: [&str; 12] = [
    "protocol", "n", "k", "mode", "p_in", "F_in", "trials", "successes", "F_out", "F_out_ci95",
    "yield", "seed",
];

fn distill_row(
    protocol: &str,
    mode: &str,
    p: f64,
    seed: u64,
    result: &ProtocolResult,
) -> Vec<String> {
    vec![
        protocol.to_string(),
        result.n_consumed.to_string(),
        result.k_out.to_string(),
        mode.to_string(),
        format_sig6(p),
        format_sig6(1.0 - p),
        result.trials.to_string(),
        result.successes.to_string(),
        result.fidelity_out.map_or_else(|| "nan".into(), format_sig6),
        result.fidelity_ci95.map_or_else(|| "nan".into(), format_sig6),
        format_sig6(result.yield_rate),
        seed.to_string(),
    ]
}

fn load_block_code(
    code: &Option<PathBuf>,
    distance: Option<usize>,
    builtin: Option<BuiltinCode>,
) -> Result<StabilizerCode> {
    match (code, builtin) {
        (Some(path), None) => {
            let d = distance.ok_or_else(|| anyhow!("--distance is required with --code"))?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(StabilizerCode::parse(d, &text)?)
        }
        (None, Some(BuiltinCode::FiveOneThree)) => Ok(StabilizerCode::five_one_three()),
        (None, Some(BuiltinCode::NineFourTwo)) => Ok(StabilizerCode::nine_four_two()),
        _ => bail!("exactly one of --code or --builtin is required"),
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Distill(args) => {
            let code = load_block_code(&args.code, args.distance, args.builtin)?;
            let mode = match args.mode {
                ModeArg::Correct => SyndromeMode::Correct,
                ModeArg::Detect => SyndromeMode::Detect,
            };
            let mode_name = match args.mode {
                ModeArg::Correct => "correct",
                ModeArg::Detect => "detect",
            };
            let mut rows = Vec::new();
            for (i, p) in args.noise.probabilities()?.into_iter().enumerate() {
                let noise = NoiseSpec::depolarizing(p)?;
                let cfg = args.run.cfg(args.run.trials, args.run.seed.wrapping_add(i as u64));
                let result = run_block_protocol(&code, mode, &noise, &cfg)?;
                rows.push(distill_row("block", mode_name, p, cfg.seed, &result));
            }
            write_csv(&args.run.out, &DISTILL_HEADER, &rows)
        }
        Command::Recurrence(args) => {
            let mut rows = Vec::new();
            for (i, p) in args.noise.probabilities()?.into_iter().enumerate() {
                let noise = NoiseSpec::depolarizing(p)?;
                let cfg = args.run.cfg(args.run.trials, args.run.seed.wrapping_add(i as u64));
                let result = run_recurrence(args.n, args.iterations, &noise, &cfg)?;
                rows.push(distill_row("recurrence", "detect", p, cfg.seed, &result));
            }
            write_csv(&args.run.out, &DISTILL_HEADER, &rows)
        }
        Command::Classical(args) => {
            let h1 = BitMatrix::parse(&std::fs::read_to_string(&args.h1)?)?;
            let h2 = BitMatrix::parse(&std::fs::read_to_string(&args.h2)?)?;
            let mut rows = Vec::new();
            for (i, p) in args.noise.probabilities()?.into_iter().enumerate() {
                let noise = NoiseSpec::depolarizing(p)?;
                let cfg = args.run.cfg(args.run.trials, args.run.seed.wrapping_add(i as u64));
                let result = classical_code_protocol(&h1, &h2, &noise, &cfg)?;
                rows.push(distill_row("classical", "correct", p, cfg.seed, &result));
            }
            write_csv(&args.run.out, &DISTILL_HEADER, &rows)
        }
        Command::Conv(args) => {
            let code = match &args.code {
                Some(path) => ConvCode::parse(&std::fs::read_to_string(path)?)?,
                None => ConvCode::rate_third(),
            };
            let mut rows = Vec::new();
            for (i, p) in args.noise.probabilities()?.into_iter().enumerate() {
                let noise = NoiseSpec::depolarizing(p)?;
                let cfg = args.run.cfg(args.run.trials, args.run.seed.wrapping_add(i as u64));
                let result = run_conv_distillation(&code, args.frames, &noise, &cfg)?;
                rows.push(distill_row("conv", "correct", p, cfg.seed, &result));
            }
            write_csv(&args.run.out, &DISTILL_HEADER, &rows)
        }
        Command::Surface(args) => {
            let header =
                ["L", "p_meas", "P_L_analytic", "P_L_mc", "ci95", "p_threshold"];
            let p_th = measurement_threshold(args.l)?;
            let mut rows = Vec::new();
            for (i, q) in parse_grid(&args.meas_flip)?.into_iter().enumerate() {
                let noise = NoiseSpec::new(0.0, q)?;
                let cfg = args.run.cfg(args.run.trials, args.run.seed.wrapping_add(i as u64));
                let result = run_resource_protocol(args.l, &noise, &cfg)?;
                let p_mc = 1.0 - result.fidelity_out.unwrap_or(f64::NAN);
                rows.push(vec![
                    args.l.to_string(),
                    format_sig6(q),
                    format_sig6(decode_error_prob(q, args.l)?),
                    format_sig6(p_mc),
                    result.fidelity_ci95.map_or_else(|| "nan".into(), format_sig6),
                    format_sig6(p_th),
                ]);
            }
            write_csv(&args.run.out, &header, &rows)
        }
        Command::Threshold(args) => {
            let header = ["L", "p_threshold"];
            let rows: Vec<Vec<String>> = threshold_curve(args.lmin, args.lmax)?
                .into_iter()
                .map(|t| vec![t.l.to_string(), format_sig6(t.p_threshold)])
                .collect();
            write_csv(&args.out, &header, &rows)
        }
        Command::StandardForm(args) => {
            let text = std::fs::read_to_string(&args.code)
                .with_context(|| format!("reading {}", args.code.display()))?;
            let mut out = String::new();
            if args.conv {
                let code = ConvCode::parse(&text)?;
                let std = conv_standard_form(&code)?;
                out.push_str(&format!(
                    "r={} column_perm={:?}\n",
                    std.r, std.column_perm
                ));
                out.push_str(&std.code.to_text());
                let (lx, lz) = std.logical_rows();
                for row in &lx {
                    out.push_str(&format!("LX {}", conv_row_text(row, code.n())));
                }
                for row in &lz {
                    out.push_str(&format!("LZ {}", conv_row_text(row, code.n())));
                }
            } else {
                let code = StabilizerCode::parse(1, &text)?;
                let std = standard_form(code.generators())?;
                out.push_str(&std.to_text());
                let ops = code.logical_operators();
                for lx in &ops.lx {
                    out.push_str(&format!("LX {lx}\n"));
                }
                for lz in &ops.lz {
                    out.push_str(&format!("LZ {lz}\n"));
                }
            }
            match args.out {
                Some(path) => std::fs::write(path, out)?,
                None => print!("{out}"),
            }
            Ok(())
        }
        Command::Metrics(args) => {
            let header = ["method", "depth2q", "gates2q_per_frame", "span_frames"];
            let mut rows = Vec::new();
            let push = |rows: &mut Vec<Vec<String>>, method: &str, m: CircuitMetrics| {
                rows.push(vec![
                    method.to_string(),
                    m.depth2q.to_string(),
                    m.gates2q_per_frame.to_string(),
                    m.span_frames.to_string(),
                ]);
            };
            if args.conv {
                let circuit = synthesize_conv_frame_circuit(&ConvCode::rate_third())?;
                push(&mut rows, "measurement", circuit.metrics());
                push(&mut rows, "unitary-reference", UNITARY_RATE_THIRD_REFERENCE);
            } else {
                let code = load_block_code(&args.code, args.distance, args.builtin)?;
                let bc = synthesize_block_circuit(&code)?;
                push(&mut rows, "measurement", bc.circuit.metrics());
            }
            write_csv(&args.out, &header, &rows)
        }
    }
}

fn conv_row_text(row: &[qdistill::conv::LaurentPoly], n: usize) -> String {
    let xs: Vec<String> = row[..n].iter().map(|p| p.to_string()).collect();
    let zs: Vec<String> = row[n..].iter().map(|p| p.to_string()).collect();
    format!("{} | {}\n", xs.join(", "), zs.join(", "))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
