//! The `sandpile` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use sandpile_core::harness::{
    bench_compare, gen_comb, gen_random, gen_single_pile, speedups, write_csv, BenchInput,
};
use sandpile_core::model::first_move;
use sandpile_core::{
    apply_move, build_orbit_graph, is_lattice, is_reachable, run_fast_general, run_fast_spm,
    run_to_fixpoint_naive, step_parallel, Algorithm, Configuration, Mode, Model, ModelKind,
    SandpileError,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Configuration(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<SandpileError> for CliError {
    fn from(e: SandpileError) -> Self {
        match e {
            SandpileError::InvalidPlateauBound
            | SandpileError::UnsupportedMode(_)
            | SandpileError::FastRequiresSpm
            | SandpileError::Divergence { .. }
            | SandpileError::VertexLimit { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

/// Parses non-negative integers separated by whitespace and/or commas.
/// `"3, 2, 2, 1"` and `"3 2 2 1"` both give `(3,2,2,1)`; an empty string
/// gives the empty configuration.
pub fn parse_configuration(text: &str) -> Result<Configuration, CliError> {
    let mut heights = Vec::new();
    for (i, field) in text.split(',').enumerate() {
        let tokens: Vec<&str> = field.split_whitespace().collect();
        if tokens.is_empty() {
            if text.contains(',') {
                return Err(CliError::Configuration(format!(
                    "empty entry at position {}",
                    i + 1
                )));
            }
            continue;
        }
        for token in tokens {
            let h = token.parse::<u64>().map_err(|_| {
                if token.starts_with('-') {
                    CliError::Configuration(format!("negative height `{token}`"))
                } else {
                    CliError::Configuration(format!("not a non-negative integer: `{token}`"))
                }
            })?;
            heights.push(h);
        }
    }
    Ok(Configuration::new(heights))
}

#[derive(Debug, Parser)]
#[command(
    name = "sandpile",
    version,
    about = "Fixed points and orbit graphs of 1-D sandpile models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the local rules step by step.
    Simulate(SimulateArgs),
    /// Compute the fixed point.
    Fixpoint(FixpointArgs),
    /// Build the orbit graph and optionally check the lattice property.
    Orbit(OrbitArgs),
    /// Time the naive and fast algorithms and write CSV.
    Bench(BenchArgs),
    /// Print a generated configuration.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Spm,
    Ipm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Seq,
    Par,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Seq => Mode::Sequential,
            ModeArg::Par => Mode::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Naive,
    Fast,
    Merge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Dot,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Single,
    Comb,
    Random,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Heights separated by commas and/or whitespace.
    #[arg(long, conflicts_with = "file")]
    pub input: Option<String>,
    /// Read the heights from a file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl InputArgs {
    fn configuration(&self) -> Result<Configuration, CliError> {
        match (&self.input, &self.file) {
            (Some(text), _) => parse_configuration(text),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                parse_configuration(&text)
            }
            (None, None) => Err(CliError::Usage(
                "one of --input or --file is required".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "spm")]
    pub model: ModelArg,
    /// Plateau bound of IPM(k).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "seq")]
    pub mode: ModeArg,
}

impl ModelArgs {
    fn model(&self) -> Result<Model, CliError> {
        match (self.model, self.k) {
            (ModelArg::Spm, None) => Ok(Model::SPM),
            (ModelArg::Spm, Some(_)) => {
                Err(CliError::Usage("--k only applies to --model ipm".into()))
            }
            (ModelArg::Ipm, None) => Err(CliError::Usage("--model ipm requires --k".into())),
            (ModelArg::Ipm, Some(k)) => Ok(Model::ipm(k)?),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1_000_000_000)]
    pub max_steps: u64,
    /// Print every configuration, not only the final one.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct FixpointArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "merge")]
    pub algo: AlgoArg,
    /// Step limit of the naive simulator.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub max_steps: u64,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 100_000)]
    pub max_vertices: usize,
    #[arg(long)]
    pub check_lattice: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "single")]
    pub generator: Generator,
    /// Grain counts (single, comb) or lengths (random).
    #[arg(long, value_delimiter = ',', default_value = "1000,10000")]
    pub sizes: Vec<u64>,
    /// Tallest column of random inputs.
    #[arg(long, default_value_t = 20)]
    pub max_height: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Algorithms to compare (naive, fast, merge).
    #[arg(long, value_delimiter = ',', default_value = "naive,fast,merge")]
    pub algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "single")]
    pub generator: Generator,
    /// Grains of a single pile or comb.
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    /// Length of a random configuration.
    #[arg(long, default_value_t = 0)]
    pub length: usize,
    #[arg(long, default_value_t = 20)]
    pub max_height: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Output of `fixpoint --format json`.
#[derive(Debug, Serialize)]
pub struct FixpointJson {
    pub fixpoint: Configuration,
    pub transient: Option<u64>,
    pub iterations: u64,
    pub merges: u64,
}

#[derive(Debug, Serialize)]
struct SimulateJson {
    #[serde(rename = "final")]
    last: Configuration,
    steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trajectory: Option<Vec<Configuration>>,
}

#[derive(Debug, Serialize)]
struct OrbitJson {
    vertices: usize,
    edges: usize,
    lattice: Option<bool>,
    characterization: Option<bool>,
    sinks: Vec<Configuration>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write to stdout: {e}"))),
    }
}

fn json(value: &impl Serialize) -> Result<String, CliError> {
    serde_json::to_string(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn unsupported_format(command: &str, format: Format) -> CliError {
    CliError::Usage(format!("{command} does not support --format {format:?}").to_lowercase())
}

fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let c = args.input.configuration()?;
    let model = args.model.model()?;
    let mode = Mode::from(args.model.mode);
    let (last, steps, trajectory) = if args.trace {
        let mut states = vec![c.clone()];
        let mut current = c;
        loop {
            let next = match mode {
                Mode::Sequential => match first_move(&current, &model) {
                    Some(mv) => apply_move(&current, &mv)?,
                    None => break,
                },
                Mode::Parallel => step_parallel(&current, &model)?,
            };
            if next == current {
                break;
            }
            if states.len() as u64 > args.max_steps {
                return Err(SandpileError::Divergence {
                    limit: args.max_steps,
                }
                .into());
            }
            states.push(next.clone());
            current = next;
        }
        (current, states.len() as u64 - 1, Some(states))
    } else {
        let (last, steps) = run_to_fixpoint_naive(&c, &model, mode, args.max_steps)?;
        (last, steps, None)
    };
    match args.output.format {
        Format::Plain => {
            let mut s = String::new();
            for state in trajectory.iter().flatten() {
                writeln!(s, "{state}").unwrap();
            }
            if trajectory.is_none() {
                writeln!(s, "final: {last}").unwrap();
            }
            writeln!(s, "steps: {steps}").unwrap();
            Ok(s)
        }
        Format::Json => json(&SimulateJson {
            last,
            steps,
            trajectory,
        }),
        other => Err(unsupported_format("simulate", other)),
    }
}

/// Fixed point report for the chosen algorithm. The fixed point is printed
/// without trailing empty columns whichever algorithm produced it.
pub fn fixpoint_report(args: &FixpointArgs) -> Result<FixpointJson, CliError> {
    let c = args.input.configuration()?;
    let model = args.model.model()?;
    let mode = Mode::from(args.model.mode);
    if args.algo != AlgoArg::Naive {
        if model.kind() != ModelKind::Spm {
            return Err(SandpileError::FastRequiresSpm.into());
        }
        if mode == Mode::Parallel {
            return Err(CliError::Usage(
                "--mode par is only simulated by --algo naive".into(),
            ));
        }
    }
    Ok(match args.algo {
        AlgoArg::Naive => {
            let (fixpoint, steps) = run_to_fixpoint_naive(&c, &model, mode, args.max_steps)?;
            FixpointJson {
                fixpoint: fixpoint.canonical(),
                transient: Some(steps),
                iterations: steps,
                merges: 0,
            }
        }
        AlgoArg::Fast => {
            let r = run_fast_general(&c)?;
            FixpointJson {
                fixpoint: r.fixpoint,
                transient: None,
                iterations: r.iterations,
                merges: 0,
            }
        }
        AlgoArg::Merge => {
            let r = run_fast_spm(&c)?;
            FixpointJson {
                fixpoint: r.fixpoint,
                transient: r.transient,
                iterations: r.iterations,
                merges: r.merges,
            }
        }
    })
}

fn fixpoint(args: &FixpointArgs) -> Result<String, CliError> {
    let r = fixpoint_report(args)?;
    match args.output.format {
        Format::Plain => {
            let transient = r.transient.map_or("n/a".to_string(), |t| t.to_string());
            Ok(format!(
                "fixpoint: {}\ntransient: {transient}\niterations: {}\nmerges: {}\n",
                r.fixpoint, r.iterations, r.merges
            ))
        }
        Format::Json => json(&r),
        other => Err(unsupported_format("fixpoint", other)),
    }
}

/// Every configuration reachable from `(n)` under SPM, by extending
/// reachable prefixes with non-increasing positive heights.
fn reachable_set_size(n: u64, cap: usize) -> Option<usize> {
    fn extend(prefix: &mut Vec<u64>, left: u64, count: &mut usize, cap: usize) -> bool {
        if left == 0 {
            *count += 1;
            return *count <= cap;
        }
        let top = prefix.last().copied().unwrap_or(left).min(left);
        for h in (1..=top).rev() {
            prefix.push(h);
            let ok = !is_reachable(&Configuration::from(prefix.as_slice()))
                || extend(prefix, left - h, count, cap);
            prefix.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut count = 0;
    extend(&mut Vec::new(), n, &mut count, cap).then_some(count)
}

fn orbit(args: &OrbitArgs) -> Result<String, CliError> {
    let c = args.input.configuration()?;
    let model = args.model.model()?;
    let mode = Mode::from(args.model.mode);
    let g = build_orbit_graph(&c, &model, mode, args.max_vertices)?;
    let lattice = if args.check_lattice {
        Some(is_lattice(&g)?)
    } else {
        None
    };
    // The reachable-set characterization describes the sequential SPM orbit
    // of a single pile.
    let characterization =
        (model.kind() == ModelKind::Spm && mode == Mode::Sequential && c.canonical_len() <= 1)
            .then(|| {
                g.vertices().iter().all(is_reachable)
                    && reachable_set_size(c.grains(), g.vertex_count()) == Some(g.vertex_count())
            });

    let mut summary = String::new();
    if let Some(l) = lattice {
        write!(summary, "lattice: {l}; ").unwrap();
    }
    writeln!(
        summary,
        "vertices: {}; edges: {}",
        g.vertex_count(),
        g.edge_count()
    )
    .unwrap();
    match characterization {
        Some(holds) => writeln!(
            summary,
            "reachable-set characterization: {}",
            if holds { "matches" } else { "DIFFERS" }
        ),
        None => writeln!(
            summary,
            "reachable-set characterization: n/a (not a sequential SPM single pile)"
        ),
    }
    .unwrap();
    let sinks: Vec<Configuration> = g
        .sinks()
        .into_iter()
        .map(|s| g.vertices()[s].clone())
        .collect();
    for s in &sinks {
        writeln!(summary, "fixed point: {s}").unwrap();
    }

    match args.output.format {
        Format::Plain => {
            if let Some(path) = &args.output.out {
                emit(&Some(path.clone()), &g.to_dot())?;
            }
            Ok(summary)
        }
        Format::Dot => match &args.output.out {
            Some(path) => {
                emit(&Some(path.clone()), &g.to_dot())?;
                Ok(summary)
            }
            None => {
                eprint!("{summary}");
                Ok(g.to_dot())
            }
        },
        Format::Json => json(&OrbitJson {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            lattice,
            characterization,
            sinks,
        }),
        Format::Csv => Err(unsupported_format("orbit", Format::Csv)),
    }
}

fn generate(kind: Generator, size: u64, max_height: u64, seed: u64) -> Configuration {
    match kind {
        Generator::Single => gen_single_pile(size),
        Generator::Comb => gen_comb(size),
        Generator::Random => gen_random(size as usize, max_height, seed),
    }
}

fn generator_name(kind: Generator) -> &'static str {
    match kind {
        Generator::Single => "single-pile",
        Generator::Comb => "comb",
        Generator::Random => "random",
    }
}

fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let inputs: Vec<BenchInput> = args
        .sizes
        .iter()
        .map(|&size| {
            BenchInput::new(
                generator_name(args.generator),
                generate(args.generator, size, args.max_height, args.seed),
            )
        })
        .collect();
    let records = bench_compare(&inputs, &args.algos, args.reps)?;
    let mut buf = Vec::new();
    write_csv(&records, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(&args.out, &String::from_utf8(buf).expect("csv is utf-8"))?;
    for &contender in args.algos.iter().filter(|&&a| a != Algorithm::NaiveSeq) {
        for (generator, n, ratio) in speedups(&records, Algorithm::NaiveSeq, contender) {
            eprintln!("{generator} n={n}: {contender} is {ratio:.1}x faster than naive-seq");
        }
    }
    Ok(())
}

fn gen(args: &GenArgs) -> Result<String, CliError> {
    let size = match args.generator {
        Generator::Random => args.length as u64,
        _ => args.n,
    };
    let c = generate(args.generator, size, args.max_height, args.seed);
    match args.output.format {
        Format::Plain => Ok(format!("{c}\n")),
        Format::Json => json(&c),
        other => Err(unsupported_format("gen", other)),
    }
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let (text, out) = match &cli.command {
        Command::Simulate(a) => (simulate(a)?, &a.output.out),
        Command::Fixpoint(a) => (fixpoint(a)?, &a.output.out),
        Command::Orbit(a) => {
            let text = orbit(a)?;
            // DOT has already gone to --out; the summary goes to stdout.
            return emit(&None, &text);
        }
        Command::Bench(a) => return bench(a),
        Command::Gen(a) => (gen(a)?, &a.output.out),
    };
    emit(out, &text)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_separators() {
        assert_eq!(
            parse_configuration("3, 2, 2, 1").unwrap().heights(),
            &[3, 2, 2, 1]
        );
        assert_eq!(
            parse_configuration("3 2\t2\n1").unwrap().heights(),
            &[3, 2, 2, 1]
        );
        assert_eq!(parse_configuration("8").unwrap().heights(), &[8]);
        assert_eq!(
            parse_configuration(" 4 ,5 6,7\n").unwrap().heights(),
            &[4, 5, 6, 7]
        );
        assert!(parse_configuration("").unwrap().is_empty());
        assert!(parse_configuration("  \n").unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_tokens() {
        for bad in ["3 -1", "3,,1", "3,", ",3", "x", "1.5", "2 three"] {
            let err = parse_configuration(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn reachable_set_sizes() {
        // (8): the 13 configurations of its orbit.
        assert_eq!(reachable_set_size(8, 100), Some(13));
        assert_eq!(reachable_set_size(0, 100), Some(1));
        assert_eq!(reachable_set_size(8, 5), None);
    }
}
