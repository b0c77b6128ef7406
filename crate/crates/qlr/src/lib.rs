//! Command-line driver: parse, layer, optimize, analyze, benchmark, verify
//! and generate OpenQASM 2.0 programs.

pub mod report;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qlr_core::bench::{self, Mix, WorkloadKind, WorkloadSpec};
use qlr_core::cost::{self, compare};
use qlr_core::layering::{stratify, Emission};
use qlr_core::transform::{optimize_with, transform};
use qlr_core::{oracle, qasm, AvgDenominator, CostModel, FlatProgram, Model};

use report::{Format, Row, Single};

#[derive(Debug, Parser)]
#[command(name = "qlr", version, about = "Reduce qubit lifetimes in OpenQASM 2.0 programs")]
pub struct Cli {
    /// More detail on stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a program and print its expanded form.
    Parse {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the layered bundle format.
    Layers {
        input: PathBuf,
        /// Show the layering after the lifetime transformation.
        #[arg(long)]
        transformed: bool,
        /// Also write the dependency graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Optimize a program and write OpenQASM.
    Opt {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EmissionArg::MeasuresFirst)]
        emission: EmissionArg,
    },
    /// Report execution time and qubit lifetimes.
    Analyze {
        input: PathBuf,
        /// Report before and after optimization.
        #[arg(long, conflicts_with = "against")]
        compare_optimized: bool,
        /// Report this program against a second one.
        #[arg(long)]
        against: Option<PathBuf>,
        #[command(flatten)]
        cost: CostArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the workload suite and print one before/after row per workload.
    Bench {
        #[command(flatten)]
        cost: CostArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Seed for the random workload.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// IQFT sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32, 64])]
        sizes: Vec<usize>,
    },
    /// Check that two measurement-free programs produce the same state.
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = oracle::TOLERANCE)]
        tol: f64,
    },
    /// Generate a workload.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Spectator instructions for bell-gap.
        #[arg(long, default_value_t = 4)]
        gap: usize,
        /// Instruction count for random circuits.
        #[arg(long, default_value_t = 40)]
        len: usize,
        /// Weights of single-qubit gates, two-qubit gates and measurements.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.5, 0.4, 0.1])]
        mix: Vec<f64>,
        /// Allow random circuits to reuse measured qubits.
        #[arg(long)]
        reuse: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    /// Measurement time in units of a single-qubit gate.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..=10_000))]
    pub measure_cost: u64,
    #[arg(long, value_enum, default_value_t = ModelArg::Layered)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value_t = DenomArg::Declared)]
    pub avg_denominator: DenomArg,
}

impl CostArgs {
    fn cost_model(&self) -> CostModel {
        CostModel::with_measure(self.measure_cost)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Layered,
    Serial,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Layered => Model::Layered,
            ModelArg::Serial => Model::Serial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenomArg {
    Declared,
    Active,
}

impl From<DenomArg> for AvgDenominator {
    fn from(d: DenomArg) -> Self {
        match d {
            DenomArg::Declared => AvgDenominator::Declared,
            DenomArg::Active => AvgDenominator::Active,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmissionArg {
    LayerOrder,
    MeasuresFirst,
}

impl From<EmissionArg> for Emission {
    fn from(e: EmissionArg) -> Self {
        match e {
            EmissionArg::LayerOrder => Emission::LayerOrder,
            EmissionArg::MeasuresFirst => Emission::MeasuresFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Fig1,
    Fig4a,
    BellGap,
    Qft,
    Iqft,
    Entangler,
    Random,
}

impl From<KindArg> for WorkloadKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Fig1 => WorkloadKind::Fig1,
            KindArg::Fig4a => WorkloadKind::Fig4a,
            KindArg::BellGap => WorkloadKind::BellGap,
            KindArg::Qft => WorkloadKind::Qft,
            KindArg::Iqft => WorkloadKind::Iqft,
            KindArg::Entangler => WorkloadKind::Entangler,
            KindArg::Random => WorkloadKind::Random,
        }
    }
}

/// Raised when `verify` finds a difference; reported without a diagnostic prefix.
#[derive(Debug)]
pub struct NotEquivalent(pub f64);

impl std::fmt::Display for NotEquivalent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "not equivalent (fidelity {:.12})", self.0)
    }
}

impl std::error::Error for NotEquivalent {}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn display_name(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

/// Parse and expand; errors carry `file:line:col`.
pub fn load(path: &Path) -> Result<FlatProgram> {
    let text = read_text(path)?;
    qasm::load(&text).map_err(|e| anyhow!("{}:{}", display_name(path), e))
}

fn workload_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "stdin".into(), |s| s.to_string_lossy().into_owned())
}

fn write_out(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => out.write_all(text.as_bytes()).context("writing output"),
    }
}

fn bench_suite(sizes: &[usize], seed: u64) -> Vec<WorkloadSpec> {
    let mut specs = vec![
        WorkloadSpec::new(WorkloadKind::Fig1, 3),
        WorkloadSpec::new(WorkloadKind::Fig4a, 16),
        WorkloadSpec { gap: 8, ..WorkloadSpec::new(WorkloadKind::BellGap, 3) },
        WorkloadSpec::new(WorkloadKind::Entangler, 6),
        WorkloadSpec::new(WorkloadKind::Qft, 4),
        WorkloadSpec::new(WorkloadKind::Qft, 5),
    ];
    specs.extend(sizes.iter().map(|&n| WorkloadSpec::new(WorkloadKind::Iqft, n)));
    specs.push(WorkloadSpec::random(8, 60, seed, Mix::default()));
    specs
}

/// Run one parsed command, writing results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let verbose = cli.verbose;
    match &cli.command {
        Command::Parse { input, output } => {
            let fp = load(input)?;
            if verbose > 0 {
                eprintln!("{} qubits, {} instructions", fp.num_qubits(), fp.len());
            }
            write_out(output.as_deref(), &qasm::emit(&fp), out)
        }
        Command::Layers { input, transformed, dot } => {
            let fp = load(input)?;
            let mut lp = stratify(&fp);
            if *transformed {
                lp = transform(lp);
            }
            if let Some(path) = dot {
                write_out(Some(path), &lp.to_dot(), out)?;
            }
            write_out(None, &lp.dump(), out)
        }
        Command::Opt { input, output, emission } => {
            let fp = load(input)?;
            let opt = optimize_with(&fp, (*emission).into());
            if verbose > 0 {
                let before = stratify(&fp);
                let after = transform(before.clone());
                eprintln!("depth {} -> {}", before.depth(), after.depth());
            }
            write_out(output.as_deref(), &qasm::emit(&opt), out)
        }
        Command::Analyze { input, compare_optimized, against, cost: c, format } => {
            let fp = load(input)?;
            let (cm, model, denom) = (c.cost_model(), c.model.into(), c.avg_denominator.into());
            let head = report::header(model, &cm, denom);
            let name = workload_name(input);
            let comparison = if *compare_optimized {
                Some(compare(&fp, &cm, model, denom))
            } else if let Some(other) = against {
                let b = load(other)?;
                if b.num_qubits() != fp.num_qubits() {
                    bail!("{} declares {} qubits, {} declares {}", input.display(), fp.num_qubits(), other.display(), b.num_qubits());
                }
                Some(cost::Comparison { before: cost::analyze(&fp, &cm, model, denom), after: cost::analyze(&b, &cm, model, denom) })
            } else {
                None
            };
            let text = match comparison {
                Some(cmp) => {
                    let row = Row::new(&name, fp.num_qubits(), &cmp);
                    let mut t = report::render_rows(&[row], *format, &head)?;
                    if *format == Format::Table {
                        t.push('\n');
                        t.push_str(&report::per_qubit_table(&fp, &cmp));
                    }
                    t
                }
                None => {
                    let r = cost::analyze(&fp, &cm, model, denom);
                    report::render_single(&Single::new(&name, &r, &cm), &fp, &r, *format, &head)?
                }
            };
            write_out(None, &text, out)
        }
        Command::Bench { cost: c, format, seed, sizes } => {
            let (cm, model, denom) = (c.cost_model(), c.model.into(), c.avg_denominator.into());
            let specs = bench_suite(sizes, *seed);
            let rows: Vec<Result<Row>> = std::thread::scope(|s| {
                let handles: Vec<_> = specs
                    .iter()
                    .map(|ws| {
                        s.spawn(move || {
                            let fp = bench::generate(ws)?;
                            Ok(Row::new(&ws.label(), fp.num_qubits(), &compare(&fp, &cm, model, denom)))
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("workload thread panicked")).collect()
            });
            let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
            write_out(None, &report::render_rows(&rows, *format, &report::header(model, &cm, denom))?, out)
        }
        Command::Verify { a, b, tol } => {
            let (pa, pb) = (load(a)?, load(b)?);
            let f = oracle::fidelity(&pa, &pb).map_err(|e| anyhow!("{}", e))?;
            if f >= 1.0 - tol {
                writeln!(out, "equivalent (fidelity {:.12})", f)?;
                Ok(())
            } else {
                Err(NotEquivalent(f).into())
            }
        }
        Command::Gen { kind, n, seed, gap, len, mix, reuse, output } => {
            let ws = WorkloadSpec {
                kind: (*kind).into(),
                n: *n,
                seed: *seed,
                gap: *gap,
                mix: Mix { single: mix[0], two: mix[1], measure: mix[2] },
                len: *len,
                reuse: *reuse,
            };
            let fp = bench::generate(&ws)?;
            write_out(output.as_deref(), &qasm::emit(&fp), out)
        }
    }
}

/// Parse arguments, run, and map the outcome to an exit status: 0 on
/// success, 1 on any processing error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) if e.is::<NotEquivalent>() => {
            let _ = writeln!(lock, "{}", e);
            1
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_to_string(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("qlr").chain(args.iter().copied()))?;
        let mut buf = Vec::new();
        execute(&cli, &mut buf)?;
        Ok(String::from_utf8(buf)?)
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn gen_writes_parseable_qasm() {
        let text = run_to_string(&["gen", "--kind", "iqft", "--n", "4"]).unwrap();
        assert_eq!(qasm::load(&text).unwrap().len(), 10);
    }

    #[test]
    fn measure_cost_must_be_positive() {
        assert!(Cli::try_parse_from(["qlr", "bench", "--measure-cost", "0"]).is_err());
    }

    #[test]
    fn bench_rows_follow_the_suite() {
        let text = run_to_string(&["bench", "--sizes", "4,8"]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "workload,qubits,exec_before,exec_after,longest_before,longest_after,avg_before,avg_after");
        assert!(lines[2].starts_with("fig4a,16,11,8,11,7,"));
        assert_eq!(lines.len(), 1 + 6 + 2 + 1);
    }
}
