//! `ckw`: entanglement measures and monogamy checks for few-qubit states.

mod builtins;
mod report;

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ckw_core::convex_roof::{self, RoofConfig};
use ckw_core::monogamy::{self, BatchStats, Tolerances, VerifyMode};
use ckw_core::tangle2::{self, eof_from_tangle};
use ckw_core::{three_tangle, DensityMatrix, PureState, StateFile};

use builtins::Builtin;
use report::{fmt_num, Table};

const DEFAULT_SEED: u64 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(
    name = "ckw",
    version,
    about = "Tangles, three-tangle and monogamy checks for few-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report every tangle and entanglement of formation of a state.
    Compute {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Check a monogamy property over a batch of random states.
    Verify {
        /// pure3_ckw, perm_invariance, formula_equiv or nqubit
        #[arg(long)]
        mode: String,
        #[arg(short = 'n', long = "samples", value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Qubit count for the nqubit mode.
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        /// Override the violation threshold of the chosen mode.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Upper-bound the minimal average tau_A(BC) of a three-qubit state.
    Roof {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        restarts: Option<usize>,
        /// Objective evaluations per restart.
        #[arg(long)]
        max_evals: Option<usize>,
        /// Decomposition size (default: rank squared).
        #[arg(long)]
        components: Option<usize>,
        /// Initial step length.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare sum_j tau_1j with tau_1(2..n) on a generalized W state.
    Nqubit {
        /// Number of qubits; inferred from --alphas when omitted.
        #[arg(long, required_unless_present = "alphas")]
        qubits: Option<usize>,
        /// Comma-separated coefficients (`x` or `re:im`), rescaled to unit norm.
        #[arg(long, conflicts_with = "uniform")]
        alphas: Option<String>,
        /// Equal coefficients 1/sqrt(n).
        #[arg(long)]
        uniform: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Named state: ghz, w, singlet, eof-example, ghz-mixture, eq15:A,B,C
    #[arg(long)]
    builtin: Option<String>,
    /// JSON state file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

enum Loaded {
    Pure(PureState),
    Density(DensityMatrix),
}

impl Loaded {
    fn density(&self) -> DensityMatrix {
        match self {
            Loaded::Pure(psi) => DensityMatrix::from_pure(psi),
            Loaded::Density(rho) => rho.clone(),
        }
    }

    fn n(&self) -> usize {
        match self {
            Loaded::Pure(psi) => psi.n(),
            Loaded::Density(rho) => rho.n(),
        }
    }
}

fn load(source: &Source) -> anyhow::Result<Loaded> {
    if let Some(name) = &source.builtin {
        return Ok(match builtins::lookup(name)? {
            Builtin::Pure(psi) => Loaded::Pure(psi),
            Builtin::Density(rho) => Loaded::Density(rho),
        });
    }
    let path = source.input.as_ref().context("no state given")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = StateFile::from_json(&text)?;
    Ok(match file {
        StateFile::Pure { .. } => Loaded::Pure(file.to_pure()?),
        StateFile::Density { .. } => Loaded::Density(file.to_density()?),
    })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(table: &Table, output: &Output) -> anyhow::Result<()> {
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json()?,
    };
    emit(output.out.as_deref(), &text)
}

fn compute_table(state: &Loaded) -> anyhow::Result<Table> {
    let mut t = Table::default();
    match (state, state.n()) {
        (Loaded::Pure(psi), 3) => {
            let a = monogamy::ckw_check(psi, 0)?;
            let b = monogamy::ckw_check(psi, 1)?;
            let c = monogamy::ckw_check(psi, 2)?;
            t.push("tau_AB", a.tau_ab);
            t.push("tau_AC", a.tau_ac);
            t.push("tau_BC", b.tau_ab);
            t.push("tau_A(BC)", a.tau_a_bc);
            t.push("tau_B(CA)", b.tau_a_bc);
            t.push("tau_C(AB)", c.tau_a_bc);
            t.push("tau_ABC", three_tangle::three_tangle(psi)?);
            t.push("slack_A", a.slack);
            t.push("E_AB", eof_from_tangle(a.tau_ab)?);
            t.push("E_AC", eof_from_tangle(a.tau_ac)?);
            t.push("E_A(BC)", eof_from_tangle(a.tau_a_bc)?);
        }
        (_, 3) => {
            let rho = state.density();
            for (name, pair) in [("AB", [0, 1]), ("AC", [0, 2]), ("BC", [1, 2])] {
                let tau = tangle2::tangle_mixed(&rho.partial_trace(&pair)?)?;
                t.push(format!("tau_{name}"), tau);
                t.push(format!("E_{name}"), eof_from_tangle(tau)?);
            }
        }
        (_, 2) => {
            let rho = state.density();
            let lam = tangle2::lambda_spectrum(&rho)?;
            for (i, l) in lam.lambdas.iter().enumerate() {
                t.push(format!("lambda_{}", i + 1), *l);
            }
            t.push("concurrence_AB", lam.concurrence());
            t.push("tau_AB", lam.tangle());
            t.push("E_AB", eof_from_tangle(lam.tangle())?);
            if let Loaded::Pure(psi) = state {
                t.push("tau_A(B)", tangle2::tangle_pure_bipartite(psi, &[0])?);
            }
        }
        (_, n) => bail!("compute handles 2- or 3-qubit states, got {n} qubits"),
    }
    Ok(t)
}

fn csv_row(s: &BatchStats) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        s.mode,
        s.n_samples,
        s.seed,
        fmt_num(s.min_slack),
        fmt_num(s.max_gap),
        fmt_num(s.mean_slack),
        s.violations
    )
}

fn append_row(path: &Path, row: &str) -> anyhow::Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{}", BatchStats::CSV_HEADER)?;
    }
    f.write_all(row.as_bytes())?;
    Ok(())
}

fn violation_path(out: Option<&Path>, mode: VerifyMode, seed: u64, index: u64) -> PathBuf {
    match out {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".violation.json");
            PathBuf::from(s)
        }
        None => PathBuf::from(format!("ckw-violation-{}-{seed}-{index}.json", mode.name())),
    }
}

fn parse_alphas(text: &str) -> anyhow::Result<Vec<Complex64>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let (re, im) = item.split_once(':').unwrap_or((item, "0"));
            Ok(Complex64::new(
                re.parse().with_context(|| format!("bad coefficient `{item}`"))?,
                im.parse().with_context(|| format!("bad coefficient `{item}`"))?,
            ))
        })
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Compute { source, output } => {
            let state = load(&source)?;
            emit_table(&compute_table(&state)?, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            mode,
            samples,
            seed,
            qubits,
            tol,
            output,
        } => {
            let mode = VerifyMode::parse(&mode, qubits)?;
            let mut tolerances = Tolerances::default();
            if let Some(t) = tol {
                tolerances = tolerances.with_override(mode, t);
            }
            let stats = monogamy::batch_verify(samples, seed, mode, &tolerances)?;
            let row = csv_row(&stats);
            match output.format {
                Format::Csv => print!("{}\n{row}", BatchStats::CSV_HEADER),
                Format::Json => print!("{}", report::to_json_string(&stats)?),
            }
            if let Some(path) = &output.out {
                append_row(path, &row)?;
            }
            if let Some(index) = stats.first_violation {
                let psi = monogamy::sample_state(mode, seed, index)?;
                let path = violation_path(output.out.as_deref(), mode, seed, index);
                fs::write(&path, StateFile::from_pure(&psi).to_json() + "\n")?;
                eprintln!(
                    "{} violation(s); first at sample {index}, state written to {}",
                    stats.violations,
                    path.display()
                );
                return Ok(ExitCode::from(EXIT_VIOLATION));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Roof {
            source,
            seed,
            restarts,
            max_evals,
            components,
            step,
            out,
        } => {
            let rho = load(&source)?.density();
            let defaults = RoofConfig::default();
            let cfg = RoofConfig {
                components,
                restarts: restarts.unwrap_or(defaults.restarts),
                max_evals: max_evals.unwrap_or(defaults.max_evals),
                initial_step: step.unwrap_or(defaults.initial_step),
                seed,
                ..defaults
            };
            let rep = convex_roof::mixed_monogamy_check(&rho, &cfg)?;
            let doc = serde_json::json!({
                "bound": "upper_bound",
                "upper_bound": rep.roof.upper_bound,
                "components": rep.roof.best,
                "components_cap": rep.roof.components_cap,
                "restarts_used": rep.roof.restarts_used,
                "evaluations": rep.roof.evaluations,
                "tau_ab": rep.tau_ab,
                "tau_ac": rep.tau_ac,
                "margin": rep.margin,
                "failed": rep.failed,
            });
            emit(out.as_deref(), &report::to_json_string(&doc)?)?;
            if rep.failed {
                eprintln!(
                    "monogamy margin {} below -{}",
                    fmt_num(rep.margin),
                    convex_roof::MARGIN_TOLERANCE
                );
                return Ok(ExitCode::from(EXIT_VIOLATION));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Nqubit {
            qubits,
            alphas,
            uniform,
            seed,
            tol,
            output,
        } => {
            let mut coeffs = match (alphas, qubits) {
                (Some(text), _) => parse_alphas(&text)?,
                (None, Some(n)) if uniform => vec![Complex64::new(1.0, 0.0); n],
                (None, Some(n)) => ckw_core::rng::complex_gaussian_vec(&mut ckw_core::rng::stream(seed, 0), n),
                (None, None) => unreachable!("clap requires --qubits without --alphas"),
            };
            if let Some(n) = qubits {
                if coeffs.len() != n {
                    bail!("{} coefficients for {n} qubits", coeffs.len());
                }
            }
            let norm = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                bail!("coefficients are all zero");
            }
            coeffs.iter_mut().for_each(|a| *a /= norm);
            let rep = monogamy::nqubit_equality_check(&coeffs)?;
            let mut t = Table::default();
            t.push("lhs", rep.lhs);
            t.push("rhs", rep.rhs);
            t.push("gap", rep.gap);
            emit_table(&t, &output)?;
            Ok(if rep.gap.abs() > tol {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("CKW_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    configure_threads();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
