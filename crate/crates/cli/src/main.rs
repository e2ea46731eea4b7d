mod curve_io;
mod plot;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sfd_core::cpacked::{decide_apx_cpacked_with, nonempty_cells_sweep, simplify};
use sfd_core::decider_apx::{decide_apx_with, ApxOptions, ApxVerdict};
use sfd_core::decider_exact::{decide_exact_with, shortcut_distance, ExactOptions, Tunnel};
use sfd_core::hardness::{
    build_instance, check_instance_invariants, HardnessOverrides, KTableSumInstance,
};
use sfd_core::scalar::default_eta;
use sfd_core::Curve2d;

use curve_io::{read_curve, write_curve};

/// Shortcut Fréchet distance: deciders, distance search, hard instances,
/// simplification and free-space plots.
#[derive(Parser, Debug)]
#[command(name = "sfd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the k-shortcut distance is at most delta
    Decide(DecideArgs),
    /// Bisect the k-shortcut distance
    Value(ValueArgs),
    /// Build the curves of a k-Table-SUM instance
    GenHardness(GenArgs),
    /// Render the free-space diagram as SVG
    PlotFsd(PlotArgs),
    /// μ-simplify a curve
    Simplify(SimplifyArgs),
    /// List the cells with nonempty free space
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exact,
    Apx,
    Cpacked,
}

#[derive(Args, Debug)]
struct Pair {
    /// Base curve (the one that may be shortcut)
    #[arg(long)]
    base: PathBuf,
    /// Target curve
    #[arg(long)]
    target: PathBuf,
    /// Predicate tolerance η (defaults to SFD_TOLERANCE or the built-in value)
    #[arg(long)]
    tolerance: Option<f64>,
}

impl Pair {
    fn load(&self) -> Result<(Curve2d, Curve2d)> {
        Ok((read_curve(&self.target)?, read_curve(&self.base)?))
    }

    fn eta(&self) -> Result<f64> {
        match self.tolerance {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                bail!("--tolerance must be positive and finite, got {v}")
            }
            Some(v) => Ok(v),
            None => Ok(default_eta::<f64>()),
        }
    }
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Shortcut budget
    #[arg(short = 'k', default_value_t = 0)]
    k: usize,
    #[arg(long)]
    delta: f64,
    /// Approximation parameter, in (0, 1]
    #[arg(long)]
    eps: Option<f64>,
    /// Include the tunnels of a witness (exact mode)
    #[arg(long)]
    witness: bool,
    #[command(flatten)]
    pair: Pair,
}

#[derive(Args, Debug)]
struct ValueArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(short = 'k', default_value_t = 0)]
    k: usize,
    /// Bisection tolerance
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    pair: Pair,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// k-Table-SUM instance: {"tables": [[...], ...], "sigma": n}
    #[arg(long)]
    instance: PathBuf,
    /// Output directory for target.json, base.json and meta.json
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    eps_gadget: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    delta: f64,
    /// Overlay the reachable set after this many shortcut rounds
    #[arg(long)]
    reach: Option<usize>,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    pair: Pair,
}

#[derive(Args, Debug)]
struct SimplifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    mu: f64,
    /// Write here instead of standard output
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    pair: Pair,
}

#[derive(Serialize)]
struct DecisionReport {
    verdict: &'static str,
    mode: Mode,
    k: usize,
    delta: f64,
    eps: Option<f64>,
    /// Shortcuts used when the corner was reached.
    shortcuts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<Tunnel<f64>>>,
    timings: Timings,
    stats: Value,
}

#[derive(Serialize)]
struct Timings {
    total_ms: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta >= 0.0) {
        bail!("--delta must be finite and non-negative, got {delta}");
    }
    Ok(())
}

fn cmd_decide(a: &DecideArgs) -> Result<bool> {
    check_delta(a.delta)?;
    let (t, b) = a.pair.load()?;
    let eta = a.pair.eta()?;
    let start = Instant::now();
    let eps = || a.eps.context("--eps is required in apx and cpacked modes");
    let (yes, verdict, shortcuts, witness, stats) = match a.mode {
        Mode::Exact => {
            let o = decide_exact_with(
                &t,
                &b,
                a.k,
                a.delta,
                &ExactOptions {
                    eta,
                    witness: a.witness,
                },
            )?;
            let verdict = if o.reachable { "YES" } else { "NO" };
            (
                o.reachable,
                verdict,
                o.shortcuts,
                o.witness.map(|w| w.tunnels),
                serde_json::to_value(o.stats)?,
            )
        }
        Mode::Apx => {
            let o = decide_apx_with(&t, &b, a.k, a.delta, eps()?, &ApxOptions { eta })?;
            let yes = o.verdict == ApxVerdict::AtMost3PlusEpsDelta;
            (
                yes,
                if yes { "AT_MOST" } else { "GREATER" },
                o.shortcuts,
                None,
                serde_json::to_value(o.stats)?,
            )
        }
        Mode::Cpacked => {
            let o = decide_apx_cpacked_with(&t, &b, a.k, a.delta, eps()?, &ApxOptions { eta })?;
            let yes = o.inner.verdict == ApxVerdict::AtMost3PlusEpsDelta;
            let mut stats = serde_json::to_value(o.inner.stats)?;
            stats["cells"] = json!(o.cells);
            stats["target_vertices"] = json!(o.target_vertices);
            stats["base_vertices"] = json!(o.base_vertices);
            (
                yes,
                if yes { "AT_MOST" } else { "GREATER" },
                o.inner.shortcuts,
                None,
                stats,
            )
        }
    };
    let report = DecisionReport {
        verdict,
        mode: a.mode,
        k: a.k,
        delta: a.delta,
        eps: a.eps.filter(|_| a.mode != Mode::Exact),
        shortcuts,
        witness,
        timings: Timings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        stats,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(yes)
}

fn cmd_value(a: &ValueArgs) -> Result<()> {
    if a.mode != Mode::Exact {
        bail!("value supports --mode exact only");
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        bail!("--tol must be positive and finite, got {}", a.tol);
    }
    let (t, b) = a.pair.load()?;
    let eta = a.pair.eta()?;
    let value = shortcut_distance(&t, &b, a.k, a.tol, eta)?;
    // The bracket must straddle the answer: yes at the value, no below it.
    let opts = ExactOptions {
        eta,
        witness: false,
    };
    let ends = t.first().dist(b.first()).max(t.last().dist(b.last()));
    let below = value - a.tol;
    if !decide_exact_with(&t, &b, a.k, value, &opts)?.reachable
        || (below > ends && decide_exact_with(&t, &b, a.k, below, &opts)?.reachable)
    {
        bail!("bisection result {value} failed its consistency check");
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({ "value": value, "k": a.k, "tol": a.tol }))?
    );
    Ok(())
}

fn cmd_gen_hardness(a: &GenArgs) -> Result<()> {
    let text = fs::read_to_string(&a.instance)
        .with_context(|| format!("reading {}", a.instance.display()))?;
    let inst: KTableSumInstance = serde_json::from_str(&text).context("parsing the instance")?;
    let overrides = HardnessOverrides {
        eps_gadget: a.eps_gadget,
        gamma: a.gamma,
        beta: a.beta,
    };
    let hi = build_instance(&inst, &overrides)?;
    let report = check_instance_invariants(&hi);
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_curve(&a.out.join("target.json"), &hi.target)?;
    write_curve(&a.out.join("base.json"), &hi.base)?;
    let meta = json!({
        "shortcut_budget": hi.shortcut_budget,
        "threshold": hi.threshold,
        "decision_eta": hi.decision_eta(),
        "target_vertices": hi.target.num_vertices(),
        "base_vertices": hi.base.num_vertices(),
        "tables": hi.tables,
        "params": hi.params,
        "invariants": report,
    });
    let meta_path = a.out.join("meta.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", meta_path.display()))?;
    Ok(())
}

fn cmd_plot(a: &PlotArgs) -> Result<()> {
    check_delta(a.delta)?;
    let (t, b) = a.pair.load()?;
    let svg = plot::render(
        &t,
        &b,
        &plot::PlotOptions {
            delta: a.delta,
            reach: a.reach,
            eta: a.pair.eta()?,
        },
    );
    fs::write(&a.output, svg).with_context(|| format!("writing {}", a.output.display()))
}

fn cmd_simplify(a: &SimplifyArgs) -> Result<()> {
    if !(a.mu.is_finite() && a.mu >= 0.0) {
        bail!("--mu must be finite and non-negative, got {}", a.mu);
    }
    let c = simplify(&read_curve(&a.input)?, a.mu);
    match &a.output {
        Some(p) => write_curve(p, &c),
        None => {
            print!("{}", curve_io::curve_json(&c));
            Ok(())
        }
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    check_delta(a.delta)?;
    let (t, b) = a.pair.load()?;
    let cells = nonempty_cells_sweep(&t, &b, a.delta);
    println!("{}", serde_json::to_string(&cells)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Decide(a) => cmd_decide(a),
        Command::Value(a) => cmd_value(a).map(|_| true),
        Command::GenHardness(a) => cmd_gen_hardness(a).map(|_| true),
        Command::PlotFsd(a) => cmd_plot(a).map(|_| true),
        Command::Simplify(a) => cmd_simplify(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
