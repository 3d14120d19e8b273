//! `laxkit`: behavioural distances, certificates, axiom checks and modal
//! logic for finite coalgebras.
//!
//! Exit codes: 0 on success, 1 when a verdict is negative (a certificate
//! fails, an axiom has a counterexample), 2 on usage or input errors.

mod load;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use laxkit::distance::{behavioural_distance, check_certificate, DistanceOptions};
use laxkit::lifting::{check_axioms, modalities_for, AxiomConfig};
use laxkit::logic::{logical_distance, print, Evaluator, Synthesizer};
use laxkit::{Coalgebra, FunctorSpec, Lifting, Scalar};

use load::Input;
use report::Output;

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "laxkit",
    version,
    about = "Behavioural distances via fuzzy lax extensions"
)]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "LAXKIT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Behavioural distance between two systems by fixpoint iteration.
    Dist(DistArgs),
    /// Check a candidate (bi)simulation certificate.
    CheckCert(CertArgs),
    /// Randomized check of the lax-extension axioms for a lifting.
    Axioms(AxiomArgs),
    /// Evaluate formulas and compute logical distances.
    Logic {
        #[command(subcommand)]
        command: LogicCommand,
    },
    /// Synthesize a distinguishing formula for a target state.
    Synth(SynthArgs),
    /// List the named modalities available for a functor.
    Catalog(CatalogArgs),
}

#[derive(Args, Debug)]
struct Pair {
    /// System files: give two for a distance between systems, one for the
    /// distance of a system to itself.
    #[arg(long = "system", required = true, num_args = 1)]
    systems: Vec<PathBuf>,

    /// Lifting file; its functor must match the systems.
    #[arg(long)]
    lifting: PathBuf,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[command(flatten)]
    pair: Pair,

    /// Stop once the step size is at most this (`p/q` or decimal).
    #[arg(long)]
    tol: Option<String>,

    /// Iteration cap when the chain does not stabilize.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,

    /// Include every iterate d_1, d_2, … in the report.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct CertArgs {
    #[command(flatten)]
    pair: Pair,

    /// Candidate relation: `kind` plus a fuzzy relation.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args, Debug)]
struct AxiomArgs {
    /// Lifting file to check.
    #[arg(long)]
    lifting: PathBuf,

    /// Functor file, or a system file whose functor is used. Needed when the
    /// lifting has `const` or grid nodes.
    #[arg(long)]
    functor: Option<PathBuf>,

    /// Number of random trials per property.
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// Largest carrier drawn for a trial.
    #[arg(long, default_value_t = 5)]
    max_carrier: usize,
}

#[derive(Subcommand, Debug)]
enum LogicCommand {
    /// Evaluate a formula at a state.
    Eval {
        /// Formula in text syntax, or JSON (`.json`).
        #[arg(long)]
        formula: PathBuf,
        /// System the formula is evaluated on.
        #[arg(long)]
        system: PathBuf,
        /// State id in the system.
        #[arg(long)]
        state: String,
        /// Lifting interpreting Moss (`Delta`) nodes.
        #[arg(long)]
        lifting: Option<PathBuf>,
    },
    /// Rank-n logical distance with a witness formula per target state.
    Distance {
        #[command(flatten)]
        pair: Pair,
        /// Formula rank (modal depth).
        #[arg(long)]
        rank: usize,
    },
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    pair: Pair,

    /// Target state; with two systems it is looked up in the second.
    #[arg(long)]
    target: String,

    /// Formula rank (modal depth).
    #[arg(long)]
    rank: usize,

    /// Also write the bare formula JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    /// Functor file, or a system file whose functor is used.
    #[arg(long)]
    functor: PathBuf,
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

fn run(cli: &Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    let mut inputs = Vec::new();
    let (name, out) = match &cli.command {
        Command::Dist(args) => ("dist", dist(args, &mut inputs)?),
        Command::CheckCert(args) => ("check-cert", check_cert(args, &mut inputs)?),
        Command::Axioms(args) => ("axioms", axioms(args, cli.seed, &mut inputs)?),
        Command::Logic {
            command:
                LogicCommand::Eval {
                    formula,
                    system,
                    state,
                    lifting,
                },
        } => (
            "logic eval",
            logic_eval(formula, system, state, lifting.as_deref(), &mut inputs)?,
        ),
        Command::Logic {
            command: LogicCommand::Distance { pair, rank },
        } => ("logic distance", logic_distance(pair, *rank, &mut inputs)?),
        Command::Synth(args) => ("synth", synth(args, &mut inputs)?),
        Command::Catalog(args) => ("catalog", catalog(args, &mut inputs)?),
    };
    let text = match cli.format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&report::envelope(name, cli.seed, &inputs, &out))?;
            s.push('\n');
            s
        }
        Format::Table => format!("{}{}", report::header(name, cli.seed, &inputs), out.table),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(out.ok)
}

fn read(path: &Path, inputs: &mut Vec<Input>) -> Result<Input> {
    let input = load::read(path)?;
    inputs.push(input.clone());
    Ok(input)
}

/// Loads one or two systems and binds the lifting to their functor.
fn load_pair(pair: &Pair, inputs: &mut Vec<Input>) -> Result<(Coalgebra, Coalgebra, Lifting)> {
    let (a, b) = match pair.systems.as_slice() {
        [a] => {
            let a = load::system(&read(a, inputs)?)?;
            (a.clone(), a)
        }
        [a, b] => (
            load::system(&read(a, inputs)?)?,
            load::system(&read(b, inputs)?)?,
        ),
        _ => bail!("give one or two --system files"),
    };
    if a.functor() != b.functor() {
        bail!(
            "systems are over different functors: {} and {}",
            a.functor(),
            b.functor()
        );
    }
    let l = load::lifting(&read(&pair.lifting, inputs)?, a.functor())?;
    Ok((a, b, l))
}

fn dist(args: &DistArgs, inputs: &mut Vec<Input>) -> Result<Output> {
    let (a, b, l) = load_pair(&args.pair, inputs)?;
    let tol = args
        .tol
        .as_deref()
        .map(Scalar::parse)
        .transpose()
        .context("bad --tol")?;
    let opts = DistanceOptions {
        tol,
        max_iter: args.max_iter,
        trace: args.trace,
    };
    let res = behavioural_distance(&l, &a, &b, &opts)?;
    let mut table = report::matrix(&res.matrix);
    table.push_str(&format!(
        "iterations {}  residual {}  converged {}  exact {}",
        res.iterations, res.residual, res.converged, res.exact
    ));
    if let Some(bound) = &res.error_bound {
        table.push_str(&format!("  error bound {bound}"));
    }
    table.push('\n');
    for (n, d) in res.trace.iter().enumerate() {
        table.push_str(&format!("\nd_{}\n{}", n + 1, report::matrix(d)));
    }
    Ok(Output {
        body: serde_json::to_value(&res)?,
        table,
        ok: true,
    })
}

fn check_cert(args: &CertArgs, inputs: &mut Vec<Input>) -> Result<Output> {
    let (a, b, l) = load_pair(&args.pair, inputs)?;
    let cert = load::certificate(&read(&args.cert, inputs)?)?;
    let rep = check_certificate(&l, &a, &b, &cert)?;
    let mut rows = vec![["a", "b", "direction", "R", "LR", "slack", ""]
        .map(String::from)
        .to_vec()];
    for p in &rep.pairs {
        let status = if !p.ok() {
            "VIOLATED"
        } else if p.tight() {
            "tight"
        } else {
            "ok"
        };
        rows.push(vec![
            p.a.clone(),
            p.b.clone(),
            serde_json::to_value(p.direction)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            p.bound.to_string(),
            p.lifted.to_string(),
            laxkit::fuzzy::format_rational(&p.slack),
            status.to_string(),
        ]);
    }
    let mut table = report::columns(&rows);
    table.push_str(if rep.ok {
        "verdict: ok\n"
    } else {
        "verdict: violated\n"
    });
    Ok(Output {
        body: serde_json::to_value(&rep)?,
        table,
        ok: rep.ok,
    })
}

fn functor_from(path: &Path, inputs: &mut Vec<Input>) -> Result<Arc<FunctorSpec>> {
    Ok(Arc::new(load::functor(&read(path, inputs)?)?))
}

fn axioms(args: &AxiomArgs, seed: u64, inputs: &mut Vec<Input>) -> Result<Output> {
    let lifting_input = read(&args.lifting, inputs)?;
    let spec = load::lifting_spec(&lifting_input)?;
    let functor = match &args.functor {
        Some(path) => functor_from(path, inputs)?,
        None => Arc::new(spec.infer_functor().context(
            "the lifting does not determine its functor (const or grid nodes); pass --functor",
        )?),
    };
    let l = Lifting::bind(spec, functor)?;
    let cfg = AxiomConfig {
        trials: args.trials,
        max_carrier: args.max_carrier,
        seed,
        ..AxiomConfig::default()
    };
    let rep = check_axioms(&l, &cfg)?;
    let mut rows = vec![["property", "checked", "failures", "status"]
        .map(String::from)
        .to_vec()];
    for p in &rep.properties {
        rows.push(vec![
            p.property.name().to_string(),
            p.checked.to_string(),
            p.failures.to_string(),
            if p.passed() { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    let mut table = format!("lifting {}  functor {}\n", rep.lifting, rep.functor);
    table.push_str(&report::columns(&rows));
    for p in rep.properties.iter().filter(|p| !p.passed()) {
        if let Some(c) = &p.counterexample {
            table.push_str(&format!(
                "\n{} counterexample:\n{}\n",
                p.property.name(),
                serde_json::to_string_pretty(c)?
            ));
        }
    }
    Ok(Output {
        body: serde_json::to_value(&rep)?,
        table,
        ok: rep.all_passed(),
    })
}

fn logic_eval(
    formula: &Path,
    system: &Path,
    state: &str,
    lifting: Option<&Path>,
    inputs: &mut Vec<Input>,
) -> Result<Output> {
    let phi = load::formula(&read(formula, inputs)?)?;
    let sys = load::system(&read(system, inputs)?)?;
    let x = load::state(&sys, state, system)?;
    let l = lifting
        .map(|p| -> Result<Lifting> { load::lifting(&read(p, inputs)?, sys.functor()) })
        .transpose()?;
    let mut ev = match &l {
        Some(l) => Evaluator::with_lifting(&sys, l),
        None => Evaluator::new(&sys),
    };
    let value = ev.eval(&phi, x)?;
    Ok(Output {
        body: json!({"state": state, "rank": phi.rank(), "value": value}),
        table: format!("[[{}]]({state}) = {value}\n", print(&phi)),
        ok: true,
    })
}

fn logic_distance(pair: &Pair, rank: usize, inputs: &mut Vec<Input>) -> Result<Output> {
    let (a, b, l) = load_pair(pair, inputs)?;
    let ld = logical_distance(&l, &a, &b, rank)?;
    let witnesses: Value = b
        .carrier()
        .elements()
        .iter()
        .zip(&ld.witnesses)
        .map(|(id, phi)| (id.clone(), phi.to_json()))
        .collect::<serde_json::Map<_, _>>()
        .into();
    let mut table = report::matrix(&ld.matrix);
    for (id, phi) in b.carrier().elements().iter().zip(&ld.witnesses) {
        table.push_str(&format!("\nwitness for {id}:\n  {}\n", print(phi)));
    }
    Ok(Output {
        body: json!({"rank": rank, "matrix": ld.matrix, "witnesses": witnesses}),
        table,
        ok: true,
    })
}

fn synth(args: &SynthArgs, inputs: &mut Vec<Input>) -> Result<Output> {
    let (a, b, l) = load_pair(&args.pair, inputs)?;
    let target = load::state(
        &b,
        &args.target,
        args.pair.systems.last().expect("clap requires a system"),
    )?;
    let (system, target) = if args.pair.systems.len() == 2 {
        let u = a.disjoint_union(&b)?;
        let t = u.right[target];
        (u.system, t)
    } else {
        (b, target)
    };
    let phi = Synthesizer::new(&l, &system).formula(target, args.rank)?;
    let mut ev = Evaluator::with_lifting(&system, &l);
    let table_values = ev.table(&phi)?;
    let at_target = table_values[target].clone();
    let gaps: Value = system
        .carrier()
        .elements()
        .iter()
        .zip(table_values.iter())
        .map(|(id, v)| (id.clone(), json!(v.ominus(&at_target))))
        .collect::<serde_json::Map<_, _>>()
        .into();
    if let Some(out) = &args.out {
        let mut s = serde_json::to_string_pretty(&phi.to_json())?;
        s.push('\n');
        std::fs::write(out, s).with_context(|| format!("cannot write {}", out.display()))?;
    }
    let mut table = format!("{}\n\ngap to {} per state:\n", print(&phi), args.target);
    for (id, v) in system.carrier().elements().iter().zip(table_values.iter()) {
        table.push_str(&format!("  {id}  {}\n", v.ominus(&at_target)));
    }
    Ok(Output {
        body: json!({
            "target": args.target,
            "rank": args.rank,
            "formula": phi.to_json(),
            "gaps": gaps,
        }),
        table,
        ok: true,
    })
}

fn catalog(args: &CatalogArgs, inputs: &mut Vec<Input>) -> Result<Output> {
    let functor = functor_from(&args.functor, inputs)?;
    let mods = modalities_for(&functor);
    let body: Vec<Value> = mods
        .iter()
        .map(|m| {
            json!({
                "name": m.name(),
                "arity": m.arity(),
                "dual": m.dual_name(),
                "monotone": m.is_monotone(),
                "nonexpansive": m.is_nonexpansive(),
            })
        })
        .collect();
    let mut rows = vec![["name", "arity", "dual"].map(String::from).to_vec()];
    rows.extend(
        mods.iter()
            .map(|m| vec![m.name().to_string(), m.arity().to_string(), m.dual_name()]),
    );
    Ok(Output {
        body: json!({"functor": functor.to_string(), "modalities": body}),
        table: report::columns(&rows),
        ok: true,
    })
}
