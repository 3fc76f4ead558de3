use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dasein::io::{
    arrow_to_json, parse_operator, parse_projection, parse_seed, parse_vector, poset_to_json,
    round12, subobject_to_json, value_to_json,
};
use dasein::{
    build_poset, check_containment, context_from_operator, daseinise_projection, delta_o_proj,
    operator_arrow, pseudo_state, value, Closure, ContextPoset, Error, DEFAULT_TOL,
};

#[derive(Parser)]
#[command(name = "dasein", version, about = "Daseinisation of projections and operators over finite context posets")]
struct Cli {
    /// Numerical tolerance [default: $DASEIN_TOL or 1e-9]
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args, Clone)]
struct PosetArgs {
    /// Context or operator document seeding the poset (repeatable)
    #[arg(long = "context", short = 'c', value_name = "FILE")]
    contexts: Vec<PathBuf>,

    /// Close the poset under coarsening
    #[arg(long)]
    close_coarsening: bool,

    /// Close the poset under pairwise intersection
    #[arg(long)]
    close_intersection: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a context poset and list its contexts and inclusions
    Contexts {
        /// Context or operator documents
        #[arg(required = true)]
        seeds: Vec<PathBuf>,
        #[arg(long)]
        close_coarsening: bool,
        #[arg(long)]
        close_intersection: bool,
    },
    /// Outer approximation of a projection at every context of a poset
    DasProj {
        projection: PathBuf,
        #[command(flatten)]
        poset: PosetArgs,
    },
    /// The arrow of an operator over a poset (defaults to the operator's own context)
    DasOp {
        operator: PathBuf,
        #[command(flatten)]
        poset: PosetArgs,
    },
    /// Value of an operator in the pseudo-state of a vector, with the containment check
    Value {
        operator: PathBuf,
        vector: PathBuf,
        #[command(flatten)]
        poset: PosetArgs,
    },
    /// Run the randomized property suites
    Props {
        /// Hilbert space dimensions
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3])]
        dims: Vec<usize>,
        /// Trials per suite and dimension
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Walk through the spin-1 example
    Spin1Demo,
}

enum Failure {
    Input(String),
    Suite,
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalInvariantViolation(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: dasein::Result<T>) -> CliResult<T> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn tolerance(cli: &Cli) -> CliResult<f64> {
    let tol = match cli.tol {
        Some(t) => t,
        None => match std::env::var("DASEIN_TOL") {
            Ok(s) => s
                .parse()
                .map_err(|_| Failure::Input(format!("DASEIN_TOL: not a number: {s}")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn load_poset(
    paths: &[PathBuf],
    closure: Closure,
    tol: f64,
    fallback: Option<dasein::Context>,
) -> CliResult<ContextPoset> {
    let mut seeds = Vec::new();
    for p in paths {
        seeds.push(in_file(p, parse_seed(&read(p)?, tol))?);
    }
    if seeds.is_empty() {
        match fallback {
            Some(v) => seeds.push(v),
            None => return Err(Failure::Input("no contexts given (use --context FILE)".into())),
        }
    }
    Ok(build_poset(&seeds, closure)?)
}

fn closure(coarsening: bool, intersection: bool) -> Closure {
    Closure {
        coarsening,
        intersection,
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn fmt_num(x: f64) -> String {
    format!("{}", round12(x))
}

fn cmd_contexts(cli: &Cli, seeds: &[PathBuf], c: Closure, tol: f64) -> CliResult<()> {
    let poset = load_poset(seeds, c, tol, None)?;
    if cli.format == Format::Json {
        print_json(&poset_to_json(&poset));
        return Ok(());
    }
    println!("{} contexts, {} arrows", poset.len(), poset.arrows().len());
    for v in poset.contexts() {
        println!("{v}");
    }
    for (sub, sup) in poset.arrows() {
        println!("{} <= {}", poset.context(sub).id(), poset.context(sup).id());
    }
    Ok(())
}

fn cmd_das_proj(cli: &Cli, file: &Path, args: &PosetArgs, tol: f64) -> CliResult<()> {
    let p = in_file(file, parse_projection(&read(file)?, tol))?;
    let poset = load_poset(
        &args.contexts,
        closure(args.close_coarsening, args.close_intersection),
        tol,
        None,
    )?;
    if p.dim() != poset.dim() {
        return Err(Error::DimensionMismatch {
            expected: poset.dim(),
            found: p.dim(),
        }
        .into());
    }
    let s = daseinise_projection(&p, &poset);
    if cli.format == Format::Json {
        let rows: Vec<Value> = poset
            .contexts()
            .iter()
            .zip(s.components())
            .map(|(v, comp)| {
                json!({
                    "context": v.id().to_string(),
                    "atoms": v.k(),
                    "rank": delta_o_proj(&p, v).rank(),
                    "points": comp.iter().collect::<Vec<_>>(),
                })
            })
            .collect();
        print_json(&json!({ "rows": rows, "subobject": subobject_to_json(&s, &poset) }));
        return Ok(());
    }
    println!("{:<18} {:>5} {:>5}  points", "context", "atoms", "rank");
    for (v, comp) in poset.contexts().iter().zip(s.components()) {
        let points: Vec<String> = comp.iter().map(ToString::to_string).collect();
        println!(
            "{:<18} {:>5} {:>5}  {{{}}}",
            v.id().to_string(),
            v.k(),
            delta_o_proj(&p, v).rank(),
            points.join(", ")
        );
    }
    Ok(())
}

fn cmd_das_op(cli: &Cli, file: &Path, args: &PosetArgs, tol: f64) -> CliResult<()> {
    let a = in_file(file, parse_operator(&read(file)?, tol))?;
    let own = in_file(file, context_from_operator(&a, tol)).ok();
    let poset = load_poset(
        &args.contexts,
        closure(args.close_coarsening, args.close_intersection),
        tol,
        own,
    )?;
    let arrow = operator_arrow(&a, &poset)?;
    if !arrow.naturality_violations(&poset).is_empty() {
        return Err(Failure::Internal("operator arrow is not natural".into()));
    }
    if cli.format == Format::Json {
        print_json(&arrow_to_json(&arrow, &poset));
        return Ok(());
    }
    for (v, comp) in arrow.components().iter().enumerate() {
        println!("{}", poset.context(v).id());
        for (lambda, pair) in comp.iter().enumerate() {
            for (id, (mu, nu)) in pair.mu.iter().map(|(id, &m)| (id, (m, pair.nu[id]))) {
                println!("  point {lambda}  at {id}: [{}, {}]", fmt_num(mu), fmt_num(nu));
            }
        }
    }
    Ok(())
}

fn cmd_value(cli: &Cli, afile: &Path, vfile: &Path, args: &PosetArgs, tol: f64) -> CliResult<()> {
    let a = in_file(afile, parse_operator(&read(afile)?, tol))?;
    let psi = in_file(vfile, parse_vector(&read(vfile)?, tol))?;
    let own = in_file(afile, context_from_operator(&a, tol)).ok();
    let poset = load_poset(
        &args.contexts,
        closure(args.close_coarsening, args.close_intersection),
        tol,
        own,
    )?;
    let w = pseudo_state(&psi, &poset)?;
    let val = value(&operator_arrow(&a, &poset)?, &w)?;
    let report = check_containment(&psi, &a, &poset)?;
    if cli.format == Format::Json {
        print_json(&json!({
            "pseudo_state": subobject_to_json(&w, &poset),
            "value": value_to_json(&val, &poset),
            "containment": report,
        }));
        return Ok(());
    }
    println!("expectation {}", fmt_num(report.expectation));
    println!("{:<18} {:>5}  {:<18} {:>16} {:>16}  pass", "context", "point", "subcontext", "mu", "nu");
    for row in &report.rows {
        for i in &row.intervals {
            println!(
                "{:<18} {:>5}  {:<18} {:>16} {:>16}  {}",
                row.context.to_string(),
                row.point,
                i.context.to_string(),
                fmt_num(i.mu),
                fmt_num(i.nu),
                if i.contains { "yes" } else { "no" }
            );
        }
    }
    println!("{} interval(s) miss the expectation value", report.violations());
    Ok(())
}

fn cmd_props(cli: &Cli, dims: &[usize], trials: usize) -> CliResult<()> {
    if let Some(&n) = dims.iter().find(|&&n| n < 2) {
        return Err(Failure::Input(format!("dimension {n} has no non-trivial contexts")));
    }
    let summary = dasein::suite::run_all(dims, trials, cli.seed)?;
    if cli.format == Format::Json {
        print_json(&serde_json::to_value(&summary).expect("summary serializes"));
    } else {
        println!("seed {}, {} trials per suite", summary.seed, summary.trials);
        for r in &summary.results {
            println!(
                "{:<26} C^{}  {:>5} passed {:>5} failed",
                r.name, r.dim, r.passed, r.failed
            );
            for w in &r.witnesses {
                println!("    {w}");
            }
        }
    }
    if summary.all_passed() { Ok(()) } else { Err(Failure::Suite) }
}

fn cmd_spin1_demo(cli: &Cli) -> CliResult<()> {
    let doc = dasein::spin1::demo()?;
    if cli.format == Format::Json {
        print_json(&doc);
        return Ok(());
    }
    println!("S_z spectral family");
    for row in doc["spectral_family"].as_array().into_iter().flatten() {
        println!("  r >= {:<16} rank {}", row["threshold"], row["rank"]);
    }
    println!("outer approximations of P = P2");
    for row in doc["outer_approximations"].as_array().into_iter().flatten() {
        println!(
            "  case {:<3} {:<22} {:<8} rank {}  {}",
            row["case"].as_str().unwrap_or(""),
            row["context"].as_str().unwrap_or(""),
            row["expected"].as_str().unwrap_or(""),
            row["rank"],
            if row["matches"] == true { "ok" } else { "MISMATCH" }
        );
    }
    let names: std::collections::BTreeMap<String, String> = doc["context_names"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|v| (v["id"].as_str().unwrap_or("").to_owned(), v["name"].as_str().unwrap_or("").to_owned()))
        .collect();
    let name = |id: &str| names.get(id).cloned().unwrap_or_else(|| id.to_owned());
    println!("value of S_z in the pseudo-state of e2");
    if let Some(val) = doc["value"].as_object() {
        for (id, points) in val {
            for (lambda, pair) in points.as_object().into_iter().flatten() {
                for (sub, mu) in pair["mu"].as_object().into_iter().flatten() {
                    println!(
                        "  {:<5} point {}  at {:<5} [{}, {}]",
                        name(id),
                        lambda,
                        name(sub),
                        mu,
                        pair["nu"][sub]
                    );
                }
            }
        }
    }
    println!(
        "expectation {}, {} violation(s)",
        doc["expectation"], doc["violations"]
    );
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let tol = tolerance(cli)?;
    match &cli.command {
        Command::Contexts {
            seeds,
            close_coarsening,
            close_intersection,
        } => cmd_contexts(cli, seeds, closure(*close_coarsening, *close_intersection), tol),
        Command::DasProj { projection, poset } => cmd_das_proj(cli, projection, poset, tol),
        Command::DasOp { operator, poset } => cmd_das_op(cli, operator, poset, tol),
        Command::Value {
            operator,
            vector,
            poset,
        } => cmd_value(cli, operator, vector, poset, tol),
        Command::Props { dims, trials } => cmd_props(cli, dims, *trials),
        Command::Spin1Demo => cmd_spin1_demo(cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Suite) => {
            eprintln!("property suite failed");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
