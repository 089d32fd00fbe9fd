use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use idprune::expression::{metrics, render, Format};
use idprune::graph::{parse_graph, Smg, VarSet};
use idprune::identify::{IdentifyResult, LatentOrder, Query, Registry, StrategyConfig};
use idprune::oracle::{max_deviation, sample_scm};
use idprune::separation::d_separated;

const TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "idprune",
    version,
    about = "Identify causal effects in semi-Markovian graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identify P_x(y) and print the resulting expression.
    Identify(IdentifyArgs),
    /// Test whether X and Y are d-separated given Z.
    Dsep(DsepArgs),
}

#[derive(Args)]
struct IdentifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Intervened variables, comma separated.
    #[arg(long = "do", value_delimiter = ',')]
    intervene: Vec<String>,
    /// Outcome variables, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    effect: Vec<String>,
    #[arg(long, default_value = "pid")]
    algorithm: String,
    /// Visiting order of the latent-projection step.
    #[arg(long, value_enum, default_value_t = OrderArg::ReverseTopological)]
    order: OrderArg,
    /// Explicit visiting order for the latent-projection step; overrides --order.
    #[arg(long, value_delimiter = ',')]
    order_list: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[arg(long)]
    metrics: bool,
    #[arg(long)]
    trace: bool,
    /// Check the expression against a random model.
    #[arg(long)]
    evaluate: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    card: usize,
}

#[derive(Args)]
struct DsepArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    given: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Topological,
    ReverseTopological,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Latex,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Identify(args) => identify(args),
        Command::Dsep(args) => dsep(args),
    }
}

fn load(path: &PathBuf) -> Result<Smg> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_graph(&text).with_context(|| format!("parsing {}", path.display()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.graph.into_smg()?)
}

fn to_set(names: &[String]) -> VarSet {
    names.iter().filter(|s| !s.is_empty()).cloned().collect()
}

fn identify(args: IdentifyArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let y = to_set(&args.effect);
    let x = to_set(&args.intervene);
    let query = Query::new(g, y.clone(), x.clone())?;

    let latent_order = match (&args.order_list, args.order) {
        (Some(list), _) => LatentOrder::Explicit(list.clone()),
        (None, OrderArg::Topological) => LatentOrder::Topological,
        (None, OrderArg::ReverseTopological) => LatentOrder::ReverseTopological,
    };
    let registry = Registry::standard();
    let Some(strategy) = registry.create(&args.algorithm, &StrategyConfig { latent_order }) else {
        let known: Vec<&str> = registry.names().collect();
        bail!(
            "unknown algorithm `{}` (expected one of: {})",
            args.algorithm,
            known.join(", ")
        );
    };
    let result = strategy.identify(&query)?;

    let verification = match (&result.expression(), args.evaluate) {
        (Some(e), true) => {
            let model = sample_scm(query.graph(), args.seed, args.card);
            Some(max_deviation(e, &model, &y, &x)?)
        }
        _ => None,
    };

    match args.format {
        FormatArg::Json => print_json(&result, verification)?,
        FormatArg::Text | FormatArg::Latex => {
            let format = if matches!(args.format, FormatArg::Text) {
                Format::Text
            } else {
                Format::Latex
            };
            print_plain(&result, format, &args, verification)?;
        }
    }

    if let Some(diff) = verification {
        if diff > TOLERANCE {
            eprintln!("error: expression deviates from ground truth by {diff:e}");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(if result.is_identified() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn print_json(result: &IdentifyResult, verification: Option<f64>) -> Result<()> {
    let mut value = result.to_json();
    if let Some(diff) = verification {
        value["verification"] = serde_json::json!({ "max_diff": diff, "tolerance": TOLERANCE });
    }
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn print_plain(
    result: &IdentifyResult,
    format: Format,
    args: &IdentifyArgs,
    verification: Option<f64>,
) -> Result<()> {
    if args.trace {
        for step in &result.trace {
            println!("{step}");
        }
    }
    match result.expression() {
        Some(e) => {
            println!("{}", render(e, format));
            if args.metrics {
                let m = metrics(e);
                println!(
                    "metrics: sums={} quotients={} atoms={} variables={}",
                    m.sum_nodes, m.quotient_nodes, m.atom_nodes, m.distinct_variables
                );
            }
        }
        None => {
            println!("FAIL");
            let hedge = result.hedge().expect("failed result carries a hedge");
            println!("{}", serde_json::to_string_pretty(hedge)?);
        }
    }
    if let Some(diff) = verification {
        let relation = if diff <= TOLERANCE { "<=" } else { ">" };
        println!("verified: max-diff={diff:.3e} {relation} {TOLERANCE:e}");
    }
    Ok(())
}

fn dsep(args: DsepArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let separated = d_separated(&g, &to_set(&args.x), &to_set(&args.y), &to_set(&args.given))?;
    println!("{separated}");
    Ok(ExitCode::SUCCESS)
}
