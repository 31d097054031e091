use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use ricci_core::curvature::Metric;
use ricci_core::integrate::{integrate_flow, sig9};
use ricci_core::report::{is_claim_id, run_claims, CLAIM_GROUPS};
use ricci_core::rootfind::{annotate_matches, find_fixed_points, FixedPointRecord, SearchOptions};
use ricci_core::spaces::{catalog_listing, SpaceSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_REPRODUCTION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ricci",
    version,
    about = "Normalized Ricci flow on homogeneous spaces and its Einstein metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the supported spaces with dimensions and structure constants.
    List(OutputArgs),
    /// Find the Einstein metrics (fixed points at infinity) of a space.
    Einstein(EinsteinArgs),
    /// Integrate the normalized Ricci flow from an initial metric.
    Flow(FlowArgs),
    /// Recompute published values and report pass/fail per claim.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SpaceArg {
    /// Space, e.g. gws7, gws1:k=2,l=3,m=4, v2:n=5, stiefel:k2=4,k3=2, flag:f4.
    #[arg(value_name = "SPACE", required_unless_present = "space")]
    positional: Option<String>,
    #[arg(long, conflicts_with = "positional")]
    space: Option<String>,
}

impl SpaceArg {
    fn parse(&self) -> ricci_core::Result<SpaceSpec> {
        self.space
            .as_deref()
            .or(self.positional.as_deref())
            .unwrap_or_default()
            .parse()
    }
}

#[derive(Args)]
struct EinsteinArgs {
    #[command(flatten)]
    space: SpaceArg,
    /// Search box for the chart coordinates, as LOWER,UPPER.
    #[arg(long = "box", value_parser = parse_box)]
    search_box: Option<(f64, f64)>,
    /// Seeds per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Acceptance tolerance on the backward error.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    space: SpaceArg,
    /// Initial metric, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// Final time; negative values run the flow backwards.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Run every claim group.
    #[arg(long, conflicts_with = "claim", required_unless_present = "claim")]
    all: bool,
    /// Claim group or Stiefel list id (repeatable).
    #[arg(long)]
    claim: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{:?}: {}", p, e)))
        .collect()
}

fn parse_box(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err("expected LOWER,UPPER".into()),
    }
}

enum Failure {
    Usage(String),
    Domain(ricci_core::Error),
    Reproduction,
    Io(std::io::Error),
}

impl From<ricci_core::Error> for Failure {
    fn from(e: ricci_core::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Round every float in `v` to 9 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            if let Some(r) = sig9(x).parse().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable output");
    round_numbers(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_list(values: &[f64]) -> String {
    values.iter().map(|v| sig9(*v)).collect::<Vec<_>>().join(";")
}

fn cmd_list(args: &OutputArgs) -> Result<(), Failure> {
    let rows = catalog_listing();
    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("name,space,q,dims,constants,example\n");
            for r in &rows {
                let consts: Vec<String> = r.constants.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
                s.push_str(&format!(
                    "{},\"{}\",{},{},{},\"{}\"\n",
                    r.name,
                    r.space,
                    r.q,
                    r.dims.join(";"),
                    consts.join(";"),
                    r.example
                ));
            }
            s
        }
    };
    emit(args, &text)
}

fn einstein_csv(records: &[FixedPointRecord]) -> String {
    let mut s = String::from(
        "space,z,metric,residual,einstein_residual,einstein_constant,hyperbolic,multiplicity_hint,matched\n",
    );
    for r in records {
        s.push_str(&format!(
            "\"{}\",{},{},{},{},{},{},{},{}\n",
            r.space,
            csv_list(&r.z),
            csv_list(&r.metric),
            sig9(r.residual),
            sig9(r.einstein_residual),
            sig9(r.einstein_constant),
            r.hyperbolic,
            r.multiplicity_hint,
            r.matched_reference.as_deref().map(csv_list).unwrap_or_default()
        ));
    }
    s
}

fn cmd_einstein(args: &EinsteinArgs) -> Result<(), Failure> {
    let spec = args.space.parse()?;
    let mut opts = SearchOptions::default();
    if let Some((lo, hi)) = args.search_box {
        opts.lower = lo;
        opts.upper = hi;
    }
    if let Some(g) = args.grid {
        opts.grid_density = g;
    }
    if let Some(t) = args.tol {
        opts.tol = t;
    }
    let mut records = find_fixed_points(&spec, &opts)?;
    annotate_matches(&spec, &mut records);
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&records),
        Format::Csv => einstein_csv(&records),
    };
    emit(&args.output, &text)
}

fn cmd_flow(args: &FlowArgs) -> Result<(), Failure> {
    let spec = args.space.parse()?;
    let x0 = Metric::new(parse_list(&args.x0).map_err(|e| Failure::Usage(format!("--x0: {}", e)))?)?;
    let tr = integrate_flow(&spec, &x0, args.t, args.rtol, args.rtol)?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&tr),
        Format::Csv => tr.to_csv(),
    };
    emit(&args.output, &text)
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<(), Failure> {
    if let Some(bad) = args.claim.iter().find(|c| !is_claim_id(c)) {
        return Err(Failure::Usage(format!(
            "unknown claim {:?}; expected one of {} or a Stiefel id like v5r7",
            bad,
            CLAIM_GROUPS.join(", ")
        )));
    }
    let requested = if args.all { Vec::new() } else { args.claim.clone() };
    let bundle = run_claims(&requested)?;
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&bundle),
        Format::Csv => {
            let mut s = String::from("id,group,pass,abs_error,rel_error,tolerance\n");
            let opt = |v: Option<f64>| v.map(sig9).unwrap_or_default();
            for c in &bundle.claims {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.id,
                    c.group,
                    c.pass,
                    opt(c.abs_error),
                    opt(c.rel_error),
                    opt(c.tolerance)
                ));
            }
            s
        }
    };
    emit(&args.output, &text)?;
    if bundle.pass {
        Ok(())
    } else {
        Err(Failure::Reproduction)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("RICCI_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("RICCI_THREADS must be a positive integer, got {:?}", v)))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::List(a) => cmd_list(a),
        Command::Einstein(a) => cmd_einstein(a),
        Command::Flow(a) => cmd_flow(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Reproduction) => {
            eprintln!("reproduction failed: at least one claim did not pass");
            ExitCode::from(EXIT_REPRODUCTION)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(EXIT_USAGE)
        }
    }
}
