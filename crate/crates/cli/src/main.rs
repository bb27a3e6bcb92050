use backhaul_lab::presets::{self, PRESETS};
use backhaul_lab::run::{run, write_csv};
use backhaul_lab::scenario::{Engine, Scenario};
use backhaul_lab::validate::{load_absorption, validate};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const THREADS_VAR: &str = "BACKHAUL_LAB_THREADS";

const VALIDATION: u8 = 2;
const RUNTIME: u8 = 3;

/// Outage sweeps of hybrid THz/FSO backhaul networks.
#[derive(Parser)]
#[command(
    name = "backhaul-lab",
    version,
    after_help = "Worker count: set BACKHAUL_LAB_THREADS."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analytic engines (closed, asymptotic)
    Eval(RunArgs),
    /// Run the Monte Carlo engine
    Simulate(RunArgs),
    /// Run every engine the scenario lists
    Sweep(RunArgs),
    /// Check a scenario without running it
    Validate(ValidateArgs),
    /// Shipped scenarios
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print a preset's scenario file
    Show {
        name: String,
    },
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario file, or `preset:NAME`
    #[arg(long)]
    scenario: String,
    /// Print the fully resolved scenario and exit without running
    #[arg(long)]
    dump_resolved: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: ScenarioArg,
    /// CSV destination; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated subset of closed, asymptotic, mc
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<Engine>>,
    /// Monte Carlo samples per point
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: ScenarioArg,
}

/// A message for stderr and the exit status that goes with it.
struct Failure(u8, String);

fn fail<T>(code: u8, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(code, message.into()))
}

struct Loaded {
    label: String,
    text: String,
    base: PathBuf,
    scenario: Scenario,
}

fn load(source: &str) -> Result<Loaded, Failure> {
    let (label, text, base) = match source.strip_prefix("preset:") {
        Some(name) => match presets::find(name) {
            Some(p) => (source.to_string(), p.text.to_string(), PathBuf::from(".")),
            None => {
                let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
                return fail(
                    VALIDATION,
                    format!("unknown preset `{name}` (available: {})", names.join(", ")),
                );
            }
        },
        None => {
            let path = Path::new(source);
            let text =
                std::fs::read_to_string(path).or_else(|e| fail(VALIDATION, format!("{source}: cannot read: {e}")))?;
            let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            (source.to_string(), text, base)
        }
    };
    let scenario =
        Scenario::parse(&text).or_else(|e| fail(VALIDATION, format!("{label}:{}: {}", e.line, e.message)))?;
    Ok(Loaded {
        label,
        text,
        base,
        scenario,
    })
}

fn check(l: &Loaded) -> Result<(), Failure> {
    let diags = validate(&l.scenario, &l.text, &l.base);
    if diags.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = diags
        .iter()
        .map(|d| match d.line {
            Some(n) => format!("{}:{n}: {}: {}", l.label, d.field, d.message),
            None => format!("{}: {}: {}", l.label, d.field, d.message),
        })
        .collect();
    fail(VALIDATION, lines.join("\n"))
}

fn dump(s: &Scenario) -> Result<(), Failure> {
    io::stdout()
        .write_all(s.to_toml().as_bytes())
        .or_else(|e| fail(RUNTIME, format!("cannot write: {e}")))
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Eval,
    Simulate,
    Sweep,
}

fn engines_for(kind: Kind, scenario: &[Engine], requested: Option<Vec<Engine>>) -> Result<Vec<Engine>, Failure> {
    match (kind, requested) {
        (Kind::Eval, Some(r)) if r.contains(&Engine::Mc) => fail(
            VALIDATION,
            "eval runs analytic engines only; use simulate or sweep for mc",
        ),
        (Kind::Simulate, Some(r)) if r.iter().any(|e| e.is_analytic()) => {
            fail(VALIDATION, "simulate runs engine mc only; use eval or sweep")
        }
        (_, Some(r)) => Ok(r),
        (Kind::Eval, None) => {
            let analytic: Vec<_> = scenario.iter().copied().filter(|e| e.is_analytic()).collect();
            Ok(if analytic.is_empty() {
                vec![Engine::Closed]
            } else {
                analytic
            })
        }
        (Kind::Simulate, None) => Ok(vec![Engine::Mc]),
        (Kind::Sweep, None) => Ok(scenario.to_vec()),
    }
}

fn execute(kind: Kind, args: RunArgs) -> Result<(), Failure> {
    let mut l = load(&args.input.scenario)?;
    l.scenario.engines = engines_for(kind, &l.scenario.engines, args.engines)?;
    if let Some(n) = args.samples {
        l.scenario.mc.samples = n;
    }
    check(&l)?;
    if args.input.dump_resolved {
        return dump(&l.scenario);
    }
    let absorption = load_absorption(&l.scenario, &l.base).or_else(|e| fail(VALIDATION, e))?;
    let report = run(&l.scenario, &absorption, args.seed);
    let written = match &args.out {
        Some(p) => File::create(p)
            .map_err(csv::Error::from)
            .and_then(|f| write_csv(BufWriter::new(f), &report.rows)),
        None => write_csv(io::stdout().lock(), &report.rows),
    };
    if let Err(e) = written {
        return fail(RUNTIME, format!("cannot write results: {e}"));
    }
    if report.failures.is_empty() {
        Ok(())
    } else {
        fail(RUNTIME, report.failures.join("\n"))
    }
}

fn validate_only(args: ValidateArgs) -> Result<(), Failure> {
    let l = load(&args.input.scenario)?;
    check(&l)?;
    if args.input.dump_resolved {
        return dump(&l.scenario);
    }
    let s = &l.scenario;
    let points = s.sweep.as_ref().map_or(0, |w| w.points);
    eprintln!("{}: ok, {points} point(s) × {} engine(s)", l.label, s.engines.len());
    Ok(())
}

fn presets_cmd(action: PresetAction) -> Result<(), Failure> {
    match action {
        PresetAction::List => {
            let width = PRESETS.iter().map(|p| p.name.len()).max().unwrap_or(0);
            for p in PRESETS {
                println!("{:width$}  {}", p.name, p.summary());
            }
            Ok(())
        }
        PresetAction::Show { name } => match presets::find(&name) {
            Some(p) => {
                print!("{}", p.text);
                Ok(())
            }
            None => fail(VALIDATION, format!("unknown preset `{name}`")),
        },
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return fail(
                VALIDATION,
                format!("{THREADS_VAR} must be a positive integer, got `{raw}`"),
            )
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .or_else(|e| fail(RUNTIME, format!("cannot start {n} workers: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Eval(a) => execute(Kind::Eval, a),
        Command::Simulate(a) => execute(Kind::Simulate, a),
        Command::Sweep(a) => execute(Kind::Sweep, a),
        Command::Validate(a) => validate_only(a),
        Command::Presets { action } => presets_cmd(action),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}
