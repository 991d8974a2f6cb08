mod config;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::config::{apply_override, parse_scenario, Issue};
use crate::run::RunError;

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

/// Electron wave packets in quantized light: closed-form curves, pulse
/// quantization and a brute-force oracle.
///
/// Precedence: the built-in preset (used when no --config is given) or the
/// config file, then every --set override in order. Thread count comes from
/// QFIELD_THREADS (default: available parallelism).
#[derive(Parser, Debug)]
#[command(version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(short, long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in scenario: fig1a, fig1b, fig2, fig3a, fig3b, oracle, classical.
    #[arg(short, long)]
    preset: Option<String>,

    /// Override a key, e.g. --set gamma=0.003 --set electron.p0=0.2.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory (default: out/<kind>).
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// Also write one SVG plot per CSV.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squeezed minus coherent variance for one mode.
    SingleMode(RunArgs),
    /// Variance for zero-mean fields: squeezed vacuum, Fock and thermal states.
    ZeroMean(RunArgs),
    /// Squeezed minus coherent variance for a quantized pulse.
    Multimode(RunArgs),
    /// Closed forms against the truncated-Fock propagator.
    OracleCompare(RunArgs),
    /// Classical trajectory in a given waveform.
    Classical(RunArgs),
    /// Check a scenario file and print it normalized to atomic units.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

const PRESETS: [(&str, &str); 7] = [
    ("fig1a", include_str!("../presets/fig1a.json")),
    ("fig1b", include_str!("../presets/fig1b.json")),
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3a", include_str!("../presets/fig3a.json")),
    ("fig3b", include_str!("../presets/fig3b.json")),
    ("oracle", include_str!("../presets/oracle.json")),
    ("classical", include_str!("../presets/classical.json")),
];

fn default_preset(kind: &str) -> &'static str {
    match kind {
        "single_mode" => "fig1a",
        "zero_mean" => "fig2",
        "multimode" => "fig3a",
        "oracle_compare" => "oracle",
        _ => "classical",
    }
}

enum Failure {
    Io(String),
    Config(Vec<Issue>),
    Validation(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Io(m) => {
                eprintln!("error: {m}");
                ExitCode::from(EXIT_IO)
            }
            Failure::Config(issues) => {
                eprintln!("config error ({} issue{}):", issues.len(), if issues.len() == 1 { "" } else { "s" });
                for i in issues {
                    eprintln!("  {i}");
                }
                ExitCode::from(EXIT_CONFIG)
            }
            Failure::Validation(m) => {
                eprintln!("validation failed: {m}");
                ExitCode::from(EXIT_VALIDATION)
            }
        }
    }
}

fn single_issue(path: &str, message: String) -> Failure {
    Failure::Config(vec![Issue {
        path: path.into(),
        message,
    }])
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| single_issue(&path.display().to_string(), format!("invalid JSON: {e}")))
}

fn preset(name: &str) -> Result<Value, Failure> {
    let (_, text) = PRESETS.iter().find(|p| p.0 == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
        single_issue("--preset", format!("unknown preset \"{name}\"; available: {}", names.join(", ")))
    })?;
    Ok(serde_json::from_str(text).expect("presets are valid JSON"))
}

fn apply_overrides(doc: &mut Value, overrides: &[String]) -> Result<(), Failure> {
    let issues: Vec<Issue> = overrides.iter().filter_map(|o| apply_override(doc, o).err()).collect();
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Failure::Config(issues))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QFIELD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| single_issue("QFIELD_THREADS", format!("expected a positive integer, got \"{raw}\"")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(e.to_string()))
}

fn execute(kind: &str, args: &RunArgs) -> Result<(), Failure> {
    configure_threads()?;
    let mut doc = match (&args.config, &args.preset) {
        (Some(path), _) => read_json(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => preset(default_preset(kind))?,
    };
    if let Some(map) = doc.as_object_mut() {
        map.entry("kind").or_insert_with(|| Value::String(kind.into()));
    }
    apply_overrides(&mut doc, &args.overrides)?;
    if doc.get("kind").and_then(Value::as_str) != Some(kind) {
        return Err(single_issue(
            "kind",
            format!("this subcommand runs \"{kind}\" scenarios, the document has {}", doc.get("kind").unwrap_or(&Value::Null)),
        ));
    }
    let scenario = parse_scenario(&doc).map_err(Failure::Config)?;
    let normalized = serde_json::to_value(&scenario).expect("scenario serializes");
    let out = run::run(&scenario).map_err(|e| match e {
        RunError::Config(issues) => Failure::Config(issues),
        RunError::Numerical(m) => Failure::Validation(m),
    })?;
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("out").join(scenario.kind()));
    let checks = output::write_all(&dir, &normalized, &out, args.svg)
        .map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "ok" } else { "FAILED" }, c.name, c.detail);
    }
    println!("wrote {} curve(s) to {}", out.curves.len(), dir.display());
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(failed.join(", ")))
    }
}

fn validate(path: &Path, overrides: &[String]) -> Result<(), Failure> {
    let mut doc = read_json(path)?;
    apply_overrides(&mut doc, overrides)?;
    let scenario = parse_scenario(&doc).map_err(Failure::Config)?;
    println!("{}", serde_json::to_string_pretty(&scenario).expect("scenario serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SingleMode(a) => execute("single_mode", a),
        Command::ZeroMean(a) => execute("zero_mean", a),
        Command::Multimode(a) => execute("multimode", a),
        Command::OracleCompare(a) => execute("oracle_compare", a),
        Command::Classical(a) => execute("classical", a),
        Command::Validate { config, overrides } => validate(config, overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for (name, text) in PRESETS {
            let doc: Value = serde_json::from_str(text).unwrap();
            if let Err(e) = parse_scenario(&doc) {
                panic!("{name}: {e:?}");
            }
        }
    }

    #[test]
    fn every_kind_has_a_default() {
        for kind in config::KINDS {
            let doc = preset(default_preset(kind)).ok().unwrap();
            assert_eq!(doc["kind"], Value::String(kind.into()));
        }
    }
}
