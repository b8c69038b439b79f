//! The domo command line: validate models, search for fragment compositions,
//! run scenario-driven simulations, and emit DOT diagrams.
//!
//! Exit codes are a stable contract: 0 success, 1 validation errors, 2
//! usage/parse errors, 3 no plan found, 4 a run ended with failed instances,
//! 5 the tick budget ran out. Machine output (plans, traces, DOT) goes to
//! standard output or the requested file; diagnostics go to standard error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use domo::cond::parse_condition;
use domo::document::parse_model;
use domo::scenario::parse_scenario;
use domo::tracefmt::write_trace;
use domo_core::condition::Condition;
use domo_core::config::{initial_configuration, DomainConfiguration};
use domo_core::diagram::{
    emit_instance_snapshot, emit_process_diagram, emit_property_diagram, emit_system_diagram,
};
use domo_core::engine::{EngineState, RunOutcome, ScenarioScript};
use domo_core::planner::{plan, PlanOptions};
use domo_core::validate::{Severity, ValidatedModel};

#[derive(Parser)]
#[command(name = "domo", version, about = "Adaptive service-composition simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document against the metamodel rules.
    Validate {
        /// Path to the model document.
        model: PathBuf,
    },
    /// Search for a fragment composition reaching a goal.
    Plan {
        model: PathBuf,
        /// Goal condition, e.g. "RoomTemp = Comfort".
        #[arg(long)]
        goal: String,
        /// Configuration overrides applied to the initial configuration,
        /// each as PROPERTY=STATE. Repeatable.
        #[arg(long = "from", value_name = "PROP=STATE")]
        from: Vec<String>,
        /// The domain object requesting the composition; its own fragments
        /// are excluded unless --allow-self is given.
        #[arg(long)]
        requester: String,
        /// Maximum plan length.
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: usize,
        /// Allow the requester to compose its own fragments.
        #[arg(long = "allow-self")]
        allow_self: bool,
    },
    /// Run every domain object's core process under a scenario script.
    Run {
        model: PathBuf,
        /// Scenario script ("TICK PROPERTY EVENT" per line).
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long = "max-ticks", default_value_t = 100)]
        max_ticks: u64,
        /// Write the JSON Lines trace here instead of standard output.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Emit a DOT snapshot of the engine every K ticks.
        #[arg(long = "snapshot-every", value_name = "K")]
        snapshot_every: Option<u64>,
        /// Directory for --snapshot-every output files.
        #[arg(long = "snapshot-dir", default_value = ".")]
        snapshot_dir: PathBuf,
    },
    /// Emit a DOT diagram of the model or of a running snapshot.
    Diagram {
        model: PathBuf,
        /// One of: system, process:OBJECT.NAME, property:NAME, snapshot.
        #[arg(long)]
        kind: String,
        /// Scenario driving a snapshot run.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Tick at which the snapshot is taken.
        #[arg(long = "at-tick", default_value_t = 0)]
        at_tick: u64,
        /// Output file (standard output when omitted).
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_PLAN: u8 = 3;
const EXIT_RUN_FAILED: u8 = 4;
const EXIT_BUDGET: u8 = 5;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { model } => cmd_validate(&model),
        Command::Plan {
            model,
            goal,
            from,
            requester,
            max_len,
            allow_self,
        } => cmd_plan(&model, &goal, &from, &requester, max_len, allow_self),
        Command::Run {
            model,
            scenario,
            max_ticks,
            trace,
            snapshot_every,
            snapshot_dir,
        } => cmd_run(
            &model,
            scenario.as_deref(),
            max_ticks,
            trace.as_deref(),
            snapshot_every,
            &snapshot_dir,
        ),
        Command::Diagram {
            model,
            kind,
            scenario,
            at_tick,
            out,
        } => cmd_diagram(&model, &kind, scenario.as_deref(), at_tick, out.as_deref()),
    };
    ExitCode::from(code)
}

/// Reads, parses, and validates a model document. Prints diagnostics to
/// standard error; returns the exit code on failure.
fn load_model(path: &Path) -> Result<ValidatedModel, u8> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    let model = match parse_model(&text) {
        Ok(model) => model,
        Err(diagnostics) => {
            for d in diagnostics {
                eprintln!("{}: {d}", path.display());
            }
            return Err(EXIT_USAGE);
        }
    };
    let diagnostics = domo_core::validate::validate_model(&model);
    for d in &diagnostics {
        eprintln!("{} {} {} {}", d.code, d.severity, d.location, d.message);
    }
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return Err(EXIT_VALIDATION);
    }
    Ok(ValidatedModel::new(model).expect("no error diagnostics"))
}

fn load_scenario(path: Option<&Path>, model: &ValidatedModel) -> Result<ScenarioScript, u8> {
    let Some(path) = path else {
        return Ok(ScenarioScript::default());
    };
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    let script = match parse_scenario(&text) {
        Ok(script) => script,
        Err(diagnostics) => {
            for d in diagnostics {
                eprintln!("{}: {d}", path.display());
            }
            return Err(EXIT_USAGE);
        }
    };
    // Cross-check names now so a typo is a script error, not a silent no-op.
    for (index, event) in script.events.iter().enumerate() {
        let known = model
            .property(&event.property)
            .map(|p| p.knows_event(&event.event));
        match known {
            None => {
                eprintln!(
                    "{}: entry {index}: unknown property `{}`",
                    path.display(),
                    event.property
                );
                return Err(EXIT_USAGE);
            }
            Some(false) => {
                eprintln!(
                    "{}: entry {index}: property `{}` has no event `{}`",
                    path.display(),
                    event.property,
                    event.event
                );
                return Err(EXIT_USAGE);
            }
            Some(true) => {}
        }
    }
    Ok(script)
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), u8> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => fs::write(path, content).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_USAGE
        }),
    }
}

fn cmd_validate(path: &Path) -> u8 {
    match load_model(path) {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    }
}

/// Checks that every atom of a condition resolves in the model.
fn check_condition_resolves(model: &ValidatedModel, cond: &Condition, what: &str) -> Result<(), u8> {
    for (property, state) in cond.atoms() {
        let Some(def) = model.property(property) else {
            eprintln!("error: {what} references unknown property `{property}`");
            return Err(EXIT_USAGE);
        };
        if !def.states.iter().any(|s| s == state) {
            eprintln!(
                "error: {what} references state `{state}` undeclared by `{property}`"
            );
            return Err(EXIT_USAGE);
        }
    }
    Ok(())
}

fn cmd_plan(
    path: &Path,
    goal: &str,
    from: &[String],
    requester: &str,
    max_len: usize,
    allow_self: bool,
) -> u8 {
    let model = match load_model(path) {
        Ok(model) => model,
        Err(code) => return code,
    };
    let goal = match parse_condition(goal) {
        Ok(goal) => goal,
        Err(e) => {
            eprintln!("error: invalid goal: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(code) = check_condition_resolves(&model, &goal, "goal") {
        return code;
    }
    if model.object(requester).is_none() {
        eprintln!("error: unknown requester object `{requester}`");
        return EXIT_USAGE;
    }
    if max_len == 0 {
        eprintln!("error: --max-len must be positive");
        return EXIT_USAGE;
    }

    let mut start: DomainConfiguration = initial_configuration(&model);
    for override_spec in from {
        let Some((property, state)) = override_spec.split_once('=') else {
            eprintln!("error: --from expects PROPERTY=STATE, got `{override_spec}`");
            return EXIT_USAGE;
        };
        let (property, state) = (property.trim(), state.trim());
        let Some(def) = model.property(property) else {
            eprintln!("error: --from references unknown property `{property}`");
            return EXIT_USAGE;
        };
        if !def.states.iter().any(|s| s == state) {
            eprintln!("error: `{state}` is not a state of `{property}`");
            return EXIT_USAGE;
        }
        start.set(property.into(), state.into());
    }

    let mut options = PlanOptions::new(requester);
    options.max_plan_length = max_len;
    options.allow_self_fragments = allow_self;
    match plan(&model, &start, &goal, &options) {
        Some(found) => {
            let mut out = String::new();
            for step in &found.steps {
                out.push_str(&step.to_string());
                out.push('\n');
            }
            print!("{out}");
            EXIT_OK
        }
        None => {
            println!("NOPLAN");
            EXIT_NO_PLAN
        }
    }
}

fn cmd_run(
    path: &Path,
    scenario: Option<&Path>,
    max_ticks: u64,
    trace_out: Option<&Path>,
    snapshot_every: Option<u64>,
    snapshot_dir: &Path,
) -> u8 {
    let model = match load_model(path) {
        Ok(model) => model,
        Err(code) => return code,
    };
    let script = match load_scenario(scenario, &model) {
        Ok(script) => script,
        Err(code) => return code,
    };
    let mut engine = match EngineState::start(&model, script) {
        Ok(engine) => engine,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    let outcome = loop {
        if !engine.any_running() {
            break if engine.any_failed() {
                RunOutcome::SomeFailed
            } else {
                RunOutcome::AllCompleted
            };
        }
        if engine.tick() >= max_ticks {
            break RunOutcome::TickBudgetExhausted;
        }
        engine.step().expect("running instance checked");
        if let Some(every) = snapshot_every {
            if every > 0 && engine.tick() % every == 0 {
                let file = snapshot_dir.join(format!("snapshot-{}.dot", engine.tick()));
                if let Err(code) = write_output(Some(&file), &emit_instance_snapshot(&engine)) {
                    return code;
                }
            }
        }
    };

    if let Err(code) = write_output(trace_out, &write_trace(engine.trace())) {
        return code;
    }
    eprintln!("outcome: {}", outcome.as_str());
    eprintln!("config: {}", engine.config());
    match outcome {
        RunOutcome::AllCompleted => EXIT_OK,
        RunOutcome::SomeFailed => EXIT_RUN_FAILED,
        RunOutcome::TickBudgetExhausted => EXIT_BUDGET,
    }
}

fn cmd_diagram(
    path: &Path,
    kind: &str,
    scenario: Option<&Path>,
    at_tick: u64,
    out: Option<&Path>,
) -> u8 {
    let model = match load_model(path) {
        Ok(model) => model,
        Err(code) => return code,
    };

    let dot = if kind == "system" {
        emit_system_diagram(&model)
    } else if let Some(spec) = kind.strip_prefix("process:") {
        let Some((object, process)) = spec.split_once('.') else {
            eprintln!("error: process kind expects OBJECT.NAME, got `{spec}`");
            return EXIT_USAGE;
        };
        let Some(def) = model.object(object) else {
            eprintln!("error: unknown object `{object}`");
            return EXIT_USAGE;
        };
        let found = def
            .core_processes
            .iter()
            .chain(&def.fragments)
            .find(|p| p.name == process);
        let Some(found) = found else {
            eprintln!("error: object `{object}` has no process `{process}`");
            return EXIT_USAGE;
        };
        emit_process_diagram(found)
    } else if let Some(name) = kind.strip_prefix("property:") {
        let Some(property) = model.property(name) else {
            eprintln!("error: unknown property `{name}`");
            return EXIT_USAGE;
        };
        emit_property_diagram(property)
    } else if kind == "snapshot" {
        let script = match load_scenario(scenario, &model) {
            Ok(script) => script,
            Err(code) => return code,
        };
        let mut engine = match EngineState::start(&model, script) {
            Ok(engine) => engine,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        while engine.any_running() && engine.tick() < at_tick {
            engine.step().expect("running instance checked");
        }
        emit_instance_snapshot(&engine)
    } else {
        eprintln!(
            "error: unknown diagram kind `{kind}` (expected system, process:OBJECT.NAME, property:NAME, or snapshot)"
        );
        return EXIT_USAGE;
    };

    match write_output(out, &dot) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}
