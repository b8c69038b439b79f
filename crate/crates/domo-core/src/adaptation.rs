//! Adaptation mechanisms and strategies.
//!
//! A precondition violation fires a trigger; the strategy in force for the
//! instance's domain object tries its mechanisms in order and stops at the
//! first success:
//!
//! - **refinement** composes fragments into a plan for an abstract activity's
//!   goal and pushes it as a new layer (invoked by the engine directly, not
//!   through strategies);
//! - **local adaptation** plans the faulted activity's precondition back into
//!   truth so execution can retry at the same node;
//! - **compensation** rolls executed activities back in reverse order,
//!   planning and immediately executing a fragment composition for each
//!   compensation goal;
//! - **backward adaptation** scans the current layer's executed activities
//!   nearest-first for one that can be compensated back to and re-enabled;
//! - **re-refinement** compensates a whole refinement layer and replaces it
//!   with a fresh plan for the same abstract activity.
//!
//! The shipped default strategy order is local adaptation, then backward
//! adaptation, then re-refinement.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::config::DomainConfiguration;
use crate::engine::{EngineState, ExecutionLogEntry, Layer, LayerKind};
use crate::model::{
    ActivityDef, ActivityKind, ProcessDef, ProcessKind, ProcessNode, ProcessTransition,
    MAX_LAYER_DEPTH,
};
use crate::planner::{plan, simulate_plan, Plan, PlanOptions};
use crate::trace::{TraceRecord, TracedLayerKind};
use crate::validate::ValidatedModel;

/// Name of the synthetic unguarded no-effect activity that joins consecutive
/// fragments inside a compiled plan layer.
pub const LINK_ACTIVITY: &str = "__link";

/// The adaptation mechanisms. `Compensation` exists as a mechanism outcome
/// label but cannot appear in a strategy: it is only invoked by the others or
/// directly through [`compensate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismName {
    LocalAdaptation,
    BackwardAdaptation,
    ReRefinement,
    Compensation,
}

impl MechanismName {
    pub fn as_str(self) -> &'static str {
        match self {
            MechanismName::LocalAdaptation => "local_adaptation",
            MechanismName::BackwardAdaptation => "backward_adaptation",
            MechanismName::ReRefinement => "re_refinement",
            MechanismName::Compensation => "compensation",
        }
    }

    /// Parses a strategy mechanism name. `compensation` is rejected here on
    /// purpose; see [`AdaptationStrategy`].
    pub fn from_strategy_name(name: &str) -> Option<Self> {
        match name {
            "local_adaptation" => Some(MechanismName::LocalAdaptation),
            "backward_adaptation" => Some(MechanismName::BackwardAdaptation),
            "re_refinement" => Some(MechanismName::ReRefinement),
            _ => None,
        }
    }
}

impl fmt::Display for MechanismName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ordered, duplicate-free, non-empty list of mechanisms attempted when a
/// precondition violation fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptationStrategy {
    mechanisms: Vec<MechanismName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyError {
    Empty,
    Duplicate(MechanismName),
    NotAllowed(MechanismName),
}

impl fmt::Display for StrategyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyError::Empty => f.write_str("strategy must list at least one mechanism"),
            StrategyError::Duplicate(m) => write!(f, "strategy lists `{m}` twice"),
            StrategyError::NotAllowed(m) => write!(f, "`{m}` cannot appear in a strategy"),
        }
    }
}

impl AdaptationStrategy {
    pub fn new(mechanisms: Vec<MechanismName>) -> Result<Self, StrategyError> {
        if mechanisms.is_empty() {
            return Err(StrategyError::Empty);
        }
        for (i, m) in mechanisms.iter().enumerate() {
            if *m == MechanismName::Compensation {
                return Err(StrategyError::NotAllowed(*m));
            }
            if mechanisms[..i].contains(m) {
                return Err(StrategyError::Duplicate(*m));
            }
        }
        Ok(AdaptationStrategy { mechanisms })
    }

    pub fn mechanisms(&self) -> &[MechanismName] {
        &self.mechanisms
    }
}

impl Default for AdaptationStrategy {
    /// Local adaptation, then backward adaptation, then re-refinement.
    fn default() -> Self {
        AdaptationStrategy {
            mechanisms: alloc::vec![
                MechanismName::LocalAdaptation,
                MechanismName::BackwardAdaptation,
                MechanismName::ReRefinement,
            ],
        }
    }
}

/// A precondition-violation trigger: the node the instance is stuck at and
/// the activity whose precondition failed (the first-declared outgoing
/// transition's activity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger {
    pub node: String,
    pub activity: ActivityDef,
}

/// What one mechanism attempt did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismOutcome {
    pub mechanism: MechanismName,
    pub success: bool,
    /// Plans the mechanism committed: compensation plans in application
    /// order, then the recovery or refinement plan if any.
    pub plans: Vec<Plan>,
    /// Names of log entries rolled back, in compensation (reverse execution)
    /// order.
    pub compensated: Vec<String>,
}

impl MechanismOutcome {
    fn failure(mechanism: MechanismName) -> Self {
        MechanismOutcome {
            mechanism,
            success: false,
            plans: Vec::new(),
            compensated: Vec::new(),
        }
    }
}

/// Result of [`refine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefineOutcome {
    /// A refinement layer was pushed; executing it will satisfy the goal.
    Refined,
    NoPlan,
    DepthExceeded,
}

/// Compiles a plan into one linear layer process: fresh copies of each
/// fragment's process with node ids prefixed by the step index, and an
/// unguarded no-effect link from each terminal node of step `i` to step
/// `i + 1`'s entry node. An empty plan compiles to a single terminal node.
pub fn compile_plan_layer(model: &ValidatedModel, plan: &Plan) -> ProcessDef {
    let mut nodes: Vec<ProcessNode> = Vec::new();
    let mut transitions: Vec<ProcessTransition> = Vec::new();

    if plan.steps.is_empty() {
        return ProcessDef {
            name: "plan".into(),
            kind: ProcessKind::Fragment,
            nodes: alloc::vec![ProcessNode {
                id: "0".into(),
                initial: true,
            }],
            transitions,
        };
    }

    let fragments: Vec<&ProcessDef> = plan
        .steps
        .iter()
        .map(|step| {
            model
                .fragment(&step.object, &step.fragment)
                .expect("plan steps reference model fragments")
        })
        .collect();

    for (index, fragment) in fragments.iter().enumerate() {
        let prefix = |id: &str| alloc::format!("{index}.{id}");
        for node in &fragment.nodes {
            nodes.push(ProcessNode {
                id: prefix(&node.id),
                // The walk starts at the first fragment's entry; later
                // fragments are entered through links.
                initial: index == 0 && node.initial,
            });
        }
        for transition in &fragment.transitions {
            transitions.push(ProcessTransition {
                from: prefix(&transition.from),
                activity: transition.activity.clone(),
                to: prefix(&transition.to),
            });
        }
        if index + 1 < fragments.len() {
            let next_entry = fragments[index + 1]
                .entry_node()
                .expect("validated fragment has an initial node");
            let link_to = alloc::format!("{}.{next_entry}", index + 1);
            for node in &fragment.nodes {
                if fragment.is_terminal(&node.id) {
                    transitions.push(ProcessTransition {
                        from: prefix(&node.id),
                        activity: ActivityDef::concrete(LINK_ACTIVITY),
                        to: link_to.clone(),
                    });
                }
            }
        }
    }

    ProcessDef {
        name: "plan".into(),
        kind: ProcessKind::Fragment,
        nodes,
        transitions,
    }
}

fn push_layer(
    engine: &mut EngineState,
    index: usize,
    kind: LayerKind,
    plan: &Plan,
) -> Result<u64, ()> {
    if engine.instances[index].layers.len() >= MAX_LAYER_DEPTH {
        return Err(());
    }
    let process = compile_plan_layer(engine.model(), plan);
    let cursor = process
        .entry_node()
        .expect("compiled layer has an entry node")
        .to_string();
    let traced_kind = kind.traced().expect("only plan layers are pushed");
    let origin = match &kind {
        LayerKind::Core => unreachable!("core layers exist only at start"),
        LayerKind::Refinement {
            abstract_activity, ..
        } => abstract_activity.name.clone(),
        LayerKind::Adaptation { mechanism } => mechanism.to_string(),
    };
    let tick = engine.tick();
    let (owner, id) = {
        let instance = &mut engine.instances[index];
        let id = instance.next_layer_id;
        instance.next_layer_id += 1;
        instance.layers.push(Layer {
            id,
            kind,
            process,
            cursor,
        });
        (instance.owner.clone(), id)
    };
    engine.trace.push(TraceRecord::LayerPushed {
        tick,
        instance: owner,
        layer: id,
        layer_kind: traced_kind,
        origin,
        plan: plan.steps.iter().map(|s| s.to_string()).collect(),
    });
    Ok(id)
}

/// Plans a fragment composition for `abstract_activity`'s goal from the
/// current configuration and pushes it as a refinement layer. `resume_to` is
/// the parent node execution continues at once the layer completes.
pub fn refine(
    engine: &mut EngineState,
    index: usize,
    abstract_activity: &ActivityDef,
    resume_to: &str,
) -> RefineOutcome {
    debug_assert_eq!(abstract_activity.kind, ActivityKind::Abstract);
    let goal = abstract_activity
        .goal
        .clone()
        .expect("abstract activity carries a goal");
    let options = PlanOptions::new(engine.instances[index].owner.clone());
    let Some(found) = plan(engine.model(), engine.config(), &goal, &options) else {
        return RefineOutcome::NoPlan;
    };
    let kind = LayerKind::Refinement {
        abstract_activity: Box::new(abstract_activity.clone()),
        resume_to: resume_to.into(),
    };
    match push_layer(engine, index, kind, &found) {
        Ok(_) => RefineOutcome::Refined,
        Err(()) => RefineOutcome::DepthExceeded,
    }
}

/// Plans the faulted activity's precondition back into truth and pushes the
/// plan as an adaptation layer. The cursor stays at the faulted node, so the
/// activity is retried once the layer completes.
pub fn local_adaptation(
    engine: &mut EngineState,
    index: usize,
    _faulted_node: &str,
    faulted_activity: &ActivityDef,
) -> MechanismOutcome {
    let options = PlanOptions::new(engine.instances[index].owner.clone());
    let goal = faulted_activity.precondition.clone();
    let Some(found) = plan(engine.model(), engine.config(), &goal, &options) else {
        return MechanismOutcome::failure(MechanismName::LocalAdaptation);
    };
    let kind = LayerKind::Adaptation {
        mechanism: MechanismName::LocalAdaptation,
    };
    match push_layer(engine, index, kind, &found) {
        Ok(_) => MechanismOutcome {
            mechanism: MechanismName::LocalAdaptation,
            success: true,
            plans: alloc::vec![found],
            compensated: Vec::new(),
        },
        Err(()) => MechanismOutcome::failure(MechanismName::LocalAdaptation),
    }
}

/// One planned rollback step, produced tentatively and applied on commit.
struct CompensationStep {
    log_index: usize,
    activity: String,
    /// `None` for entries without a compensation goal (skipped, but still
    /// rolled back).
    plan: Option<Plan>,
    config_after: DomainConfiguration,
}

/// Plans compensations for `entries` (log indices in reverse execution
/// order) without touching the engine. Returns the steps it could plan, the
/// resulting configuration, and the log index of the first entry whose
/// compensation goal was unplannable, if any.
fn plan_compensation(
    model: &ValidatedModel,
    start: &DomainConfiguration,
    entries: &[(usize, &ExecutionLogEntry)],
    options: &PlanOptions,
) -> (Vec<CompensationStep>, DomainConfiguration, Option<usize>) {
    let mut config = start.clone();
    let mut steps = Vec::new();
    for (log_index, entry) in entries {
        match &entry.compensation_goal {
            None => steps.push(CompensationStep {
                log_index: *log_index,
                activity: entry.activity.clone(),
                plan: None,
                config_after: config.clone(),
            }),
            Some(goal) => {
                let Some(found) = plan(model, &config, goal, options) else {
                    return (steps, config, Some(*log_index));
                };
                config = simulate_plan(model, &found, &config, options)
                    .expect("planned compensation is executable");
                steps.push(CompensationStep {
                    log_index: *log_index,
                    activity: entry.activity.clone(),
                    plan: Some(found),
                    config_after: config.clone(),
                });
            }
        }
    }
    (steps, config, None)
}

/// Applies planned compensation steps: configuration changes, compensation
/// trace records, and removal of the rolled-back entries from the log.
fn commit_compensation(
    engine: &mut EngineState,
    index: usize,
    steps: &[CompensationStep],
) -> (Vec<Plan>, Vec<String>) {
    let tick = engine.tick();
    let owner = engine.instances[index].owner.clone();
    let mut plans = Vec::new();
    let mut compensated = Vec::new();
    for step in steps {
        engine.config = step.config_after.clone();
        compensated.push(step.activity.clone());
        if let Some(plan) = &step.plan {
            engine.trace.push(TraceRecord::Compensation {
                tick,
                instance: owner.clone(),
                activity: step.activity.clone(),
                plan: plan.steps.iter().map(|s| s.to_string()).collect(),
            });
            plans.push(plan.clone());
        }
    }
    let mut removed: Vec<usize> = steps.iter().map(|s| s.log_index).collect();
    removed.sort_unstable();
    for log_index in removed.into_iter().rev() {
        engine.instances[index].execution_log.remove(log_index);
    }
    (plans, compensated)
}

/// Rolls back the given log entries (indices into the instance's execution
/// log, in execution order), most recent first. Entries with a compensation
/// goal get a plan from the current configuration to that goal, executed
/// immediately; entries without one are skipped. Fails at the first
/// unplannable goal, leaving the already-performed compensations in place.
pub fn compensate(engine: &mut EngineState, index: usize, entry_indices: &[usize]) -> MechanismOutcome {
    let options = PlanOptions::new(engine.instances[index].owner.clone());
    let ordered: Vec<(usize, &ExecutionLogEntry)> = entry_indices
        .iter()
        .rev()
        .map(|&i| (i, &engine.instances[index].execution_log[i]))
        .collect();
    let (steps, _, failed) = plan_compensation(engine.model(), engine.config(), &ordered, &options);
    let (plans, compensated) = commit_compensation(engine, index, &steps);
    MechanismOutcome {
        mechanism: MechanismName::Compensation,
        success: failed.is_none(),
        plans,
        compensated,
    }
}

/// Scans the current layer's executed activities from the most recent
/// backwards for a candidate `A` such that (i) everything from the most
/// recent entry down to and including `A` can be compensated and (ii) `A`'s
/// precondition can be planned back into truth afterwards. The first
/// candidate where both succeed is committed: compensations execute, the
/// cursor moves to `A`'s source node, and the recovery plan is pushed as an
/// adaptation layer. Tentative evaluation is pure — a failed scan leaves the
/// engine byte-identical.
pub fn backward_adaptation(
    engine: &mut EngineState,
    index: usize,
    _faulted_node: &str,
) -> MechanismOutcome {
    if engine.instances[index].layers.len() >= MAX_LAYER_DEPTH {
        return MechanismOutcome::failure(MechanismName::BackwardAdaptation);
    }
    let options = PlanOptions::new(engine.instances[index].owner.clone());
    let layer_id = engine.instances[index]
        .top_layer()
        .expect("running instance has layers")
        .id;
    let entries: Vec<usize> = engine.instances[index]
        .execution_log
        .iter()
        .enumerate()
        .filter(|(_, e)| e.layer == layer_id)
        .map(|(i, _)| i)
        .collect();
    if entries.is_empty() {
        return MechanismOutcome::failure(MechanismName::BackwardAdaptation);
    }

    for candidate_pos in (0..entries.len()).rev() {
        let rollback: Vec<(usize, &ExecutionLogEntry)> = entries[candidate_pos..]
            .iter()
            .rev()
            .map(|&i| (i, &engine.instances[index].execution_log[i]))
            .collect();
        let (steps, post_config, failed) =
            plan_compensation(engine.model(), engine.config(), &rollback, &options);
        if failed.is_some() {
            continue;
        }
        let target = &engine.instances[index].execution_log[entries[candidate_pos]];
        let target_node = target.from_node.clone();
        let Some(recovery) = plan(engine.model(), &post_config, &target.precondition, &options)
        else {
            continue;
        };

        // Commit: compensations, cursor to the candidate's source node, then
        // the recovery plan as an adaptation layer.
        let (mut plans, compensated) = commit_compensation(engine, index, &steps);
        engine.instances[index]
            .layers
            .last_mut()
            .expect("running instance has layers")
            .cursor = target_node;
        let kind = LayerKind::Adaptation {
            mechanism: MechanismName::BackwardAdaptation,
        };
        push_layer(engine, index, kind, &recovery)
            .expect("depth headroom checked before scanning");
        plans.push(recovery);
        return MechanismOutcome {
            mechanism: MechanismName::BackwardAdaptation,
            success: true,
            plans,
            compensated,
        };
    }
    MechanismOutcome::failure(MechanismName::BackwardAdaptation)
}

/// Compensates every executed activity of the top refinement layer, then
/// replaces the layer with a fresh plan for its abstract activity. Fails if
/// the top layer is not a refinement, if compensation fails (partial
/// compensations stay in place), or if no new plan exists — in which case the
/// old layer is left standing.
pub fn re_refinement(engine: &mut EngineState, index: usize, _faulted_node: &str) -> MechanismOutcome {
    let (layer_id, abstract_activity, resume_to) = {
        let Some(layer) = engine.instances[index].top_layer() else {
            return MechanismOutcome::failure(MechanismName::ReRefinement);
        };
        match &layer.kind {
            LayerKind::Refinement {
                abstract_activity,
                resume_to,
            } => (layer.id, abstract_activity.clone(), resume_to.clone()),
            _ => return MechanismOutcome::failure(MechanismName::ReRefinement),
        }
    };

    let options = PlanOptions::new(engine.instances[index].owner.clone());
    let entries: Vec<usize> = engine.instances[index]
        .execution_log
        .iter()
        .enumerate()
        .filter(|(_, e)| e.layer == layer_id)
        .map(|(i, _)| i)
        .collect();
    let ordered: Vec<(usize, &ExecutionLogEntry)> = entries
        .iter()
        .rev()
        .map(|&i| (i, &engine.instances[index].execution_log[i]))
        .collect();
    let (steps, post_config, failed) =
        plan_compensation(engine.model(), engine.config(), &ordered, &options);

    // Compensations commit even when the roll-back stops early.
    let (mut plans, compensated) = commit_compensation(engine, index, &steps);
    if failed.is_some() {
        return MechanismOutcome {
            mechanism: MechanismName::ReRefinement,
            success: false,
            plans,
            compensated,
        };
    }

    let goal = abstract_activity
        .goal
        .clone()
        .expect("refinement layers originate from abstract activities");
    let Some(new_plan) = plan(engine.model(), &post_config, &goal, &options) else {
        return MechanismOutcome {
            mechanism: MechanismName::ReRefinement,
            success: false,
            plans,
            compensated,
        };
    };

    // Replace the layer: pop the exhausted refinement, push the new one for
    // the same abstract activity. Stack depth is preserved.
    let tick = engine.tick();
    let owner = engine.instances[index].owner.clone();
    engine.instances[index].layers.pop();
    engine.trace.push(TraceRecord::LayerPopped {
        tick,
        instance: owner,
        layer: layer_id,
        layer_kind: TracedLayerKind::Refinement,
    });
    let kind = LayerKind::Refinement {
        abstract_activity,
        resume_to,
    };
    push_layer(engine, index, kind, &new_plan).expect("pop/push keeps depth unchanged");
    plans.push(new_plan);
    MechanismOutcome {
        mechanism: MechanismName::ReRefinement,
        success: true,
        plans,
        compensated,
    }
}

/// Runs the strategy for the instance's domain object: mechanisms in order,
/// each attempt traced, stopping at the first success. The returned outcome
/// is the successful one, or the last failure if every mechanism failed (the
/// engine then fails the instance).
pub fn apply_strategy(engine: &mut EngineState, index: usize, trigger: &Trigger) -> MechanismOutcome {
    let strategy = engine
        .model()
        .strategy_for(&engine.instances[index].owner)
        .clone();
    let mut last = MechanismOutcome::failure(*strategy.mechanisms().last().expect("non-empty"));
    for mechanism in strategy.mechanisms() {
        let outcome = match mechanism {
            MechanismName::LocalAdaptation => {
                local_adaptation(engine, index, &trigger.node, &trigger.activity)
            }
            MechanismName::BackwardAdaptation => backward_adaptation(engine, index, &trigger.node),
            MechanismName::ReRefinement => re_refinement(engine, index, &trigger.node),
            MechanismName::Compensation => {
                unreachable!("strategy construction rejects bare compensation")
            }
        };
        engine.trace.push(TraceRecord::MechanismAttempt {
            tick: engine.tick(),
            instance: engine.instances[index].owner.clone(),
            mechanism: *mechanism,
            success: outcome.success,
        });
        if outcome.success {
            return outcome;
        }
        last = outcome;
    }
    last
}
