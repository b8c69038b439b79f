//! Deterministic multi-instance execution.
//!
//! The engine runs one process instance per domain object in a single-threaded
//! round robin: one tick applies the scenario events scheduled for it, then
//! gives every running instance exactly one turn in declaration order. A turn
//! performs one observable action at the instance's top layer — execute a
//! concrete activity, skip or refine an abstract one, pop a layer at a
//! terminal node, or handle a precondition-violation trigger through the
//! adaptation strategy. Determinism is part of the contract: identical model,
//! scenario, and tick budget produce identical traces.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::adaptation::{self, Trigger};
use crate::condition::{eval_condition, Condition};
use crate::config::{apply_event, initial_configuration, DomainConfiguration, EventError, EventOutcome};
use crate::model::{ActivityDef, ActivityKind, Effect, ProcessDef};
use crate::trace::{ExoOutcome, TraceRecord, TracedLayerKind};
use crate::validate::ValidatedModel;

/// Exogenous events scripted against abstract ticks. Entries with equal
/// ticks apply in list order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioScript {
    pub events: Vec<ScenarioEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioEvent {
    pub tick: u64,
    pub property: String,
    pub event: String,
}

/// Why an instance stopped without completing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// Every mechanism of the strategy failed on a trigger.
    AdaptationExhausted,
    /// A concrete activity's effect was disabled — the model promised an
    /// evolution the property cannot make.
    ModelInconsistency,
    /// No plan exists for an abstract activity's goal at execution time.
    RefinementFailed,
    /// The layer stack outgrew [`crate::model::MAX_LAYER_DEPTH`].
    DepthExceeded,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::AdaptationExhausted => "adaptation_exhausted",
            FailureReason::ModelInconsistency => "model_inconsistency",
            FailureReason::RefinementFailed => "refinement_failed",
            FailureReason::DepthExceeded => "depth_exceeded",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceStatus {
    Running,
    Completed,
    Failed(FailureReason),
}

/// What a layer is doing on the stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerKind {
    /// The instance's own core process; always the bottom layer.
    Core,
    /// Executes a plan refining `abstract_activity`. Popping it advances the
    /// parent layer's cursor to `resume_to`, past the abstract activity.
    Refinement {
        abstract_activity: Box<ActivityDef>,
        resume_to: String,
    },
    /// Executes a recovery plan pushed by an adaptation mechanism. Popping it
    /// resumes the parent wherever the mechanism left its cursor.
    Adaptation { mechanism: adaptation::MechanismName },
}

impl LayerKind {
    pub fn traced(&self) -> Option<TracedLayerKind> {
        match self {
            LayerKind::Core => None,
            LayerKind::Refinement { .. } => Some(TracedLayerKind::Refinement),
            LayerKind::Adaptation { .. } => Some(TracedLayerKind::Adaptation),
        }
    }
}

/// One stack layer: an instantiated process (fresh node ids for compiled
/// plans) plus the cursor marking the current node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub id: u64,
    pub kind: LayerKind,
    pub process: ProcessDef,
    pub cursor: String,
}

/// One successfully executed activity, self-contained enough to replay
/// (`after` = `before` folded through `effects`) and to roll back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionLogEntry {
    pub tick: u64,
    pub layer: u64,
    pub activity: String,
    /// The node the activity's transition departed from; backward adaptation
    /// re-positions the cursor here.
    pub from_node: String,
    pub precondition: Condition,
    pub effects: Vec<Effect>,
    pub before: DomainConfiguration,
    pub after: DomainConfiguration,
    pub compensation_goal: Option<Condition>,
}

/// One domain object's running process: the layer stack (core at the bottom,
/// newest refinement or adaptation on top) and the execution log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessInstance {
    pub owner: String,
    pub layers: Vec<Layer>,
    pub status: InstanceStatus,
    pub execution_log: Vec<ExecutionLogEntry>,
    pub(crate) next_layer_id: u64,
}

impl ProcessInstance {
    pub fn is_running(&self) -> bool {
        self.status == InstanceStatus::Running
    }

    pub fn top_layer(&self) -> Option<&Layer> {
        self.layers.last()
    }

    /// Log entries belonging to `layer`, in execution order.
    pub fn layer_log(&self, layer: u64) -> impl Iterator<Item = &ExecutionLogEntry> {
        self.execution_log.iter().filter(move |e| e.layer == layer)
    }
}

/// The engine refused to start because the scenario references names the
/// model does not declare.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartError {
    pub entry: usize,
    pub cause: EventError,
}

impl fmt::Display for StartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scenario entry {}: {}", self.entry, self.cause)
    }
}

/// Errors from stepping or injecting events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// `step` requires at least one running instance.
    NoRunningInstance,
    Event(EventError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::NoRunningInstance => f.write_str("no instance is running"),
            EngineError::Event(e) => e.fmt(f),
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    AllCompleted,
    SomeFailed,
    TickBudgetExhausted,
}

impl RunOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            RunOutcome::AllCompleted => "all_completed",
            RunOutcome::SomeFailed => "some_failed",
            RunOutcome::TickBudgetExhausted => "tick_budget_exhausted",
        }
    }
}

/// Result of an immediate event injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectOutcome {
    Applied,
    Ignored,
}

/// All execution state: the shared configuration, one instance per domain
/// object, the tick counter, the scenario, and the append-only trace. Owned
/// and mutated by one thread at a time.
#[derive(Debug, Clone)]
pub struct EngineState<'m> {
    model: &'m ValidatedModel,
    pub(crate) config: DomainConfiguration,
    pub(crate) instances: Vec<ProcessInstance>,
    tick: u64,
    scenario: ScenarioScript,
    pub(crate) trace: Vec<TraceRecord>,
}

impl<'m> EngineState<'m> {
    /// Builds the initial state: the initial configuration, one core layer
    /// per domain object with the cursor at the first-declared initial node,
    /// tick 0. Fails iff the scenario references unknown properties or
    /// events.
    pub fn start(model: &'m ValidatedModel, scenario: ScenarioScript) -> Result<Self, StartError> {
        for (index, event) in scenario.events.iter().enumerate() {
            let Some(def) = model.property(&event.property) else {
                return Err(StartError {
                    entry: index,
                    cause: EventError::UnknownProperty {
                        property: event.property.clone(),
                    },
                });
            };
            if !def.knows_event(&event.event) {
                return Err(StartError {
                    entry: index,
                    cause: EventError::UnknownEvent {
                        property: event.property.clone(),
                        event: event.event.clone(),
                    },
                });
            }
        }

        let instances = model
            .objects()
            .iter()
            .map(|object| {
                let core = object.core_processes[0].clone();
                let cursor = core
                    .entry_node()
                    .expect("validated process has an initial node")
                    .into();
                ProcessInstance {
                    owner: object.name.clone(),
                    layers: alloc::vec![Layer {
                        id: 0,
                        kind: LayerKind::Core,
                        process: core,
                        cursor,
                    }],
                    status: InstanceStatus::Running,
                    execution_log: Vec::new(),
                    next_layer_id: 1,
                }
            })
            .collect();

        Ok(EngineState {
            model,
            config: initial_configuration(model),
            instances,
            tick: 0,
            scenario,
            trace: Vec::new(),
        })
    }

    pub fn model(&self) -> &'m ValidatedModel {
        self.model
    }

    pub fn config(&self) -> &DomainConfiguration {
        &self.config
    }

    pub fn instances(&self) -> &[ProcessInstance] {
        &self.instances
    }

    pub fn instance(&self, owner: &str) -> Option<&ProcessInstance> {
        self.instances.iter().find(|i| i.owner == owner)
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn any_running(&self) -> bool {
        self.instances.iter().any(ProcessInstance::is_running)
    }

    pub fn any_failed(&self) -> bool {
        self.instances
            .iter()
            .any(|i| matches!(i.status, InstanceStatus::Failed(_)))
    }

    /// Executes one full tick: scenario events first, then one turn per
    /// running instance in declaration order, then the tick counter advances.
    /// Returns the records traced during this tick.
    pub fn step(&mut self) -> Result<Vec<TraceRecord>, EngineError> {
        if !self.any_running() {
            return Err(EngineError::NoRunningInstance);
        }
        let mark = self.trace.len();
        self.trace.push(TraceRecord::TickStart { tick: self.tick });

        let due: Vec<ScenarioEvent> = self
            .scenario
            .events
            .iter()
            .filter(|e| e.tick == self.tick)
            .cloned()
            .collect();
        for event in due {
            // Names were checked at start, so only Applied/NoTransition are
            // possible here.
            let outcome = apply_event(self.model, &self.config, &event.property, &event.event)
                .expect("scenario events validated at start");
            let traced = match outcome {
                EventOutcome::Applied(next) => {
                    self.config = next;
                    ExoOutcome::Applied
                }
                EventOutcome::NoTransition => ExoOutcome::Ignored,
            };
            self.trace.push(TraceRecord::ExoEvent {
                tick: self.tick,
                property: event.property,
                event: event.event,
                outcome: traced,
            });
        }

        for index in 0..self.instances.len() {
            if self.instances[index].is_running() {
                self.take_turn(index);
            }
        }

        self.tick += 1;
        Ok(self.trace[mark..].to_vec())
    }

    /// Repeats `step` until no instance is running or the budget is spent.
    pub fn run(&mut self, max_ticks: u64) -> RunOutcome {
        loop {
            if !self.any_running() {
                return if self.any_failed() {
                    RunOutcome::SomeFailed
                } else {
                    RunOutcome::AllCompleted
                };
            }
            if self.tick >= max_ticks {
                return RunOutcome::TickBudgetExhausted;
            }
            self.step().expect("running instance checked above");
        }
    }

    /// Applies one event to the current configuration immediately — the
    /// programmatic counterpart of a scenario entry. Ignored (and traced as
    /// such) iff the property has no transition for the event right now.
    pub fn inject_event(
        &mut self,
        property: &str,
        event: &str,
    ) -> Result<InjectOutcome, EngineError> {
        let outcome =
            apply_event(self.model, &self.config, property, event).map_err(EngineError::Event)?;
        let (traced, result) = match outcome {
            EventOutcome::Applied(next) => {
                self.config = next;
                (ExoOutcome::Applied, InjectOutcome::Applied)
            }
            EventOutcome::NoTransition => (ExoOutcome::Ignored, InjectOutcome::Ignored),
        };
        self.trace.push(TraceRecord::ExoEvent {
            tick: self.tick,
            property: property.into(),
            event: event.into(),
            outcome: traced,
        });
        Ok(result)
    }

    fn take_turn(&mut self, index: usize) {
        let (cursor, layer_terminal, enabled) = {
            let instance = &self.instances[index];
            let layer = instance.top_layer().expect("running instance has layers");
            let cursor = layer.cursor.clone();
            if layer.process.is_terminal(&cursor) {
                (cursor, true, None)
            } else {
                let enabled = layer
                    .process
                    .outgoing(&cursor)
                    .find(|t| eval_condition(&t.activity.precondition, &self.config).unwrap_or(false))
                    .cloned();
                (cursor, false, enabled)
            }
        };

        if layer_terminal {
            self.pop_layer(index);
            return;
        }

        match enabled {
            None => {
                // Precondition violation: no outgoing transition is enabled
                // at a non-terminal node. The trigger itself never mutates
                // the configuration; recovery is the strategy's job.
                let faulted = self.instances[index]
                    .top_layer()
                    .expect("running instance has layers")
                    .process
                    .outgoing(&cursor)
                    .next()
                    .expect("non-terminal node has outgoing transitions")
                    .activity
                    .clone();
                self.trace.push(TraceRecord::Trigger {
                    tick: self.tick,
                    instance: self.instances[index].owner.clone(),
                    node: cursor.clone(),
                    activity: faulted.name.clone(),
                });
                let trigger = Trigger {
                    node: cursor,
                    activity: faulted,
                };
                let outcome = adaptation::apply_strategy(self, index, &trigger);
                if !outcome.success {
                    self.fail_instance(index, FailureReason::AdaptationExhausted);
                }
            }
            Some(transition) => match transition.activity.kind {
                ActivityKind::Concrete => {
                    self.execute_activity(index, &transition.from, &transition.activity, &transition.to)
                }
                ActivityKind::Abstract => {
                    let goal = transition
                        .activity
                        .goal
                        .clone()
                        .expect("validated abstract activity has a goal");
                    if eval_condition(&goal, &self.config).unwrap_or(false) {
                        // Nothing to refine: the goal already holds.
                        self.instances[index]
                            .layers
                            .last_mut()
                            .expect("running instance has layers")
                            .cursor = transition.to.clone();
                        self.trace.push(TraceRecord::AbstractSkipped {
                            tick: self.tick,
                            instance: self.instances[index].owner.clone(),
                            activity: transition.activity.name.clone(),
                        });
                    } else {
                        match adaptation::refine(self, index, &transition.activity, &transition.to)
                        {
                            adaptation::RefineOutcome::Refined => {}
                            adaptation::RefineOutcome::NoPlan => {
                                self.fail_instance(index, FailureReason::RefinementFailed)
                            }
                            adaptation::RefineOutcome::DepthExceeded => {
                                self.fail_instance(index, FailureReason::DepthExceeded)
                            }
                        }
                    }
                }
            },
        }
    }

    fn execute_activity(&mut self, index: usize, from: &str, activity: &ActivityDef, to: &str) {
        let before = self.config.clone();
        let mut current = before.clone();
        for effect in &activity.effects {
            match apply_event(self.model, &current, &effect.property, &effect.event) {
                Ok(EventOutcome::Applied(next)) => current = next,
                Ok(EventOutcome::NoTransition) | Err(_) => {
                    self.fail_instance(index, FailureReason::ModelInconsistency);
                    return;
                }
            }
        }
        self.config = current.clone();

        let tick = self.tick;
        let (owner, layer_id) = {
            let instance = &mut self.instances[index];
            let layer = instance.layers.last_mut().expect("running instance has layers");
            let layer_id = layer.id;
            layer.cursor = to.into();
            // Synthetic links joining plan fragments consume a turn and are
            // traced, but never logged: the log holds model-declared
            // activities only, so rollback candidates stay meaningful.
            if activity.name != adaptation::LINK_ACTIVITY {
                instance.execution_log.push(ExecutionLogEntry {
                    tick,
                    layer: layer_id,
                    activity: activity.name.clone(),
                    from_node: from.into(),
                    precondition: activity.precondition.clone(),
                    effects: activity.effects.clone(),
                    before,
                    after: current,
                    compensation_goal: activity.compensation_goal.clone(),
                });
            }
            (instance.owner.clone(), layer_id)
        };
        self.trace.push(TraceRecord::ActivityExecuted {
            tick,
            instance: owner,
            layer: layer_id,
            activity: activity.name.clone(),
        });
    }

    fn pop_layer(&mut self, index: usize) {
        let tick = self.tick;
        let record = {
            let instance = &mut self.instances[index];
            let layer = instance.layers.pop().expect("running instance has layers");
            match &layer.kind {
                LayerKind::Core => {
                    // The core layer pops only at a terminal node, which
                    // completes the instance.
                    instance.status = InstanceStatus::Completed;
                    TraceRecord::InstanceCompleted {
                        tick,
                        instance: instance.owner.clone(),
                    }
                }
                LayerKind::Refinement { resume_to, .. } => {
                    instance
                        .layers
                        .last_mut()
                        .expect("core layer below refinement")
                        .cursor = resume_to.clone();
                    TraceRecord::LayerPopped {
                        tick,
                        instance: instance.owner.clone(),
                        layer: layer.id,
                        layer_kind: TracedLayerKind::Refinement,
                    }
                }
                LayerKind::Adaptation { .. } => {
                    // The mechanism positioned the parent cursor when it
                    // pushed this layer; popping just resumes there.
                    TraceRecord::LayerPopped {
                        tick,
                        instance: instance.owner.clone(),
                        layer: layer.id,
                        layer_kind: TracedLayerKind::Adaptation,
                    }
                }
            }
        };
        self.trace.push(record);
    }

    pub(crate) fn fail_instance(&mut self, index: usize, reason: FailureReason) {
        self.instances[index].status = InstanceStatus::Failed(reason);
        self.trace.push(TraceRecord::InstanceFailed {
            tick: self.tick,
            instance: self.instances[index].owner.clone(),
            reason,
        });
    }
}
