//! The domain-object metamodel.
//!
//! An adaptive system is a set of domain objects. Each object wraps one core
//! process (its internal behavior), a list of fragments it offers to the rest
//! of the system, and the domain properties it owns. Properties are finite
//! deterministic labeled transition systems; processes are activity-labeled
//! transition systems. Activities carry the domain annotations that drive
//! planning and adaptation: preconditions, effects, goals, and compensation
//! goals.
//!
//! Everything here is plain immutable data. Structural and semantic
//! well-formedness is checked by [`crate::validate::validate_model`]; the
//! executable operations live in [`crate::config`], [`crate::planner`], and
//! [`crate::engine`].

use alloc::string::String;
use alloc::vec::Vec;

use crate::adaptation::AdaptationStrategy;
use crate::condition::Condition;

/// Maximum number of stacked layers per process instance. Exceeding it fails
/// the instance; it guards against mutually-recursive abstract activities.
pub const MAX_LAYER_DEPTH: usize = 16;

/// A whole adaptive system: at least one domain object plus the
/// system-default adaptation strategy. Declaration order of domain objects is
/// semantically significant (scheduling and planner tie-breaking).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveSystemModel {
    pub name: String,
    pub strategy: AdaptationStrategy,
    pub domain_objects: Vec<DomainObjectDef>,
}

/// One domain object: a core process, offered fragments, owned properties,
/// and read references to properties owned by other objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainObjectDef {
    pub name: String,
    /// Per-object strategy override; `None` falls back to the system default.
    pub strategy: Option<AdaptationStrategy>,
    pub internal_properties: Vec<DomainPropertyDef>,
    /// Names of properties owned by other objects that this one observes.
    pub external_knowledge: Vec<String>,
    /// Held as a list so that a malformed model (zero or several core
    /// processes) is representable and diagnosable as E002. A valid object
    /// has exactly one entry.
    pub core_processes: Vec<ProcessDef>,
    pub fragments: Vec<ProcessDef>,
}

/// A domain property: a finite deterministic LTS with one initial state.
/// Property names are globally unique across the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPropertyDef {
    pub name: String,
    pub states: Vec<String>,
    /// `None` is representable so the validator can report E003.
    pub initial_state: Option<String>,
    pub transitions: Vec<PropertyTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyTransition {
    pub from: String,
    pub event: String,
    pub to: String,
}

impl DomainPropertyDef {
    /// True iff any transition of this property is labeled with `event`.
    /// Distinguishes typos from legitimately disabled events.
    pub fn knows_event(&self, event: &str) -> bool {
        self.transitions.iter().any(|t| t.event == event)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    Core,
    Fragment,
}

/// An activity-labeled transition system. A node with no outgoing
/// transitions is terminal. Transition declaration order is significant:
/// execution and symbolic execution always take the first enabled transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: String,
    pub kind: ProcessKind,
    pub nodes: Vec<ProcessNode>,
    pub transitions: Vec<ProcessTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessNode {
    pub id: String,
    pub initial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessTransition {
    pub from: String,
    pub activity: ActivityDef,
    pub to: String,
}

impl ProcessDef {
    /// The first-declared initial node, where every walk of this process
    /// starts.
    pub fn entry_node(&self) -> Option<&str> {
        self.nodes
            .iter()
            .find(|n| n.initial)
            .map(|n| n.id.as_str())
    }

    pub fn outgoing<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a ProcessTransition> {
        self.transitions.iter().filter(move |t| t.from == node)
    }

    pub fn is_terminal(&self, node: &str) -> bool {
        self.outgoing(node).next().is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivityKind {
    /// Executes directly, firing its effects at domain properties.
    Concrete,
    /// A placeholder refined at run time by a composed plan of fragments.
    Abstract,
}

/// An activity and its domain annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityDef {
    pub name: String,
    pub kind: ActivityKind,
    /// Constrains execution to specific domain configurations. Defaults to
    /// the literal `true`.
    pub precondition: Condition,
    /// Events fired at properties, in order. Concrete activities only.
    pub effects: Vec<Effect>,
    /// Must be a non-empty conjunction of positive atoms. Abstract
    /// activities only; kept as a raw condition so malformed shapes are
    /// representable for validation (E006).
    pub goal: Option<Condition>,
    /// Fulfilled whenever a successfully executed instance of this activity
    /// is rolled back. Concrete activities only.
    pub compensation_goal: Option<Condition>,
}

impl ActivityDef {
    /// A concrete activity with default annotations.
    pub fn concrete(name: impl Into<String>) -> Self {
        ActivityDef {
            name: name.into(),
            kind: ActivityKind::Concrete,
            precondition: Condition::True,
            effects: Vec::new(),
            goal: None,
            compensation_goal: None,
        }
    }

    /// An abstract activity carrying `goal`.
    pub fn abstract_with_goal(name: impl Into<String>, goal: Condition) -> Self {
        ActivityDef {
            name: name.into(),
            kind: ActivityKind::Abstract,
            precondition: Condition::True,
            effects: Vec::new(),
            goal: Some(goal),
            compensation_goal: None,
        }
    }
}

/// One effect: fire `event` at `property`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    pub property: String,
    pub event: String,
}
