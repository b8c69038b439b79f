//! Core semantics for adaptive systems built from domain objects.
//!
//! A *domain object* wraps a service behind a uniform model: a core process
//! (its internal behavior), fragments it offers the rest of the system, and
//! the domain properties it owns — finite deterministic transition systems
//! that together form the shared world model. Abstract activities in a
//! process are placeholders that get refined at run time by composing other
//! objects' fragments toward the activity's goal; precondition violations
//! trigger an ordered strategy of adaptation mechanisms (local adaptation,
//! backward adaptation with compensation, re-refinement).
//!
//! The crate is `no_std` (alloc only) and fully deterministic: planning,
//! execution, and diagram emission are pure functions of their inputs, so
//! identical models and scenarios produce byte-identical traces. Parsing,
//! serialization, and the command-line front end live in the companion
//! `domo` crate.
//!
//! # Example
//!
//! A user process with an abstract "light the room" activity, refined at run
//! time by a fragment the lamp offers:
//!
//! ```
//! use domo_core::adaptation::AdaptationStrategy;
//! use domo_core::condition::Condition;
//! use domo_core::engine::{EngineState, RunOutcome, ScenarioScript};
//! use domo_core::model::*;
//! use domo_core::validate::ValidatedModel;
//!
//! let chain = |name: &str, kind, activity: ActivityDef| ProcessDef {
//!     name: name.into(),
//!     kind,
//!     nodes: vec![
//!         ProcessNode { id: "s0".into(), initial: true },
//!         ProcessNode { id: "s1".into(), initial: false },
//!     ],
//!     transitions: vec![ProcessTransition {
//!         from: "s0".into(),
//!         activity,
//!         to: "s1".into(),
//!     }],
//! };
//!
//! let user = DomainObjectDef {
//!     name: "User".into(),
//!     strategy: None,
//!     internal_properties: vec![],
//!     external_knowledge: vec!["Light".into()],
//!     core_processes: vec![chain(
//!         "main",
//!         ProcessKind::Core,
//!         ActivityDef::abstract_with_goal("LightTheRoom", Condition::atom("Light", "On")),
//!     )],
//!     fragments: vec![],
//! };
//!
//! let mut switch_on = ActivityDef::concrete("switchOn");
//! switch_on.effects.push(Effect { property: "Light".into(), event: "toggle".into() });
//! let lamp = DomainObjectDef {
//!     name: "Lamp".into(),
//!     strategy: None,
//!     internal_properties: vec![DomainPropertyDef {
//!         name: "Light".into(),
//!         states: vec!["Off".into(), "On".into()],
//!         initial_state: Some("Off".into()),
//!         transitions: vec![
//!             PropertyTransition { from: "Off".into(), event: "toggle".into(), to: "On".into() },
//!             PropertyTransition { from: "On".into(), event: "toggle".into(), to: "Off".into() },
//!         ],
//!     }],
//!     external_knowledge: vec![],
//!     core_processes: vec![ProcessDef {
//!         name: "main".into(),
//!         kind: ProcessKind::Core,
//!         nodes: vec![ProcessNode { id: "l0".into(), initial: true }],
//!         transitions: vec![],
//!     }],
//!     fragments: vec![chain("SwitchOn", ProcessKind::Fragment, switch_on)],
//! };
//!
//! let model = ValidatedModel::new(AdaptiveSystemModel {
//!     name: "lamp_demo".into(),
//!     strategy: AdaptationStrategy::default(),
//!     domain_objects: vec![user, lamp],
//! })
//! .expect("well-formed");
//!
//! let mut engine = EngineState::start(&model, ScenarioScript::default()).unwrap();
//! assert_eq!(engine.run(10), RunOutcome::AllCompleted);
//! assert_eq!(engine.config().get("Light"), Some("On"));
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adaptation;
pub mod condition;
pub mod config;
pub mod diagram;
pub mod engine;
pub mod model;
pub mod planner;
pub mod trace;
pub mod validate;

pub use adaptation::{AdaptationStrategy, MechanismName, MechanismOutcome, Trigger};
pub use condition::{eval_condition, Condition, Goal};
pub use config::{apply_event, initial_configuration, DomainConfiguration, EventOutcome};
pub use engine::{EngineState, RunOutcome, ScenarioEvent, ScenarioScript};
pub use model::{
    ActivityDef, ActivityKind, AdaptiveSystemModel, DomainObjectDef, DomainPropertyDef, Effect,
    ProcessDef, ProcessKind, ProcessNode, ProcessTransition, PropertyTransition,
};
pub use planner::{plan, simulate_plan, symbolic_execute_fragment, FragmentRef, Plan, PlanOptions};
pub use trace::TraceRecord;
pub use validate::{validate_model, Diagnostic, DiagnosticCode, Severity, ValidatedModel};
