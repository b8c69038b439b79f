//! Well-formedness validation and the validated-model wrapper.
//!
//! [`validate_model`] walks a model in declaration order and returns every
//! violation as a diagnostic with a stable code:
//!
//! | code | meaning |
//! |------|---------|
//! | E001 | the system declares no domain object |
//! | E002 | a domain object's core-process count is not exactly one |
//! | E003 | a property's initial state is missing, undeclared, or duplicated |
//! | E004 | a property has two transitions for the same (state, event) pair |
//! | E005 | a reference does not resolve (or a name collision makes resolution ambiguous) |
//! | E006 | an activity's annotations are malformed for its kind |
//! | E007 | a process has no initial node |
//! | W001 | a fragment flags several nodes initial (walks start at the first) |
//!
//! Validation is pure: the same model always yields the identical diagnostic
//! list. [`ValidatedModel`] is the proof token required by every operation
//! whose contract assumes an error-free model.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::adaptation::AdaptationStrategy;
use crate::condition::{Condition, Goal};
use crate::model::{
    ActivityDef, ActivityKind, AdaptiveSystemModel, DomainObjectDef, DomainPropertyDef,
    ProcessDef, ProcessKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticCode {
    E001,
    E002,
    E003,
    E004,
    E005,
    E006,
    E007,
    W001,
}

impl DiagnosticCode {
    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::W001 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticCode::E001 => "E001",
            DiagnosticCode::E002 => "E002",
            DiagnosticCode::E003 => "E003",
            DiagnosticCode::E004 => "E004",
            DiagnosticCode::E005 => "E005",
            DiagnosticCode::E006 => "E006",
            DiagnosticCode::E007 => "E007",
            DiagnosticCode::W001 => "W001",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// One well-formedness violation. `location` is a stable dotted path into
/// the model (`Hvac.CoolByHvac.transitions[0]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    fn new(code: DiagnosticCode, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.code, self.severity, self.location, self.message
        )
    }
}

/// Checks every metamodel invariant. Returns the empty list iff the model is
/// well-formed (warnings included in the list but not in "well-formed").
pub fn validate_model(model: &AdaptiveSystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if model.domain_objects.is_empty() {
        out.push(Diagnostic::new(
            DiagnosticCode::E001,
            "model",
            "an adaptive system must contain at least one domain object",
        ));
    }

    // Global name tables, built first so reference checks can resolve
    // forward declarations.
    let mut object_names = BTreeSet::new();
    let mut properties: BTreeMap<&str, (&str, &DomainPropertyDef)> = BTreeMap::new();
    for object in &model.domain_objects {
        if !object_names.insert(object.name.as_str()) {
            out.push(Diagnostic::new(
                DiagnosticCode::E005,
                object.name.clone(),
                format!("duplicate domain object name `{}`", object.name),
            ));
        }
        for property in &object.internal_properties {
            if properties
                .insert(property.name.as_str(), (object.name.as_str(), property))
                .is_some()
            {
                out.push(Diagnostic::new(
                    DiagnosticCode::E005,
                    format!("{}.{}", object.name, property.name),
                    format!(
                        "duplicate property name `{}` (property names are global)",
                        property.name
                    ),
                ));
            }
        }
    }

    for object in &model.domain_objects {
        check_object(object, &properties, &mut out);
    }

    out
}

fn check_object(
    object: &DomainObjectDef,
    properties: &BTreeMap<&str, (&str, &DomainPropertyDef)>,
    out: &mut Vec<Diagnostic>,
) {
    if object.core_processes.len() != 1 {
        out.push(Diagnostic::new(
            DiagnosticCode::E002,
            object.name.clone(),
            format!(
                "domain object must contain exactly one core process, found {}",
                object.core_processes.len()
            ),
        ));
    }

    for property in &object.internal_properties {
        check_property(&object.name, property, out);
    }

    for name in &object.external_knowledge {
        match properties.get(name.as_str()) {
            None => out.push(Diagnostic::new(
                DiagnosticCode::E005,
                object.name.clone(),
                format!("external knowledge references unknown property `{name}`"),
            )),
            Some((owner, _)) if *owner == object.name => out.push(Diagnostic::new(
                DiagnosticCode::E005,
                object.name.clone(),
                format!(
                    "external knowledge `{name}` is owned by `{}` itself",
                    object.name
                ),
            )),
            Some(_) => {}
        }
    }

    let mut fragment_names = BTreeSet::new();
    for fragment in &object.fragments {
        if !fragment_names.insert(fragment.name.as_str()) {
            out.push(Diagnostic::new(
                DiagnosticCode::E005,
                format!("{}.{}", object.name, fragment.name),
                format!("duplicate fragment name `{}`", fragment.name),
            ));
        }
    }

    for process in object.core_processes.iter().chain(&object.fragments) {
        check_process(&object.name, process, properties, out);
    }
}

fn check_property(owner: &str, property: &DomainPropertyDef, out: &mut Vec<Diagnostic>) {
    let location = format!("{owner}.{}", property.name);

    match &property.initial_state {
        None => out.push(Diagnostic::new(
            DiagnosticCode::E003,
            location.clone(),
            "property has no initial state",
        )),
        Some(initial) => {
            let occurrences = property.states.iter().filter(|s| *s == initial).count();
            if occurrences == 0 {
                out.push(Diagnostic::new(
                    DiagnosticCode::E003,
                    location.clone(),
                    format!("initial state `{initial}` is not a declared state"),
                ));
            } else if occurrences > 1 {
                out.push(Diagnostic::new(
                    DiagnosticCode::E003,
                    location.clone(),
                    format!("initial state `{initial}` is declared {occurrences} times"),
                ));
            }
        }
    }

    let mut seen = BTreeSet::new();
    for transition in &property.transitions {
        if !seen.insert((transition.from.as_str(), transition.event.as_str())) {
            out.push(Diagnostic::new(
                DiagnosticCode::E004,
                location.clone(),
                format!(
                    "nondeterministic: several transitions from `{}` on event `{}`",
                    transition.from, transition.event
                ),
            ));
        }
        for endpoint in [&transition.from, &transition.to] {
            if !property.states.contains(endpoint) {
                out.push(Diagnostic::new(
                    DiagnosticCode::E005,
                    location.clone(),
                    format!("transition endpoint `{endpoint}` is not a declared state"),
                ));
            }
        }
    }
}

fn check_process(
    owner: &str,
    process: &ProcessDef,
    properties: &BTreeMap<&str, (&str, &DomainPropertyDef)>,
    out: &mut Vec<Diagnostic>,
) {
    let location = format!("{owner}.{}", process.name);

    let mut node_ids = BTreeSet::new();
    for node in &process.nodes {
        if !node_ids.insert(node.id.as_str()) {
            out.push(Diagnostic::new(
                DiagnosticCode::E005,
                location.clone(),
                format!("duplicate node id `{}`", node.id),
            ));
        }
    }

    let initial_count = process.nodes.iter().filter(|n| n.initial).count();
    if initial_count == 0 {
        out.push(Diagnostic::new(
            DiagnosticCode::E007,
            location.clone(),
            "process has no initial node",
        ));
    } else if initial_count > 1 && process.kind == ProcessKind::Fragment {
        out.push(Diagnostic::new(
            DiagnosticCode::W001,
            location.clone(),
            format!(
                "fragment flags {initial_count} nodes initial; walks start at the first-declared one"
            ),
        ));
    }

    for (index, transition) in process.transitions.iter().enumerate() {
        let tloc = format!("{location}.transitions[{index}]");
        for endpoint in [&transition.from, &transition.to] {
            if !node_ids.contains(endpoint.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticCode::E005,
                    tloc.clone(),
                    format!("transition endpoint `{endpoint}` is not a declared node"),
                ));
            }
        }
        check_activity(&tloc, &transition.activity, properties, out);
    }
}

fn check_activity(
    location: &str,
    activity: &ActivityDef,
    properties: &BTreeMap<&str, (&str, &DomainPropertyDef)>,
    out: &mut Vec<Diagnostic>,
) {
    match activity.kind {
        ActivityKind::Abstract => {
            if !activity.effects.is_empty() {
                out.push(Diagnostic::new(
                    DiagnosticCode::E006,
                    location.to_string(),
                    format!("abstract activity `{}` must not declare effects", activity.name),
                ));
            }
            if activity.compensation_goal.is_some() {
                out.push(Diagnostic::new(
                    DiagnosticCode::E006,
                    location.to_string(),
                    format!(
                        "abstract activity `{}` must not declare a compensation goal",
                        activity.name
                    ),
                ));
            }
            match &activity.goal {
                None => out.push(Diagnostic::new(
                    DiagnosticCode::E006,
                    location.to_string(),
                    format!("abstract activity `{}` must declare a goal", activity.name),
                )),
                Some(goal) => match Goal::from_condition(goal) {
                    None => out.push(Diagnostic::new(
                        DiagnosticCode::E006,
                        location.to_string(),
                        format!(
                            "goal of `{}` must be a non-empty conjunction of atoms",
                            activity.name
                        ),
                    )),
                    Some(parsed) => {
                        let mut seen = BTreeSet::new();
                        for (property, _) in parsed.atoms() {
                            if !seen.insert(property.as_str()) {
                                out.push(Diagnostic::new(
                                    DiagnosticCode::E006,
                                    location.to_string(),
                                    format!(
                                        "goal of `{}` constrains property `{property}` twice",
                                        activity.name
                                    ),
                                ));
                            }
                        }
                    }
                },
            }
        }
        ActivityKind::Concrete => {
            if activity.goal.is_some() {
                out.push(Diagnostic::new(
                    DiagnosticCode::E006,
                    location.to_string(),
                    format!("concrete activity `{}` must not declare a goal", activity.name),
                ));
            }
        }
    }

    for (label, condition) in [
        ("precondition", Some(&activity.precondition)),
        ("goal", activity.goal.as_ref()),
        ("compensation goal", activity.compensation_goal.as_ref()),
    ] {
        let Some(condition) = condition else { continue };
        check_condition_refs(location, &activity.name, label, condition, properties, out);
    }

    for effect in &activity.effects {
        match properties.get(effect.property.as_str()) {
            None => out.push(Diagnostic::new(
                DiagnosticCode::E005,
                location.to_string(),
                format!(
                    "effect of `{}` targets unknown property `{}`",
                    activity.name, effect.property
                ),
            )),
            Some((_, def)) => {
                if !def.knows_event(&effect.event) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::E005,
                        location.to_string(),
                        format!(
                            "effect of `{}` fires event `{}` that property `{}` never uses",
                            activity.name, effect.event, effect.property
                        ),
                    ));
                }
            }
        }
    }
}

fn check_condition_refs(
    location: &str,
    activity: &str,
    label: &str,
    condition: &Condition,
    properties: &BTreeMap<&str, (&str, &DomainPropertyDef)>,
    out: &mut Vec<Diagnostic>,
) {
    for (property, state) in condition.atoms() {
        match properties.get(property) {
            None => out.push(Diagnostic::new(
                DiagnosticCode::E005,
                location.to_string(),
                format!("{label} of `{activity}` references unknown property `{property}`"),
            )),
            Some((_, def)) => {
                if !def.states.iter().any(|s| s == state) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::E005,
                        location.to_string(),
                        format!(
                            "{label} of `{activity}` references state `{state}` undeclared by `{property}`"
                        ),
                    ));
                }
            }
        }
    }
}

/// A model that passed validation with no error-severity diagnostics, plus
/// the lookup tables the planner and engine need. Immutable and safe to share
/// across threads.
#[derive(Debug, Clone)]
pub struct ValidatedModel {
    model: AdaptiveSystemModel,
    /// property name → (object index, property index)
    property_index: BTreeMap<String, (usize, usize)>,
    object_index: BTreeMap<String, usize>,
}

impl ValidatedModel {
    /// Validates and wraps `model`. Warnings are permitted; any
    /// error-severity diagnostic rejects the model (the full diagnostic list
    /// is returned, warnings included).
    pub fn new(model: AdaptiveSystemModel) -> Result<Self, Vec<Diagnostic>> {
        let diagnostics = validate_model(&model);
        if diagnostics.iter().any(|d| d.severity == Severity::Error) {
            return Err(diagnostics);
        }
        let mut property_index = BTreeMap::new();
        let mut object_index = BTreeMap::new();
        for (oi, object) in model.domain_objects.iter().enumerate() {
            object_index.insert(object.name.clone(), oi);
            for (pi, property) in object.internal_properties.iter().enumerate() {
                property_index.insert(property.name.clone(), (oi, pi));
            }
        }
        Ok(ValidatedModel {
            model,
            property_index,
            object_index,
        })
    }

    pub fn model(&self) -> &AdaptiveSystemModel {
        &self.model
    }

    pub fn name(&self) -> &str {
        &self.model.name
    }

    pub fn objects(&self) -> &[DomainObjectDef] {
        &self.model.domain_objects
    }

    pub fn object(&self, name: &str) -> Option<&DomainObjectDef> {
        self.object_index
            .get(name)
            .map(|&i| &self.model.domain_objects[i])
    }

    pub fn property(&self, name: &str) -> Option<&DomainPropertyDef> {
        self.property_index.get(name).map(|&(oi, pi)| {
            &self.model.domain_objects[oi].internal_properties[pi]
        })
    }

    /// The object that owns `property`.
    pub fn property_owner(&self, name: &str) -> Option<&str> {
        self.property_index
            .get(name)
            .map(|&(oi, _)| self.model.domain_objects[oi].name.as_str())
    }

    /// Every property in the system, objects in declaration order.
    pub fn properties(&self) -> impl Iterator<Item = &DomainPropertyDef> {
        self.model
            .domain_objects
            .iter()
            .flat_map(|o| o.internal_properties.iter())
    }

    /// All fragments in planner action order: objects in declaration order,
    /// then each object's fragments in declaration order.
    pub fn fragments(&self) -> impl Iterator<Item = (&str, &ProcessDef)> {
        self.model.domain_objects.iter().flat_map(|o| {
            o.fragments
                .iter()
                .map(move |f| (o.name.as_str(), f))
        })
    }

    pub fn fragment(&self, object: &str, name: &str) -> Option<&ProcessDef> {
        self.object(object)?.fragments.iter().find(|f| f.name == name)
    }

    /// The single core process of `object` (guaranteed by E002).
    pub fn core_process(&self, object: &str) -> Option<&ProcessDef> {
        self.object(object).map(|o| &o.core_processes[0])
    }

    /// The adaptation strategy in force for `object`: its own override or the
    /// system default.
    pub fn strategy_for(&self, object: &str) -> &AdaptationStrategy {
        self.object(object)
            .and_then(|o| o.strategy.as_ref())
            .unwrap_or(&self.model.strategy)
    }
}
