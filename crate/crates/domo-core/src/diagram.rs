//! DOT diagram emission for models and runtime snapshots.
//!
//! Diagrams are generated from the same validated model the engine executes,
//! so they cannot drift from the semantics. Emission is pure and
//! deterministic; node identifiers are stable across invocations.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::engine::{EngineState, InstanceStatus, LayerKind};
use crate::model::{ActivityKind, DomainPropertyDef, ProcessDef};
use crate::validate::ValidatedModel;

fn quoted(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Edge label for a process transition: the activity name, its precondition
/// in brackets when it is not the literal `true`, and `/property.event` for
/// each effect.
fn activity_label(activity: &crate::model::ActivityDef) -> String {
    let mut label = activity.name.clone();
    if activity.precondition != crate::condition::Condition::True {
        let _ = write!(label, " [{}]", activity.precondition);
    }
    if !activity.effects.is_empty() {
        label.push_str(" /");
        let effects: Vec<String> = activity
            .effects
            .iter()
            .map(|e| format!("{}.{}", e.property, e.event))
            .collect();
        label.push_str(&effects.join(","));
    }
    label
}

/// One cluster per domain object, showing its core process, fragments, and
/// internal properties. External-knowledge references are dashed edges from
/// the object's core node to the property; abstract-activity goals are dotted
/// edges to the properties they mention.
pub fn emit_system_diagram(model: &ValidatedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quoted(model.name()));
    let _ = writeln!(out, "  rankdir=LR;");

    for (index, object) in model.objects().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{index} {{");
        let _ = writeln!(out, "    label={};", quoted(&object.name));
        let core = &object.core_processes[0];
        let core_id = format!("{}.{}", object.name, core.name);
        let _ = writeln!(
            out,
            "    {} [shape=box, label={}];",
            quoted(&core_id),
            quoted(&format!("{} (core)", core.name))
        );
        for fragment in &object.fragments {
            let _ = writeln!(
                out,
                "    {} [shape=box, style=rounded, label={}];",
                quoted(&format!("{}.{}", object.name, fragment.name)),
                quoted(&fragment.name)
            );
        }
        for property in &object.internal_properties {
            let _ = writeln!(
                out,
                "    {} [shape=ellipse];",
                quoted(&property.name)
            );
        }
        let _ = writeln!(out, "  }}");
    }

    for object in model.objects() {
        let core_id = format!("{}.{}", object.name, object.core_processes[0].name);
        for reference in &object.external_knowledge {
            let _ = writeln!(
                out,
                "  {} -> {} [style=dashed, label=\"reads\"];",
                quoted(&core_id),
                quoted(reference)
            );
        }
        for process in object.core_processes.iter().chain(&object.fragments) {
            let from_id = format!("{}.{}", object.name, process.name);
            for transition in &process.transitions {
                let Some(goal) = &transition.activity.goal else { continue };
                for (property, _) in goal.atoms() {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [style=dotted, label=\"goal\"];",
                        quoted(&from_id),
                        quoted(property)
                    );
                }
            }
        }
    }

    out.push_str("}\n");
    out
}

/// Circles for nodes (doubled border marks initial ones), labeled edges for
/// transitions, dashed edges for abstract activities.
pub fn emit_process_diagram(process: &ProcessDef) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quoted(&process.name));
    for node in &process.nodes {
        let peripheries = if node.initial { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  {} [shape=circle, peripheries={peripheries}];",
            quoted(&node.id)
        );
    }
    for transition in &process.transitions {
        let style = match transition.activity.kind {
            ActivityKind::Abstract => ", style=dashed",
            ActivityKind::Concrete => "",
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}{style}];",
            quoted(&transition.from),
            quoted(&transition.to),
            quoted(&activity_label(&transition.activity))
        );
    }
    out.push_str("}\n");
    out
}

/// States as nodes, an entry arrow to the initial state, event-labeled edges.
pub fn emit_property_diagram(property: &DomainPropertyDef) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quoted(&property.name));
    let _ = writeln!(out, "  \"__entry\" [shape=point];");
    for state in &property.states {
        let _ = writeln!(out, "  {} [shape=circle];", quoted(state));
    }
    if let Some(initial) = &property.initial_state {
        let _ = writeln!(out, "  \"__entry\" -> {};", quoted(initial));
    }
    for transition in &property.transitions {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quoted(&transition.from),
            quoted(&transition.to),
            quoted(&transition.event)
        );
    }
    out.push_str("}\n");
    out
}

/// A runtime snapshot: the current configuration as a record node, plus one
/// cluster per instance with one nested subgraph per stack layer (core at the
/// bottom). The cursor node is highlighted; completed and failed instances
/// carry their status in the label and show no layers.
pub fn emit_instance_snapshot(engine: &EngineState) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph snapshot {{");
    let _ = writeln!(out, "  rankdir=LR;");

    let record: Vec<String> = engine
        .config()
        .entries()
        .map(|(p, s)| format!("{p}={s}"))
        .collect();
    let _ = writeln!(
        out,
        "  \"__config\" [shape=record, label={}];",
        quoted(&record.join("|"))
    );

    for (ii, instance) in engine.instances().iter().enumerate() {
        let status = match instance.status {
            InstanceStatus::Running => "running".into(),
            InstanceStatus::Completed => "completed".into(),
            InstanceStatus::Failed(reason) => format!("failed: {reason}"),
        };
        let _ = writeln!(out, "  subgraph cluster_{ii} {{");
        let _ = writeln!(
            out,
            "    label={};",
            quoted(&format!("{} [{status}]", instance.owner))
        );
        for (li, layer) in instance.layers.iter().enumerate() {
            let kind = match &layer.kind {
                LayerKind::Core => format!("core {}", layer.process.name),
                LayerKind::Refinement {
                    abstract_activity, ..
                } => format!("refinement {}", abstract_activity.name),
                LayerKind::Adaptation { mechanism } => format!("adaptation {mechanism}"),
            };
            let _ = writeln!(out, "    subgraph cluster_{ii}_{li} {{");
            let _ = writeln!(
                out,
                "      label={};",
                quoted(&format!("layer {}: {kind}", layer.id))
            );
            let node_id =
                |id: &str| format!("{}/{}/{}", instance.owner, layer.id, id);
            for node in &layer.process.nodes {
                let highlight = if node.id == layer.cursor {
                    ", penwidth=3"
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "      {} [shape=circle, label={}{highlight}];",
                    quoted(&node_id(&node.id)),
                    quoted(&node.id)
                );
            }
            for transition in &layer.process.transitions {
                let _ = writeln!(
                    out,
                    "      {} -> {} [label={}];",
                    quoted(&node_id(&transition.from)),
                    quoted(&node_id(&transition.to)),
                    quoted(&activity_label(&transition.activity))
                );
            }
            let _ = writeln!(out, "    }}");
        }
        let _ = writeln!(out, "  }}");
    }

    out.push_str("}\n");
    out
}
