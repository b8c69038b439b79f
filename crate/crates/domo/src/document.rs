//! The model document format: a strict JSON schema mapped to and from
//! [`AdaptiveSystemModel`].
//!
//! Parsing is structural only — it checks the schema (required keys, types,
//! identifier syntax, condition grammar, no unknown keys) and leaves semantic
//! well-formedness to `validate_model`. Every diagnostic carries the source
//! line/column and a document path. The serializer is the parser's inverse:
//! `parse_model(serialize_model(m)) == m` for every valid model, and its
//! output is byte-deterministic.

use std::fmt;
use std::fmt::Write as _;

use domo_core::adaptation::{AdaptationStrategy, MechanismName};
use domo_core::condition::Condition;
use domo_core::model::{
    ActivityDef, ActivityKind, AdaptiveSystemModel, DomainObjectDef, DomainPropertyDef, Effect,
    ProcessDef, ProcessKind, ProcessNode, ProcessTransition, PropertyTransition,
};

use crate::cond::parse_condition;
use crate::json::{self, JsonValue, Spanned, SpannedValue};

/// One structural parse problem, located by line/column and document path.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.path, self.message
        )
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c == '_' || c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c == '_' || c.is_ascii_alphanumeric())
}

/// Parses a model document. Structural errors are collected where recovery
/// is possible (several bad fields report together); a JSON syntax error is
/// necessarily alone.
pub fn parse_model(text: &str) -> Result<AdaptiveSystemModel, Vec<ParseDiagnostic>> {
    let root = json::parse(text).map_err(|e| {
        vec![ParseDiagnostic {
            line: e.line,
            column: e.column,
            path: "$".into(),
            message: e.message,
        }]
    })?;

    let mut cx = Context {
        diagnostics: Vec::new(),
    };
    let model = cx.model(&root);
    match model {
        Some(model) if cx.diagnostics.is_empty() => Ok(model),
        _ => Err(cx.diagnostics),
    }
}

struct Context {
    diagnostics: Vec<ParseDiagnostic>,
}

impl Context {
    fn report<T>(&mut self, at: (usize, usize), path: &str, message: impl Into<String>) -> Option<T> {
        self.diagnostics.push(ParseDiagnostic {
            line: at.0,
            column: at.1,
            path: path.into(),
            message: message.into(),
        });
        None
    }

    fn object<'a>(
        &mut self,
        value: &'a SpannedValue,
        path: &str,
        allowed: &[&str],
    ) -> Option<&'a [(Spanned<String>, SpannedValue)]> {
        let JsonValue::Object(members) = &value.value else {
            return self.report(
                (value.line, value.column),
                path,
                format!("expected an object, found {}", value.value.type_name()),
            );
        };
        for (key, _) in members {
            if !allowed.contains(&key.value.as_str()) {
                self.report::<()>(
                    (key.line, key.column),
                    path,
                    format!("unknown key `{}`", key.value),
                );
            }
        }
        Some(members)
    }

    fn get<'a>(
        members: &'a [(Spanned<String>, SpannedValue)],
        key: &str,
    ) -> Option<&'a SpannedValue> {
        members.iter().find(|(k, _)| k.value == key).map(|(_, v)| v)
    }

    fn required<'a>(
        &mut self,
        value: &SpannedValue,
        members: &'a [(Spanned<String>, SpannedValue)],
        key: &str,
        path: &str,
    ) -> Option<&'a SpannedValue> {
        match Self::get(members, key) {
            Some(v) => Some(v),
            None => self.report(
                (value.line, value.column),
                path,
                format!("missing required key `{key}`"),
            ),
        }
    }

    fn string(&mut self, value: &SpannedValue, path: &str) -> Option<String> {
        match &value.value {
            JsonValue::String(s) => Some(s.clone()),
            other => self.report(
                (value.line, value.column),
                path,
                format!("expected a string, found {}", other.type_name()),
            ),
        }
    }

    fn identifier(&mut self, value: &SpannedValue, path: &str) -> Option<String> {
        let s = self.string(value, path)?;
        if is_identifier(&s) {
            Some(s)
        } else {
            self.report(
                (value.line, value.column),
                path,
                format!("`{s}` is not an identifier"),
            )
        }
    }

    fn boolean(&mut self, value: &SpannedValue, path: &str) -> Option<bool> {
        match &value.value {
            JsonValue::Bool(b) => Some(*b),
            other => self.report(
                (value.line, value.column),
                path,
                format!("expected a boolean, found {}", other.type_name()),
            ),
        }
    }

    fn array<'a>(&mut self, value: &'a SpannedValue, path: &str) -> Option<&'a [SpannedValue]> {
        match &value.value {
            JsonValue::Array(items) => Some(items),
            other => self.report(
                (value.line, value.column),
                path,
                format!("expected an array, found {}", other.type_name()),
            ),
        }
    }

    fn condition(&mut self, value: &SpannedValue, path: &str) -> Option<Condition> {
        let s = self.string(value, path)?;
        match parse_condition(&s) {
            Ok(cond) => Some(cond),
            Err(e) => self.report(
                (value.line, value.column),
                path,
                format!("condition syntax error {e}"),
            ),
        }
    }

    fn strategy(&mut self, value: &SpannedValue, path: &str) -> Option<AdaptationStrategy> {
        let items = self.array(value, path)?;
        let mut mechanisms = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let item_path = format!("{path}[{i}]");
            let Some(name) = self.string(item, &item_path) else {
                continue;
            };
            match MechanismName::from_strategy_name(&name) {
                Some(m) => mechanisms.push(m),
                None => {
                    self.report::<()>(
                        (item.line, item.column),
                        &item_path,
                        format!("unknown mechanism `{name}`"),
                    );
                }
            }
        }
        match AdaptationStrategy::new(mechanisms) {
            Ok(strategy) => Some(strategy),
            Err(e) => self.report((value.line, value.column), path, e.to_string()),
        }
    }

    fn model(&mut self, root: &SpannedValue) -> Option<AdaptiveSystemModel> {
        let members = self.object(root, "$", &["name", "strategy", "domain_objects"])?;
        let name = self
            .required(root, members, "name", "$")
            .and_then(|v| self.identifier(v, "$.name"));
        let strategy = match Self::get(members, "strategy") {
            Some(v) => self.strategy(v, "$.strategy"),
            None => Some(AdaptationStrategy::default()),
        };
        let mut objects = Vec::new();
        if let Some(v) = Self::get(members, "domain_objects") {
            if let Some(items) = self.array(v, "$.domain_objects") {
                for (i, item) in items.iter().enumerate() {
                    if let Some(object) =
                        self.domain_object(item, &format!("$.domain_objects[{i}]"))
                    {
                        objects.push(object);
                    }
                }
            }
        }
        Some(AdaptiveSystemModel {
            name: name?,
            strategy: strategy?,
            domain_objects: objects,
        })
    }

    fn domain_object(&mut self, value: &SpannedValue, path: &str) -> Option<DomainObjectDef> {
        let members = self.object(
            value,
            path,
            &[
                "name",
                "strategy",
                "properties",
                "external_knowledge",
                "core_process",
                "fragments",
            ],
        )?;
        let name = self
            .required(value, members, "name", path)
            .and_then(|v| self.identifier(v, &format!("{path}.name")));
        let strategy = match Self::get(members, "strategy") {
            Some(v) => Some(self.strategy(v, &format!("{path}.strategy"))?),
            None => None,
        };
        let mut properties = Vec::new();
        if let Some(v) = Self::get(members, "properties") {
            if let Some(items) = self.array(v, &format!("{path}.properties")) {
                for (i, item) in items.iter().enumerate() {
                    if let Some(p) = self.property(item, &format!("{path}.properties[{i}]")) {
                        properties.push(p);
                    }
                }
            }
        }
        let mut external = Vec::new();
        if let Some(v) = Self::get(members, "external_knowledge") {
            if let Some(items) = self.array(v, &format!("{path}.external_knowledge")) {
                for (i, item) in items.iter().enumerate() {
                    if let Some(name) =
                        self.identifier(item, &format!("{path}.external_knowledge[{i}]"))
                    {
                        external.push(name);
                    }
                }
            }
        }
        // A missing core process is representable on purpose: the validator
        // reports it as E002 rather than a parse failure.
        let core_processes = match Self::get(members, "core_process") {
            Some(v) => self
                .process(v, &format!("{path}.core_process"), ProcessKind::Core)
                .into_iter()
                .collect(),
            None => Vec::new(),
        };
        let mut fragments = Vec::new();
        if let Some(v) = Self::get(members, "fragments") {
            if let Some(items) = self.array(v, &format!("{path}.fragments")) {
                for (i, item) in items.iter().enumerate() {
                    if let Some(f) = self.process(
                        item,
                        &format!("{path}.fragments[{i}]"),
                        ProcessKind::Fragment,
                    ) {
                        fragments.push(f);
                    }
                }
            }
        }
        Some(DomainObjectDef {
            name: name?,
            strategy,
            internal_properties: properties,
            external_knowledge: external,
            core_processes,
            fragments,
        })
    }

    fn property(&mut self, value: &SpannedValue, path: &str) -> Option<DomainPropertyDef> {
        let members = self.object(value, path, &["name", "states", "initial", "transitions"])?;
        let name = self
            .required(value, members, "name", path)
            .and_then(|v| self.identifier(v, &format!("{path}.name")));
        let mut states = Vec::new();
        if let Some(v) = Self::get(members, "states") {
            if let Some(items) = self.array(v, &format!("{path}.states")) {
                for (i, item) in items.iter().enumerate() {
                    if let Some(s) = self.identifier(item, &format!("{path}.states[{i}]")) {
                        states.push(s);
                    }
                }
            }
        }
        let initial = match Self::get(members, "initial") {
            Some(v) => Some(self.identifier(v, &format!("{path}.initial"))?),
            None => None,
        };
        let mut transitions = Vec::new();
        if let Some(v) = Self::get(members, "transitions") {
            if let Some(items) = self.array(v, &format!("{path}.transitions")) {
                for (i, item) in items.iter().enumerate() {
                    let t_path = format!("{path}.transitions[{i}]");
                    let Some(m) = self.object(item, &t_path, &["from", "event", "to"]) else {
                        continue;
                    };
                    let from = self
                        .required(item, m, "from", &t_path)
                        .and_then(|v| self.identifier(v, &format!("{t_path}.from")));
                    let event = self
                        .required(item, m, "event", &t_path)
                        .and_then(|v| self.identifier(v, &format!("{t_path}.event")));
                    let to = self
                        .required(item, m, "to", &t_path)
                        .and_then(|v| self.identifier(v, &format!("{t_path}.to")));
                    if let (Some(from), Some(event), Some(to)) = (from, event, to) {
                        transitions.push(PropertyTransition { from, event, to });
                    }
                }
            }
        }
        Some(DomainPropertyDef {
            name: name?,
            states,
            initial_state: initial,
            transitions,
        })
    }

    fn process(
        &mut self,
        value: &SpannedValue,
        path: &str,
        kind: ProcessKind,
    ) -> Option<ProcessDef> {
        let members = self.object(value, path, &["name", "nodes", "transitions"])?;
        let name = self
            .required(value, members, "name", path)
            .and_then(|v| self.identifier(v, &format!("{path}.name")));
        let mut nodes = Vec::new();
        if let Some(v) = Self::get(members, "nodes") {
            if let Some(items) = self.array(v, &format!("{path}.nodes")) {
                for (i, item) in items.iter().enumerate() {
                    let n_path = format!("{path}.nodes[{i}]");
                    let Some(m) = self.object(item, &n_path, &["id", "initial"]) else {
                        continue;
                    };
                    let id = self
                        .required(item, m, "id", &n_path)
                        .and_then(|v| self.identifier(v, &format!("{n_path}.id")));
                    let initial = match Self::get(m, "initial") {
                        Some(v) => self.boolean(v, &format!("{n_path}.initial"))?,
                        None => false,
                    };
                    if let Some(id) = id {
                        nodes.push(ProcessNode { id, initial });
                    }
                }
            }
        }
        let mut transitions = Vec::new();
        if let Some(v) = Self::get(members, "transitions") {
            if let Some(items) = self.array(v, &format!("{path}.transitions")) {
                for (i, item) in items.iter().enumerate() {
                    let t_path = format!("{path}.transitions[{i}]");
                    let Some(m) = self.object(item, &t_path, &["from", "to", "activity"]) else {
                        continue;
                    };
                    let from = self
                        .required(item, m, "from", &t_path)
                        .and_then(|v| self.identifier(v, &format!("{t_path}.from")));
                    let to = self
                        .required(item, m, "to", &t_path)
                        .and_then(|v| self.identifier(v, &format!("{t_path}.to")));
                    let activity = self
                        .required(item, m, "activity", &t_path)
                        .and_then(|v| self.activity(v, &format!("{t_path}.activity")));
                    if let (Some(from), Some(to), Some(activity)) = (from, to, activity) {
                        transitions.push(ProcessTransition { from, activity, to });
                    }
                }
            }
        }
        Some(ProcessDef {
            name: name?,
            kind,
            nodes,
            transitions,
        })
    }

    fn activity(&mut self, value: &SpannedValue, path: &str) -> Option<ActivityDef> {
        let members = self.object(
            value,
            path,
            &[
                "name",
                "kind",
                "precondition",
                "effects",
                "goal",
                "compensation_goal",
            ],
        )?;
        let name = self
            .required(value, members, "name", path)
            .and_then(|v| self.identifier(v, &format!("{path}.name")));
        let kind = self.required(value, members, "kind", path).and_then(|v| {
            let s = self.string(v, &format!("{path}.kind"))?;
            match s.as_str() {
                "concrete" => Some(ActivityKind::Concrete),
                "abstract" => Some(ActivityKind::Abstract),
                other => self.report(
                    (v.line, v.column),
                    &format!("{path}.kind"),
                    format!("expected `concrete` or `abstract`, found `{other}`"),
                ),
            }
        });
        let precondition = match Self::get(members, "precondition") {
            Some(v) => self.condition(v, &format!("{path}.precondition"))?,
            None => Condition::True,
        };
        let mut effects = Vec::new();
        if let Some(v) = Self::get(members, "effects") {
            if let Some(items) = self.array(v, &format!("{path}.effects")) {
                for (i, item) in items.iter().enumerate() {
                    let e_path = format!("{path}.effects[{i}]");
                    let Some(m) = self.object(item, &e_path, &["property", "event"]) else {
                        continue;
                    };
                    let property = self
                        .required(item, m, "property", &e_path)
                        .and_then(|v| self.identifier(v, &format!("{e_path}.property")));
                    let event = self
                        .required(item, m, "event", &e_path)
                        .and_then(|v| self.identifier(v, &format!("{e_path}.event")));
                    if let (Some(property), Some(event)) = (property, event) {
                        effects.push(Effect { property, event });
                    }
                }
            }
        }
        let goal = match Self::get(members, "goal") {
            Some(v) => Some(self.condition(v, &format!("{path}.goal"))?),
            None => None,
        };
        let compensation_goal = match Self::get(members, "compensation_goal") {
            Some(v) => Some(self.condition(v, &format!("{path}.compensation_goal"))?),
            None => None,
        };
        Some(ActivityDef {
            name: name?,
            kind: kind?,
            precondition,
            effects,
            goal,
            compensation_goal,
        })
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

struct Writer {
    out: String,
    indent: usize,
}

impl Writer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    /// Opens `prefix{`, runs `body`, closes with `}` plus `suffix`.
    fn block(&mut self, prefix: &str, suffix: &str, body: impl FnOnce(&mut Self)) {
        self.line(&format!("{prefix}{{"));
        self.indent += 1;
        body(self);
        self.indent -= 1;
        self.line(&format!("}}{suffix}"));
    }

    fn string_array(&mut self, key: &str, items: &[String], trailing_comma: bool) {
        let rendered: Vec<String> = items.iter().map(|s| json::escape_string(s)).collect();
        let comma = if trailing_comma { "," } else { "" };
        self.line(&format!(
            "{}: [{}]{comma}",
            json::escape_string(key),
            rendered.join(", ")
        ));
    }
}

/// Renders a model back into document form. The inverse of [`parse_model`]
/// for valid models, with a fixed key order and two-space indentation.
pub fn serialize_model(model: &AdaptiveSystemModel) -> String {
    let mut w = Writer {
        out: String::new(),
        indent: 0,
    };
    w.block("", "", |w| {
        w.line(&format!("\"name\": {},", json::escape_string(&model.name)));
        let strategy: Vec<String> = model
            .strategy
            .mechanisms()
            .iter()
            .map(|m| m.as_str().to_string())
            .collect();
        w.string_array("strategy", &strategy, true);
        if model.domain_objects.is_empty() {
            w.line("\"domain_objects\": []");
        } else {
            w.line("\"domain_objects\": [");
            w.indent += 1;
            for (i, object) in model.domain_objects.iter().enumerate() {
                let last = i + 1 == model.domain_objects.len();
                write_object(w, object, if last { "" } else { "," });
            }
            w.indent -= 1;
            w.line("]");
        }
    });
    w.out
}

fn write_object(w: &mut Writer, object: &DomainObjectDef, suffix: &str) {
    w.block("", suffix, |w| {
        w.line(&format!("\"name\": {},", json::escape_string(&object.name)));
        if let Some(strategy) = &object.strategy {
            let names: Vec<String> = strategy
                .mechanisms()
                .iter()
                .map(|m| m.as_str().to_string())
                .collect();
            w.string_array("strategy", &names, true);
        }
        if object.internal_properties.is_empty() {
            w.line("\"properties\": [],");
        } else {
            w.line("\"properties\": [");
            w.indent += 1;
            for (i, property) in object.internal_properties.iter().enumerate() {
                let last = i + 1 == object.internal_properties.len();
                write_property(w, property, if last { "" } else { "," });
            }
            w.indent -= 1;
            w.line("],");
        }
        if !object.external_knowledge.is_empty() {
            w.string_array("external_knowledge", &object.external_knowledge, true);
        }
        if let [core] = &object.core_processes[..] {
            write_process(w, Some("core_process"), core, ",");
        }
        if object.fragments.is_empty() {
            w.line("\"fragments\": []");
        } else {
            w.line("\"fragments\": [");
            w.indent += 1;
            for (i, fragment) in object.fragments.iter().enumerate() {
                let last = i + 1 == object.fragments.len();
                write_process(w, None, fragment, if last { "" } else { "," });
            }
            w.indent -= 1;
            w.line("]");
        }
    });
}

fn write_property(w: &mut Writer, property: &DomainPropertyDef, suffix: &str) {
    w.block("", suffix, |w| {
        w.line(&format!(
            "\"name\": {},",
            json::escape_string(&property.name)
        ));
        w.string_array("states", &property.states, true);
        if let Some(initial) = &property.initial_state {
            w.line(&format!("\"initial\": {},", json::escape_string(initial)));
        }
        if property.transitions.is_empty() {
            w.line("\"transitions\": []");
        } else {
            w.line("\"transitions\": [");
            w.indent += 1;
            for (i, t) in property.transitions.iter().enumerate() {
                let comma = if i + 1 == property.transitions.len() { "" } else { "," };
                w.line(&format!(
                    "{{\"from\": {}, \"event\": {}, \"to\": {}}}{comma}",
                    json::escape_string(&t.from),
                    json::escape_string(&t.event),
                    json::escape_string(&t.to)
                ));
            }
            w.indent -= 1;
            w.line("]");
        }
    });
}

fn write_process(w: &mut Writer, key: Option<&str>, process: &ProcessDef, suffix: &str) {
    let prefix = match key {
        Some(key) => format!("{}: ", json::escape_string(key)),
        None => String::new(),
    };
    w.block(&prefix, suffix, |w| {
        w.line(&format!(
            "\"name\": {},",
            json::escape_string(&process.name)
        ));
        let nodes: Vec<String> = process
            .nodes
            .iter()
            .map(|n| {
                format!(
                    "{{\"id\": {}, \"initial\": {}}}",
                    json::escape_string(&n.id),
                    n.initial
                )
            })
            .collect();
        let trailing = if process.transitions.is_empty() { "" } else { "," };
        w.line(&format!("\"nodes\": [{}]{trailing}", nodes.join(", ")));
        if !process.transitions.is_empty() {
            w.line("\"transitions\": [");
            w.indent += 1;
            for (i, t) in process.transitions.iter().enumerate() {
                let last = i + 1 == process.transitions.len();
                write_transition(w, t, if last { "" } else { "," });
            }
            w.indent -= 1;
            w.line("]");
        }
    });
}

fn write_transition(w: &mut Writer, transition: &ProcessTransition, suffix: &str) {
    w.block("", suffix, |w| {
        w.line(&format!(
            "\"from\": {},",
            json::escape_string(&transition.from)
        ));
        w.line(&format!("\"to\": {},", json::escape_string(&transition.to)));
        let a = &transition.activity;
        let mut line = format!(
            "\"activity\": {{\"name\": {}, \"kind\": {}",
            json::escape_string(&a.name),
            json::escape_string(match a.kind {
                ActivityKind::Concrete => "concrete",
                ActivityKind::Abstract => "abstract",
            })
        );
        if a.precondition != Condition::True {
            let _ = write!(
                line,
                ", \"precondition\": {}",
                json::escape_string(&a.precondition.to_string())
            );
        }
        if !a.effects.is_empty() {
            let effects: Vec<String> = a
                .effects
                .iter()
                .map(|e| {
                    format!(
                        "{{\"property\": {}, \"event\": {}}}",
                        json::escape_string(&e.property),
                        json::escape_string(&e.event)
                    )
                })
                .collect();
            let _ = write!(line, ", \"effects\": [{}]", effects.join(", "));
        }
        if let Some(goal) = &a.goal {
            let _ = write!(line, ", \"goal\": {}", json::escape_string(&goal.to_string()));
        }
        if let Some(comp) = &a.compensation_goal {
            let _ = write!(
                line,
                ", \"compensation_goal\": {}",
                json::escape_string(&comp.to_string())
            );
        }
        line.push('}');
        w.line(&line);
    });
}
