//! Domain configurations and their evolution under events.
//!
//! A configuration is a total map from property name to current state: the
//! planner's and engine's notion of world state. It changes only through
//! events fired at properties — by activity effects, exogenous changes, or
//! compensation plans.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use crate::validate::ValidatedModel;

/// Total map `property name → current state`, covering every property in the
/// system. Ordered so that iteration, equality, and serialization are
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct DomainConfiguration {
    entries: BTreeMap<String, String>,
}

impl DomainConfiguration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, property: &str) -> Option<&str> {
        self.entries.get(property).map(String::as_str)
    }

    pub fn set(&mut self, property: String, state: String) {
        self.entries.insert(property, state);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(p, s)| (p.as_str(), s.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(String, String)> for DomainConfiguration {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        DomainConfiguration {
            entries: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for DomainConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (property, state) in self.entries() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{property}={state}")?;
            first = false;
        }
        Ok(())
    }
}

/// Result of firing an event at a property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventOutcome {
    /// The property had a transition for the event; the returned
    /// configuration differs from the input in at most that one entry.
    Applied(DomainConfiguration),
    /// The event is declared for the property but disabled in its current
    /// state. The configuration is unchanged.
    NoTransition,
}

/// Firing failed outright: the names do not resolve in the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventError {
    UnknownProperty { property: String },
    /// The event appears nowhere in the property's transition table — a typo,
    /// not a legitimately disabled event.
    UnknownEvent { property: String, event: String },
}

impl fmt::Display for EventError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventError::UnknownProperty { property } => {
                write!(f, "unknown property `{property}`")
            }
            EventError::UnknownEvent { property, event } => {
                write!(f, "property `{property}` has no event `{event}`")
            }
        }
    }
}

/// The configuration induced by every property's initial state.
pub fn initial_configuration(model: &ValidatedModel) -> DomainConfiguration {
    model
        .properties()
        .map(|p| {
            let initial = p
                .initial_state
                .as_deref()
                .expect("validated property has an initial state");
            (p.name.clone(), initial.into())
        })
        .collect()
}

/// Fires `event` at `property`. Determinism of the property (validation
/// E004) guarantees at most one matching transition.
pub fn apply_event(
    model: &ValidatedModel,
    config: &DomainConfiguration,
    property: &str,
    event: &str,
) -> Result<EventOutcome, EventError> {
    let def = model
        .property(property)
        .ok_or_else(|| EventError::UnknownProperty {
            property: property.into(),
        })?;
    if !def.knows_event(event) {
        return Err(EventError::UnknownEvent {
            property: property.into(),
            event: event.into(),
        });
    }
    let current = config.get(property).ok_or_else(|| EventError::UnknownProperty {
        property: property.into(),
    })?;
    match def
        .transitions
        .iter()
        .find(|t| t.from == current && t.event == event)
    {
        Some(transition) => {
            let mut next = config.clone();
            next.set(property.into(), transition.to.clone());
            Ok(EventOutcome::Applied(next))
        }
        None => Ok(EventOutcome::NoTransition),
    }
}
