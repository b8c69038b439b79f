//! Goal-directed composition of fragments.
//!
//! One breadth-first search over domain configurations backs refinement,
//! local adaptation, and compensation planning. Actions are whole fragments,
//! applied by symbolic execution; the first plan found is minimal in fragment
//! count, with ties broken by declaration order through the queue discipline.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::condition::{eval_condition, Condition, Goal};
use crate::config::{apply_event, DomainConfiguration, EventOutcome};
use crate::model::{ActivityKind, ProcessDef};
use crate::validate::ValidatedModel;

/// A fragment, identified by its owner and name. Displays as
/// `owner.fragment` — the form used by traces and the CLI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentRef {
    pub object: String,
    pub fragment: String,
}

impl fmt::Display for FragmentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.object, self.fragment)
    }
}

/// An ordered fragment composition whose symbolic execution from the plan's
/// start configuration reaches a configuration satisfying `origin_goal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<FragmentRef>,
    pub origin_goal: Condition,
}

/// Search bounds and the identity of the requesting object. Fragments owned
/// by the requester are excluded unless `allow_self_fragments` is set:
/// fragments exist to be composed by *other* objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOptions {
    pub max_plan_length: usize,
    pub max_fragment_steps: usize,
    pub allow_self_fragments: bool,
    pub requesting_object: String,
}

impl PlanOptions {
    pub fn new(requesting_object: impl Into<String>) -> Self {
        PlanOptions {
            max_plan_length: 8,
            max_fragment_steps: 64,
            allow_self_fragments: false,
            requesting_object: requesting_object.into(),
        }
    }
}

/// Result of symbolically executing one fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FragmentOutcome {
    /// The walk reached a terminal node; this is the resulting configuration.
    Completed(DomainConfiguration),
    /// The walk got stuck, an effect was disabled, or the step budget ran
    /// out. The fragment is not applicable in the given configuration.
    Inapplicable,
}

/// Walks a fragment from its first-declared initial node, taking at each node
/// the first-declared outgoing transition whose precondition holds.
///
/// Concrete activities apply their effects in order; a disabled effect makes
/// the fragment inapplicable. Abstract activities apply their goal atoms as
/// direct state assignments — their refinement is deferred to run time, so
/// planning assumes the goal will hold. The walk succeeds at a node with no
/// outgoing transitions and is deterministic by construction.
pub fn symbolic_execute_fragment(
    model: &ValidatedModel,
    fragment: &ProcessDef,
    config: &DomainConfiguration,
    options: &PlanOptions,
) -> FragmentOutcome {
    let Some(mut node) = fragment.entry_node() else {
        return FragmentOutcome::Inapplicable;
    };
    let mut current = config.clone();
    let mut steps = 0usize;

    loop {
        if fragment.is_terminal(node) {
            return FragmentOutcome::Completed(current);
        }
        if steps >= options.max_fragment_steps {
            return FragmentOutcome::Inapplicable;
        }
        let enabled = fragment.outgoing(node).find(|t| {
            eval_condition(&t.activity.precondition, &current).unwrap_or(false)
        });
        let Some(transition) = enabled else {
            return FragmentOutcome::Inapplicable;
        };
        match transition.activity.kind {
            ActivityKind::Concrete => {
                for effect in &transition.activity.effects {
                    match apply_event(model, &current, &effect.property, &effect.event) {
                        Ok(EventOutcome::Applied(next)) => current = next,
                        Ok(EventOutcome::NoTransition) | Err(_) => {
                            return FragmentOutcome::Inapplicable
                        }
                    }
                }
            }
            ActivityKind::Abstract => {
                let Some(goal) = transition
                    .activity
                    .goal
                    .as_ref()
                    .and_then(Goal::from_condition)
                else {
                    return FragmentOutcome::Inapplicable;
                };
                current = goal.apply_to(&current);
            }
        }
        node = &transition.to;
        steps += 1;
    }
}

/// Breadth-first search for a fragment composition that takes `start` to a
/// configuration satisfying `goal`. Returns `None` when the frontier
/// exhausts within `max_plan_length` — there is no plan at that bound.
pub fn plan(
    model: &ValidatedModel,
    start: &DomainConfiguration,
    goal: &Condition,
    options: &PlanOptions,
) -> Option<Plan> {
    let satisfied =
        |config: &DomainConfiguration| eval_condition(goal, config).unwrap_or(false);

    if satisfied(start) {
        return Some(Plan {
            steps: Vec::new(),
            origin_goal: goal.clone(),
        });
    }

    let actions: Vec<(FragmentRef, &ProcessDef)> = model
        .fragments()
        .filter(|(owner, _)| options.allow_self_fragments || *owner != options.requesting_object)
        .map(|(owner, fragment)| {
            (
                FragmentRef {
                    object: owner.into(),
                    fragment: fragment.name.clone(),
                },
                fragment,
            )
        })
        .collect();

    let mut visited = BTreeSet::new();
    visited.insert(start.clone());
    let mut frontier: VecDeque<(DomainConfiguration, Vec<usize>)> = VecDeque::new();
    frontier.push_back((start.clone(), Vec::new()));

    while let Some((config, path)) = frontier.pop_front() {
        if path.len() == options.max_plan_length {
            continue;
        }
        for (index, (_, fragment)) in actions.iter().enumerate() {
            let FragmentOutcome::Completed(next) =
                symbolic_execute_fragment(model, fragment, &config, options)
            else {
                continue;
            };
            if !visited.insert(next.clone()) {
                continue;
            }
            let mut extended = path.clone();
            extended.push(index);
            if satisfied(&next) {
                return Some(Plan {
                    steps: extended
                        .into_iter()
                        .map(|i| actions[i].0.clone())
                        .collect(),
                    origin_goal: goal.clone(),
                });
            }
            frontier.push_back((next, extended));
        }
    }
    None
}

/// A plan step that could not be executed — a planner bug, not a domain
/// condition, given the planner's soundness contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatePlanError {
    pub step: usize,
    pub fragment: FragmentRef,
    pub reason: SimulateFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimulateFailure {
    UnknownFragment,
    Inapplicable,
}

impl fmt::Display for SimulatePlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reason {
            SimulateFailure::UnknownFragment => {
                write!(f, "plan step {} names unknown fragment {}", self.step, self.fragment)
            }
            SimulateFailure::Inapplicable => {
                write!(f, "plan step {} ({}) is inapplicable", self.step, self.fragment)
            }
        }
    }
}

/// Folds symbolic execution over a plan's steps, returning the final
/// configuration. Used by the engine to execute compensation plans and by
/// tests as the soundness check for [`plan`].
pub fn simulate_plan(
    model: &ValidatedModel,
    plan: &Plan,
    start: &DomainConfiguration,
    options: &PlanOptions,
) -> Result<DomainConfiguration, SimulatePlanError> {
    let mut current = start.clone();
    for (index, step) in plan.steps.iter().enumerate() {
        let fragment = model.fragment(&step.object, &step.fragment).ok_or_else(|| {
            SimulatePlanError {
                step: index,
                fragment: step.clone(),
                reason: SimulateFailure::UnknownFragment,
            }
        })?;
        match symbolic_execute_fragment(model, fragment, &current, options) {
            FragmentOutcome::Completed(next) => current = next,
            FragmentOutcome::Inapplicable => {
                return Err(SimulatePlanError {
                    step: index,
                    fragment: step.clone(),
                    reason: SimulateFailure::Inapplicable,
                })
            }
        }
    }
    Ok(current)
}
