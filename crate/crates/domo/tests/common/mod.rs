//! Shared support for the companion crate's integration tests: fixture
//! paths, a deterministic RNG, a random-model generator, and the brute-force
//! planning oracle.

#![allow(dead_code)]

use std::path::PathBuf;

use domo_core::adaptation::AdaptationStrategy;
use domo_core::condition::{eval_condition, Condition};
use domo_core::config::DomainConfiguration;
use domo_core::model::*;
use domo_core::planner::{symbolic_execute_fragment, FragmentOutcome, PlanOptions};
use domo_core::validate::ValidatedModel;

/// Path of a file in the workspace-level models directory.
pub fn models_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(file)
}

/// Path of a file in this crate's test fixtures.
pub fn fixture_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(file)
}

pub fn smartroom_text() -> String {
    std::fs::read_to_string(models_path("smartroom.json")).expect("bundled model present")
}

/// xorshift64*: tiny, seedable, deterministic.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

fn chain(name: &str, prefix: &str, activities: Vec<ActivityDef>) -> ProcessDef {
    let node = |i: usize| format!("{prefix}{i}");
    ProcessDef {
        name: name.into(),
        kind: ProcessKind::Fragment,
        nodes: (0..=activities.len())
            .map(|i| ProcessNode {
                id: node(i),
                initial: i == 0,
            })
            .collect(),
        transitions: activities
            .into_iter()
            .enumerate()
            .map(|(i, activity)| ProcessTransition {
                from: node(i),
                activity,
                to: node(i + 1),
            })
            .collect(),
    }
}

fn trivial_core(node: &str) -> ProcessDef {
    ProcessDef {
        name: "main".into(),
        kind: ProcessKind::Core,
        nodes: vec![ProcessNode {
            id: node.into(),
            initial: true,
        }],
        transitions: vec![],
    }
}

/// A valid random model: up to 4 properties with up to 4 states, up to 6
/// linear fragments with up to 3 activities each, plus a fragment-less
/// Requester object.
pub fn random_model(rng: &mut Rng) -> AdaptiveSystemModel {
    let num_props = 1 + rng.below(4);
    let mut properties = Vec::new();
    for pi in 0..num_props {
        let num_states = 2 + rng.below(3);
        let states: Vec<String> = (0..num_states).map(|si| format!("p{pi}s{si}")).collect();
        let mut transitions = Vec::new();
        for from in &states {
            for event in ["e0", "e1", "e2"] {
                if rng.chance(40) {
                    transitions.push(PropertyTransition {
                        from: from.clone(),
                        event: event.into(),
                        to: rng.pick(&states).clone(),
                    });
                }
            }
        }
        properties.push(DomainPropertyDef {
            name: format!("P{pi}"),
            states: states.clone(),
            initial_state: Some(rng.pick(&states).clone()),
            transitions,
        });
    }

    let random_atom = |rng: &mut Rng, properties: &[DomainPropertyDef]| {
        let p = rng.below(properties.len());
        Condition::atom(
            properties[p].name.clone(),
            rng.pick(&properties[p].states).clone(),
        )
    };

    let num_fragments = 1 + rng.below(6);
    let mut fragments = Vec::new();
    for fi in 0..num_fragments {
        let mut activities = Vec::new();
        for ai in 0..1 + rng.below(3) {
            if rng.chance(10) {
                activities.push(ActivityDef::abstract_with_goal(
                    format!("a{fi}_{ai}"),
                    random_atom(rng, &properties),
                ));
            } else {
                let mut effects = Vec::new();
                for _ in 0..rng.below(3) {
                    let p = &properties[rng.below(properties.len())];
                    let used: Vec<&str> =
                        p.transitions.iter().map(|t| t.event.as_str()).collect();
                    if !used.is_empty() {
                        effects.push(Effect {
                            property: p.name.clone(),
                            event: (*rng.pick(&used)).into(),
                        });
                    }
                }
                let precondition = if rng.chance(30) {
                    Condition::True
                } else {
                    random_atom(rng, &properties)
                };
                let compensation_goal = if rng.chance(15) {
                    Some(random_atom(rng, &properties))
                } else {
                    None
                };
                activities.push(ActivityDef {
                    name: format!("a{fi}_{ai}"),
                    kind: ActivityKind::Concrete,
                    precondition,
                    effects,
                    goal: None,
                    compensation_goal,
                });
            }
        }
        fragments.push(chain(&format!("F{fi}"), &format!("f{fi}n"), activities));
    }

    let split = rng.below(fragments.len() + 1);
    let beta_fragments = fragments.split_off(split);

    use domo_core::adaptation::MechanismName;
    let alpha_strategy = if rng.chance(25) {
        let pool = [
            MechanismName::LocalAdaptation,
            MechanismName::BackwardAdaptation,
            MechanismName::ReRefinement,
        ];
        let keep = 1 + rng.below(pool.len());
        Some(AdaptationStrategy::new(pool[..keep].to_vec()).unwrap())
    } else {
        None
    };

    AdaptiveSystemModel {
        name: "generated".into(),
        strategy: AdaptationStrategy::default(),
        domain_objects: vec![
            DomainObjectDef {
                name: "Requester".into(),
                strategy: None,
                internal_properties: vec![],
                external_knowledge: properties.iter().map(|p| p.name.clone()).collect(),
                core_processes: vec![trivial_core("q0")],
                fragments: vec![],
            },
            DomainObjectDef {
                name: "Alpha".into(),
                strategy: alpha_strategy,
                internal_properties: properties,
                external_knowledge: vec![],
                core_processes: vec![trivial_core("a0")],
                fragments,
            },
            DomainObjectDef {
                name: "Beta".into(),
                strategy: None,
                internal_properties: vec![],
                external_knowledge: vec![],
                core_processes: vec![trivial_core("b0")],
                fragments: beta_fragments,
            },
        ],
    }
}

pub fn random_configuration(rng: &mut Rng, model: &ValidatedModel) -> DomainConfiguration {
    model
        .properties()
        .map(|p| (p.name.clone(), rng.pick(&p.states).clone()))
        .collect()
}

pub fn random_goal(rng: &mut Rng, model: &ValidatedModel) -> Condition {
    let properties: Vec<&DomainPropertyDef> = model.properties().collect();
    let first = properties[rng.below(properties.len())];
    let mut goal = Condition::atom(first.name.clone(), rng.pick(&first.states).clone());
    if rng.chance(40) {
        let second = properties[rng.below(properties.len())];
        if second.name != first.name {
            goal = Condition::and(
                goal,
                Condition::atom(second.name.clone(), rng.pick(&second.states).clone()),
            );
        }
    }
    goal
}

/// Brute-force enumeration of all fragment sequences up to `depth_left`:
/// the oracle the planner is judged against. No pruning on purpose.
pub fn brute_force_min_plan(
    model: &ValidatedModel,
    config: &DomainConfiguration,
    goal: &Condition,
    options: &PlanOptions,
    depth_left: usize,
) -> Option<usize> {
    if eval_condition(goal, config).unwrap_or(false) {
        return Some(0);
    }
    if depth_left == 0 {
        return None;
    }
    let mut best: Option<usize> = None;
    for (owner, fragment) in model.fragments() {
        if !options.allow_self_fragments && owner == options.requesting_object {
            continue;
        }
        if let FragmentOutcome::Completed(next) =
            symbolic_execute_fragment(model, fragment, config, options)
        {
            if let Some(rest) = brute_force_min_plan(model, &next, goal, options, depth_left - 1) {
                let total = rest + 1;
                best = Some(best.map_or(total, |b| b.min(total)));
            }
        }
    }
    best
}
