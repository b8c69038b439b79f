//! Shared fixtures for the integration tests: the smart-room model, a small
//! deterministic RNG, a random-model generator, and the brute-force planning
//! oracle the search is checked against.

#![allow(dead_code)]

use domo_core::adaptation::AdaptationStrategy;
use domo_core::condition::{eval_condition, Condition};
use domo_core::config::DomainConfiguration;
use domo_core::model::*;
use domo_core::planner::{symbolic_execute_fragment, FragmentOutcome, PlanOptions};
use domo_core::validate::ValidatedModel;

pub fn prop(
    name: &str,
    states: &[&str],
    initial: &str,
    transitions: &[(&str, &str, &str)],
) -> DomainPropertyDef {
    DomainPropertyDef {
        name: name.into(),
        states: states.iter().map(|s| (*s).into()).collect(),
        initial_state: Some(initial.into()),
        transitions: transitions
            .iter()
            .map(|(from, event, to)| PropertyTransition {
                from: (*from).into(),
                event: (*event).into(),
                to: (*to).into(),
            })
            .collect(),
    }
}

pub fn single_node_process(name: &str, node: &str) -> ProcessDef {
    ProcessDef {
        name: name.into(),
        kind: ProcessKind::Core,
        nodes: vec![ProcessNode {
            id: node.into(),
            initial: true,
        }],
        transitions: vec![],
    }
}

/// A linear process visiting `activities` in order over nodes `{prefix}0..n`.
pub fn chain(name: &str, kind: ProcessKind, prefix: &str, activities: Vec<ActivityDef>) -> ProcessDef {
    let node = |i: usize| format!("{prefix}{i}");
    let nodes = (0..=activities.len())
        .map(|i| ProcessNode {
            id: node(i),
            initial: i == 0,
        })
        .collect();
    let transitions = activities
        .into_iter()
        .enumerate()
        .map(|(i, activity)| ProcessTransition {
            from: node(i),
            activity,
            to: node(i + 1),
        })
        .collect();
    ProcessDef {
        name: name.into(),
        kind,
        nodes,
        transitions,
    }
}

pub fn concrete(
    name: &str,
    precondition: Option<Condition>,
    effects: &[(&str, &str)],
    compensation_goal: Option<Condition>,
) -> ActivityDef {
    ActivityDef {
        name: name.into(),
        kind: ActivityKind::Concrete,
        precondition: precondition.unwrap_or(Condition::True),
        effects: effects
            .iter()
            .map(|(p, e)| Effect {
                property: (*p).into(),
                event: (*e).into(),
            })
            .collect(),
        goal: None,
        compensation_goal,
    }
}

/// The bundled smart-room system: a Controller whose core process refines
/// EnsureComfort, an Hvac offering CoolByHvac, a Window offering CoolByWindow
/// and CloseWindow, and a Room owning the temperature.
pub fn smartroom() -> AdaptiveSystemModel {
    let controller = DomainObjectDef {
        name: "Controller".into(),
        strategy: None,
        internal_properties: vec![],
        external_knowledge: vec!["RoomTemp".into()],
        core_processes: vec![chain(
            "main",
            ProcessKind::Core,
            "c",
            vec![
                ActivityDef::abstract_with_goal(
                    "EnsureComfort",
                    Condition::atom("RoomTemp", "Comfort"),
                ),
                concrete("report", None, &[], None),
            ],
        )],
        fragments: vec![],
    };

    let hvac = DomainObjectDef {
        name: "Hvac".into(),
        strategy: None,
        internal_properties: vec![prop(
            "HvacStatus",
            &["Operational", "Broken"],
            "Operational",
            &[
                ("Operational", "fail", "Broken"),
                ("Broken", "repair", "Operational"),
            ],
        )],
        external_knowledge: vec!["RoomTemp".into()],
        core_processes: vec![single_node_process("main", "h0")],
        fragments: vec![chain(
            "CoolByHvac",
            ProcessKind::Fragment,
            "f",
            vec![concrete(
                "startCooling",
                Some(Condition::atom("HvacStatus", "Operational")),
                &[("RoomTemp", "cool")],
                None,
            )],
        )],
    };

    let window = DomainObjectDef {
        name: "Window".into(),
        strategy: None,
        internal_properties: vec![prop(
            "WindowState",
            &["Closed", "Open"],
            "Closed",
            &[("Closed", "open", "Open"), ("Open", "close", "Closed")],
        )],
        external_knowledge: vec!["RoomTemp".into()],
        core_processes: vec![single_node_process("main", "n0")],
        fragments: vec![
            chain(
                "CoolByWindow",
                ProcessKind::Fragment,
                "w",
                vec![concrete(
                    "openWindow",
                    Some(Condition::atom("WindowState", "Closed")),
                    &[("WindowState", "open"), ("RoomTemp", "cool")],
                    Some(Condition::atom("WindowState", "Closed")),
                )],
            ),
            chain(
                "CloseWindow",
                ProcessKind::Fragment,
                "x",
                vec![concrete(
                    "closeWindow",
                    Some(Condition::atom("WindowState", "Open")),
                    &[("WindowState", "close")],
                    None,
                )],
            ),
        ],
    };

    let room = DomainObjectDef {
        name: "Room".into(),
        strategy: None,
        internal_properties: vec![prop(
            "RoomTemp",
            &["Hot", "Comfort", "Cold"],
            "Hot",
            &[
                ("Hot", "cool", "Comfort"),
                ("Comfort", "cool", "Cold"),
                ("Cold", "heat", "Comfort"),
                ("Comfort", "heat", "Hot"),
            ],
        )],
        external_knowledge: vec![],
        core_processes: vec![single_node_process("main", "r0")],
        fragments: vec![],
    };

    AdaptiveSystemModel {
        name: "smartroom".into(),
        strategy: AdaptationStrategy::default(),
        domain_objects: vec![controller, hvac, window, room],
    }
}

pub fn smartroom_validated() -> ValidatedModel {
    ValidatedModel::new(smartroom()).expect("smartroom is well-formed")
}

/// xorshift64*: tiny, seedable, good enough for test-case generation.
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

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    /// True with probability `percent`/100.
    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// Generates a valid random model: up to 4 properties with up to 4 states,
/// up to 6 linear fragments with up to 3 activities each, plus a fragment-less
/// Requester object. Valid by construction (asserted by the callers).
pub fn random_model(rng: &mut Rng) -> AdaptiveSystemModel {
    let num_props = 1 + rng.below(4);
    let mut properties = Vec::new();
    for pi in 0..num_props {
        let num_states = 2 + rng.below(3);
        let states: Vec<String> = (0..num_states).map(|si| format!("p{pi}s{si}")).collect();
        let events = ["e0", "e1", "e2"];
        let mut transitions = Vec::new();
        for from in &states {
            for event in events {
                if rng.chance(40) {
                    let to = rng.pick(&states).clone();
                    transitions.push(PropertyTransition {
                        from: from.clone(),
                        event: event.into(),
                        to,
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
        let s = rng.pick(&properties[p].states).clone();
        Condition::atom(properties[p].name.clone(), s)
    };

    let random_condition = |rng: &mut Rng, properties: &[DomainPropertyDef]| {
        let base = if rng.chance(30) {
            Condition::True
        } else {
            random_atom(rng, properties)
        };
        match rng.below(10) {
            0 => !base,
            1 => Condition::and(base, random_atom(rng, properties)),
            2 => Condition::or(base, random_atom(rng, properties)),
            _ => base,
        }
    };

    let num_fragments = 1 + rng.below(6);
    let mut fragments = Vec::new();
    for fi in 0..num_fragments {
        let num_activities = 1 + rng.below(3);
        let mut activities = Vec::new();
        for ai in 0..num_activities {
            if rng.chance(10) {
                // A nested abstract activity: planning assumes its goal.
                let mut atoms = vec![random_atom(rng, &properties)];
                if rng.chance(30) {
                    let second = random_atom(rng, &properties);
                    if second.atoms()[0].0 != atoms[0].atoms()[0].0 {
                        atoms.push(second);
                    }
                }
                let goal = atoms
                    .into_iter()
                    .reduce(Condition::and)
                    .expect("at least one atom");
                activities.push(ActivityDef::abstract_with_goal(format!("a{fi}_{ai}"), goal));
            } else {
                let mut effects = Vec::new();
                for _ in 0..rng.below(3) {
                    let p = &properties[rng.below(properties.len())];
                    let used: Vec<&str> =
                        p.transitions.iter().map(|t| t.event.as_str()).collect();
                    if used.is_empty() {
                        continue;
                    }
                    effects.push(Effect {
                        property: p.name.clone(),
                        event: (*rng.pick(&used)).into(),
                    });
                }
                activities.push(ActivityDef {
                    name: format!("a{fi}_{ai}"),
                    kind: ActivityKind::Concrete,
                    precondition: random_condition(rng, &properties),
                    effects,
                    goal: None,
                    compensation_goal: None,
                });
            }
        }
        fragments.push(chain(
            &format!("F{fi}"),
            ProcessKind::Fragment,
            &format!("f{fi}n"),
            activities,
        ));
    }

    let split = rng.below(fragments.len() + 1);
    let beta_fragments = fragments.split_off(split);

    AdaptiveSystemModel {
        name: "generated".into(),
        strategy: AdaptationStrategy::default(),
        domain_objects: vec![
            DomainObjectDef {
                name: "Requester".into(),
                strategy: None,
                internal_properties: vec![],
                external_knowledge: properties.iter().map(|p| p.name.clone()).collect(),
                core_processes: vec![single_node_process("main", "q0")],
                fragments: vec![],
            },
            DomainObjectDef {
                name: "Alpha".into(),
                strategy: None,
                internal_properties: properties,
                external_knowledge: vec![],
                core_processes: vec![single_node_process("main", "a0")],
                fragments,
            },
            DomainObjectDef {
                name: "Beta".into(),
                strategy: None,
                internal_properties: vec![],
                external_knowledge: vec![],
                core_processes: vec![single_node_process("main", "b0")],
                fragments: beta_fragments,
            },
        ],
    }
}

/// A random total configuration over the model's declared states.
pub fn random_configuration(rng: &mut Rng, model: &ValidatedModel) -> DomainConfiguration {
    model
        .properties()
        .map(|p| (p.name.clone(), rng.pick(&p.states).clone()))
        .collect()
}

/// A random planning goal: a conjunction of one or two atoms over distinct
/// properties.
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

/// Brute-force enumeration of every fragment sequence up to `depth_left`,
/// with the same self-exclusion rule as the planner. Returns the minimum
/// length of a goal-reaching sequence. Deliberately has no visited-set or
/// queue optimizations: it is the oracle the search is judged against.
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
