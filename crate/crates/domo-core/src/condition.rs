//! The condition and goal language over domain configurations.
//!
//! Conditions are boolean formulas whose atoms test a domain property for a
//! specific state (`RoomTemp = Comfort`). They guard activity execution
//! (preconditions), describe compensation obligations, and act as search
//! goals. Goals of abstract activities are restricted to non-empty
//! conjunctions of positive atoms so that a goal can double as a
//! deterministic assumed effect during planning.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::config::DomainConfiguration;

/// A boolean formula over property-state atoms.
///
/// `And`/`Or` are binary and left-associative; the display form round-trips
/// through the text grammar (`!` binds tighter than `&&`, which binds tighter
/// than `||`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    True,
    False,
    /// Holds iff the configuration maps `property` to exactly `state`.
    Atom { property: String, state: String },
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn atom(property: impl Into<String>, state: impl Into<String>) -> Self {
        Condition::Atom {
            property: property.into(),
            state: state.into(),
        }
    }

    pub fn and(left: Condition, right: Condition) -> Self {
        Condition::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Condition, right: Condition) -> Self {
        Condition::Or(Box::new(left), Box::new(right))
    }

    /// All atoms of the formula, in syntactic order.
    pub fn atoms(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        match self {
            Condition::True | Condition::False => {}
            Condition::Atom { property, state } => out.push((property, state)),
            Condition::Not(inner) => inner.collect_atoms(out),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        // Precedence levels: Or = 0, And = 1, Not = 2, atoms/literals = 3.
        let level = match self {
            Condition::Or(..) => 0,
            Condition::And(..) => 1,
            Condition::Not(..) => 2,
            _ => 3,
        };
        let parens = level < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Condition::True => f.write_str("true")?,
            Condition::False => f.write_str("false")?,
            Condition::Atom { property, state } => write!(f, "{property} = {state}")?,
            Condition::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_prec(f, 2)?;
            }
            Condition::And(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(" && ")?;
                // Right operand one level up keeps the binary tree shape
                // stable under print/parse.
                r.fmt_prec(f, 2)?;
            }
            Condition::Or(l, r) => {
                l.fmt_prec(f, 0)?;
                f.write_str(" || ")?;
                r.fmt_prec(f, 1)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl core::ops::Not for Condition {
    type Output = Condition;

    fn not(self) -> Condition {
        Condition::Not(Box::new(self))
    }
}

/// Evaluation failure: an atom names a property absent from the
/// configuration. On validated models with total configurations this signals
/// a programming bug, not an adaptation trigger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub property: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition references unknown property `{}`", self.property)
    }
}

/// Evaluates a condition against a configuration with standard boolean
/// semantics. An atom holds iff the configuration maps the property to
/// exactly its state.
pub fn eval_condition(cond: &Condition, config: &DomainConfiguration) -> Result<bool, EvalError> {
    match cond {
        Condition::True => Ok(true),
        Condition::False => Ok(false),
        Condition::Atom { property, state } => match config.get(property) {
            Some(current) => Ok(current == state),
            None => Err(EvalError {
                property: property.clone(),
            }),
        },
        Condition::Not(inner) => Ok(!eval_condition(inner, config)?),
        Condition::And(l, r) => Ok(eval_condition(l, config)? && eval_condition(r, config)?),
        Condition::Or(l, r) => Ok(eval_condition(l, config)? || eval_condition(r, config)?),
    }
}

/// A non-empty conjunction of positive atoms with pairwise-distinct
/// properties: the goal form carried by abstract activities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    atoms: Vec<(String, String)>,
}

impl Goal {
    /// Extracts a goal from a condition if it has the required shape
    /// (a non-empty `&&`-chain of atoms). Distinctness of properties is a
    /// validation concern, not a shape concern.
    pub fn from_condition(cond: &Condition) -> Option<Goal> {
        let mut atoms = Vec::new();
        if !flatten_conjunction(cond, &mut atoms) || atoms.is_empty() {
            return None;
        }
        Some(Goal { atoms })
    }

    pub fn atoms(&self) -> &[(String, String)] {
        &self.atoms
    }

    /// Applies every atom as a direct state assignment. Used when planning
    /// treats an abstract activity's goal as an assumed effect.
    pub fn apply_to(&self, config: &DomainConfiguration) -> DomainConfiguration {
        let mut next = config.clone();
        for (property, state) in &self.atoms {
            next.set(property.clone(), state.clone());
        }
        next
    }
}

fn flatten_conjunction(cond: &Condition, out: &mut Vec<(String, String)>) -> bool {
    match cond {
        Condition::Atom { property, state } => {
            out.push((property.clone(), state.clone()));
            true
        }
        Condition::And(l, r) => flatten_conjunction(l, out) && flatten_conjunction(r, out),
        _ => false,
    }
}
