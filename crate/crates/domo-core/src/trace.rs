//! Trace records: the engine's append-only account of everything observable.
//!
//! Serialization to JSON Lines lives in the companion crate; the record kinds
//! and their payloads are fixed here.

use alloc::string::String;
use alloc::vec::Vec;

use crate::adaptation::MechanismName;
use crate::engine::FailureReason;

/// Whether an exogenous event changed the configuration or arrived while the
/// property had no transition for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExoOutcome {
    Applied,
    Ignored,
}

impl ExoOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            ExoOutcome::Applied => "applied",
            ExoOutcome::Ignored => "ignored",
        }
    }
}

/// The two layer kinds that are pushed and popped at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracedLayerKind {
    Refinement,
    Adaptation,
}

impl TracedLayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TracedLayerKind::Refinement => "refinement",
            TracedLayerKind::Adaptation => "adaptation",
        }
    }
}

/// One engine or adaptation event. Every record carries the tick it occurred
/// in; instance-scoped records carry the owning domain object's name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceRecord {
    TickStart {
        tick: u64,
    },
    ExoEvent {
        tick: u64,
        property: String,
        event: String,
        outcome: ExoOutcome,
    },
    ActivityExecuted {
        tick: u64,
        instance: String,
        layer: u64,
        activity: String,
    },
    AbstractSkipped {
        tick: u64,
        instance: String,
        activity: String,
    },
    LayerPushed {
        tick: u64,
        instance: String,
        layer: u64,
        layer_kind: TracedLayerKind,
        /// Refinement: the abstract activity being refined. Adaptation: the
        /// mechanism that pushed the layer.
        origin: String,
        /// Plan steps as `owner.fragment` strings.
        plan: Vec<String>,
    },
    LayerPopped {
        tick: u64,
        instance: String,
        layer: u64,
        layer_kind: TracedLayerKind,
    },
    Trigger {
        tick: u64,
        instance: String,
        node: String,
        activity: String,
    },
    MechanismAttempt {
        tick: u64,
        instance: String,
        mechanism: MechanismName,
        success: bool,
    },
    Compensation {
        tick: u64,
        instance: String,
        activity: String,
        plan: Vec<String>,
    },
    InstanceCompleted {
        tick: u64,
        instance: String,
    },
    InstanceFailed {
        tick: u64,
        instance: String,
        reason: FailureReason,
    },
}

impl TraceRecord {
    pub fn kind(&self) -> &'static str {
        match self {
            TraceRecord::TickStart { .. } => "tick_start",
            TraceRecord::ExoEvent { .. } => "exo_event",
            TraceRecord::ActivityExecuted { .. } => "activity_executed",
            TraceRecord::AbstractSkipped { .. } => "abstract_skipped",
            TraceRecord::LayerPushed { .. } => "layer_pushed",
            TraceRecord::LayerPopped { .. } => "layer_popped",
            TraceRecord::Trigger { .. } => "trigger",
            TraceRecord::MechanismAttempt { .. } => "mechanism_attempt",
            TraceRecord::Compensation { .. } => "compensation",
            TraceRecord::InstanceCompleted { .. } => "instance_completed",
            TraceRecord::InstanceFailed { .. } => "instance_failed",
        }
    }

    pub fn tick(&self) -> u64 {
        match self {
            TraceRecord::TickStart { tick }
            | TraceRecord::ExoEvent { tick, .. }
            | TraceRecord::ActivityExecuted { tick, .. }
            | TraceRecord::AbstractSkipped { tick, .. }
            | TraceRecord::LayerPushed { tick, .. }
            | TraceRecord::LayerPopped { tick, .. }
            | TraceRecord::Trigger { tick, .. }
            | TraceRecord::MechanismAttempt { tick, .. }
            | TraceRecord::Compensation { tick, .. }
            | TraceRecord::InstanceCompleted { tick, .. }
            | TraceRecord::InstanceFailed { tick, .. } => *tick,
        }
    }
}
