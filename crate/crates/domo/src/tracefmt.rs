//! JSON Lines serialization of trace records.
//!
//! One record per line, fixed key order per kind, no floating point,
//! newline-terminated. Output is byte-deterministic for identical record
//! lists, which is what the engine's determinism contract is measured by.

use std::fmt::Write as _;

use domo_core::trace::TraceRecord;

use crate::json::escape_string;

pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for record in records {
        write_record(&mut out, record);
        out.push('\n');
    }
    out
}

fn plan_array(plan: &[String]) -> String {
    let items: Vec<String> = plan.iter().map(|s| escape_string(s)).collect();
    format!("[{}]", items.join(","))
}

fn write_record(out: &mut String, record: &TraceRecord) {
    match record {
        TraceRecord::TickStart { tick } => {
            let _ = write!(out, "{{\"tick\":{tick},\"kind\":\"tick_start\"}}");
        }
        TraceRecord::ExoEvent {
            tick,
            property,
            event,
            outcome,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"kind\":\"exo_event\",\"property\":{},\"event\":{},\"outcome\":\"{}\"}}",
                escape_string(property),
                escape_string(event),
                outcome.as_str()
            );
        }
        TraceRecord::ActivityExecuted {
            tick,
            instance,
            layer,
            activity,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"activity_executed\",\"layer\":{layer},\"activity\":{}}}",
                escape_string(instance),
                escape_string(activity)
            );
        }
        TraceRecord::AbstractSkipped {
            tick,
            instance,
            activity,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"abstract_skipped\",\"activity\":{}}}",
                escape_string(instance),
                escape_string(activity)
            );
        }
        TraceRecord::LayerPushed {
            tick,
            instance,
            layer,
            layer_kind,
            origin,
            plan,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"layer_pushed\",\"layer\":{layer},\"layer_kind\":\"{}\",\"origin\":{},\"plan\":{}}}",
                escape_string(instance),
                layer_kind.as_str(),
                escape_string(origin),
                plan_array(plan)
            );
        }
        TraceRecord::LayerPopped {
            tick,
            instance,
            layer,
            layer_kind,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"layer_popped\",\"layer\":{layer},\"layer_kind\":\"{}\"}}",
                escape_string(instance),
                layer_kind.as_str()
            );
        }
        TraceRecord::Trigger {
            tick,
            instance,
            node,
            activity,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"trigger\",\"trigger\":\"precondition_violation\",\"node\":{},\"activity\":{}}}",
                escape_string(instance),
                escape_string(node),
                escape_string(activity)
            );
        }
        TraceRecord::MechanismAttempt {
            tick,
            instance,
            mechanism,
            success,
        } => {
            let outcome = if *success { "success" } else { "failure" };
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"mechanism_attempt\",\"mechanism\":\"{}\",\"outcome\":\"{outcome}\"}}",
                escape_string(instance),
                mechanism.as_str()
            );
        }
        TraceRecord::Compensation {
            tick,
            instance,
            activity,
            plan,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"compensation\",\"activity\":{},\"plan\":{}}}",
                escape_string(instance),
                escape_string(activity),
                plan_array(plan)
            );
        }
        TraceRecord::InstanceCompleted { tick, instance } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"instance_completed\"}}",
                escape_string(instance)
            );
        }
        TraceRecord::InstanceFailed {
            tick,
            instance,
            reason,
        } => {
            let _ = write!(
                out,
                "{{\"tick\":{tick},\"instance\":{},\"kind\":\"instance_failed\",\"reason\":\"{}\"}}",
                escape_string(instance),
                reason.as_str()
            );
        }
    }
}
