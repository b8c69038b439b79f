//! Scenario scripts: hand-authorable exogenous event schedules.
//!
//! One event per line as `TICK PROPERTY EVENT`, whitespace separated. Blank
//! lines are ignored, `#` starts a comment. Ticks are non-negative integers;
//! entries at the same tick apply in file order.

use domo_core::engine::{ScenarioEvent, ScenarioScript};

use crate::document::ParseDiagnostic;

pub fn parse_scenario(text: &str) -> Result<ScenarioScript, Vec<ParseDiagnostic>> {
    let mut events = Vec::new();
    let mut diagnostics = Vec::new();

    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let mut report = |message: String| {
            diagnostics.push(ParseDiagnostic {
                line: line_no,
                column: 1,
                path: format!("line {line_no}"),
                message,
            });
        };
        let [tick, property, event] = tokens[..] else {
            report(format!(
                "expected `TICK PROPERTY EVENT`, found {} tokens",
                tokens.len()
            ));
            continue;
        };
        let tick = if tick.starts_with('-') {
            report(format!("negative tick `{tick}`"));
            continue;
        } else {
            match tick.parse::<u64>() {
                Ok(t) => t,
                Err(_) => {
                    report(format!("`{tick}` is not an integer tick"));
                    continue;
                }
            }
        };
        events.push(ScenarioEvent {
            tick,
            property: property.into(),
            event: event.into(),
        });
    }

    if diagnostics.is_empty() {
        Ok(ScenarioScript { events })
    } else {
        Err(diagnostics)
    }
}
