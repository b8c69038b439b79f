//! File formats and IO for the domo engine: strict JSON model documents with
//! line/column diagnostics, scenario scripts, JSON Lines traces, and the
//! condition-string grammar. The semantics live in `domo-core`; this crate
//! owns every bit-exact external format and the `domo` command-line tool.

pub mod cond;
pub mod document;
pub mod json;
pub mod scenario;
pub mod tracefmt;

pub use cond::{parse_condition, CondError};
pub use document::{parse_model, serialize_model, ParseDiagnostic};
pub use scenario::parse_scenario;
pub use tracefmt::write_trace;
