//! JSON-lines step traces.

use serde::{Serialize, Serializer};

use crate::engine::StepRecord;
use crate::workstr::{render, Symbol};
use crate::Mode;

pub(crate) fn serialize_symbols<S: Serializer>(symbols: &[Symbol], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render(symbols))
}

#[derive(Serialize)]
struct Line<'a> {
    #[serde(flatten)]
    step: &'a StepRecord,
    mode: &'static str,
}

/// One JSON object per step, newline terminated.
pub fn to_json_lines(trace: &[StepRecord], mode: Mode) -> String {
    let mut out = String::new();
    for step in trace {
        out.push_str(&serde_json::to_string(&Line { step, mode: mode.name() }).expect("trace serializes"));
        out.push('\n');
    }
    out
}
