//! The versioned JSON envelope around every command result.

use serde::Serialize;
use serde_json::Value;

use crate::Common;

pub const EXIT_VERDICT: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

pub const SCHEMA: &str = "cayleyci-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Result of one command: a text summary, the JSON result body and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub group: Option<String>,
    pub text: String,
    pub result: Value,
    pub exit: i32,
}

#[derive(Serialize)]
struct Budgets {
    nodes: u64,
    enum_cap: usize,
    subgroup_nodes: u64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'static str,
    group: Option<&'a str>,
    seed: u64,
    budgets: Budgets,
    status: &'static str,
    result: &'a Value,
}

pub fn status_name(exit: i32) -> &'static str {
    match exit {
        EXIT_VERDICT => "verdict",
        EXIT_INDETERMINATE => "indeterminate",
        _ => "error",
    }
}

/// Pretty JSON with a trailing newline; the worker count is left out so the
/// bytes depend only on the seed and the inputs.
pub fn render(outcome: &Outcome, common: &Common) -> String {
    let env = Envelope {
        schema: SCHEMA,
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        command: outcome.command,
        group: outcome.group.as_deref(),
        seed: common.seed,
        budgets: Budgets {
            nodes: common.nodes,
            enum_cap: common.enum_cap,
            subgroup_nodes: common.subgroup_nodes,
        },
        status: status_name(outcome.exit),
        result: &outcome.result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("serializable report");
    s.push('\n');
    s
}
