//! The manifest format: expressions, blocks, their interpretation, the
//! check runner and a numeric probe.

mod expr;
mod model;
mod probe;
mod run;
mod syntax;

pub use expr::{parse_expr, parse_expr_at, Expr, Pos, Scope, Val};
pub use model::{
    linear_matrices, CheckSpec, Manifest, ProbeSpec, SystemSpec, Task, DEFAULT_DOMAIN,
};
pub use probe::{probe_invariance, project, ProbeResult};
pub use run::{exit_code, run_checks, to_json, to_text, Outcome, RunOptions};
pub use syntax::{parse_blocks, Block, Entry, Value};
