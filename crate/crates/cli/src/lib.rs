//! Batch front end: parse a JSON workspace, run its commands, print a report.

pub mod run;
pub mod workspace;

pub use run::{run, Report, RunOptions};
pub use workspace::{parse, parse_document, serialize_document, validate, Document, Workspace, WorkspaceError};

/// Environment variable overriding the default search budget.
pub const BUDGET_ENV: &str = "FINMODEL_BUDGET";
