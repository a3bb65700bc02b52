//! Experiment harness around `mdrk-core`: convergence sweeps, conditioning sweeps and
//! single integrations, written as CSV tables, plus SVG charts of those tables.

pub mod cli;
pub mod error;
pub mod plot;
pub mod record;
pub mod reference;
pub mod sweep;

pub use error::{LabError, Result};
pub use record::RunRecord;
pub use reference::ReferencePolicy;
pub use sweep::{conditioning, convergence, single_run, MethodChoice};
