//! Batch harness for the weight-analysis toolkit.
//!
//! Three layers, used in order by the `weightlab` binary:
//!
//! * [`config`] — the experiment description: a small `key=value` text
//!   format with a fixed vocabulary, parsed into [`config::ExperimentConfig`]
//!   with line- and key-addressed errors, and serialized back canonically.
//! * [`run`] — executes the configured analyses sequentially and flattens
//!   every report into uniform rows.
//! * [`report`] — the row schema and its CSV/JSON encodings, written so
//!   identical runs produce identical bytes.

pub mod config;
pub mod report;
pub mod run;
