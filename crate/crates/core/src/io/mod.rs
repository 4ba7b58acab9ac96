//! On-disk formats: bundle JSON, free MPS, trace JSON lines, stats CSV.

pub mod bundle;
pub mod mps;
pub mod stats;
pub mod trace;

pub use bundle::{export_json, import_json, InstanceBundle, Provenance, BUNDLE_SCHEMA};
pub use mps::{export_mps, to_mps_string};
pub use stats::{stats_csv, summarize_batch, BatchSummary};
pub use trace::{read_trace, write_trace_line, TraceRecord};
