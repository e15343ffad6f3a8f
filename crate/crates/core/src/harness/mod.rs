//! Datasets, metrics and experiment drivers.

mod dataset;
mod eval;
mod metrics;
mod sweep;
mod table1;

pub use dataset::{gen_pairs, PairDataset, VALUE_BOUND};
pub use eval::{
    instance_seed, key_seed, run_encrypted_eval, run_encrypted_eval_with_keys, EvalReport,
    FailureThresholds, InstanceResult, InstanceStatus, ParamSummary, REPORT_SCHEMA_VERSION,
};
pub use metrics::{gap_bins, ideal_weights, mae, simple_error, simple_error_csv, GapBin};
pub use sweep::{sweep, SkippedPoint, SweepEntry, SweepGrid, SweepMode, SweepPoint, SweepReport};
pub use table1::{grid, run_table1, Table1Report, Table1Row, PUBLISHED_GT, PUBLISHED_GT_HALF};
