//! Ground truth at small scale: exact solvers and result comparison.

pub mod augment;
pub mod exact;
pub mod report;
pub mod small;

pub use augment::{augment_to_simple, Augmentation};
pub use exact::{
    brute_force_opt, fingerprint, opt_by_partitions, opt_by_subsets, OracleError, OracleLimits, OracleMethod,
    OracleResult,
};
pub use report::{report, Report, ReportRow};
pub use small::{connected_graphs, SmallGraph};
