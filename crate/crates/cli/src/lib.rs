//! Report assembly and verification suites behind the `qhj` binary.

pub mod report;
pub mod suites;

pub use report::{error_kind, format_number, Check, Limit, Report, Table, FORMAT_VERSION};
pub use suites::{check_suite, classical_table, kernel_table, magnetic_suite, propagate_table, GaussianState};
