//! Command-line front end for `otmcall`: parameter sweeps of the OTM option
//! strategy, single-contract valuation, measure-ratio tables, the unit-budget
//! digital checks, and smile curves, all written as CSV.

pub mod commands;
pub mod settings;
pub mod svg;
pub mod table;

pub use commands::{
    error_kind, run_appendix_checks, run_price, run_ratio, run_simulate, run_smile, run_sweep, Output,
};
pub use settings::Settings;
pub use table::{fmt_num, Cell, Table};
