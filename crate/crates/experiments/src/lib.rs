//! Simulation studies for operator regression under discrete measures: grid
//! and sample-size sweeps, the conditioning comparison, consistency runs and
//! figure-data export.

pub mod cell;
pub mod checks;
pub mod consistency;
pub mod figures;
pub mod output;
pub mod selftest;
pub mod study;
pub mod sweep;

use opmeasure_core::Error;

pub use study::{Study, StudyPlan, StudyRegistry};
pub use sweep::{AggregateRow, ResultRow, SweepResult};

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidMeasure { .. }
        | Error::CaseMismatch { .. } => 2,
        Error::Io(_) | Error::Csv(_) => 3,
        Error::DegenerateDesign => 4,
        _ => 1,
    }
}
