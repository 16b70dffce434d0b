//! Batch front end: the staged run over a curve file and its period cache.

mod cache;
mod report;
mod run;
mod spec;

pub use cache::{CachedPeriods, PeriodCache};
pub use report::{Check, RunReport};
pub use run::{partition_pairs, relative_defect, run, Command, Tolerances};
pub use spec::{parse_point, BallSpec, CurveSpec};
