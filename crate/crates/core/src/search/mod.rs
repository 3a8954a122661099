//! Finite searches: primorial walks, candidate boxes, reports, and the
//! theorem verification drivers.

pub mod boxes;
pub mod brute;
pub mod common;
pub mod interval;
pub mod primorial;
pub mod reference;
pub mod report;
pub mod tables;
pub mod thm1;
pub mod thm2;
pub mod thm3;
pub mod thm4;
pub mod thm5;

pub use brute::brute_check;
pub use boxes::{enumerate_box, union_box, BoxOutcome, CandidateBox, EnumerateOptions, Scored};
pub use interval::{Interval44, IntervalGrid, Window, INTERVAL_COUNT, K44};
pub use primorial::{canonicalize, for_each_canonical, smooth_numbers, u_of};
pub use report::{Check, CheckpointLog, CheckpointRecord, Exhaustion, Status, VerificationReport, Witness};
pub use thm1::verify_thm1;
pub use thm2::verify_thm2;
pub use thm3::verify_thm3;
pub use thm4::verify_thm4;
pub use thm5::{verify_thm5, Phase, Thm5Options};
