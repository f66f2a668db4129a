//! Verification checks, exponent scans and reports for restricted averaging
//! operators over cones in `F_q^d`.

pub mod checks;
pub mod error;
pub mod hull;
pub mod report;
pub mod scan;
pub mod slope;

pub use error::{LabError, LabResult};
