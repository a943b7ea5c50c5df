//! Files and command line for `lowlight-core`.
//!
//! * [`io`]: PNG / binary PPM decoding, 8-bit PNG encoding, curve CSV.
//! * [`report`]: one-line JSON metric reports.
//! * [`cli`]: argument parsing and the batch driver behind the `lowlight` binary.

pub mod cli;
pub mod io;
pub mod report;

pub use lowlight_core as core;
