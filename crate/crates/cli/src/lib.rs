//! Table building, serialization, and parsing for the `ladle` binary.
//!
//! The writers here define the output contract: fixed column order, floats
//! with six decimal places in CSV, JSON arrays mirroring the same fields.
//! The readers parse those files back, so every emitted table round-trips.

pub mod report;
