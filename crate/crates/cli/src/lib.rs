//! Command-line front end for `coherence-core`: QSTATE v1 files, the
//! coherence sweep CSV, and the reproduction table of worked examples.

pub mod commands;
pub mod examples;
pub mod figure1;
pub mod qstate;
