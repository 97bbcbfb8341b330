//! File formats, synthetic drives and the command-line front end for the
//! scenario extraction pipeline.

pub mod drive_log;
pub mod fsutil;
pub mod synth;
pub mod xml;
pub mod compare_io;
pub mod config;
pub mod debug;
pub mod report;
pub mod commands;
