#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Command-line runner for `smst-core`: configuration, seeded parallel
//! sweeps, file formats and report tables.

pub mod config;
pub mod formats;
pub mod manifest;
pub mod numerics;
pub mod report;
pub mod simulate;
