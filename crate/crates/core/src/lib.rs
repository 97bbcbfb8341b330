//! Core algorithms for mining lane-change scenarios from lidar drive logs.
//!
//! The crate is `no_std` (with `alloc`) and contains no IO. It covers:
//!
//! - [`ingest`]: drive-log domain types and base_link/odom transforms
//! - [`lane_geometry`]: road-point filtering, lane-marking extraction, two-stack
//!   lane construction and lanelet-style gap filling
//! - [`road_model`]: ego reference line, road sections, Frenet conversion and
//!   lane assignment
//! - [`scenario_detect`]: per-vehicle histories, cut-in/cut-out detection and
//!   scenario parameter extraction
//! - [`openx`]: OpenDRIVE / OpenSCENARIO document models and their builders
//! - [`replay`]: a kinematic interpreter for the emitted scenario subset and
//!   trajectory similarity metrics
//! - [`pipeline`]: the end-to-end extraction fold over a drive log
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod config;
pub mod ingest;
pub mod lane_geometry;
pub mod math;
pub mod openx;
pub mod pipeline;
pub mod replay;
pub mod road_model;
pub mod scenario_detect;

pub use config::PipelineConfig;
pub use math::Vec2;
