//! Dynamic community detection on link streams.
//!
//! A link stream records instantaneous interactions `(u, v, t)` at their
//! native time resolution. Dynamic communities assign node-time pairs to
//! mutually exclusive groups whose membership intervals can start and end at
//! arbitrary ticks. This crate scores such structures with longitudinal
//! modularity (two null-model variants, switch-penalty weight `omega`) and
//! searches for good structures with a family of greedy agglomerative
//! optimizers that move blocks of active time nodes between communities.
//!
//! The crate also ships a synthetic scenario generator with planted ground
//! truth, comparison metrics (normalized variation of information), and
//! variant ranking utilities for benchmark harnesses.

pub mod benchgen;
pub mod community;
mod engine;
pub mod linkstream;
pub mod metrics;
pub mod optimizer;
pub mod quality;

#[doc(hidden)]
pub mod testkit;

pub use community::{
    Community, CommunityId, DynamicCommunityStructure, FileMeta, MoveTarget, Run, Violation,
};
pub use linkstream::{
    infer_tick, ActiveTimeNode, ColumnOrder, LinkStream, NodeId, ParseOptions, TickMode,
};
pub use quality::{Expectation, QualityBreakdown, QualityConfig};
