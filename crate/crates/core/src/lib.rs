//! Pass valuation for soccer event data.
//!
//! The pipeline partitions the pitch per team with mini-batch k-means over
//! `(x, y, field value)` features, turns the season's passes and shots into an
//! absorbing transition system over possession states, solves it for the
//! expected terminal payoff of every state, and scores each pass by the change
//! in field value it causes.
//!
//! This crate is `no_std` and only needs an allocator. File formats, rendering
//! and the command line live in the `qpass` crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod error;
pub mod event;
pub mod field_value;
pub mod oracle;
pub mod partition;
pub mod qpass;
pub mod synth;

pub use crate::error::{Error, Result};
pub use crate::event::{
    Event, MatchEventLog, PassRecord, Point, PositionGroup, RosterEntry, ShotRecord, TeamEventSet,
};
pub use crate::field_value::{
    FieldValues, StochasticMatrix, TeamValuation, TransitionSystem, ValuationConfig,
};
pub use crate::partition::{
    ClusterAssignment, Clustering, PartitionAssignments, PartitionConfig, ScalerParams,
    TeamPartition,
};
pub use crate::qpass::{GroupCdf, PlayerRanking, QPassRecord};
