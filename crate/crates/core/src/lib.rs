//! Code authorship analytics over version-control histories.
//!
//! Commit logs are replayed once to accumulate first-authorship, delivery and
//! acceptance counters per file and developer. At every release the counters
//! feed the degree-of-authorship model, which decides who authors each live
//! file. On top of that authorship map the crate computes author proportions,
//! files-per-author distributions, specialist/generalist profiles and
//! co-authorship network metrics, for the whole tree and per subsystem.

pub mod doa;
pub mod error;
pub mod ingest;
pub mod network;
pub mod pattern;
pub mod pipeline;
pub mod profiles;
pub mod report;
pub mod stats;
pub mod subsystem;

pub use doa::{AuthorshipMap, DoaModel, DoaThresholds, DoaWeights, FileDevCounters};
pub use error::{Error, Result};
pub use ingest::{CommitRecord, DeveloperId, FileChange, ReleaseSnapshot, ReleaseTag};
pub use subsystem::{Scope, SubsystemRules};
