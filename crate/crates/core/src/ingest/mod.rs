//! Commit-history ingestion: log parsing, identity canonicalization, path
//! filtering and release snapshots.

mod alias;
mod filter;
mod log;
mod release;
mod snapshot;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use alias::{resolve_aliases, AliasMap};
pub use filter::{apply_path_filters, PathFilter};
pub use log::{parse_commit_log, parse_commit_logs};
pub use release::{parse_release_list, resolve_boundaries, Boundary, ReleaseTag};
pub use snapshot::{
    snapshot_at, DevIdx, FileHistory, FileId, IngestWarning, ReleaseSnapshot, SnapshotBuilder,
};

/// Canonical developer identity. Ordering is by email first so that every
/// report iterates developers in email order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeveloperId {
    pub name: String,
    pub email: String,
}

impl DeveloperId {
    /// Builds an identity with the name trimmed and the email trimmed and lowercased.
    pub fn new(name: &str, email: &str) -> Self {
        Self {
            name: name.trim().to_string(),
            email: email.trim().to_lowercase(),
        }
    }
}

impl Ord for DeveloperId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.email
            .cmp(&other.email)
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl PartialOrd for DeveloperId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DeveloperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}>", self.name, self.email)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChangeKind {
    Add,
    Modify,
    Delete,
    Rename,
}

/// One file touched by a commit. `old_path` is set exactly for renames.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    pub kind: ChangeKind,
    pub path: String,
    pub old_path: Option<String>,
}

impl FileChange {
    pub fn add(path: &str) -> Self {
        Self::simple(ChangeKind::Add, path)
    }

    pub fn modify(path: &str) -> Self {
        Self::simple(ChangeKind::Modify, path)
    }

    pub fn delete(path: &str) -> Self {
        Self::simple(ChangeKind::Delete, path)
    }

    pub fn rename(old_path: &str, new_path: &str) -> Self {
        Self {
            kind: ChangeKind::Rename,
            path: new_path.to_string(),
            old_path: Some(old_path.to_string()),
        }
    }

    fn simple(kind: ChangeKind, path: &str) -> Self {
        Self {
            kind,
            path: path.to_string(),
            old_path: None,
        }
    }
}

/// A non-merge commit, attributed to its author.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub id: String,
    pub author: DeveloperId,
    pub timestamp: i64,
    pub changes: Vec<FileChange>,
}

/// Normalizes a repository-relative path: forward slashes, no leading `./`,
/// no empty or `.` segments. `..` segments and empty paths are rejected.
pub fn normalize_path(raw: &str) -> Result<String> {
    let unified = raw.replace('\\', "/");
    let mut segments = Vec::new();
    for segment in unified.split('/') {
        match segment {
            "" | "." => continue,
            ".." => return Err(Error::domain(format!("path {raw:?} contains '..'"))),
            s => segments.push(s),
        }
    }
    if segments.is_empty() {
        return Err(Error::domain(format!("path {raw:?} is empty")));
    }
    Ok(segments.join("/"))
}
