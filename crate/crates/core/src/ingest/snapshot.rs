//! One-pass accumulation of per-file authorship counters.
//!
//! [`SnapshotBuilder`] consumes filtered commit records oldest-first and can
//! be frozen into an immutable [`ReleaseSnapshot`] at every release boundary,
//! so a whole release sequence costs a single pass over the history.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{resolve_boundaries, ChangeKind, CommitRecord, DeveloperId, ReleaseTag};
use crate::doa::FileDevCounters;
use crate::error::Result;

/// Index of a developer in the snapshot's developer table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DevIdx(pub u32);

/// Logical file identity. Survives renames when renames are followed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FileId(pub u32);

/// Accumulated history of one logical file.
///
/// `commits` counts commits touching the file; `deliveries` counts them per
/// developer. Acceptances are derived as `commits - deliveries`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHistory {
    pub path: String,
    pub creator: Option<DevIdx>,
    pub created_at: usize,
    pub commits: u64,
    pub deliveries: BTreeMap<DevIdx, u64>,
}

impl FileHistory {
    pub fn counters(&self, dev: DevIdx) -> Option<FileDevCounters> {
        let dl = *self.deliveries.get(&dev)?;
        Some(FileDevCounters {
            fa: u8::from(self.creator == Some(dev)),
            dl,
            ac: self.commits - dl,
        })
    }

    /// Developers who committed to the file, in developer-table order.
    pub fn changed(&self) -> impl Iterator<Item = DevIdx> + '_ {
        self.deliveries.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IngestWarning {
    /// Modify, delete or rename of a path that was never created; the file is
    /// created implicitly without a first author.
    UnknownPath { commit: String, path: String, kind: ChangeKind },
    /// Add of a path that is already live; treated as a modification.
    DuplicateAdd { commit: String, path: String },
    /// Rename onto a live path; the previous file at that path stops being live.
    RenameOverwrite { commit: String, path: String },
}

#[derive(Debug, Clone)]
pub struct SnapshotBuilder {
    follow_renames: bool,
    developers: Vec<DeveloperId>,
    dev_index: HashMap<DeveloperId, DevIdx>,
    files: Vec<FileHistory>,
    live: BTreeMap<String, FileId>,
    applied: usize,
    warnings: Vec<IngestWarning>,
}

impl SnapshotBuilder {
    pub fn new(follow_renames: bool) -> Self {
        Self {
            follow_renames,
            developers: Vec::new(),
            dev_index: HashMap::new(),
            files: Vec::new(),
            live: BTreeMap::new(),
            applied: 0,
            warnings: Vec::new(),
        }
    }

    pub fn warnings(&self) -> &[IngestWarning] {
        &self.warnings
    }

    /// Number of records applied so far.
    pub fn applied(&self) -> usize {
        self.applied
    }

    pub fn apply(&mut self, record: &CommitRecord) {
        let ordinal = self.applied;
        self.applied += 1;
        if record.changes.is_empty() {
            return;
        }
        let dev = self.intern(&record.author);
        let mut touched: Vec<FileId> = Vec::with_capacity(record.changes.len());

        for change in &record.changes {
            match change.kind {
                ChangeKind::Add => {
                    let id = match self.live.get(&change.path) {
                        Some(&id) => {
                            self.warn(IngestWarning::DuplicateAdd {
                                commit: record.id.clone(),
                                path: change.path.clone(),
                            });
                            id
                        }
                        None => self.create(&change.path, Some(dev), ordinal),
                    };
                    touched.push(id);
                }
                ChangeKind::Modify => {
                    let id = self.live_or_implicit(record, &change.path, change.kind, ordinal);
                    touched.push(id);
                }
                ChangeKind::Delete => {
                    let id = self.live_or_implicit(record, &change.path, change.kind, ordinal);
                    self.live.remove(&change.path);
                    touched.push(id);
                }
                ChangeKind::Rename => {
                    let old = change.old_path.as_deref().unwrap_or(&change.path);
                    let ids = self.rename(record, old, &change.path, dev, ordinal);
                    touched.extend(ids);
                }
            }
        }

        touched.sort_unstable();
        touched.dedup();
        for id in touched {
            let file = &mut self.files[id.0 as usize];
            file.commits += 1;
            *file.deliveries.entry(dev).or_insert(0) += 1;
        }
    }

    pub fn freeze(&self, release: ReleaseTag) -> ReleaseSnapshot {
        ReleaseSnapshot {
            release,
            developers: self.developers.clone(),
            files: self.files.clone(),
            live: self.live.clone(),
            commits_applied: self.applied,
        }
    }

    fn intern(&mut self, author: &DeveloperId) -> DevIdx {
        if let Some(&idx) = self.dev_index.get(author) {
            return idx;
        }
        let idx = DevIdx(self.developers.len() as u32);
        self.developers.push(author.clone());
        self.dev_index.insert(author.clone(), idx);
        idx
    }

    fn create(&mut self, path: &str, creator: Option<DevIdx>, ordinal: usize) -> FileId {
        let id = FileId(self.files.len() as u32);
        self.files.push(FileHistory {
            path: path.to_string(),
            creator,
            created_at: ordinal,
            commits: 0,
            deliveries: BTreeMap::new(),
        });
        self.live.insert(path.to_string(), id);
        id
    }

    fn live_or_implicit(&mut self, record: &CommitRecord, path: &str, kind: ChangeKind, ordinal: usize) -> FileId {
        if let Some(&id) = self.live.get(path) {
            return id;
        }
        self.warn(IngestWarning::UnknownPath {
            commit: record.id.clone(),
            path: path.to_string(),
            kind,
        });
        self.create(path, None, ordinal)
    }

    fn rename(&mut self, record: &CommitRecord, old: &str, new: &str, dev: DevIdx, ordinal: usize) -> Vec<FileId> {
        let source = self.live.get(old).copied();
        if source.is_none() {
            self.warn(IngestWarning::UnknownPath {
                commit: record.id.clone(),
                path: old.to_string(),
                kind: ChangeKind::Rename,
            });
        }

        if self.follow_renames {
            let id = match source {
                Some(id) => {
                    self.live.remove(old);
                    id
                }
                None if self.live.contains_key(new) => return vec![self.live[new]],
                None => return vec![self.create(new, None, ordinal)],
            };
            if let Some(displaced) = self.live.insert(new.to_string(), id) {
                if displaced != id {
                    self.warn(IngestWarning::RenameOverwrite {
                        commit: record.id.clone(),
                        path: new.to_string(),
                    });
                }
            }
            self.files[id.0 as usize].path = new.to_string();
            vec![id]
        } else {
            let mut ids = Vec::with_capacity(2);
            if let Some(id) = source {
                self.live.remove(old);
                ids.push(id);
            }
            if self.live.contains_key(new) {
                self.warn(IngestWarning::RenameOverwrite {
                    commit: record.id.clone(),
                    path: new.to_string(),
                });
                self.live.remove(new);
            }
            ids.push(self.create(new, Some(dev), ordinal));
            ids
        }
    }

    fn warn(&mut self, warning: IngestWarning) {
        log::warn!("{warning:?}");
        self.warnings.push(warning);
    }
}

/// Immutable view of the history up to one release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseSnapshot {
    release: ReleaseTag,
    developers: Vec<DeveloperId>,
    files: Vec<FileHistory>,
    live: BTreeMap<String, FileId>,
    commits_applied: usize,
}

impl ReleaseSnapshot {
    pub fn release(&self) -> &ReleaseTag {
        &self.release
    }

    /// Every developer seen touching a file up to the release.
    pub fn developers(&self) -> &[DeveloperId] {
        &self.developers
    }

    pub fn developer(&self, idx: DevIdx) -> &DeveloperId {
        &self.developers[idx.0 as usize]
    }

    pub fn developer_index(&self, id: &DeveloperId) -> Option<DevIdx> {
        self.developers
            .iter()
            .position(|d| d == id)
            .map(|p| DevIdx(p as u32))
    }

    /// All logical files ever created, live or not.
    pub fn files(&self) -> &[FileHistory] {
        &self.files
    }

    pub fn file(&self, id: FileId) -> &FileHistory {
        &self.files[id.0 as usize]
    }

    /// Live files ordered by path.
    pub fn live_files(&self) -> impl Iterator<Item = (&str, FileId)> + '_ {
        self.live.iter().map(|(p, &id)| (p.as_str(), id))
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn live_file(&self, path: &str) -> Option<FileId> {
        self.live.get(path).copied()
    }

    pub fn counters(&self, file: FileId, dev: DevIdx) -> Option<FileDevCounters> {
        self.file(file).counters(dev)
    }

    pub fn commits_applied(&self) -> usize {
        self.commits_applied
    }

    /// Canonical JSON form; equal snapshots serialize to equal bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }
}

/// Builds the snapshot for one release from scratch.
pub fn snapshot_at(records: &[CommitRecord], release: &ReleaseTag, follow_renames: bool) -> Result<ReleaseSnapshot> {
    let len = resolve_boundaries(records, std::slice::from_ref(release))?[0];
    let mut builder = SnapshotBuilder::new(follow_renames);
    for record in &records[..len] {
        builder.apply(record);
    }
    Ok(builder.freeze(release.clone()))
}
