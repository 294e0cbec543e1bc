//! Degree-of-authorship (DOA) evaluation.
//!
//! The absolute score of developer `d` on file `f` is
//!
//! ```text
//! DOA_A = 3.293 + 1.098 * FA + 0.164 * DL - 0.321 * ln(1 + AC)
//! ```
//!
//! where FA marks the creator, DL counts commits by `d` touching `f` and AC
//! counts commits by everyone else touching `f`. The normalized score divides
//! by the file's best absolute score. A developer is an author of `f` when the
//! normalized score is strictly above 0.75 and the absolute score is at least
//! 3.293.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{DevIdx, DeveloperId, FileHistory, FileId, ReleaseSnapshot};
use crate::subsystem::Scope;

/// First-authorship, delivery and acceptance counts of one developer on one file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FileDevCounters {
    pub fa: u8,
    pub dl: u64,
    pub ac: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoaWeights {
    pub intercept: f64,
    pub first_authorship: f64,
    pub deliveries: f64,
    pub acceptances: f64,
}

impl Default for DoaWeights {
    fn default() -> Self {
        Self {
            intercept: 3.293,
            first_authorship: 1.098,
            deliveries: 0.164,
            acceptances: 0.321,
        }
    }
}

impl DoaWeights {
    pub fn absolute(&self, c: FileDevCounters) -> f64 {
        self.intercept + self.first_authorship * f64::from(c.fa) + self.deliveries * c.dl as f64
            - self.acceptances * (c.ac as f64).ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoaThresholds {
    pub normalized_floor: f64,
    pub absolute_floor: f64,
}

impl Default for DoaThresholds {
    fn default() -> Self {
        Self {
            normalized_floor: 0.75,
            absolute_floor: 3.293,
        }
    }
}

impl DoaThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.normalized_floor > 0.0 && self.normalized_floor <= 1.0) {
            return Err(Error::config(format!(
                "normalized floor must lie in (0, 1], got {}",
                self.normalized_floor
            )));
        }
        if self.absolute_floor.is_nan() || self.absolute_floor <= 0.0 {
            return Err(Error::config(format!(
                "absolute floor must be positive, got {}",
                self.absolute_floor
            )));
        }
        Ok(())
    }

    /// Strict on the normalized floor, inclusive on the absolute floor. No epsilon.
    pub fn admits(&self, doa_absolute: f64, doa_normalized: f64) -> bool {
        doa_normalized > self.normalized_floor && doa_absolute >= self.absolute_floor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DoaModel {
    pub weights: DoaWeights,
    pub thresholds: DoaThresholds,
}

/// Absolute DOA under the default weights.
pub fn doa_absolute(c: FileDevCounters) -> f64 {
    DoaWeights::default().absolute(c)
}

/// Normalized DOA of `dev` on `file`.
pub fn doa_normalized(dev: DevIdx, file: &FileHistory, weights: &DoaWeights) -> Result<f64> {
    let own = file
        .counters(dev)
        .ok_or_else(|| Error::domain(format!("developer {} never changed {}", dev.0, file.path)))?;
    let best = max_absolute(file, weights)?;
    Ok(weights.absolute(own) / best)
}

fn max_absolute(file: &FileHistory, weights: &DoaWeights) -> Result<f64> {
    let best = file
        .changed()
        .filter_map(|d| file.counters(d))
        .map(|c| weights.absolute(c))
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_finite() && best > 0.0 {
        Ok(best)
    } else if file.deliveries.is_empty() {
        Err(Error::domain(format!("{} has no commits", file.path)))
    } else {
        Err(Error::Degenerate(format!(
            "maximum absolute DOA of {} is {best}",
            file.path
        )))
    }
}

/// Developers passing both thresholds on `file`, in developer-table order.
pub fn authors_of(file: &FileHistory, model: &DoaModel) -> Result<Vec<DevIdx>> {
    Ok(evaluate(file, model)?
        .into_iter()
        .filter(|e| e.is_author)
        .map(|e| e.developer)
        .collect())
}

fn evaluate(file: &FileHistory, model: &DoaModel) -> Result<Vec<DoaEntry>> {
    let best = max_absolute(file, &model.weights)?;
    Ok(file
        .changed()
        .map(|dev| {
            let counters = file.counters(dev).expect("changed developer has counters");
            let doa_absolute = model.weights.absolute(counters);
            let doa_normalized = doa_absolute / best;
            DoaEntry {
                developer: dev,
                counters,
                doa_absolute,
                doa_normalized,
                is_author: model.thresholds.admits(doa_absolute, doa_normalized),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoaEntry {
    pub developer: DevIdx,
    pub counters: FileDevCounters,
    pub doa_absolute: f64,
    pub doa_normalized: f64,
    pub is_author: bool,
}

/// DOA evaluation of one live file. Entries are ordered by developer email.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileAuthorship {
    pub path: String,
    pub file: FileId,
    pub entries: Vec<DoaEntry>,
}

impl FileAuthorship {
    pub fn authors(&self) -> impl Iterator<Item = DevIdx> + '_ {
        self.entries.iter().filter(|e| e.is_author).map(|e| e.developer)
    }

    pub fn is_author(&self, dev: DevIdx) -> bool {
        self.entries.iter().any(|e| e.developer == dev && e.is_author)
    }

    pub fn entry(&self, dev: DevIdx) -> Option<&DoaEntry> {
        self.entries.iter().find(|e| e.developer == dev)
    }
}

/// File-to-authors mapping over the live files of a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorshipMap {
    release: String,
    developers: Vec<DeveloperId>,
    files: Vec<FileAuthorship>,
}

impl AuthorshipMap {
    pub fn build(snapshot: &ReleaseSnapshot, model: &DoaModel) -> Result<Self> {
        let developers = snapshot.developers().to_vec();
        let mut rank: Vec<(usize, &DeveloperId)> = developers.iter().enumerate().collect();
        rank.sort_by(|a, b| a.1.cmp(b.1));
        let mut order = vec![0usize; developers.len()];
        for (pos, (idx, _)) in rank.into_iter().enumerate() {
            order[idx] = pos;
        }

        let mut files = Vec::with_capacity(snapshot.live_count());
        for (path, id) in snapshot.live_files() {
            let mut entries =
                evaluate(snapshot.file(id), model).map_err(|e| e.context(format!("file {path}")))?;
            entries.sort_by_key(|e| order[e.developer.0 as usize]);
            files.push(FileAuthorship {
                path: path.to_string(),
                file: id,
                entries,
            });
        }
        Ok(Self {
            release: snapshot.release().name.clone(),
            developers,
            files,
        })
    }

    pub fn release(&self) -> &str {
        &self.release
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

    /// Live files ordered by path.
    pub fn files(&self) -> &[FileAuthorship] {
        &self.files
    }

    pub fn file(&self, path: &str) -> Option<&FileAuthorship> {
        self.files
            .binary_search_by(|f| f.path.as_str().cmp(path))
            .ok()
            .map(|i| &self.files[i])
    }

    pub fn files_in<'a>(&'a self, scope: &'a Scope<'a>) -> impl Iterator<Item = &'a FileAuthorship> + 'a {
        self.files.iter().filter(move |f| scope.includes(&f.path))
    }

    /// Number of live files in scope each author owns, keyed by developer.
    pub fn authored_counts(&self, scope: &Scope<'_>) -> BTreeMap<DevIdx, usize> {
        let mut counts = BTreeMap::new();
        for file in self.files_in(scope) {
            for dev in file.authors() {
                *counts.entry(dev).or_insert(0) += 1;
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuthorProportion {
    pub developers: usize,
    pub authors: usize,
    pub proportion: f64,
}

/// Share of developers active in scope who author at least one live file in it.
pub fn author_proportion(map: &AuthorshipMap, scope: &Scope<'_>) -> Result<AuthorProportion> {
    let mut developers = std::collections::BTreeSet::new();
    let mut authors = std::collections::BTreeSet::new();
    let mut any = false;
    for file in map.files_in(scope) {
        any = true;
        for e in &file.entries {
            developers.insert(e.developer);
            if e.is_author {
                authors.insert(e.developer);
            }
        }
    }
    if !any {
        return Err(Error::domain(format!("scope {} has no live files", scope.name())));
    }
    Ok(AuthorProportion {
        developers: developers.len(),
        authors: authors.len(),
        proportion: authors.len() as f64 / developers.len() as f64,
    })
}
