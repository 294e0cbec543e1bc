use super::CommitRecord;
use crate::error::Result;
use crate::pattern::PathPattern;

/// Ordered exclusion rules. A change is dropped when its path, or the source
/// path of a rename, matches any rule.
#[derive(Debug, Clone, Default)]
pub struct PathFilter {
    rules: Vec<PathPattern>,
}

impl PathFilter {
    pub fn new<S: AsRef<str>>(patterns: impl IntoIterator<Item = S>) -> Result<Self> {
        let rules = patterns
            .into_iter()
            .map(|p| PathPattern::new(p.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rules })
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.rules.iter().map(PathPattern::as_str)
    }

    pub fn is_excluded(&self, path: &str) -> bool {
        self.rules.iter().any(|r| r.matches(path))
    }

    /// Filters one record; `None` when no change survives.
    pub fn filter_record(&self, mut record: CommitRecord) -> Option<CommitRecord> {
        if !self.rules.is_empty() {
            record.changes.retain(|c| {
                !self.is_excluded(&c.path)
                    && !c.old_path.as_deref().is_some_and(|old| self.is_excluded(old))
            });
        }
        (!record.changes.is_empty()).then_some(record)
    }
}

pub fn apply_path_filters(records: Vec<CommitRecord>, filter: &PathFilter) -> Vec<CommitRecord> {
    records
        .into_iter()
        .filter_map(|r| filter.filter_record(r))
        .collect()
}
