use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::CommitRecord;
use crate::error::{Error, Result};

/// Where a release cuts the commit stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// History up to and including this commit (full id or unique prefix).
    Commit(String),
    /// The first `n` records of the stream.
    Prefix(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseTag {
    pub name: String,
    pub boundary: Boundary,
}

impl ReleaseTag {
    pub fn at_commit(name: &str, commit: &str) -> Self {
        Self {
            name: name.to_string(),
            boundary: Boundary::Commit(commit.to_string()),
        }
    }

    pub fn at_prefix(name: &str, len: usize) -> Self {
        Self {
            name: name.to_string(),
            boundary: Boundary::Prefix(len),
        }
    }
}

/// Reads `tag_name commit_id` pairs, oldest first. `#` starts a comment line.
pub fn parse_release_list<R: BufRead>(reader: R) -> Result<Vec<ReleaseTag>> {
    let mut releases: Vec<ReleaseTag> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::config(format!("release list line {}: {e}", idx + 1)))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(name), Some(commit), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::config(format!(
                "release list line {}: expected `tag_name commit_id`",
                idx + 1
            )));
        };
        if releases.iter().any(|r| r.name == name) {
            return Err(Error::config(format!("release {name} listed twice")));
        }
        releases.push(ReleaseTag::at_commit(name, commit));
    }
    if releases.is_empty() {
        return Err(Error::config("release list is empty"));
    }
    Ok(releases)
}

/// Resolves each release to a prefix length of `records` (the number of
/// records up to and including the boundary). Lengths must strictly increase.
pub fn resolve_boundaries(records: &[CommitRecord], releases: &[ReleaseTag]) -> Result<Vec<usize>> {
    let mut resolved = Vec::with_capacity(releases.len());
    for release in releases {
        let len = match &release.boundary {
            Boundary::Prefix(n) if *n <= records.len() => *n,
            Boundary::Prefix(n) => {
                return Err(Error::BoundaryNotFound(format!(
                    "{}: prefix {n} exceeds {} records",
                    release.name,
                    records.len()
                )))
            }
            Boundary::Commit(id) => find_commit(records, id)
                .map_err(|m| Error::BoundaryNotFound(format!("{}: {m}", release.name)))?
                + 1,
        };
        if let Some(&prev) = resolved.last() {
            if len <= prev {
                return Err(Error::config(format!(
                    "release {} does not come after its predecessor in the commit stream",
                    release.name
                )));
            }
        }
        resolved.push(len);
    }
    Ok(resolved)
}

fn find_commit(records: &[CommitRecord], id: &str) -> std::result::Result<usize, String> {
    if let Some(pos) = records.iter().position(|r| r.id == id) {
        return Ok(pos);
    }
    if id.len() < 4 {
        return Err(format!("commit {id} not in history"));
    }
    let mut hits = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.id.starts_with(id));
    match (hits.next(), hits.next()) {
        (Some((pos, _)), None) => Ok(pos),
        (Some(_), Some(_)) => Err(format!("commit prefix {id} is ambiguous")),
        (None, _) => Err(format!("commit {id} not in history")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DeveloperId, FileChange};

    fn records(ids: &[&str]) -> Vec<CommitRecord> {
        ids.iter()
            .map(|id| CommitRecord {
                id: id.to_string(),
                author: DeveloperId::new("A", "a@x"),
                timestamp: 0,
                changes: vec![FileChange::modify("f")],
            })
            .collect()
    }

    #[test]
    fn parses_release_list() {
        let rels = parse_release_list("# tags\nv1.0 abc123\n\nv1.1 def456\n".as_bytes()).unwrap();
        assert_eq!(rels, vec![ReleaseTag::at_commit("v1.0", "abc123"), ReleaseTag::at_commit("v1.1", "def456")]);
        assert!(parse_release_list("v1.0\n".as_bytes()).is_err());
        assert!(parse_release_list("".as_bytes()).is_err());
    }

    #[test]
    fn resolves_ids_and_prefixes() {
        let recs = records(&["aaaa1111", "bbbb2222", "cccc3333"]);
        let rels = [
            ReleaseTag::at_commit("r1", "aaaa1111"),
            ReleaseTag::at_commit("r2", "cccc"),
        ];
        assert_eq!(resolve_boundaries(&recs, &rels).unwrap(), vec![1, 3]);
        assert_eq!(
            resolve_boundaries(&recs, &[ReleaseTag::at_prefix("p", 2)]).unwrap(),
            vec![2]
        );
    }

    #[test]
    fn missing_or_unordered_boundaries_fail() {
        let recs = records(&["aaaa1111", "bbbb2222"]);
        let err = resolve_boundaries(&recs, &[ReleaseTag::at_commit("r", "ffff")]).unwrap_err();
        assert!(matches!(err, Error::BoundaryNotFound(_)));
        let err = resolve_boundaries(
            &recs,
            &[ReleaseTag::at_commit("r2", "bbbb2222"), ReleaseTag::at_commit("r1", "aaaa1111")],
        )
        .unwrap_err();
        assert!(err.is_config());
        assert!(resolve_boundaries(&recs, &[ReleaseTag::at_prefix("p", 3)]).is_err());
    }
}
