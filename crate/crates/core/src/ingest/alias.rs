use std::collections::HashMap;
use std::io::BufRead;

use regex::Regex;

use super::{CommitRecord, DeveloperId};
use crate::error::{Error, Result};

/// Exact-match identity aliases: raw `(name, email)` to canonical identity.
///
/// Keys are trimmed and the email lowercased. Chains (`a = b`, `b = c`) are
/// collapsed at construction, so resolution is idempotent.
#[derive(Debug, Clone, Default)]
pub struct AliasMap {
    entries: HashMap<DeveloperId, DeveloperId>,
}

impl AliasMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (DeveloperId, DeveloperId)>) -> Result<Self> {
        let mut raw: HashMap<DeveloperId, DeveloperId> = HashMap::new();
        for (from, to) in pairs {
            let from = DeveloperId::new(&from.name, &from.email);
            let to = DeveloperId::new(&to.name, &to.email);
            if let Some(existing) = raw.get(&from) {
                if *existing != to {
                    return Err(Error::config(format!(
                        "alias {from} maps to both {existing} and {to}"
                    )));
                }
            }
            if from != to {
                raw.insert(from, to);
            }
        }

        let mut entries = HashMap::with_capacity(raw.len());
        for start in raw.keys() {
            let mut current = start;
            let mut hops = 0;
            while let Some(next) = raw.get(current) {
                current = next;
                hops += 1;
                if hops > raw.len() {
                    return Err(Error::config(format!("alias cycle through {start}")));
                }
            }
            entries.insert(start.clone(), current.clone());
        }
        Ok(Self { entries })
    }

    /// Reads lines of the form `raw_name <raw_email> = canonical_name <canonical_email>`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let line_re = Regex::new(r"^(.*?)<([^<>]*)>\s*=\s*(.*?)<([^<>]*)>\s*$").expect("valid regex");
        let mut pairs = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::config(format!("alias map line {}: {e}", idx + 1)))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let caps = line_re.captures(trimmed).ok_or_else(|| {
                Error::config(format!(
                    "alias map line {}: expected `name <email> = name <email>`",
                    idx + 1
                ))
            })?;
            pairs.push((
                DeveloperId::new(&caps[1], &caps[2]),
                DeveloperId::new(&caps[3], &caps[4]),
            ));
        }
        Self::from_pairs(pairs)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn resolve(&self, raw: &DeveloperId) -> DeveloperId {
        let key = DeveloperId::new(&raw.name, &raw.email);
        match self.entries.get(&key) {
            Some(canonical) => canonical.clone(),
            None => key,
        }
    }
}

/// Replaces every record's author with its canonical identity.
pub fn resolve_aliases(records: Vec<CommitRecord>, aliases: &AliasMap) -> Vec<CommitRecord> {
    records
        .into_iter()
        .map(|mut r| {
            r.author = aliases.resolve(&r.author);
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::FileChange;

    fn record(name: &str, email: &str) -> CommitRecord {
        CommitRecord {
            id: "c".into(),
            author: DeveloperId {
                name: name.into(),
                email: email.into(),
            },
            timestamp: 0,
            changes: vec![FileChange::modify("f")],
        }
    }

    #[test]
    fn lookup_hit() {
        let map = AliasMap::parse(
            "# kernel\nLinus Torvalds <torvalds@osdl.org> = Linus Torvalds <torvalds@linux-foundation.org>\n"
                .as_bytes(),
        )
        .unwrap();
        let out = resolve_aliases(vec![record("Linus Torvalds", "torvalds@osdl.org")], &map);
        assert_eq!(
            out[0].author,
            DeveloperId::new("Linus Torvalds", "torvalds@linux-foundation.org")
        );
    }

    #[test]
    fn unmapped_identity_is_lowercased() {
        let out = resolve_aliases(vec![record("Ada", "ADA@X.ORG")], &AliasMap::new());
        assert_eq!(out[0].author, DeveloperId::new("Ada", "ada@x.org"));
    }

    #[test]
    fn aliases_of_one_person_converge() {
        let map = AliasMap::parse(
            "ada <ada@old.org> = Ada Lovelace <ada@x.org>\nA. Lovelace <AL@x.org> = Ada Lovelace <ada@x.org>\n"
                .as_bytes(),
        )
        .unwrap();
        let out = resolve_aliases(
            vec![record("ada", "ada@old.org"), record("A. Lovelace", "al@x.org")],
            &map,
        );
        assert_eq!(out[0].author, out[1].author);
        assert_eq!(out[0].author.email, "ada@x.org");
    }

    #[test]
    fn chains_collapse_and_resolution_is_idempotent() {
        let map = AliasMap::parse("a <a@x> = b <b@x>\nb <b@x> = c <c@x>\n".as_bytes()).unwrap();
        let once = resolve_aliases(vec![record("a", "a@x"), record("b", "b@x")], &map);
        assert!(once.iter().all(|r| r.author == DeveloperId::new("c", "c@x")));
        let twice = resolve_aliases(once.clone(), &map);
        assert_eq!(once, twice);
    }

    #[test]
    fn cycles_and_conflicts_are_rejected() {
        assert!(AliasMap::parse("a <a@x> = b <b@x>\nb <b@x> = a <a@x>\n".as_bytes()).is_err());
        assert!(AliasMap::parse("a <a@x> = b <b@x>\na <a@x> = c <c@x>\n".as_bytes()).is_err());
        assert!(AliasMap::parse("no brackets here\n".as_bytes()).is_err());
    }
}
