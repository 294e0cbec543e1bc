//! Path-to-subsystem classification.

use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::ReleaseSnapshot;
use crate::pattern::PathPattern;

const LINUX_RULES: &str = include_str!("../data/linux-subsystems.tsv");

/// Ordered `(pattern, label)` rules plus a fallback label. First match wins.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemRules {
    rules: Vec<(PathPattern, String)>,
    fallback: String,
}

impl SubsystemRules {
    pub fn new(rules: Vec<(PathPattern, String)>, fallback: impl Into<String>) -> Self {
        Self {
            rules,
            fallback: fallback.into(),
        }
    }

    /// Parses `pattern<TAB>label` lines with a mandatory `fallback<TAB>label` line.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut rules = Vec::new();
        let mut fallback = None;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::config(format!("rules line {line_no}: {e}")))?;
            let trimmed = line.trim_end();
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let (pattern, label) = trimmed
                .split_once('\t')
                .map(|(p, l)| (p.trim(), l.trim()))
                .filter(|(p, l)| !p.is_empty() && !l.is_empty())
                .ok_or_else(|| Error::config(format!("rules line {line_no}: expected `pattern<TAB>label`")))?;
            if pattern == "fallback" {
                if fallback.replace(label.to_string()).is_some() {
                    return Err(Error::config(format!("rules line {line_no}: second fallback line")));
                }
                continue;
            }
            let pattern = PathPattern::new(pattern)
                .map_err(|e| e.context(format!("rules line {line_no}")))?;
            rules.push((pattern, label.to_string()));
        }
        let fallback = fallback.ok_or_else(|| Error::config("rules file has no `fallback` line"))?;
        Ok(Self { rules, fallback })
    }

    /// Seven-subsystem decomposition of the Linux kernel tree.
    pub fn linux_default() -> Self {
        Self::parse(LINUX_RULES.as_bytes()).expect("bundled rules parse")
    }

    pub fn fallback(&self) -> &str {
        &self.fallback
    }

    pub fn classify(&self, path: &str) -> &str {
        self.rules
            .iter()
            .find(|(p, _)| p.matches(path))
            .map(|(_, label)| label.as_str())
            .unwrap_or(&self.fallback)
    }

    /// Distinct labels in rule order, fallback last.
    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = Vec::new();
        for label in self
            .rules
            .iter()
            .map(|(_, l)| l.as_str())
            .chain(std::iter::once(self.fallback.as_str()))
        {
            if !labels.contains(&label) {
                labels.push(label);
            }
        }
        labels
    }

    /// Same patterns with every label replaced by `label`.
    pub fn merged(&self, label: &str) -> Self {
        Self {
            rules: self
                .rules
                .iter()
                .map(|(p, _)| (p.clone(), label.to_string()))
                .collect(),
            fallback: label.to_string(),
        }
    }
}

/// A set of files: the whole tree or one subsystem.
#[derive(Debug, Clone, Copy)]
pub enum Scope<'a> {
    All,
    Subsystem {
        rules: &'a SubsystemRules,
        label: &'a str,
    },
}

impl<'a> Scope<'a> {
    pub fn subsystem(rules: &'a SubsystemRules, label: &'a str) -> Self {
        Scope::Subsystem { rules, label }
    }

    pub fn name(&self) -> &str {
        match self {
            Scope::All => "All",
            Scope::Subsystem { label, .. } => label,
        }
    }

    pub fn includes(&self, path: &str) -> bool {
        match self {
            Scope::All => true,
            Scope::Subsystem { rules, label } => rules.classify(path) == *label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsystemSize {
    pub label: String,
    pub file_count: usize,
    pub percent: f64,
}

/// Live-file counts per subsystem, in label order. Empty subsystems are listed with zero.
pub fn subsystem_sizes(snapshot: &ReleaseSnapshot, rules: &SubsystemRules) -> Vec<SubsystemSize> {
    let labels = rules.labels();
    let mut counts = vec![0usize; labels.len()];
    for (path, _) in snapshot.live_files() {
        let label = rules.classify(path);
        let pos = labels.iter().position(|l| *l == label).expect("label listed");
        counts[pos] += 1;
    }
    let total = snapshot.live_count();
    labels
        .into_iter()
        .zip(counts)
        .map(|(label, file_count)| SubsystemSize {
            label: label.to_string(),
            file_count,
            percent: if total == 0 {
                0.0
            } else {
                100.0 * file_count as f64 / total as f64
            },
        })
        .collect()
}
