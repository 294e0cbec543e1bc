//! Path patterns shared by ingest exclusion rules and subsystem rules.
//!
//! A pattern containing any of `*?[{` is a glob (`*` stays inside one path
//! segment, `**` crosses segments). Anything else is a path prefix: `drivers/`
//! matches everything below `drivers`, and `README` matches the file `README`
//! as well as anything under a directory of that name.

use globset::{GlobBuilder, GlobMatcher};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PathPattern {
    source: String,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Prefix(String),
    Glob(GlobMatcher),
}

impl PathPattern {
    pub fn new(pattern: &str) -> Result<Self> {
        let trimmed = pattern.trim();
        if trimmed.is_empty() {
            return Err(Error::config("empty path pattern"));
        }
        let kind = if trimmed.contains(['*', '?', '[', '{']) {
            let glob = GlobBuilder::new(trimmed)
                .literal_separator(true)
                .build()
                .map_err(|e| Error::config(format!("invalid glob {trimmed:?}: {e}")))?;
            Kind::Glob(glob.compile_matcher())
        } else {
            Kind::Prefix(trimmed.trim_start_matches("./").to_string())
        };
        Ok(Self {
            source: trimmed.to_string(),
            kind,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn matches(&self, path: &str) -> bool {
        match &self.kind {
            Kind::Glob(glob) => glob.is_match(path),
            Kind::Prefix(prefix) if prefix.ends_with('/') => path.starts_with(prefix.as_str()),
            Kind::Prefix(prefix) => {
                path == prefix
                    || (path.starts_with(prefix.as_str())
                        && path.as_bytes().get(prefix.len()) == Some(&b'/'))
            }
        }
    }
}

impl PartialEq for PathPattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directory_prefix() {
        let p = PathPattern::new("firmware/").unwrap();
        assert!(p.matches("firmware/x.bin"));
        assert!(p.matches("firmware/a/b.fw"));
        assert!(!p.matches("firmware.c"));
        assert!(!p.matches("drivers/firmware/x.c"));
    }

    #[test]
    fn bare_prefix_is_segment_aligned() {
        let p = PathPattern::new("README").unwrap();
        assert!(p.matches("README"));
        assert!(p.matches("README/notes"));
        assert!(!p.matches("README.md"));
    }

    #[test]
    fn glob_respects_separator() {
        let p = PathPattern::new("*.bin").unwrap();
        assert!(p.matches("x.bin"));
        assert!(!p.matches("firmware/x.bin"));
        let deep = PathPattern::new("**/*.bin").unwrap();
        assert!(deep.matches("firmware/x.bin"));
    }

    #[test]
    fn invalid_glob_is_config_error() {
        let err = PathPattern::new("drivers/[abc").unwrap_err();
        assert!(err.is_config());
    }
}
