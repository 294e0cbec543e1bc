//! Specialist and generalist author profiles.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::doa::AuthorshipMap;
use crate::error::{Error, Result};
use crate::ingest::DevIdx;
use crate::subsystem::{Scope, SubsystemRules};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileKind {
    Specialist,
    Generalist,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuthorProfile {
    pub developer: DevIdx,
    pub subsystems: BTreeSet<String>,
    pub kind: ProfileKind,
}

impl AuthorProfile {
    fn new(developer: DevIdx, subsystems: BTreeSet<String>) -> Self {
        let kind = if subsystems.len() == 1 {
            ProfileKind::Specialist
        } else {
            ProfileKind::Generalist
        };
        Self {
            developer,
            subsystems,
            kind,
        }
    }
}

/// Subsystems of the authored live files of every author, over the whole tree.
pub fn author_subsystems(map: &AuthorshipMap, rules: &SubsystemRules) -> BTreeMap<DevIdx, BTreeSet<String>> {
    let mut out: BTreeMap<DevIdx, BTreeSet<String>> = BTreeMap::new();
    for file in map.files() {
        let label = rules.classify(&file.path);
        for dev in file.authors() {
            let set = out.entry(dev).or_default();
            if !set.contains(label) {
                set.insert(label.to_string());
            }
        }
    }
    out
}

pub fn classify_author(dev: DevIdx, map: &AuthorshipMap, rules: &SubsystemRules) -> Result<AuthorProfile> {
    let subsystems: BTreeSet<String> = map
        .files()
        .iter()
        .filter(|f| f.is_author(dev))
        .map(|f| rules.classify(&f.path).to_string())
        .collect();
    if subsystems.is_empty() {
        return Err(Error::domain(format!(
            "{} authors no live file",
            map.developer(dev)
        )));
    }
    Ok(AuthorProfile::new(dev, subsystems))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileProportions {
    pub n_authors: usize,
    pub specialists: usize,
    pub generalists: usize,
    pub specialist_pct: f64,
    pub generalist_pct: f64,
}

/// Specialist/generalist split among the authors owning at least one file in
/// `scope`. Each author's kind is judged over all of their authored files,
/// not just those inside the scope.
pub fn profile_proportions(map: &AuthorshipMap, scope: &Scope<'_>, rules: &SubsystemRules) -> Result<ProfileProportions> {
    let members = map.authored_counts(scope);
    if members.is_empty() {
        return Err(Error::domain(format!("scope {} has no authors", scope.name())));
    }
    let global = author_subsystems(map, rules);
    let specialists = members
        .keys()
        .filter(|dev| global.get(dev).is_some_and(|s| s.len() == 1))
        .count();
    let n = members.len();
    let generalists = n - specialists;
    Ok(ProfileProportions {
        n_authors: n,
        specialists,
        generalists,
        specialist_pct: 100.0 * specialists as f64 / n as f64,
        generalist_pct: 100.0 * generalists as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doa::DoaModel;
    use crate::ingest::{CommitRecord, DeveloperId, FileChange, ReleaseTag, SnapshotBuilder};

    /// Each `(developer, path)` pair creates the file; solo creators are sole authors.
    fn map(files: &[(&str, &str)], extra_dev: Option<&str>) -> AuthorshipMap {
        let mut b = SnapshotBuilder::new(true);
        for (i, (dev, path)) in files.iter().enumerate() {
            b.apply(&CommitRecord {
                id: i.to_string(),
                author: DeveloperId::new(dev, &format!("{dev}@x")),
                timestamp: 0,
                changes: vec![FileChange::add(path)],
            });
        }
        if let Some(dev) = extra_dev {
            // 20 commits by the first creator bury a single drive-by change
            for i in 0..20 {
                let (who, path) = files[0];
                b.apply(&CommitRecord {
                    id: format!("m{i}"),
                    author: DeveloperId::new(who, &format!("{who}@x")),
                    timestamp: 0,
                    changes: vec![FileChange::modify(path)],
                });
            }
            b.apply(&CommitRecord {
                id: "drive-by".into(),
                author: DeveloperId::new(dev, &format!("{dev}@x")),
                timestamp: 0,
                changes: vec![FileChange::modify(files[0].1)],
            });
        }
        let snap = b.freeze(ReleaseTag::at_prefix("r", b.applied()));
        AuthorshipMap::build(&snap, &DoaModel::default()).unwrap()
    }

    fn idx(m: &AuthorshipMap, who: &str) -> DevIdx {
        m.developer_index(&DeveloperId::new(who, &format!("{who}@x"))).unwrap()
    }

    #[test]
    fn specialist_and_generalist() {
        let rules = SubsystemRules::linux_default();
        let m = map(
            &[("d1", "drivers/a.c"), ("d1", "drivers/b.c"), ("d2", "fs/a.c"), ("d2", "net/a.c")],
            None,
        );
        let p = classify_author(idx(&m, "d1"), &m, &rules).unwrap();
        assert_eq!(p.kind, ProfileKind::Specialist);
        assert_eq!(p.subsystems, BTreeSet::from(["Driver".to_string()]));
        let p = classify_author(idx(&m, "d2"), &m, &rules).unwrap();
        assert_eq!(p.kind, ProfileKind::Generalist);
        assert_eq!(p.subsystems, BTreeSet::from(["Fs".to_string(), "Net".to_string()]));
    }

    #[test]
    fn non_author_is_rejected() {
        let rules = SubsystemRules::linux_default();
        let m = map(&[("d1", "drivers/a.c")], Some("d9"));
        assert!(classify_author(idx(&m, "d9"), &m, &rules).is_err());
    }

    #[test]
    fn driver_scope_split() {
        let rules = SubsystemRules::linux_default();
        let m = map(&[("d1", "drivers/a.c"), ("d2", "drivers/b.c"), ("d2", "fs/c.c")], None);
        let p = profile_proportions(&m, &Scope::subsystem(&rules, "Driver"), &rules).unwrap();
        assert_eq!((p.n_authors, p.specialists, p.generalists), (2, 1, 1));
        assert_eq!((p.specialist_pct, p.generalist_pct), (50.0, 50.0));
        // in the Fs scope only d2 is a member, and is still a generalist
        let p = profile_proportions(&m, &Scope::subsystem(&rules, "Fs"), &rules).unwrap();
        assert_eq!((p.n_authors, p.generalists), (1, 1));
        assert!(profile_proportions(&m, &Scope::subsystem(&rules, "Net"), &rules).is_err());
    }

    #[test]
    fn merged_rules_make_everyone_a_specialist() {
        let rules = SubsystemRules::linux_default();
        let m = map(&[("d1", "drivers/a.c"), ("d1", "fs/a.c"), ("d2", "net/a.c"), ("d2", "README")], None);
        let merged = rules.merged("Kernel");
        let p = profile_proportions(&m, &Scope::All, &merged).unwrap();
        assert_eq!(p.specialist_pct, 100.0);
        let p = profile_proportions(&m, &Scope::All, &rules).unwrap();
        assert_eq!(p.generalist_pct, 100.0);
    }
}
