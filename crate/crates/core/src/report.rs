//! Per-release report tables.
//!
//! Every table is written as CSV (fixed six-decimal floats, `NA` for
//! undefined metrics) and optionally mirrored as JSON lines (`null` for
//! undefined metrics). Row order is fully determined by file paths,
//! developer emails and rule order.

use rayon::prelude::*;
use serde::Serialize;

use crate::doa::{author_proportion, AuthorshipMap, DoaModel};
use crate::error::Result;
use crate::ingest::ReleaseSnapshot;
use crate::network::{build_graph, edge_list_csv, network_metrics, pajek};
use crate::profiles::profile_proportions;
use crate::stats::{adjusted_fences, files_per_author, gini, quantile, top_k_share};
use crate::subsystem::{Scope, SubsystemRules};

pub const TOP_K: usize = 10;

/// Which developers enter the Gini sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum GiniPopulation {
    /// Authors only (everyone with at least one authored file).
    #[default]
    Authors,
    /// Every developer who touched a live file in scope; non-authors count as zero.
    AllDevelopers,
}

pub fn fmt_f64(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_f64)
}

pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorshipRow {
    pub release: String,
    pub file: String,
    pub developer_email: String,
    pub fa: u8,
    pub dl: u64,
    pub ac: u64,
    pub doa_abs: f64,
    pub doa_norm: f64,
    pub is_author: bool,
}

impl Row for AuthorshipRow {
    const HEADER: &'static [&'static str] = &[
        "release",
        "file",
        "developer_email",
        "fa",
        "dl",
        "ac",
        "doa_abs",
        "doa_norm",
        "is_author",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.release.clone(),
            self.file.clone(),
            self.developer_email.clone(),
            self.fa.to_string(),
            self.dl.to_string(),
            self.ac.to_string(),
            fmt_f64(self.doa_abs),
            fmt_f64(self.doa_norm),
            self.is_author.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsystemRow {
    pub release: String,
    pub scope: String,
    pub files: usize,
    pub files_pct: f64,
    pub developers: usize,
    pub authors: usize,
    pub author_pct: f64,
}

impl Row for SubsystemRow {
    const HEADER: &'static [&'static str] = &[
        "release",
        "scope",
        "files",
        "files_pct",
        "developers",
        "authors",
        "author_pct",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.release.clone(),
            self.scope.clone(),
            self.files.to_string(),
            fmt_f64(self.files_pct),
            self.developers.to_string(),
            self.authors.to_string(),
            fmt_f64(self.author_pct),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkloadRow {
    pub release: String,
    pub scope: String,
    pub n_authors: usize,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub medcouple: Option<f64>,
    pub fence_lo: Option<f64>,
    pub fence_hi: Option<f64>,
    pub gini: Option<f64>,
    pub top1_share: Option<f64>,
    pub top10_share: Option<f64>,
}

impl Row for WorkloadRow {
    const HEADER: &'static [&'static str] = &[
        "release",
        "scope",
        "n_authors",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "medcouple",
        "fence_lo",
        "fence_hi",
        "gini",
        "top1_share",
        "top10_share",
    ];

    fn fields(&self) -> Vec<String> {
        let mut out = vec![self.release.clone(), self.scope.clone(), self.n_authors.to_string()];
        out.extend(
            [
                self.min,
                self.q1,
                self.median,
                self.q3,
                self.max,
                self.medcouple,
                self.fence_lo,
                self.fence_hi,
                self.gini,
                self.top1_share,
                self.top10_share,
            ]
            .into_iter()
            .map(fmt_opt),
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub release: String,
    pub scope: String,
    pub n_authors: usize,
    pub specialists: usize,
    pub generalists: usize,
    pub specialist_pct: Option<f64>,
}

impl Row for ProfileRow {
    const HEADER: &'static [&'static str] = &[
        "release",
        "scope",
        "n_authors",
        "specialists",
        "generalists",
        "specialist_pct",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.release.clone(),
            self.scope.clone(),
            self.n_authors.to_string(),
            self.specialists.to_string(),
            self.generalists.to_string(),
            fmt_opt(self.specialist_pct),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkRow {
    pub release: String,
    pub scope: String,
    pub vertices: usize,
    pub edges: usize,
    pub mean_degree: Option<f64>,
    pub transitivity: Option<f64>,
    pub avg_local_clustering: Option<f64>,
    pub assortativity: Option<f64>,
    pub solitary_count: usize,
    pub solitary_pct: Option<f64>,
}

impl Row for NetworkRow {
    const HEADER: &'static [&'static str] = &[
        "release",
        "scope",
        "vertices",
        "edges",
        "mean_degree",
        "transitivity",
        "avg_local_clustering",
        "assortativity",
        "solitary_count",
        "solitary_pct",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.release.clone(),
            self.scope.clone(),
            self.vertices.to_string(),
            self.edges.to_string(),
            fmt_opt(self.mean_degree),
            fmt_opt(self.transitivity),
            fmt_opt(self.avg_local_clustering),
            fmt_opt(self.assortativity),
            self.solitary_count.to_string(),
            fmt_opt(self.solitary_pct),
        ]
    }
}

/// Renders rows to CSV text, header first.
pub fn to_csv<R: Row>(rows: &[R]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(R::HEADER).expect("in-memory csv write");
    for row in rows {
        writer.write_record(row.fields()).expect("in-memory csv write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

/// Renders rows as JSON lines; undefined metrics become `null`.
pub fn to_jsonl<R: Row>(rows: &[R]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("row serializes"));
        out.push('\n');
    }
    out
}

/// Settings shared by every release analysis.
#[derive(Debug, Clone)]
pub struct AnalysisSettings {
    pub model: DoaModel,
    pub rules: SubsystemRules,
    pub gini_population: GiniPopulation,
}

/// All tables for one release.
#[derive(Debug, Clone, PartialEq)]
pub struct ReleaseReport {
    pub release: String,
    /// Commit records replayed up to the release, after path filtering.
    pub records: usize,
    pub authorship: Vec<AuthorshipRow>,
    pub subsystems: Vec<SubsystemRow>,
    pub workload: Vec<WorkloadRow>,
    pub profiles: Vec<ProfileRow>,
    pub network: Vec<NetworkRow>,
    /// Whole-tree co-authorship edge list and Pajek rendering.
    pub edges_csv: String,
    pub pajek: String,
}

struct ScopeReport {
    subsystem: SubsystemRow,
    workload: WorkloadRow,
    profile: ProfileRow,
    network: NetworkRow,
}

pub fn analyze_release(snapshot: &ReleaseSnapshot, settings: &AnalysisSettings) -> Result<ReleaseReport> {
    let release = snapshot.release().name.clone();
    let map = AuthorshipMap::build(snapshot, &settings.model)
        .map_err(|e| e.context(format!("release {release}")))?;

    let authorship = map
        .files()
        .iter()
        .flat_map(|f| {
            f.entries.iter().map(|e| AuthorshipRow {
                release: release.clone(),
                file: f.path.clone(),
                developer_email: map.developer(e.developer).email.clone(),
                fa: e.counters.fa,
                dl: e.counters.dl,
                ac: e.counters.ac,
                doa_abs: e.doa_absolute,
                doa_norm: e.doa_normalized,
                is_author: e.is_author,
            })
        })
        .collect();

    let mut scopes = vec![Scope::All];
    scopes.extend(
        settings
            .rules
            .labels()
            .into_iter()
            .map(|label| Scope::subsystem(&settings.rules, label)),
    );
    let scopes: Vec<Scope<'_>> = scopes
        .into_iter()
        .filter(|s| map.files_in(s).next().is_some())
        .collect();

    let per_scope = scopes
        .par_iter()
        .map(|scope| {
            scope_report(&map, scope, settings, snapshot.live_count())
                .map_err(|e| e.context(format!("release {release}, scope {}", scope.name())))
        })
        .collect::<Result<Vec<_>>>()?;

    let whole = build_graph(&map, &Scope::All);
    let mut report = ReleaseReport {
        release,
        records: snapshot.commits_applied(),
        authorship,
        subsystems: Vec::new(),
        workload: Vec::new(),
        profiles: Vec::new(),
        network: Vec::new(),
        edges_csv: edge_list_csv(&whole),
        pajek: pajek(&whole),
    };
    for s in per_scope {
        report.subsystems.push(s.subsystem);
        report.workload.push(s.workload);
        report.profiles.push(s.profile);
        report.network.push(s.network);
    }
    Ok(report)
}

fn scope_report(map: &AuthorshipMap, scope: &Scope<'_>, settings: &AnalysisSettings, total_live: usize) -> Result<ScopeReport> {
    let release = map.release().to_string();
    let name = scope.name().to_string();
    let files = map.files_in(scope).count();

    let proportion = author_proportion(map, scope)?;
    let subsystem = SubsystemRow {
        release: release.clone(),
        scope: name.clone(),
        files,
        files_pct: 100.0 * files as f64 / total_live as f64,
        developers: proportion.developers,
        authors: proportion.authors,
        author_pct: 100.0 * proportion.proportion,
    };

    let sample = files_per_author(map, scope);
    let values = sample.to_f64();
    let workload = if values.is_empty() {
        WorkloadRow {
            release: release.clone(),
            scope: name.clone(),
            n_authors: 0,
            min: None,
            q1: None,
            median: None,
            q3: None,
            max: None,
            medcouple: None,
            fence_lo: None,
            fence_hi: None,
            gini: None,
            top1_share: Some(0.0),
            top10_share: Some(0.0),
        }
    } else {
        let fences = adjusted_fences(&values).ok();
        let gini_sample = match settings.gini_population {
            GiniPopulation::Authors => values.clone(),
            GiniPopulation::AllDevelopers => {
                let mut v = values.clone();
                v.resize(proportion.developers, 0.0);
                v
            }
        };
        let top = top_k_share(map, scope, TOP_K)?;
        WorkloadRow {
            release: release.clone(),
            scope: name.clone(),
            n_authors: values.len(),
            min: Some(quantile(&values, 0.0)?),
            q1: Some(quantile(&values, 0.25)?),
            median: Some(quantile(&values, 0.5)?),
            q3: Some(quantile(&values, 0.75)?),
            max: Some(quantile(&values, 1.0)?),
            medcouple: fences.map(|f| f.medcouple),
            fence_lo: fences.map(|f| f.lower),
            fence_hi: fences.map(|f| f.upper),
            gini: Some(gini(&gini_sample)?),
            top1_share: Some(top.top1_share),
            top10_share: Some(top.cumulative()),
        }
    };

    let profile = if sample.is_empty() {
        ProfileRow {
            release: release.clone(),
            scope: name.clone(),
            n_authors: 0,
            specialists: 0,
            generalists: 0,
            specialist_pct: None,
        }
    } else {
        let p = profile_proportions(map, scope, &settings.rules)?;
        ProfileRow {
            release: release.clone(),
            scope: name.clone(),
            n_authors: p.n_authors,
            specialists: p.specialists,
            generalists: p.generalists,
            specialist_pct: Some(p.specialist_pct),
        }
    };

    let m = network_metrics(&build_graph(map, scope));
    let network = NetworkRow {
        release,
        scope: name,
        vertices: m.vertices,
        edges: m.edges,
        mean_degree: m.mean_degree,
        transitivity: m.transitivity,
        avg_local_clustering: m.avg_local_clustering,
        assortativity: m.assortativity,
        solitary_count: m.solitary_count,
        solitary_pct: m.solitary_pct,
    };

    Ok(ScopeReport {
        subsystem,
        workload,
        profile,
        network,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(0.75), "0.750000");
        assert_eq!(fmt_f64(-1e-12), "0.000000");
        assert_eq!(fmt_opt(None), "NA");
        assert_eq!(fmt_opt(Some(-0.5)), "-0.500000");
    }

    #[test]
    fn csv_rendering_quotes_when_needed() {
        let rows = vec![ProfileRow {
            release: "v1".into(),
            scope: "All, really".into(),
            n_authors: 2,
            specialists: 1,
            generalists: 1,
            specialist_pct: None,
        }];
        assert_eq!(
            to_csv(&rows),
            "release,scope,n_authors,specialists,generalists,specialist_pct\nv1,\"All, really\",2,1,1,NA\n"
        );
    }
}
