//! End-to-end run: load and validate every input, replay the history once,
//! analyze each release as soon as its snapshot is frozen, and write the
//! report tables plus a manifest describing the run.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::doa::{AuthorshipMap, DoaModel};
use crate::error::{Error, Result};
use crate::ingest::{
    parse_commit_log, parse_release_list, resolve_aliases, resolve_boundaries, AliasMap, Boundary,
    CommitRecord, PathFilter, ReleaseSnapshot, ReleaseTag, SnapshotBuilder,
};
use crate::report::{
    analyze_release, AnalysisSettings, AuthorshipRow, GiniPopulation, NetworkRow, ProfileRow, ReleaseReport, Row,
    SubsystemRow, WorkloadRow,
};
use crate::subsystem::SubsystemRules;

/// Exclusions applied when none are configured: firmware blobs.
pub const DEFAULT_EXCLUSIONS: &[&str] = &["firmware/"];

const STAGING_DIR: &str = ".authorship-incomplete";

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Commit logs, concatenated in this order.
    pub log_paths: Vec<PathBuf>,
    pub alias_map_path: Option<PathBuf>,
    /// Subsystem rules; the bundled Linux rules when unset.
    pub rules_path: Option<PathBuf>,
    pub releases_path: PathBuf,
    pub exclusions: Vec<String>,
    pub follow_renames: bool,
    pub model: DoaModel,
    pub gini_population: GiniPopulation,
    /// Also write every table as JSON lines.
    pub json: bool,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn new(log_paths: Vec<PathBuf>, releases_path: PathBuf, output_dir: PathBuf) -> Self {
        Self {
            log_paths,
            alias_map_path: None,
            rules_path: None,
            releases_path,
            exclusions: DEFAULT_EXCLUSIONS.iter().map(|s| s.to_string()).collect(),
            follow_renames: true,
            model: DoaModel::default(),
            gini_population: GiniPopulation::Authors,
            json: false,
            output_dir,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub name: String,
    pub sha256: String,
}

/// Validated inputs. `records` are alias-resolved but not yet path-filtered;
/// `boundaries[i]` is the number of records up to release `i`.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub records: Vec<CommitRecord>,
    pub releases: Vec<ReleaseTag>,
    pub boundaries: Vec<usize>,
    pub rules: SubsystemRules,
    pub rules_source: String,
    pub filter: PathFilter,
    pub digests: Vec<InputDigest>,
}

fn read_input(path: &Path, role: &str, digests: &mut Vec<InputDigest>) -> Result<Vec<u8>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    digests.push(InputDigest {
        role: role.to_string(),
        name: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    Ok(bytes)
}

/// Reads and validates every input. Nothing is written.
pub fn load_inputs(config: &RunConfig) -> Result<Inputs> {
    config.model.thresholds.validate()?;
    if config.log_paths.is_empty() {
        return Err(Error::config("no commit log given"));
    }
    let mut digests = Vec::new();

    let mut records = Vec::new();
    for path in &config.log_paths {
        let bytes = read_input(path, "log", &mut digests)?;
        let parsed = parse_commit_log(bytes.as_slice()).map_err(|e| e.context(path.display().to_string()))?;
        records.extend(parsed);
    }

    if let Some(path) = &config.alias_map_path {
        let bytes = read_input(path, "alias_map", &mut digests)?;
        let aliases = AliasMap::parse(bytes.as_slice()).map_err(|e| e.context(path.display().to_string()))?;
        records = resolve_aliases(records, &aliases);
    } else {
        records = resolve_aliases(records, &AliasMap::new());
    }
    warn_on_shared_emails(&records);

    let (rules, rules_source) = match &config.rules_path {
        Some(path) => {
            let bytes = read_input(path, "rules", &mut digests)?;
            let rules =
                SubsystemRules::parse(bytes.as_slice()).map_err(|e| e.context(path.display().to_string()))?;
            (rules, digests.last().expect("just pushed").sha256.clone())
        }
        None => (SubsystemRules::linux_default(), "bundled:linux".to_string()),
    };

    let bytes = read_input(&config.releases_path, "releases", &mut digests)?;
    let releases =
        parse_release_list(bytes.as_slice()).map_err(|e| e.context(config.releases_path.display().to_string()))?;
    let boundaries = resolve_boundaries(&records, &releases)?;

    let filter = PathFilter::new(&config.exclusions)?;

    Ok(Inputs {
        records,
        releases,
        boundaries,
        rules,
        rules_source,
        filter,
        digests,
    })
}

fn warn_on_shared_emails(records: &[CommitRecord]) {
    let mut names: std::collections::BTreeMap<&str, std::collections::BTreeSet<&str>> = Default::default();
    for r in records {
        names.entry(&r.author.email).or_default().insert(&r.author.name);
    }
    for (email, set) in names.into_iter().filter(|(_, s)| s.len() > 1) {
        log::warn!("email {email} is used under {} names; add alias entries to merge them", set.len());
    }
}

/// Replays the history once, handing every release snapshot to `sink` as
/// soon as its boundary is reached. Returns the number of ingest warnings.
pub fn for_each_snapshot(
    inputs: &Inputs,
    follow_renames: bool,
    mut sink: impl FnMut(ReleaseSnapshot) -> Result<()>,
) -> Result<usize> {
    let mut builder = SnapshotBuilder::new(follow_renames);
    let mut consumed = 0;
    for (release, &end) in inputs.releases.iter().zip(&inputs.boundaries) {
        for record in &inputs.records[consumed..end] {
            if let Some(kept) = inputs.filter.filter_record(record.clone()) {
                builder.apply(&kept);
            }
        }
        consumed = end;
        sink(builder.freeze(release.clone()))?;
    }
    Ok(builder.warnings().len())
}

pub fn build_snapshots(inputs: &Inputs, follow_renames: bool) -> Result<Vec<ReleaseSnapshot>> {
    let mut out = Vec::with_capacity(inputs.releases.len());
    for_each_snapshot(inputs, follow_renames, |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

/// Rebuilds release `index` with a fresh builder over its whole prefix.
pub fn snapshot_from_scratch(inputs: &Inputs, index: usize, follow_renames: bool) -> ReleaseSnapshot {
    let mut builder = SnapshotBuilder::new(follow_renames);
    for record in &inputs.records[..inputs.boundaries[index]] {
        if let Some(kept) = inputs.filter.filter_record(record.clone()) {
            builder.apply(&kept);
        }
    }
    builder.freeze(inputs.releases[index].clone())
}

/// Snapshot of a single named release.
pub fn snapshot_for(inputs: &Inputs, release: &str, follow_renames: bool) -> Result<ReleaseSnapshot> {
    let index = inputs
        .releases
        .iter()
        .position(|r| r.name == release)
        .ok_or_else(|| Error::config(format!("unknown release {release}")))?;
    Ok(snapshot_from_scratch(inputs, index, follow_renames))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorLine {
    pub email: String,
    pub doa_abs: f64,
    pub doa_norm: f64,
    pub is_author: bool,
}

/// DOA of every developer who changed `path`, highest normalized DOA first.
pub fn file_doa(snapshot: &ReleaseSnapshot, model: &DoaModel, path: &str) -> Result<Vec<AuthorLine>> {
    let release = &snapshot.release().name;
    let map = AuthorshipMap::build(snapshot, model)?;
    let file = map
        .file(path)
        .ok_or_else(|| Error::domain(format!("{path} is not live at {release}")))?;
    let mut lines: Vec<AuthorLine> = file
        .entries
        .iter()
        .map(|e| AuthorLine {
            email: map.developer(e.developer).email.clone(),
            doa_abs: e.doa_absolute,
            doa_norm: e.doa_normalized,
            is_author: e.is_author,
        })
        .collect();
    lines.sort_by(|a, b| b.doa_norm.total_cmp(&a.doa_norm).then_with(|| a.email.cmp(&b.email)));
    Ok(lines)
}

pub fn settings(config: &RunConfig, inputs: &Inputs) -> AnalysisSettings {
    AnalysisSettings {
        model: config.model,
        rules: inputs.rules.clone(),
        gini_population: config.gini_population,
    }
}

/// Analyzes every release in order, overlapping history replay with analysis.
/// `sink` receives the reports in release order.
pub fn analyze_releases(
    inputs: &Inputs,
    config: &RunConfig,
    mut sink: impl FnMut(ReleaseReport) -> Result<()>,
) -> Result<usize> {
    let settings = settings(config, inputs);
    let (tx, rx) = mpsc::sync_channel::<ReleaseSnapshot>(1);
    std::thread::scope(|scope| {
        let producer = scope.spawn(move || {
            for_each_snapshot(inputs, config.follow_renames, |snapshot| {
                // a closed channel means the consumer failed and reported it
                let _ = tx.send(snapshot);
                Ok(())
            })
        });
        let mut consumed = Ok(());
        for snapshot in rx {
            let report = analyze_release(&snapshot, &settings).and_then(&mut sink);
            if let Err(e) = report {
                consumed = Err(e);
                break;
            }
        }
        let warnings = producer.join().expect("ingest thread panicked")?;
        consumed.map(|_| warnings)
    })
}

#[derive(Debug, Clone, Serialize)]
struct ConfigFingerprint<'a> {
    follow_renames: bool,
    model: DoaModel,
    gini_population: GiniPopulation,
    exclusions: &'a [String],
    rules: &'a str,
    json: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ReleaseEntry {
    name: String,
    boundary: String,
    records: usize,
}

#[derive(Debug, Clone, Serialize)]
struct OutputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    config: ConfigFingerprint<'a>,
    inputs: &'a [InputDigest],
    releases: Vec<ReleaseEntry>,
    ingest_warnings: usize,
    outputs: Vec<OutputDigest>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub output_dir: PathBuf,
    pub releases: Vec<String>,
    /// Written files relative to the output directory, manifest last.
    pub files: Vec<String>,
    pub manifest_sha256: String,
}

struct TableWriter {
    name: &'static str,
    csv: csv::Writer<BufWriter<File>>,
    json: Option<BufWriter<File>>,
}

impl TableWriter {
    fn create<R: Row>(dir: &Path, name: &'static str, json: bool) -> Result<Self> {
        let path = dir.join(format!("{name}.csv"));
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut csv = csv::Writer::from_writer(BufWriter::new(file));
        csv.write_record(R::HEADER).map_err(|e| csv_error(&path, e))?;
        let json = if json {
            let path = dir.join(format!("{name}.jsonl"));
            Some(BufWriter::new(File::create(&path).map_err(|e| Error::io(&path, e))?))
        } else {
            None
        };
        Ok(Self { name, csv, json })
    }

    fn write<R: Row>(&mut self, rows: &[R]) -> Result<()> {
        for row in rows {
            self.csv
                .write_record(row.fields())
                .map_err(|e| csv_error(Path::new(self.name), e))?;
            if let Some(json) = &mut self.json {
                serde_json::to_writer(&mut *json, row).map_err(|e| Error::io(self.name, e.into()))?;
                json.write_all(b"\n").map_err(|e| Error::io(self.name, e))?;
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<String>> {
        self.csv.flush().map_err(|e| Error::io(self.name, e))?;
        let mut files = vec![format!("{}.csv", self.name)];
        if let Some(mut json) = self.json.take() {
            json.flush().map_err(|e| Error::io(self.name, e))?;
            files.push(format!("{}.jsonl", self.name));
        }
        Ok(files)
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

fn file_stem(release: &str) -> String {
    release
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

struct Tables {
    authorship: TableWriter,
    subsystems: TableWriter,
    workload: TableWriter,
    profiles: TableWriter,
    network: TableWriter,
}

/// Runs the full analysis and writes all tables into `config.output_dir`.
///
/// Output is staged in a hidden directory and moved into place only when the
/// whole run succeeds, so a failed run leaves no partial tables behind.
pub fn analyze(config: &RunConfig) -> Result<AnalyzeOutcome> {
    let inputs = load_inputs(config)?;

    let out_dir = &config.output_dir;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let staging = out_dir.join(STAGING_DIR);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    let result = write_staged(&inputs, config, &staging).and_then(|run| publish(&staging, out_dir, run, &inputs, config));
    let _ = fs::remove_dir_all(&staging);
    result
}

struct StagedRun {
    files: Vec<String>,
    warnings: usize,
    records_per_release: Vec<usize>,
}

fn write_staged(inputs: &Inputs, config: &RunConfig, staging: &Path) -> Result<StagedRun> {
    for sub in ["edges", "graphs"] {
        let dir = staging.join(sub);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    let mut tables = Tables {
        authorship: TableWriter::create::<AuthorshipRow>(staging, "authorship", config.json)?,
        subsystems: TableWriter::create::<SubsystemRow>(staging, "subsystems", config.json)?,
        workload: TableWriter::create::<WorkloadRow>(staging, "workload", config.json)?,
        profiles: TableWriter::create::<ProfileRow>(staging, "profiles", config.json)?,
        network: TableWriter::create::<NetworkRow>(staging, "network", config.json)?,
    };
    let mut extra = Vec::new();
    let mut stems: Vec<String> = Vec::new();
    let mut records_per_release = Vec::new();

    let warnings = analyze_releases(inputs, config, |report| {
        tables.authorship.write(&report.authorship)?;
        tables.subsystems.write(&report.subsystems)?;
        tables.workload.write(&report.workload)?;
        tables.profiles.write(&report.profiles)?;
        tables.network.write(&report.network)?;
        records_per_release.push(report.records);

        let mut stem = file_stem(&report.release);
        while stems.contains(&stem) {
            stem.push('_');
        }
        stems.push(stem.clone());
        for (rel, body) in [
            (format!("edges/{stem}.csv"), &report.edges_csv),
            (format!("graphs/{stem}.net"), &report.pajek),
        ] {
            let path = staging.join(&rel);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            extra.push(rel);
        }
        Ok(())
    })?;

    let mut files = Vec::new();
    for table in [
        tables.authorship,
        tables.subsystems,
        tables.workload,
        tables.profiles,
        tables.network,
    ] {
        files.extend(table.finish()?);
    }
    files.extend(extra);
    Ok(StagedRun {
        files,
        warnings,
        records_per_release,
    })
}

fn manifest_bytes(inputs: &Inputs, config: &RunConfig, run: &StagedRun, outputs: Vec<OutputDigest>) -> Vec<u8> {
    let fingerprint = ConfigFingerprint {
        follow_renames: config.follow_renames,
        model: config.model,
        gini_population: config.gini_population,
        exclusions: &config.exclusions,
        rules: &inputs.rules_source,
        json: config.json,
    };
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(&fingerprint).expect("fingerprint serializes"));
    hasher.update(serde_json::to_vec(&inputs.digests).expect("digests serialize"));
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: hex::encode(hasher.finalize()),
        config: fingerprint,
        inputs: &inputs.digests,
        releases: inputs
            .releases
            .iter()
            .zip(&run.records_per_release)
            .map(|(r, &records)| ReleaseEntry {
                name: r.name.clone(),
                boundary: match &r.boundary {
                    Boundary::Commit(id) => id.clone(),
                    Boundary::Prefix(n) => format!("#{n}"),
                },
                records,
            })
            .collect(),
        ingest_warnings: run.warnings,
        outputs,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    bytes
}

fn publish(staging: &Path, out_dir: &Path, run: StagedRun, inputs: &Inputs, config: &RunConfig) -> Result<AnalyzeOutcome> {
    let mut outputs = Vec::with_capacity(run.files.len());
    for rel in &run.files {
        let path = staging.join(rel);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        outputs.push(OutputDigest {
            path: rel.clone(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
    }
    let manifest = manifest_bytes(inputs, config, &run, outputs);
    let manifest_path = staging.join("manifest.json");
    fs::write(&manifest_path, &manifest).map_err(|e| Error::io(&manifest_path, e))?;

    let mut all = run.files;
    all.push("manifest.json".to_string());
    for sub in ["edges", "graphs"] {
        let dir = out_dir.join(sub);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    for rel in &all {
        let to = out_dir.join(rel);
        fs::rename(staging.join(rel), &to).map_err(|e| Error::io(&to, e))?;
    }
    Ok(AnalyzeOutcome {
        output_dir: out_dir.to_path_buf(),
        releases: inputs.releases.iter().map(|r| r.name.clone()).collect(),
        files: all,
        manifest_sha256: hex::encode(Sha256::digest(&manifest)),
    })
}
