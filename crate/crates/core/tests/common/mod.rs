//! Test-side reference implementations and random input generators.
//!
//! Everything here is written from the model definitions, without reusing
//! library internals: histories are replayed naively, graph metrics are found
//! by enumerating vertex triples and statistics by enumerating all pairs.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use authorship::ingest::{ChangeKind, CommitRecord, DeveloperId, FileChange};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pipeline")
}

pub fn dev(i: usize) -> DeveloperId {
    DeveloperId::new(&format!("Dev {i}"), &format!("dev{i}@example.org"))
}

/// Random history over `paths`, with adds, modifies, deletes and renames
/// drawn regardless of whether the paths are live, so every tolerance rule
/// (unknown paths, duplicate adds, rename onto a live path) gets exercised.
pub fn random_history(rng: &mut impl Rng, max_commits: usize, paths: &[String], max_devs: usize) -> Vec<CommitRecord> {
    let commits = rng.gen_range(1..=max_commits);
    let devs = rng.gen_range(1..=max_devs);
    let mut live: BTreeSet<String> = BTreeSet::new();
    (0..commits)
        .map(|i| {
            let n = rng.gen_range(1..=3);
            let mut changes = Vec::with_capacity(n);
            for _ in 0..n {
                let roll = rng.gen_range(0..100);
                let change = if roll < 30 {
                    let p = paths.choose(rng).unwrap().clone();
                    live.insert(p.clone());
                    FileChange::add(&p)
                } else if roll < 65 {
                    let p = pick_live(rng, &live, paths);
                    live.insert(p.clone());
                    FileChange::modify(&p)
                } else if roll < 80 || paths.len() < 2 {
                    let p = pick_live(rng, &live, paths);
                    live.remove(&p);
                    FileChange::delete(&p)
                } else {
                    let old = pick_live(rng, &live, paths);
                    let new = loop {
                        let p = paths.choose(rng).unwrap();
                        if *p != old {
                            break p.clone();
                        }
                    };
                    live.remove(&old);
                    live.insert(new.clone());
                    FileChange::rename(&old, &new)
                };
                changes.push(change);
            }
            CommitRecord {
                id: format!("c{i:03}"),
                author: dev(rng.gen_range(0..devs)),
                timestamp: i as i64,
                changes,
            }
        })
        .collect()
}

/// Mostly a live path, so that most modifies, deletes and renames are valid.
fn pick_live<R: Rng + ?Sized>(rng: &mut R, live: &BTreeSet<String>, paths: &[String]) -> String {
    if !live.is_empty() && rng.gen_bool(0.85) {
        live.iter().nth(rng.gen_range(0..live.len())).unwrap().clone()
    } else {
        paths.choose(rng).unwrap().clone()
    }
}

pub fn flat_paths(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("src/f{i}.c")).collect()
}

// ---------------------------------------------------------------- replay

#[derive(Debug, Clone)]
pub struct Lineage {
    pub path: String,
    pub creator: Option<String>,
    /// Author email of every commit that touched the file, in order.
    pub touches: Vec<String>,
}

/// Live path to its lineage after replaying `records`.
pub fn replay(records: &[CommitRecord], follow_renames: bool) -> BTreeMap<String, Lineage> {
    let mut lineages: Vec<Lineage> = Vec::new();
    let mut live: HashMap<String, usize> = HashMap::new();
    fn spawn(lineages: &mut Vec<Lineage>, live: &mut HashMap<String, usize>, path: &str, creator: Option<&str>) -> usize {
        lineages.push(Lineage {
            path: path.to_string(),
            creator: creator.map(str::to_string),
            touches: Vec::new(),
        });
        live.insert(path.to_string(), lineages.len() - 1);
        lineages.len() - 1
    }

    for record in records {
        let who = record.author.email.as_str();
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for change in &record.changes {
            let path = change.path.as_str();
            match change.kind {
                ChangeKind::Add => {
                    let id = match live.get(path) {
                        Some(&id) => id,
                        None => spawn(&mut lineages, &mut live, path, Some(who)),
                    };
                    touched.insert(id);
                }
                ChangeKind::Modify | ChangeKind::Delete => {
                    let id = match live.get(path) {
                        Some(&id) => id,
                        None => spawn(&mut lineages, &mut live, path, None),
                    };
                    touched.insert(id);
                    if change.kind == ChangeKind::Delete {
                        live.remove(path);
                    }
                }
                ChangeKind::Rename => {
                    let old = change.old_path.as_deref().unwrap();
                    let source = live.remove(old);
                    if follow_renames {
                        let id = match source {
                            Some(id) => {
                                live.insert(path.to_string(), id);
                                lineages[id].path = path.to_string();
                                id
                            }
                            None => match live.get(path) {
                                Some(&id) => id,
                                None => spawn(&mut lineages, &mut live, path, None),
                            },
                        };
                        touched.insert(id);
                    } else {
                        if let Some(id) = source {
                            touched.insert(id);
                        }
                        live.remove(path);
                        touched.insert(spawn(&mut lineages, &mut live, path, Some(who)));
                    }
                }
            }
        }
        for id in touched {
            lineages[id].touches.push(who.to_string());
        }
    }
    live.into_iter().map(|(p, id)| (p, lineages[id].clone())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEntry {
    pub fa: u8,
    pub dl: u64,
    pub ac: u64,
    pub doa_abs: f64,
    pub doa_norm: f64,
    pub is_author: bool,
}

/// Per developer email: counters, DOA and the author decision.
pub fn oracle_doa(lineage: &Lineage) -> BTreeMap<String, OracleEntry> {
    let total = lineage.touches.len() as u64;
    let mut out: BTreeMap<String, OracleEntry> = BTreeMap::new();
    for email in &lineage.touches {
        if out.contains_key(email) {
            continue;
        }
        let dl = lineage.touches.iter().filter(|t| *t == email).count() as u64;
        let fa = u8::from(lineage.creator.as_deref() == Some(email.as_str()));
        let ac = total - dl;
        let doa_abs = 3.293 + 1.098 * f64::from(fa) + 0.164 * dl as f64 - 0.321 * (ac as f64).ln_1p();
        out.insert(
            email.clone(),
            OracleEntry {
                fa,
                dl,
                ac,
                doa_abs,
                doa_norm: 0.0,
                is_author: false,
            },
        );
    }
    let best = out.values().map(|e| e.doa_abs).fold(f64::MIN, f64::max);
    for e in out.values_mut() {
        e.doa_norm = e.doa_abs / best;
        e.is_author = e.doa_norm > 0.75 && e.doa_abs >= 3.293;
    }
    out
}

// ---------------------------------------------------------------- statistics

pub fn gini_pairwise(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let mut diff = 0.0;
    for a in x {
        for b in x {
            diff += (a - b).abs();
        }
    }
    diff / (2.0 * n * n * mean)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Kernel enumeration over index pairs of the decreasingly sorted sample.
pub fn medcouple_enumerated(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let m = median(&mut s.clone());
    if s[0] == s[s.len() - 1] {
        return 0.0;
    }
    let plus: Vec<usize> = (0..s.len()).filter(|&i| s[i] >= m).collect();
    let minus: Vec<usize> = (0..s.len()).filter(|&j| s[j] <= m).collect();
    let first_tie = (0..s.len()).find(|&i| s[i] == m);
    let mut kernel = Vec::new();
    for &i in &plus {
        for &j in &minus {
            let (xi, xj) = (s[i], s[j]);
            let h = if xi == m && xj == m {
                let t = s.iter().filter(|&&v| v == m).count() as i64;
                let a = (i - first_tie.unwrap()) as i64;
                let b = (j - first_tie.unwrap()) as i64;
                (t - 1 - a - b).signum() as f64
            } else {
                ((xi - m) - (m - xj)) / (xi - xj)
            };
            kernel.push(h);
        }
    }
    median(&mut kernel)
}

// ---------------------------------------------------------------- graphs

pub struct BruteGraph {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl BruteGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
        Self { n, adj }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn mean_degree(&self) -> Option<f64> {
        (self.n > 0).then(|| (0..self.n).map(|v| self.degree(v)).sum::<usize>() as f64 / self.n as f64)
    }

    /// Closed over connected triples, both counted per centre vertex.
    pub fn transitivity(&self) -> Option<f64> {
        let (mut closed, mut connected) = (0usize, 0usize);
        for c in 0..self.n {
            for a in 0..self.n {
                for b in a + 1..self.n {
                    if a != c && b != c && self.adj[c][a] && self.adj[c][b] {
                        connected += 1;
                        if self.adj[a][b] {
                            closed += 1;
                        }
                    }
                }
            }
        }
        (connected > 0).then(|| closed as f64 / connected as f64)
    }

    pub fn avg_local(&self) -> Option<f64> {
        let mut values = Vec::new();
        for c in 0..self.n {
            let nb: Vec<usize> = (0..self.n).filter(|&u| self.adj[c][u]).collect();
            if nb.len() < 2 {
                continue;
            }
            let mut links = 0;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if self.adj[nb[i]][nb[j]] {
                        links += 1;
                    }
                }
            }
            values.push(links as f64 / (nb.len() * (nb.len() - 1) / 2) as f64);
        }
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    /// Newman's edge-sum form, evaluated in integers up to the last division.
    pub fn assortativity(&self) -> Option<f64> {
        let edges = self.edges();
        let m = edges.len() as i128;
        if m == 0 {
            return None;
        }
        let (mut sjk, mut s1, mut s2) = (0i128, 0i128, 0i128);
        for &(a, b) in &edges {
            let (j, k) = (self.degree(a) as i128, self.degree(b) as i128);
            sjk += j * k;
            s1 += j + k;
            s2 += j * j + k * k;
        }
        let num = 4 * m * sjk - s1 * s1;
        let den = 2 * m * s2 - s1 * s1;
        (den != 0).then(|| num as f64 / den as f64)
    }
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}
