//! Co-authorship network: authors are vertices, and two authors are linked
//! when they co-author at least one live file.
//!
//! All metrics are unweighted. Metrics that are undefined for a graph
//! (no connected triples, zero degree variance) come back as `None`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::doa::AuthorshipMap;
use crate::error::{Error, Result};
use crate::ingest::{DevIdx, DeveloperId};
use crate::subsystem::Scope;

/// Simple undirected graph with vertices sorted by developer email.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoauthorGraph {
    vertices: Vec<DeveloperId>,
    adjacency: Vec<BTreeSet<usize>>,
    shared_files: BTreeMap<(usize, usize), usize>,
}

impl CoauthorGraph {
    /// Builds a graph from vertex labels and index pairs. Self-loops are
    /// dropped, repeated pairs raise the shared-file weight.
    pub fn from_edges(vertices: Vec<DeveloperId>, edges: &[(usize, usize)]) -> Self {
        let mut g = Self {
            adjacency: vec![BTreeSet::new(); vertices.len()],
            vertices,
            shared_files: BTreeMap::new(),
        };
        for &(a, b) in edges {
            g.link(a, b);
        }
        g
    }

    fn link(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let key = (a.min(b), a.max(b));
        *self.shared_files.entry(key).or_insert(0) += 1;
        self.adjacency[a].insert(b);
        self.adjacency[b].insert(a);
    }

    pub fn vertices(&self) -> &[DeveloperId] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.shared_files.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    /// Edges `(a, b, shared_files)` with `a < b`, in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.shared_files.iter().map(|(&(a, b), &w)| (a, b, w))
    }
}

pub fn build_graph(map: &AuthorshipMap, scope: &Scope<'_>) -> CoauthorGraph {
    let authors: BTreeSet<DevIdx> = map.files_in(scope).flat_map(|f| f.authors()).collect();
    let mut vertices: Vec<(DevIdx, &DeveloperId)> =
        authors.into_iter().map(|d| (d, map.developer(d))).collect();
    vertices.sort_by(|a, b| a.1.cmp(b.1));
    let position: BTreeMap<DevIdx, usize> = vertices
        .iter()
        .enumerate()
        .map(|(pos, (d, _))| (*d, pos))
        .collect();

    let mut graph = CoauthorGraph::from_edges(vertices.iter().map(|(_, id)| (*id).clone()).collect(), &[]);
    for file in map.files_in(scope) {
        let members: Vec<usize> = file.authors().map(|d| position[&d]).collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                graph.link(a, b);
            }
        }
    }
    graph
}

pub fn mean_degree(g: &CoauthorGraph) -> Result<f64> {
    if g.vertex_count() == 0 {
        return Err(Error::domain("mean degree of an empty graph"));
    }
    Ok(2.0 * g.edge_count() as f64 / g.vertex_count() as f64)
}

fn common_neighbors(g: &CoauthorGraph, a: usize, b: usize) -> usize {
    let (small, large) = if g.degree(a) <= g.degree(b) { (a, b) } else { (b, a) };
    g.adjacency[small]
        .iter()
        .filter(|w| g.adjacency[large].contains(w))
        .count()
}

/// Global transitivity: three times the triangle count over the number of
/// connected triples.
pub fn clustering_global(g: &CoauthorGraph) -> Option<f64> {
    let triples: usize = (0..g.vertex_count())
        .map(|v| {
            let d = g.degree(v);
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        return None;
    }
    // every triangle is seen once from each of its three edges
    let closed: usize = g.edges().map(|(a, b, _)| common_neighbors(g, a, b)).sum();
    Some(closed as f64 / triples as f64)
}

/// Mean local clustering over vertices of degree two or more.
pub fn clustering_avg_local(g: &CoauthorGraph) -> Option<f64> {
    let mut sum = 0.0;
    let mut eligible = 0usize;
    for v in 0..g.vertex_count() {
        let d = g.degree(v);
        if d < 2 {
            continue;
        }
        let links: usize = g.neighbors(v).map(|u| common_neighbors(g, u, v)).sum::<usize>() / 2;
        sum += links as f64 / (d * (d - 1) / 2) as f64;
        eligible += 1;
    }
    (eligible > 0).then(|| sum / eligible as f64)
}

/// Degree assortativity: Pearson correlation of endpoint degrees over both
/// orientations of every edge.
pub fn assortativity(g: &CoauthorGraph) -> Option<f64> {
    let m = g.edge_count();
    if m == 0 {
        return None;
    }
    let pairs = 2.0 * m as f64;
    let mut sum = 0.0;
    for (a, b, _) in g.edges() {
        sum += (g.degree(a) + g.degree(b)) as f64;
    }
    let mean = sum / pairs;
    let mut var = 0.0;
    let mut cov = 0.0;
    for (a, b, _) in g.edges() {
        let da = g.degree(a) as f64 - mean;
        let db = g.degree(b) as f64 - mean;
        var += da * da + db * db;
        cov += 2.0 * da * db;
    }
    (var > 0.0).then(|| cov / var)
}

pub fn solitary_authors(g: &CoauthorGraph) -> Vec<&DeveloperId> {
    (0..g.vertex_count())
        .filter(|&v| g.degree(v) == 0)
        .map(|v| &g.vertices[v])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkMetrics {
    pub vertices: usize,
    pub edges: usize,
    pub mean_degree: Option<f64>,
    pub transitivity: Option<f64>,
    pub avg_local_clustering: Option<f64>,
    pub assortativity: Option<f64>,
    pub solitary_count: usize,
    pub solitary_pct: Option<f64>,
}

pub fn network_metrics(g: &CoauthorGraph) -> NetworkMetrics {
    let solitary_count = solitary_authors(g).len();
    let n = g.vertex_count();
    NetworkMetrics {
        vertices: n,
        edges: g.edge_count(),
        mean_degree: mean_degree(g).ok(),
        transitivity: clustering_global(g),
        avg_local_clustering: clustering_avg_local(g),
        assortativity: assortativity(g),
        solitary_count,
        solitary_pct: (n > 0).then(|| 100.0 * solitary_count as f64 / n as f64),
    }
}

/// `author_a,author_b,shared_files` rows, header included.
pub fn edge_list_csv(g: &CoauthorGraph) -> String {
    let mut out = String::from("author_a,author_b,shared_files\n");
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for (a, b, w) in g.edges() {
        writer
            .write_record([&g.vertices[a].email, &g.vertices[b].email, &w.to_string()])
            .expect("in-memory csv write");
    }
    out.push_str(&String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8"));
    out
}

/// Pajek `.net` rendering: a `*Vertices` block labelled by email, then an
/// `*Edges` block of 1-based index pairs weighted by shared files.
pub fn pajek(g: &CoauthorGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", g.vertex_count());
    for (i, v) in g.vertices.iter().enumerate() {
        let _ = writeln!(out, "{} \"{}\"", i + 1, v.email.replace('"', "'"));
    }
    let _ = writeln!(out, "*Edges");
    for (a, b, w) in g.edges() {
        let _ = writeln!(out, "{} {} {}", a + 1, b + 1, w);
    }
    out
}
