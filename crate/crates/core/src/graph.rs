//! The complete `±`-labeled similarity graph, stored through its positive
//! edges, plus clusterings and the plain-text file formats.
//!
//! Edge-list files hold one positive edge per line as two whitespace-separated
//! tokens; lines starting with `#` and blank lines are skipped. Every pair not
//! listed is negative. Ground-truth files hold one `token cluster_token` line
//! per vertex.

use std::borrow::Cow;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::{Error, Result};

/// Dense vertex index in `0..n`.
pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    /// `+1` or `-1`.
    pub fn value(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

/// Complete similarity graph on `n` vertices, represented by the sorted
/// positive neighbourhood of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityGraph {
    adjacency: Vec<Vec<VertexId>>,
    edge_count: usize,
    tokens: Option<Vec<String>>,
}

impl SimilarityGraph {
    /// Graph with `n` vertices and no positive edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
            tokens: None,
        }
    }

    /// Builds a graph from positive edges over ids `0..n`. Duplicates and
    /// reversed duplicates collapse, self-loops are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        Ok(Self::from_raw_adjacency(adjacency, None).0)
    }

    // Sorts and deduplicates; returns the number of duplicate edges removed.
    fn from_raw_adjacency(
        mut adjacency: Vec<Vec<VertexId>>,
        tokens: Option<Vec<String>>,
    ) -> (Self, usize) {
        let mut raw = 0;
        let mut kept = 0;
        for list in &mut adjacency {
            raw += list.len();
            list.sort_unstable();
            list.dedup();
            kept += list.len();
        }
        let graph = Self {
            adjacency,
            edge_count: kept / 2,
            tokens,
        };
        (graph, (raw - kept) / 2)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of positive edges.
    pub fn m(&self) -> usize {
        self.edge_count
    }

    /// Sorted positive neighbourhood of `v`.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Sign of the pair `{u, v}`; absent edges are negative.
    pub fn edge_sign(&self, u: VertexId, v: VertexId) -> Result<Sign> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::Domain(format!(
                "pair ({u}, {v}) out of range for n = {n}"
            )));
        }
        if u == v {
            return Err(Error::Domain(format!("pair ({u}, {v}) is not a pair")));
        }
        Ok(Sign::from_bool(self.has_edge(u, v)))
    }

    /// Positive edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let start = list.partition_point(|&v| v <= u);
            list[start..].iter().map(move |&v| (u, v))
        })
    }

    /// External name of `v`: the ingested token, or the id itself.
    pub fn token(&self, v: VertexId) -> Cow<'_, str> {
        match &self.tokens {
            Some(tokens) => Cow::Borrowed(tokens[v].as_str()),
            None => Cow::Owned(v.to_string()),
        }
    }

    /// Labels every connected component of the positive graph as one cluster.
    pub fn positive_components(&self) -> Clustering {
        let n = self.n();
        let mut labels = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next = 0;
        for start in 0..n {
            if labels[start] != usize::MAX {
                continue;
            }
            labels[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if labels[w] == usize::MAX {
                        labels[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        Clustering::new(labels)
    }

    /// Writes the canonical edge-list form (one `u v` line per positive edge).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# n={} m={}", self.n(), self.m())?;
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.token(u), self.token(v))?;
        }
        Ok(())
    }

    /// Writes one `token cluster` line per vertex.
    pub fn write_labels<W: Write>(&self, clustering: &Clustering, mut out: W) -> Result<()> {
        check_len(self, clustering)?;
        for v in 0..self.n() {
            writeln!(out, "{} {}", self.token(v), clustering.label(v))?;
        }
        Ok(())
    }
}

pub(crate) fn check_len(g: &SimilarityGraph, c: &Clustering) -> Result<()> {
    if c.len() != g.n() {
        return Err(Error::Domain(format!(
            "clustering has {} labels but the graph has {} vertices",
            c.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Assignment of a cluster label to every vertex. A cluster is the maximal
/// set of vertices sharing a label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
}

impl Clustering {
    pub fn new(labels: Vec<usize>) -> Self {
        Self { labels }
    }

    /// Every vertex in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self::new((0..n).collect())
    }

    /// Builds labels from explicit clusters; every vertex in `0..n` must
    /// appear exactly once.
    pub fn from_clusters(n: usize, clusters: &[Vec<VertexId>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (label, cluster) in clusters.iter().enumerate() {
            for &v in cluster {
                if v >= n || labels[v] != usize::MAX {
                    return Err(Error::Domain(format!(
                        "vertex {v} out of range or assigned twice"
                    )));
                }
                labels[v] = label;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Domain(format!("vertex {v} is not assigned")));
        }
        Ok(Self::new(labels))
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> usize {
        self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Same partition with labels renumbered `0, 1, ...` in order of first
    /// appearance.
    pub fn canonical(&self) -> Clustering {
        let mut map = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Clustering::new(labels)
    }

    /// Clusters as vertex lists, ordered by their smallest member.
    pub fn clusters(&self) -> Vec<Vec<VertexId>> {
        let canonical = self.canonical();
        let count = canonical.labels.iter().max().map_or(0, |&m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (v, &l) in canonical.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters().iter().map(Vec::len).collect()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters().len()
    }

    pub fn num_nonsingleton_clusters(&self) -> usize {
        self.sizes().into_iter().filter(|&s| s > 1).count()
    }

    /// Whether both clusterings describe the same partition, ignoring label
    /// values.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Dense id assignment for external vertex tokens, in first-seen order.
#[derive(Debug, Default)]
struct TokenMap {
    ids: HashMap<String, VertexId>,
    tokens: Vec<String>,
}

impl TokenMap {
    fn intern(&mut self, token: &str) -> VertexId {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len();
        self.ids.insert(token.to_owned(), id);
        self.tokens.push(token.to_owned());
        id
    }
}

/// Counts of input irregularities dropped during ingestion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub duplicate_edges: usize,
    pub self_loops: usize,
    /// Vertices that appear in the edge list but not in the label file; each
    /// gets its own singleton label.
    pub unlabeled_vertices: usize,
}

impl IngestReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.duplicate_edges > 0 {
            out.push(format!("{} duplicate edges ignored", self.duplicate_edges));
        }
        if self.self_loops > 0 {
            out.push(format!("{} self-loops ignored", self.self_loops));
        }
        if self.unlabeled_vertices > 0 {
            out.push(format!(
                "{} vertices without a ground-truth label placed in singletons",
                self.unlabeled_vertices
            ));
        }
        out
    }
}

#[derive(Debug, Default)]
struct Builder {
    map: TokenMap,
    adjacency: Vec<Vec<VertexId>>,
    report: IngestReport,
}

impl Builder {
    fn vertex(&mut self, token: &str) -> VertexId {
        let id = self.map.intern(token);
        if id == self.adjacency.len() {
            self.adjacency.push(Vec::new());
        }
        id
    }

    fn edge(&mut self, a: &str, b: &str) {
        let u = self.vertex(a);
        let v = self.vertex(b);
        if u == v {
            self.report.self_loops += 1;
        } else {
            self.adjacency[u].push(v);
            self.adjacency[v].push(u);
        }
    }

    fn finish(self) -> (SimilarityGraph, IngestReport) {
        let Builder {
            map,
            adjacency,
            mut report,
        } = self;
        let (graph, duplicates) = SimilarityGraph::from_raw_adjacency(adjacency, Some(map.tokens));
        report.duplicate_edges = duplicates;
        (graph, report)
    }
}

/// Builds a graph from token pairs, mapping tokens to ids in first-seen order.
pub fn build_from_edge_list<I, S>(pairs: I) -> (SimilarityGraph, IngestReport)
where
    I: IntoIterator<Item = (S, S)>,
    S: AsRef<str>,
{
    let mut builder = Builder::default();
    for (a, b) in pairs {
        builder.report.lines += 1;
        builder.edge(a.as_ref(), b.as_ref());
    }
    builder.finish()
}

fn read_edges<R: BufRead>(reader: R, builder: &mut Builder) -> Result<()> {
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => {
                builder.report.lines += 1;
                builder.edge(a, b);
            }
            _ => {
                return Err(Error::Parse {
                    line: index + 1,
                    message: format!("expected two tokens, found `{trimmed}`"),
                })
            }
        }
    }
    Ok(())
}

/// Parses an edge-list file.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(SimilarityGraph, IngestReport)> {
    let mut builder = Builder::default();
    read_edges(reader, &mut builder)?;
    Ok(builder.finish())
}

/// Parses an edge list together with its ground-truth label file. Tokens
/// that occur only in the label file become isolated vertices, appended after
/// the edge-list tokens.
pub fn parse_labeled<R1: BufRead, R2: BufRead>(
    edges: R1,
    labels: R2,
) -> Result<(SimilarityGraph, Clustering, IngestReport)> {
    let mut builder = Builder::default();
    read_edges(edges, &mut builder)?;

    let mut cluster_ids: HashMap<String, usize> = HashMap::new();
    let mut assigned: Vec<Option<usize>> = Vec::new();
    for (index, line) in labels.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (token, cluster) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(c), None) => (t, c),
            _ => {
                return Err(Error::Parse {
                    line: index + 1,
                    message: format!("expected `token cluster`, found `{trimmed}`"),
                })
            }
        };
        let v = builder.vertex(token);
        let next = cluster_ids.len();
        let label = *cluster_ids.entry(cluster.to_owned()).or_insert(next);
        if assigned.len() <= v {
            assigned.resize(v + 1, None);
        }
        if assigned[v].is_some_and(|l| l != label) {
            return Err(Error::Parse {
                line: index + 1,
                message: format!("vertex `{token}` labeled twice"),
            });
        }
        assigned[v] = Some(label);
    }

    let (graph, mut report) = builder.finish();
    assigned.resize(graph.n(), None);
    let mut next = cluster_ids.len();
    let labels = assigned
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                report.unlabeled_vertices += 1;
                next += 1;
                next - 1
            })
        })
        .collect();
    Ok((graph, Clustering::new(labels), report))
}
