//! Immutable simple graphs with bit-vector adjacency rows, optional vertex
//! labels, edge-list persistence, and the discrepancy sampler.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("vertex {0} out of range for n={1}")]
    VertexOutOfRange(usize, usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed line {line}: {content:?}")]
    MalformedLine { line: usize, content: String },
}

/// Simple undirected graph. Adjacency is stored as n rows of n bits; the
/// structure is immutable once built, so shared reads are safe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<String>>,
    label_scheme: Option<String>,
}

impl Graph {
    pub(crate) fn new_empty(n: usize) -> Graph {
        let words = n.div_ceil(64);
        Graph { n, words, bits: vec![0; n * words], labels: None, label_scheme: None }
    }

    pub(crate) fn add_edge_unchecked(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub(crate) fn set_labels(&mut self, scheme: &str, labels: Vec<String>) {
        debug_assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self.label_scheme = Some(scheme.to_string());
    }

    /// Builds a graph from an edge list. Edges are deduplicated and
    /// symmetrized; loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut g = Graph::new_empty(n);
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            g.add_edge_unchecked(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adjacency row of `v` as a bit slice of `words_per_row()` words.
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        let total: usize = self.bits.iter().map(|w| w.count_ones() as usize).sum();
        total / 2
    }

    /// Degree d if the graph is d-regular.
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        let d = self.degree(0);
        (1..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter::new(self.row(v))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.neighbors(u) {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Exact intersection of the two neighborhoods (bitwise AND of rows).
    pub fn common_neighbors(&self, u: usize, v: usize) -> Vec<usize> {
        let ru = self.row(u);
        let rv = self.row(v);
        let words: Vec<u64> = ru.iter().zip(rv).map(|(a, b)| a & b).collect();
        BitIter::new(&words).collect()
    }

    pub fn common_degree(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Induced subgraph on `s`; result vertices follow the ascending order of
    /// `s` (duplicates collapsed) and labels are carried over.
    pub fn induced(&self, s: &[usize]) -> Result<Graph, GraphError> {
        let mut verts: Vec<usize> = s.to_vec();
        for &v in &verts {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange(v, self.n));
            }
        }
        verts.sort_unstable();
        verts.dedup();
        let mut g = Graph::new_empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge_unchecked(i, j);
                }
            }
        }
        if let (Some(labels), Some(scheme)) = (&self.labels, &self.label_scheme) {
            g.set_labels(scheme, verts.iter().map(|&v| labels[v].clone()).collect());
        }
        Ok(g)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label_scheme(&self) -> Option<&str> {
        self.label_scheme.as_deref()
    }

    /// The 3-regular girth-5 pattern on 10 vertices used throughout the
    /// embedding pipeline, with the vertex numbering the pipeline expects.
    pub fn petersen() -> Graph {
        let edges_1_indexed = [
            (1, 2), (1, 3), (1, 4), (2, 5), (2, 6), (3, 7), (3, 8), (4, 9), (4, 10),
            (5, 7), (5, 10), (6, 8), (6, 9), (7, 9), (8, 10),
        ];
        let edges: Vec<(usize, usize)> =
            edges_1_indexed.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        Graph::from_edges(10, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new_empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge_unchecked(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let mut g = Graph::new_empty(n);
        for u in 0..n {
            g.add_edge_unchecked(u, (u + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new_empty(n);
        for u in 1..n {
            g.add_edge_unchecked(u - 1, u);
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::new_empty(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge_unchecked(u, v);
            }
        }
        g
    }

    /// Erdos-Renyi G(n, p) with a fixed pair order, deterministic per seed.
    pub fn random_gnp(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::new_empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    g.add_edge_unchecked(u, v);
                }
            }
        }
        g
    }
}

/// Named pattern registry used by the CLI and the ordering tools.
pub fn named_pattern(name: &str) -> Option<Graph> {
    match name {
        "petersen" => Some(Graph::petersen()),
        "k23" => Some(Graph::complete_bipartite(2, 3)),
        _ => {
            if let Some(t) = name.strip_prefix('k').and_then(|s| s.parse::<usize>().ok()) {
                if (3..=6).contains(&t) {
                    return Some(Graph::complete(t));
                }
            }
            if let Some(l) = name.strip_prefix('c').and_then(|s| s.parse::<usize>().ok()) {
                if (4..=10).contains(&l) {
                    return Some(Graph::cycle(l));
                }
            }
            None
        }
    }
}

struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl<'a> BitIter<'a> {
    fn new(words: &'a [u64]) -> Self {
        BitIter { words, word_idx: 0, current: if words.is_empty() { 0 } else { words[0] } }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * 64 + bit);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

/// Iterate set bits of an arbitrary word slice.
pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    BitIter::new(words)
}

// ---------------------------------------------------------------------------
// Edge-list persistence
// ---------------------------------------------------------------------------

/// Writes the canonical edge-list format: `# n=<n>` header, optional
/// `# label-scheme=<s>` header, then one `u v` line per edge with u < v,
/// sorted, LF line endings.
pub fn write_edge_list(g: &Graph, path: &Path) -> Result<(), GraphError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# n={}", g.n())?;
    if let Some(scheme) = g.label_scheme() {
        writeln!(w, "# label-scheme={scheme}")?;
    }
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the format written by [`write_edge_list`]. Per-vertex labels are not
/// persisted; the label scheme header is restored when present.
pub fn read_edge_list(path: &Path) -> Result<Graph, GraphError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(GraphError::MalformedLine { line: 1, content: String::new() }),
    };
    let n: usize = header
        .strip_prefix("# n=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| GraphError::MalformedLine { line: 1, content: header.clone() })?;
    let mut scheme: Option<String> = None;
    let mut edges = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if lineno == 2 {
                if let Some(s) = rest.trim().strip_prefix("label-scheme=") {
                    scheme = Some(s.to_string());
                    continue;
                }
            }
            return Err(GraphError::MalformedLine { line: lineno, content: line });
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Option<usize> { tok.and_then(|t| t.parse().ok()) };
        match (parse(parts.next()), parse(parts.next()), parts.next()) {
            (Some(u), Some(v), None) => edges.push((u, v)),
            _ => return Err(GraphError::MalformedLine { line: lineno, content: line }),
        }
    }
    let mut g = Graph::from_edges(n, &edges)?;
    if let Some(s) = scheme {
        g.label_scheme = Some(s);
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbedMode {
    Subgraph,
    Induced,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingViolation {
    #[error("map length {0} does not match pattern size {1}")]
    SizeMismatch(usize, usize),
    #[error("host vertex {0} out of range")]
    HostOutOfRange(usize),
    #[error("map is not injective: host vertex {0} used twice")]
    NotInjective(usize),
    #[error("pattern edge ({0},{1}) has no host edge")]
    MissingEdge(usize, usize),
    #[error("pattern non-edge ({0},{1}) maps to a host edge")]
    ExtraEdge(usize, usize),
}

/// Injective adjacency-preserving map from a pattern into a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub pattern_size: usize,
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Embedding {
        Embedding { pattern_size: map.len(), map }
    }

    /// Independent validity check: injectivity, every pattern edge preserved,
    /// and (in induced mode) every pattern non-edge preserved.
    pub fn validate(
        &self,
        pattern: &Graph,
        host: &Graph,
        mode: EmbedMode,
    ) -> Result<(), EmbeddingViolation> {
        if self.map.len() != pattern.n() || self.pattern_size != pattern.n() {
            return Err(EmbeddingViolation::SizeMismatch(self.map.len(), pattern.n()));
        }
        let mut seen = std::collections::HashSet::new();
        for &h in &self.map {
            if h >= host.n() {
                return Err(EmbeddingViolation::HostOutOfRange(h));
            }
            if !seen.insert(h) {
                return Err(EmbeddingViolation::NotInjective(h));
            }
        }
        for i in 0..pattern.n() {
            for j in i + 1..pattern.n() {
                let pe = pattern.has_edge(i, j);
                let he = host.has_edge(self.map[i], self.map[j]);
                if pe && !he {
                    return Err(EmbeddingViolation::MissingEdge(i, j));
                }
                if mode == EmbedMode::Induced && !pe && he {
                    return Err(EmbeddingViolation::ExtraEdge(i, j));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Jumbledness certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertProvenance {
    EigenvalueDerived,
    SampledLowerBound,
}

impl fmt::Display for CertProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertProvenance::EigenvalueDerived => write!(f, "eigenvalue-derived"),
            CertProvenance::SampledLowerBound => write!(f, "sampled-lower-bound"),
        }
    }
}

/// A (density, alpha) discrepancy certificate. Eigenvalue-derived certificates
/// are only issued for regular graphs; sampled ones are lower bounds on any
/// admissible alpha. `optimality_ratio` is alpha/sqrt(d) when d is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumbledCert {
    pub density: Ratio<i64>,
    pub alpha: f64,
    pub provenance: CertProvenance,
    pub optimality_ratio: Option<f64>,
}

// ---------------------------------------------------------------------------
// Discrepancy sampling
// ---------------------------------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Empirical lower bound on any admissible alpha: the maximum over sampled
/// disjoint pairs (X, Y) of |e(X,Y) - p|X||Y|| / sqrt(|X||Y|).
///
/// X and Y are disjoint uniform subsets with sizes log-uniform in [1, n/2];
/// each trial derives its own sub-seed, so the result is deterministic given
/// (seed, trials) and independent of any sharding of the trial range.
pub fn sample_discrepancy(g: &Graph, density: f64, trials: u64, seed: u64) -> f64 {
    let n = g.n();
    if n < 2 {
        return 0.0;
    }
    let max_size = (n / 2).max(1);
    let mut scratch: Vec<usize> = (0..n).collect();
    let mut ymask = vec![0u64; g.words_per_row()];
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(t)));
        let sx = log_uniform_size(&mut rng, max_size);
        let sy = log_uniform_size(&mut rng, max_size);
        let (head, _) = scratch.partial_shuffle(&mut rng, sx + sy);
        let xs = &head[..sx];
        let ys = &head[sx..sx + sy];
        for w in ymask.iter_mut() {
            *w = 0;
        }
        for &v in ys {
            ymask[v / 64] |= 1 << (v % 64);
        }
        let mut e = 0usize;
        for &u in xs {
            e += g
                .row(u)
                .iter()
                .zip(&ymask)
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum::<usize>();
        }
        let expected = density * sx as f64 * sy as f64;
        let disc = (e as f64 - expected).abs() / ((sx as f64) * (sy as f64)).sqrt();
        if disc > worst {
            worst = disc;
        }
    }
    worst
}

fn log_uniform_size(rng: &mut ChaCha8Rng, max: usize) -> usize {
    if max <= 1 {
        return 1;
    }
    let u: f64 = rng.random();
    let s = (u * (max as f64).ln()).exp().floor() as usize;
    s.clamp(1, max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_basics() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert_eq!(k3.regular_degree(), Some(2));

        let m = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(m.degrees(), vec![1, 1, 1, 1]);

        assert!(matches!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::LoopEdge(0))));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 5)]),
            Err(GraphError::VertexOutOfRange(5, 2))
        ));
    }

    #[test]
    fn symmetry_and_no_loops_hold() {
        let g = Graph::random_gnp(50, 0.3, 7);
        for u in 0..50 {
            assert!(!g.has_edge(u, u));
            for v in 0..50 {
                assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = Graph::complete(4);
        let sub = k4.induced(&[0, 1, 2]).unwrap();
        assert_eq!(sub, Graph::complete(3));

        let c5 = Graph::cycle(5);
        let p3 = c5.induced(&[0, 1, 2]).unwrap();
        assert_eq!(p3.edge_count(), 2);
        assert_eq!(p3.degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn common_neighbors_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.common_neighbors(0, 1), vec![2, 3]);
        let c5 = Graph::cycle(5);
        assert!(c5.common_neighbors(0, 1).is_empty());
    }

    #[test]
    fn petersen_shape() {
        let p = Graph::petersen();
        assert_eq!(p.n(), 10);
        assert_eq!(p.edge_count(), 15);
        assert_eq!(p.regular_degree(), Some(3));
        // Strong regularity (10,3,0,1): adjacent pairs share 0 neighbors,
        // non-adjacent pairs share exactly 1.
        for u in 0..10 {
            for v in u + 1..10 {
                let c = p.common_degree(u, v);
                if p.has_edge(u, v) {
                    assert_eq!(c, 0);
                } else {
                    assert_eq!(c, 1);
                }
            }
        }
        // Any 6-subset induces a triangle-free graph (girth 5): scan triples.
        let sub = p.induced(&[0, 2, 4, 6, 8, 9]).unwrap();
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    assert!(!(sub.has_edge(a, b) && sub.has_edge(b, c) && sub.has_edge(a, c)));
                }
            }
        }
    }

    #[test]
    fn named_patterns() {
        assert_eq!(named_pattern("petersen").unwrap().n(), 10);
        assert_eq!(named_pattern("k5").unwrap().edge_count(), 10);
        assert_eq!(named_pattern("c7").unwrap().n(), 7);
        assert_eq!(named_pattern("k23").unwrap().edge_count(), 6);
        assert!(named_pattern("k9").is_none());
        assert!(named_pattern("bogus").is_none());
    }

    #[test]
    fn discrepancy_degenerate_cases() {
        let k = Graph::complete(30);
        assert_eq!(sample_discrepancy(&k, 1.0, 200, 3), 0.0);
        let e = Graph::new_empty(30);
        assert_eq!(sample_discrepancy(&e, 0.0, 200, 3), 0.0);
    }

    #[test]
    fn edge_list_round_trip() {
        let dir = std::env::temp_dir();
        let path = dir.join("pseudoturan_test_k3.el");
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        write_edge_list(&k3, &path).unwrap();
        let back = read_edge_list(&path).unwrap();
        assert_eq!(back, k3);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn edge_list_bad_header() {
        let dir = std::env::temp_dir();
        let path = dir.join("pseudoturan_test_bad.el");
        std::fs::write(&path, "nodes: 3\n0 1\n").unwrap();
        assert!(matches!(
            read_edge_list(&path),
            Err(GraphError::MalformedLine { line: 1, .. })
        ));
        std::fs::write(&path, "# n=3\n0 1 2\n").unwrap();
        assert!(matches!(
            read_edge_list(&path),
            Err(GraphError::MalformedLine { line: 2, .. })
        ));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn embedding_validation() {
        let p = Graph::petersen();
        let host = Graph::complete(10);
        let identity = Embedding::new((0..10).collect());
        assert!(identity.validate(&p, &p, EmbedMode::Induced).is_ok());
        assert!(identity.validate(&p, &host, EmbedMode::Subgraph).is_ok());
        // Complete host adds edges the pattern lacks: induced mode must fail.
        assert!(matches!(
            identity.validate(&p, &host, EmbedMode::Induced),
            Err(EmbeddingViolation::ExtraEdge(_, _))
        ));
        // Repeated host vertex.
        let dup = Embedding::new(vec![0, 0, 1, 2, 3, 4, 5, 6, 7, 8]);
        assert!(matches!(
            dup.validate(&p, &host, EmbedMode::Subgraph),
            Err(EmbeddingViolation::NotInjective(0))
        ));
        // Swap two pattern vertices across a non-edge: edge preservation fails
        // against the pattern itself.
        let mut map: Vec<usize> = (0..10).collect();
        map.swap(0, 6);
        let bad = Embedding::new(map);
        assert!(bad.validate(&p, &p, EmbedMode::Subgraph).is_err());
    }
}
