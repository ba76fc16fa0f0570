//! Constructive embedding engines: wide-vertex selection, the two-sided
//! cleaning procedure, exact forest embedding over candidate sets, the staged
//! pipeline that assembles the 10-vertex 3-regular pattern, and the general
//! certificate-driven embedder (greedy prefix plus forest tail).

use crate::graph::{EmbedMode, Embedding, Graph};
use crate::order::{eval_dhat2, OrderingCertificate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("no vertex is wide enough for every target set")]
    NotFound,
    #[error("cleaning peeled the {side} side to nothing")]
    Degenerated { side: &'static str },
    #[error("candidate set {0} was exhausted")]
    CandidateExhausted(usize),
    #[error("pattern is not a forest")]
    NotAForest,
}

/// Stage constants of the pipeline, as fractions of the relevant target
/// (p*n, p^2*n, or n). The `paper` profile carries the published constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageFractions {
    /// Degree floor for the root vertex, times p*n.
    pub v1: f64,
    /// Promised retention of each cleaned side.
    pub clean_retention: f64,
    /// Size of the two-way branching set, times p*n.
    pub z78: f64,
    /// Informational floor for the wide middle set, times n.
    pub w_floor: f64,
    /// Neighbor threshold into the branching set, times p^2*n.
    pub w_threshold: f64,
    /// Size of each branch neighbor pool, times p^2*n.
    pub z7: f64,
    /// Size of each root-side pool, times p^2*n.
    pub z2: f64,
    /// Cleaning degree threshold, times p and the far side's size.
    pub clean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    /// Working edge density p.
    pub density: f64,
    /// Margin q in the wide-vertex guarantee (q-1)/q * p * |Y|.
    pub q_margin: f64,
    pub fractions: StageFractions,
}

impl EmbedParams {
    /// The published stage constants.
    pub fn paper(density: f64) -> EmbedParams {
        EmbedParams {
            density,
            q_margin: 2.0,
            fractions: StageFractions {
                v1: 0.5,
                clean_retention: 0.9,
                z78: 9.0 / 200.0,
                w_floor: 0.4,
                w_threshold: 1.0 / 500.0,
                z7: 1.0 / 1000.0,
                z2: 1.0 / 50.0,
                clean: 0.1,
            },
        }
    }

    /// Softer thresholds for small or sparse hosts.
    pub fn relaxed(density: f64) -> EmbedParams {
        EmbedParams {
            density,
            q_margin: 1.25,
            fractions: StageFractions {
                v1: 0.25,
                clean_retention: 0.9,
                z78: 9.0 / 400.0,
                w_floor: 0.2,
                w_threshold: 1.0 / 1000.0,
                z7: 1.0 / 2000.0,
                z2: 1.0 / 100.0,
                clean: 0.05,
            },
        }
    }
}

/// Smallest-index vertex of `x` with at least ((q-1)/q) * p * |y_i| neighbors
/// in every y_i.
pub fn find_wide_vertex(
    g: &Graph,
    x: &[usize],
    ys: &[&[usize]],
    p: f64,
    q_margin: f64,
) -> Result<usize, EmbedError> {
    let words = g.words_per_row();
    let masks: Vec<Vec<u64>> = ys.iter().map(|y| to_mask(words, y)).collect();
    let factor = (q_margin - 1.0) / q_margin * p;
    let mut xs = x.to_vec();
    xs.sort_unstable();
    'outer: for &v in &xs {
        for (y, mask) in ys.iter().zip(&masks) {
            let need = factor * y.len() as f64;
            let have = count_in_mask(g, v, mask);
            if (have as f64) < need || have == 0 {
                continue 'outer;
            }
        }
        return Ok(v);
    }
    Err(EmbedError::NotFound)
}

fn to_mask(words: usize, verts: &[usize]) -> Vec<u64> {
    let mut m = vec![0u64; words];
    for &v in verts {
        m[v / 64] |= 1 << (v % 64);
    }
    m
}

fn count_in_mask(g: &Graph, v: usize, mask: &[u64]) -> usize {
    g.row(v).iter().zip(mask).map(|(a, b)| (a & b).count_ones() as usize).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedPair {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    /// Whether each side kept the promised fraction of its input.
    pub x_retained: bool,
    pub y_retained: bool,
}

/// Iterative two-sided peeling: repeatedly delete the smallest-index vertex
/// whose degree into the other side is below threshold * p * |other|,
/// until none violates. Deterministic; reports whether the promised
/// retention held.
pub fn clean_pair(g: &Graph, x: &[usize], y: &[usize], p: f64) -> Result<CleanedPair, EmbedError> {
    clean_pair_with(g, x, y, p, 0.1, 0.9)
}

pub(crate) fn clean_pair_with(
    g: &Graph,
    x: &[usize],
    y: &[usize],
    p: f64,
    threshold: f64,
    retention: f64,
) -> Result<CleanedPair, EmbedError> {
    let words = g.words_per_row();
    let mut xv: Vec<usize> = x.to_vec();
    let mut yv: Vec<usize> = y.to_vec();
    xv.sort_unstable();
    yv.sort_unstable();
    let ymask = to_mask(words, &yv);
    let xmask = to_mask(words, &xv);
    let mut cnt_x: std::collections::HashMap<usize, usize> =
        xv.iter().map(|&v| (v, count_in_mask(g, v, &ymask))).collect();
    let mut cnt_y: std::collections::HashMap<usize, usize> =
        yv.iter().map(|&v| (v, count_in_mask(g, v, &xmask))).collect();
    let mut alive_x: std::collections::HashSet<usize> = xv.iter().copied().collect();
    let mut alive_y: std::collections::HashSet<usize> = yv.iter().copied().collect();
    loop {
        let tx = threshold * p * alive_y.len() as f64;
        let ty = threshold * p * alive_x.len() as f64;
        let viol_x = xv
            .iter()
            .find(|v| alive_x.contains(v) && (cnt_x[v] as f64) < tx)
            .copied();
        let viol_y = yv
            .iter()
            .find(|v| alive_y.contains(v) && (cnt_y[v] as f64) < ty)
            .copied();
        let victim = match (viol_x, viol_y) {
            (None, None) => break,
            (Some(a), None) => (a, true),
            (None, Some(b)) => (b, false),
            (Some(a), Some(b)) => {
                if a < b {
                    (a, true)
                } else {
                    (b, false)
                }
            }
        };
        let (v, on_x) = victim;
        if on_x {
            alive_x.remove(&v);
            for w in g.neighbors(v) {
                if alive_y.contains(&w) {
                    *cnt_y.get_mut(&w).unwrap() -= 1;
                }
            }
            if alive_x.is_empty() {
                return Err(EmbedError::Degenerated { side: "x" });
            }
        } else {
            alive_y.remove(&v);
            for w in g.neighbors(v) {
                if alive_x.contains(&w) {
                    *cnt_x.get_mut(&w).unwrap() -= 1;
                }
            }
            if alive_y.is_empty() {
                return Err(EmbedError::Degenerated { side: "y" });
            }
        }
    }
    let out_x: Vec<usize> = xv.iter().copied().filter(|v| alive_x.contains(v)).collect();
    let out_y: Vec<usize> = yv.iter().copied().filter(|v| alive_y.contains(v)).collect();
    let x_retained = out_x.len() as f64 >= retention * x.len() as f64;
    let y_retained = out_y.len() as f64 >= retention * y.len() as f64;
    Ok(CleanedPair { x: out_x, y: out_y, x_retained, y_retained })
}

/// Exact recursion for embedding a forest with one candidate set per vertex:
/// detach the largest-index leaf, shrink its neighbor's candidate set to the
/// vertices that still see the leaf's set, recurse, then extend greedily.
/// With pairwise-disjoint candidate sets this succeeds exactly when an
/// embedding exists; every failure names the emptied set.
pub fn embed_forest(
    g: &Graph,
    forest: &Graph,
    candidates: &[Vec<usize>],
) -> Result<Embedding, EmbedError> {
    let m = forest.n();
    assert_eq!(candidates.len(), m, "one candidate set per forest vertex");
    if forest.edge_count() + connected_components(forest) != m {
        return Err(EmbedError::NotAForest);
    }
    for (i, c) in candidates.iter().enumerate() {
        if c.is_empty() {
            return Err(EmbedError::CandidateExhausted(i));
        }
    }
    let words = g.words_per_row();
    let mut sets: Vec<Vec<u64>> = candidates.iter().map(|c| to_mask(words, c)).collect();

    // Elimination order: always the largest-index vertex of remaining degree
    // <= 1, recording its remaining neighbor if it has one.
    let mut remaining: Vec<bool> = vec![true; m];
    let mut deg: Vec<usize> = (0..m).map(|v| forest.degree(v)).collect();
    let mut plan: Vec<(usize, Option<usize>)> = Vec::with_capacity(m);
    for _ in 0..m {
        let v = (0..m)
            .rev()
            .find(|&v| remaining[v] && deg[v] <= 1)
            .expect("a forest always has a leaf or isolated vertex");
        let parent = forest.neighbors(v).find(|&u| remaining[u]);
        if let Some(u) = parent {
            deg[u] -= 1;
            // Shrink the parent's candidates to vertices that can still reach
            // the leaf's set.
            let child = sets[v].clone();
            let mut any = false;
            let parent_set = &mut sets[u];
            for w in 0..g.n() {
                let bit = 1u64 << (w % 64);
                if parent_set[w / 64] & bit != 0 {
                    let hits = g.row(w).iter().zip(&child).any(|(a, b)| a & b != 0);
                    if hits {
                        any = true;
                    } else {
                        parent_set[w / 64] &= !bit;
                    }
                }
            }
            if !any {
                return Err(EmbedError::CandidateExhausted(u));
            }
        }
        remaining[v] = false;
        plan.push((v, parent));
    }

    // Assign in reverse: roots first, each leaf from its parent's image.
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; g.n()];
    for &(v, parent) in plan.iter().rev() {
        let pick = match parent {
            None => crate::graph::iter_bits(&sets[v]).find(|&w| !used[w]),
            Some(u) => {
                let img = map[u];
                crate::graph::iter_bits(&sets[v]).find(|&w| !used[w] && g.has_edge(img, w))
            }
        };
        match pick {
            Some(w) => {
                map[v] = w;
                used[w] = true;
            }
            None => return Err(EmbedError::CandidateExhausted(v)),
        }
    }
    let emb = Embedding::new(map);
    debug_assert!(emb.validate(forest, g, EmbedMode::Subgraph).is_ok());
    Ok(emb)
}

fn connected_components(g: &Graph) -> usize {
    let mut seen = vec![false; g.n()];
    let mut comps = 0;
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        comps += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    comps
}

// ---------------------------------------------------------------------------
// Staged pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub name: String,
    pub target: usize,
    pub achieved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("stage {stage} ({name}) failed: {reason}")]
pub struct StageFailure {
    pub stage: usize,
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub embedding: Embedding,
    pub trace: Vec<StageReport>,
}

struct Pipeline {
    used: Vec<bool>,
    trace: Vec<StageReport>,
}

impl Pipeline {
    fn record(&mut self, name: &str, target: usize, achieved: usize) {
        self.trace.push(StageReport { stage: self.trace.len() + 1, name: name.to_string(), target, achieved });
    }

    fn fail(&self, name: &str, reason: String) -> StageFailure {
        StageFailure { stage: self.trace.len() + 1, name: name.to_string(), reason }
    }

    fn take_unused<'b>(&self, it: impl Iterator<Item = usize> + 'b, cap: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for v in it {
            if !self.used[v] {
                out.push(v);
                if out.len() == cap {
                    break;
                }
            }
        }
        out
    }
}

/// Greedy split of two pools into disjoint sets of up to `target` each:
/// exclusive members first, then shared members to whichever side is
/// currently smaller.
fn disjoint_split(a: &[usize], b: &[usize], target: usize) -> (Vec<usize>, Vec<usize>) {
    let bset: std::collections::HashSet<usize> = b.iter().copied().collect();
    let aset: std::collections::HashSet<usize> = a.iter().copied().collect();
    let mut za: Vec<usize> = a.iter().copied().filter(|v| !bset.contains(v)).take(target).collect();
    let mut zb: Vec<usize> = b.iter().copied().filter(|v| !aset.contains(v)).take(target).collect();
    let mut shared: Vec<usize> = a.iter().copied().filter(|v| bset.contains(v)).collect();
    shared.sort_unstable();
    for v in shared {
        if za.len() <= zb.len() && za.len() < target {
            za.push(v);
        } else if zb.len() < target {
            zb.push(v);
        } else if za.len() < target {
            za.push(v);
        }
    }
    za.sort_unstable();
    zb.sort_unstable();
    (za, zb)
}

/// Runs the staged pipeline that assembles the 10-vertex pattern of
/// [`Graph::petersen`] inside `g`. Set sizes are the stage fractions times
/// their targets, capped by availability; the pipeline runs regardless of
/// whether the density preconditions hold and reports per-stage slack. On
/// failure the report names the stage and the violated requirement.
pub fn embed_petersen(g: &Graph, params: &EmbedParams) -> Result<EmbedOutcome, StageFailure> {
    let n = g.n();
    let p = params.density;
    let f = &params.fractions;
    let qm = params.q_margin;
    let mut pl = Pipeline { used: vec![false; n], trace: Vec::new() };

    // Root vertex of high degree, plus its neighbor slice X and the rest Y.
    let deg_target = ((f.v1 * p * n as f64).ceil() as usize).max(1);
    let v1 = (0..n)
        .find(|&v| g.degree(v) >= deg_target)
        .or_else(|| (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))))
        .filter(|&v| g.degree(v) > 0)
        .ok_or_else(|| pl.fail("v1", "host has no edges".into()))?;
    pl.record("v1", deg_target, g.degree(v1));
    pl.used[v1] = true;
    let x: Vec<usize> = pl.take_unused(g.neighbors(v1), deg_target);
    let in_x = to_mask(g.words_per_row(), &x);
    let y: Vec<usize> = (0..n)
        .filter(|&v| v != v1 && in_x[v / 64] & (1 << (v % 64)) == 0)
        .collect();
    pl.record("x_y", deg_target, x.len());

    // Mutual cleaning of (X, Y).
    let cleaned = clean_pair_with(g, &x, &y, p, f.clean, f.clean_retention)
        .map_err(|e| pl.fail("clean_x_y", e.to_string()))?;
    let (xp, yp) = (cleaned.x, cleaned.y);
    pl.record("clean_x_y", (f.clean_retention * x.len() as f64).ceil() as usize, xp.len());

    // Second root and its branching set inside Y'.
    let z78_target = ((f.z78 * p * n as f64).ceil() as usize).max(1);
    let ypmask = to_mask(g.words_per_row(), &yp);
    let mut v3 = None;
    let mut z78: Vec<usize> = Vec::new();
    for &cand in &xp {
        if pl.used[cand] {
            continue;
        }
        let nb: Vec<usize> = g.neighbors(cand).filter(|&w| ypmask[w / 64] & (1 << (w % 64)) != 0 && !pl.used[w]).collect();
        if !nb.is_empty() {
            v3 = Some(cand);
            z78 = nb.into_iter().take(z78_target).collect();
            break;
        }
    }
    let v3 = v3.ok_or_else(|| pl.fail("v3_z78", "no cleaned root-side vertex sees the far side".into()))?;
    pl.used[v3] = true;
    pl.record("v3_z78", z78_target, z78.len());

    // Vertices of Y' \ Z78 with enough neighbors inside Z78.
    let z78mask = to_mask(g.words_per_row(), &z78);
    let w_threshold = f.w_threshold * p * p * n as f64;
    let w: Vec<usize> = yp
        .iter()
        .copied()
        .filter(|&v| {
            !pl.used[v]
                && z78mask[v / 64] & (1 << (v % 64)) == 0
                && {
                    let c = count_in_mask(g, v, &z78mask);
                    c >= 1 && c as f64 >= w_threshold
                }
        })
        .collect();
    pl.record("w", (f.w_floor * n as f64).ceil() as usize, w.len());

    // An edge inside W.
    let wmask = to_mask(g.words_per_row(), &w);
    let mut pair = None;
    'edge: for &a in &w {
        for b in g.neighbors(a) {
            if b > a && wmask[b / 64] & (1 << (b % 64)) != 0 {
                pair = Some((a, b));
                break 'edge;
            }
        }
    }
    let (v6, v9) = pair.ok_or_else(|| pl.fail("edge_v6_v9", "no edge inside the wide middle set".into()))?;
    pl.used[v6] = true;
    pl.used[v9] = true;
    pl.record("edge_v6_v9", 1, 1);

    // Disjoint neighbor pools inside Z78.
    let z7_target = ((f.z7 * p * p * n as f64).ceil() as usize).max(1);
    let pool_a = pl.take_unused(g.neighbors(v9).filter(|&w| z78mask[w / 64] & (1 << (w % 64)) != 0), usize::MAX);
    let pool_b = pl.take_unused(g.neighbors(v6).filter(|&w| z78mask[w / 64] & (1 << (w % 64)) != 0), usize::MAX);
    let (z7, z8) = disjoint_split(&pool_a, &pool_b, z7_target);
    if z7.is_empty() || z8.is_empty() {
        return Err(pl.fail("z7_z8", format!("branch pools too small ({} and {})", z7.len(), z8.len())));
    }
    pl.record("z7_z8", z7_target, z7.len().min(z8.len()));

    // Disjoint pools back in X'.
    let z2_target = ((f.z2 * p * p * n as f64).ceil() as usize).max(1);
    let xpmask = to_mask(g.words_per_row(), &xp);
    let pool_a2 = pl.take_unused(g.neighbors(v6).filter(|&w| xpmask[w / 64] & (1 << (w % 64)) != 0), usize::MAX);
    let pool_b2 = pl.take_unused(g.neighbors(v9).filter(|&w| xpmask[w / 64] & (1 << (w % 64)) != 0), usize::MAX);
    let (z2, z4) = disjoint_split(&pool_a2, &pool_b2, z2_target);
    if z2.is_empty() || z4.is_empty() {
        return Err(pl.fail("z2_z4", format!("root-side pools too small ({} and {})", z2.len(), z4.len())));
    }
    pl.record("z2_z4", z2_target, z2.len().min(z4.len()));

    // Clean each pool against the remaining far side and split the far sides.
    let ypp: Vec<usize> = yp
        .iter()
        .copied()
        .filter(|&v| !pl.used[v] && z78mask[v / 64] & (1 << (v % 64)) == 0)
        .collect();
    let c2 = clean_pair_with(g, &z2, &ypp, p, f.clean, f.clean_retention)
        .map_err(|e| pl.fail("clean_z2", e.to_string()))?;
    let c4 = clean_pair_with(g, &z4, &ypp, p, f.clean, f.clean_retention)
        .map_err(|e| pl.fail("clean_z4", e.to_string()))?;
    let z5_target = ((f.clean_retention / 2.0 * ypp.len() as f64).ceil() as usize).max(1);
    let (z5, z10) = disjoint_split(&c2.y, &c4.y, z5_target);
    if z5.is_empty() || z10.is_empty() {
        return Err(pl.fail("z5_z10", format!("cleaned far sides too small ({} and {})", z5.len(), z10.len())));
    }
    pl.record("z5_z10", z5_target, z5.len().min(z10.len()));

    // Wide vertices inside the branch pools.
    let v7 = find_wide_vertex(g, &z7, &[&z5], p, qm)
        .map_err(|_| pl.fail("v7", "no branch vertex is wide into its far pool".into()))?;
    pl.used[v7] = true;
    let z5p: Vec<usize> = z5.iter().copied().filter(|&w| g.has_edge(v7, w) && !pl.used[w]).collect();
    let v8 = find_wide_vertex(g, &z8, &[&z10], p, qm)
        .map_err(|_| pl.fail("v8", "no branch vertex is wide into its far pool".into()))?;
    pl.used[v8] = true;
    let z10p: Vec<usize> = z10.iter().copied().filter(|&w| g.has_edge(v8, w) && !pl.used[w]).collect();
    pl.record("v7_v8", ((p * n as f64 / 10.0).ceil() as usize).max(1), z5p.len().min(z10p.len()));

    // Final edge between the two restricted far pools.
    let z10pmask = to_mask(g.words_per_row(), &z10p);
    let mut fin = None;
    'fin: for &a in &z5p {
        for b in g.neighbors(a) {
            if z10pmask[b / 64] & (1 << (b % 64)) != 0 {
                fin = Some((a, b));
                break 'fin;
            }
        }
    }
    let (v5, v10) = fin.ok_or_else(|| pl.fail("edge_v5_v10", "no edge between the restricted far pools".into()))?;
    pl.used[v5] = true;
    pl.used[v10] = true;
    pl.record("edge_v5_v10", 1, 1);

    // Close the pattern from the cleaned root-side pools.
    let v2 = c2.x.iter().copied().find(|&w| !pl.used[w] && g.has_edge(v5, w));
    let v4 = c4.x.iter().copied().find(|&w| !pl.used[w] && g.has_edge(v10, w));
    let (v2, v4) = match (v2, v4) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(pl.fail("v2_v4", "cleaned root-side pools have no unused partner".into())),
    };
    pl.record("v2_v4", 1, 1);

    let embedding = Embedding::new(vec![v1, v2, v3, v4, v5, v6, v7, v8, v9, v10]);
    let pattern = Graph::petersen();
    assert!(
        embedding.validate(&pattern, g, EmbedMode::Subgraph).is_ok(),
        "pipeline produced an invalid embedding"
    );
    Ok(EmbedOutcome { embedding, trace: pl.trace })
}

// ---------------------------------------------------------------------------
// Density precondition report
// ---------------------------------------------------------------------------

/// Informational check of the density hypotheses the pipeline's guarantees
/// rest on: alpha <= p^2 n / 200, p >= 10 n^{-1/3}, and the quadratic slack
/// 4 (alpha/p)^2 <= p^2 n^2 / 5000.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreconditionReport {
    pub n: usize,
    pub density: f64,
    pub alpha: f64,
    pub alpha_bound: f64,
    pub alpha_ok: bool,
    pub density_floor: f64,
    pub density_ok: bool,
    pub quad_ok: bool,
}

pub fn check_embedding_preconditions(n: usize, p: f64, alpha: f64) -> PreconditionReport {
    let alpha_bound = p * p * n as f64 / 200.0;
    let density_floor = 10.0 * (n as f64).powf(-1.0 / 3.0);
    let quad_lhs = 4.0 * (alpha / p) * (alpha / p);
    let quad_rhs = p * p * (n as f64) * (n as f64) / 5000.0;
    PreconditionReport {
        n,
        density: p,
        alpha,
        alpha_bound,
        alpha_ok: alpha <= alpha_bound,
        density_floor,
        density_ok: p + 1e-12 >= density_floor,
        quad_ok: quad_lhs <= quad_rhs,
    }
}

// ---------------------------------------------------------------------------
// General certificate-driven embedder
// ---------------------------------------------------------------------------

/// Embeds `pattern` into `g` following an ordering certificate: the host is
/// partitioned round-robin into one class per position, positions before the
/// final interval are placed greedily through wide vertices (intersecting the
/// candidate classes of their later neighbors), and the final interval is a
/// forest embedded over whatever candidates remain.
pub fn embed_general(
    g: &Graph,
    pattern: &Graph,
    cert: &OrderingCertificate,
    params: &EmbedParams,
) -> Result<EmbedOutcome, StageFailure> {
    embed_general_impl(g, pattern, cert, params, false)
}

/// Heuristic variant for multi-interval certificates: every non-final
/// interval of size two or more is embedded as a forest over the current
/// candidate classes instead of vertex by vertex. Experimental; the standard
/// route only forest-embeds the final interval.
pub fn embed_general_multi(
    g: &Graph,
    pattern: &Graph,
    cert: &OrderingCertificate,
    params: &EmbedParams,
) -> Result<EmbedOutcome, StageFailure> {
    embed_general_impl(g, pattern, cert, params, true)
}

fn embed_general_impl(
    g: &Graph,
    pattern: &Graph,
    cert: &OrderingCertificate,
    params: &EmbedParams,
    interval_mode: bool,
) -> Result<EmbedOutcome, StageFailure> {
    let m = pattern.n();
    let n = g.n();
    let fail = |stage: usize, name: &str, reason: String| StageFailure {
        stage,
        name: name.to_string(),
        reason,
    };
    eval_dhat2(pattern, cert)
        .map_err(|e| fail(0, "certificate", e.to_string()))?;
    if n == 0 || m == 0 || m > n {
        return Err(fail(0, "sizes", format!("cannot embed {m} vertices into {n}")));
    }
    let mut trace = Vec::new();

    // Round-robin partition keeps every class within one of n/m.
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); m];
    for v in 0..n {
        classes[v % m].push(v);
    }
    let ordering = &cert.ordering;
    let position_of = {
        let mut p = vec![0usize; m];
        for (i, &v) in ordering.iter().enumerate() {
            p[v] = i + 1;
        }
        p
    };
    let k_tail = *cert.breakpoints.last().unwrap();
    let mut images: Vec<Option<usize>> = vec![None; m];

    let place = |s: usize,
                     classes: &mut Vec<Vec<usize>>,
                     images: &mut Vec<Option<usize>>,
                     trace: &mut Vec<StageReport>|
     -> Result<(), StageFailure> {
        let pv = ordering[s - 1];
        let later: Vec<usize> = pattern
            .neighbors(pv)
            .filter(|&w| position_of[w] > s)
            .map(|w| position_of[w])
            .collect();
        let x = classes[s - 1].clone();
        if x.is_empty() {
            return Err(fail(s, "prefix", format!("candidate class for position {s} is empty")));
        }
        let chosen = if later.is_empty() {
            x[0]
        } else {
            let ys: Vec<&[usize]> = later.iter().map(|&j| classes[j - 1].as_slice()).collect();
            find_wide_vertex(g, &x, &ys, params.density, params.q_margin).map_err(|_| {
                fail(s, "prefix", format!("no wide vertex at position {s} for {} later classes", later.len()))
            })?
        };
        images[pv] = Some(chosen);
        trace.push(StageReport {
            stage: s,
            name: format!("prefix_{s}"),
            target: 1,
            achieved: x.len(),
        });
        for &j in &later {
            let before = classes[j - 1].len();
            classes[j - 1].retain(|&w| g.has_edge(chosen, w) && w != chosen);
            if classes[j - 1].is_empty() {
                return Err(fail(
                    s,
                    "candidates",
                    format!(
                        "class for position {j} emptied (had {before}); the size guarantee p^b |V|/2^s failed here"
                    ),
                ));
            }
        }
        Ok(())
    };

    if interval_mode {
        // Forest-embed every interval over its current candidate classes.
        let mut starts = cert.breakpoints.clone();
        starts.push(m + 1);
        for win in starts.windows(2) {
            let (lo, hi) = (win[0], win[1] - 1);
            if hi == lo {
                place(lo, &mut classes, &mut images, &mut trace)?;
                continue;
            }
            embed_interval(g, pattern, ordering, &position_of, lo, hi, &mut classes, &mut images, &mut trace, params)?;
        }
    } else {
        for s in 1..k_tail {
            place(s, &mut classes, &mut images, &mut trace)?;
        }
        embed_interval(g, pattern, ordering, &position_of, k_tail, m, &mut classes, &mut images, &mut trace, params)?;
    }

    let map: Vec<usize> = images.into_iter().map(|i| i.unwrap()).collect();
    let embedding = Embedding::new(map);
    assert!(
        embedding.validate(pattern, g, EmbedMode::Subgraph).is_ok(),
        "general embedder produced an invalid embedding"
    );
    Ok(EmbedOutcome { embedding, trace })
}

#[allow(clippy::too_many_arguments)]
fn embed_interval(
    g: &Graph,
    pattern: &Graph,
    ordering: &[usize],
    position_of: &[usize],
    lo: usize,
    hi: usize,
    classes: &mut [Vec<usize>],
    images: &mut [Option<usize>],
    trace: &mut Vec<StageReport>,
    _params: &EmbedParams,
) -> Result<(), StageFailure> {
    let pattern_verts: Vec<usize> = (lo..=hi).map(|s| ordering[s - 1]).collect();
    let mut forest = Graph::new_empty(pattern_verts.len());
    for (i, &a) in pattern_verts.iter().enumerate() {
        for (j, &b) in pattern_verts.iter().enumerate().skip(i + 1) {
            if pattern.has_edge(a, b) {
                forest.add_edge_unchecked(i, j);
            }
        }
    }
    let candidates: Vec<Vec<usize>> = (lo..=hi).map(|s| classes[s - 1].clone()).collect();
    let emb = embed_forest(g, &forest, &candidates).map_err(|e| StageFailure {
        stage: lo,
        name: format!("interval_{lo}_{hi}"),
        reason: e.to_string(),
    })?;
    trace.push(StageReport {
        stage: lo,
        name: format!("interval_{lo}_{hi}"),
        target: pattern_verts.len(),
        achieved: pattern_verts.len(),
    });
    for (i, &pv) in pattern_verts.iter().enumerate() {
        let host = emb.map[i];
        images[pv] = Some(host);
        // Propagate to classes of later neighbors outside the interval.
        for w in pattern.neighbors(pv) {
            let j = position_of[w];
            if j > hi {
                classes[j - 1].retain(|&c| g.has_edge(host, c) && c != host);
                if classes[j - 1].is_empty() {
                    return Err(StageFailure {
                        stage: lo,
                        name: "candidates".to_string(),
                        reason: format!("class for position {j} emptied after interval {lo}..{hi}"),
                    });
                }
            }
        }
    }
    Ok(())
}
