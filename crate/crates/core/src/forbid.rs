//! Decision procedures with witnesses: triangle and K_{2,3} freeness, capped
//! clique number by branch and bound, and general (induced) pattern
//! containment by backtracking search.

use crate::graph::{EmbedMode, Embedding, Graph};
use serde::{Deserialize, Serialize};

/// Lexicographically smallest triangle (u < v < w), if any.
pub fn triangle_witness(g: &Graph) -> Option<(usize, usize, usize)> {
    let words = g.words_per_row();
    for u in 0..g.n() {
        for v in g.neighbors(u) {
            if v <= u {
                continue;
            }
            let ru = g.row(u);
            let rv = g.row(v);
            // First common neighbor above v.
            let start = (v + 1) / 64;
            for w_idx in start..words {
                let mut word = ru[w_idx] & rv[w_idx];
                if w_idx == start {
                    let shift = (v + 1) % 64;
                    if shift != 0 {
                        word &= !0u64 << shift;
                    }
                }
                if word != 0 {
                    let w = w_idx * 64 + word.trailing_zeros() as usize;
                    return Some((u, v, w));
                }
            }
        }
    }
    None
}

pub fn is_triangle_free(g: &Graph) -> bool {
    triangle_witness(g).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K23Witness {
    pub pair: (usize, usize),
    pub commons: [usize; 3],
}

/// Lexicographically smallest vertex pair with three or more common
/// neighbors, if any. Per-pair popcount over the row intersection.
pub fn k23_witness(g: &Graph) -> Option<K23Witness> {
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if g.common_degree(u, v) > 2 {
                let commons = g.common_neighbors(u, v);
                return Some(K23Witness { pair: (u, v), commons: [commons[0], commons[1], commons[2]] });
            }
        }
    }
    None
}

pub fn is_k23_free(g: &Graph) -> bool {
    k23_witness(g).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliqueNumber {
    /// The exact clique number, which is at most the cap.
    Exact(usize),
    /// A clique larger than the cap exists; the search stopped there.
    ExceedsCap(usize),
}

impl CliqueNumber {
    pub fn at_most(&self, bound: usize) -> bool {
        matches!(self, CliqueNumber::Exact(k) if *k <= bound)
    }
}

struct CliqueSearch<'a> {
    g: &'a Graph,
    best: usize,
    goal: usize,
}

impl CliqueSearch<'_> {
    /// Greedy-coloring branch and bound. Returns true when the goal size has
    /// been reached and the search can stop.
    fn expand(&mut self, size: usize, cand: &[u64]) -> bool {
        let count: usize = cand.iter().map(|w| w.count_ones() as usize).sum();
        if count == 0 {
            if size > self.best {
                self.best = size;
            }
            return self.best >= self.goal;
        }
        // Greedy coloring for the pruning bound: vertices in color class c can
        // contribute at most c to any clique inside cand.
        let mut order: Vec<(usize, usize)> = Vec::with_capacity(count);
        let mut uncolored = cand.to_vec();
        let mut color = 0usize;
        while uncolored.iter().any(|&w| w != 0) {
            color += 1;
            let mut avail = uncolored.clone();
            loop {
                let Some(v) = first_bit(&avail) else { break };
                order.push((v, color));
                clear_bit(&mut uncolored, v);
                clear_bit(&mut avail, v);
                for (a, r) in avail.iter_mut().zip(self.g.row(v)) {
                    *a &= !r;
                }
            }
        }
        let mut live = cand.to_vec();
        for &(v, c) in order.iter().rev() {
            if size + c <= self.best {
                return false;
            }
            let next: Vec<u64> = live.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            if self.expand(size + 1, &next) {
                return true;
            }
            clear_bit(&mut live, v);
        }
        false
    }
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + words[i].trailing_zeros() as usize)
}

fn clear_bit(words: &mut [u64], v: usize) {
    words[v / 64] &= !(1u64 << (v % 64));
}

/// Exact clique number when it is at most `cap`, otherwise `ExceedsCap`.
/// Deterministic branch and bound with greedy-coloring pruning.
pub fn clique_number(g: &Graph, cap: usize) -> CliqueNumber {
    if g.n() == 0 {
        return CliqueNumber::Exact(0);
    }
    let words = g.words_per_row();
    let mut all = vec![0u64; words];
    for v in 0..g.n() {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut search = CliqueSearch { g, best: 0, goal: cap + 1 };
    if search.expand(0, &all) {
        CliqueNumber::ExceedsCap(cap)
    } else {
        CliqueNumber::Exact(search.best)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternSearch {
    Found(Embedding),
    NotFound,
    /// The node budget was exhausted; containment is unknown.
    BudgetExceeded,
}

/// Backtracking subgraph / induced-subgraph search. Pattern vertices are
/// processed in a BFS order from the highest-degree vertex; candidates are
/// intersections of host neighborhoods of already-mapped pattern neighbors,
/// with degree and (induced) non-adjacency pruning. Deterministic: host
/// candidates are scanned in ascending order.
pub fn contains_pattern(host: &Graph, pattern: &Graph, mode: EmbedMode, budget: u64) -> PatternSearch {
    let m = pattern.n();
    if m == 0 {
        return PatternSearch::Found(Embedding::new(Vec::new()));
    }
    if m > host.n() {
        return PatternSearch::NotFound;
    }
    let order = bfs_order(pattern);
    let mut state = MatchState {
        host,
        pattern,
        mode,
        order: &order,
        images: vec![usize::MAX; m],
        used: vec![false; host.n()],
        nodes_left: budget,
    };
    match state.extend(0) {
        Outcome::Found => {
            let map = state.images.clone();
            let emb = Embedding::new(map);
            debug_assert!(emb.validate(pattern, host, mode).is_ok());
            PatternSearch::Found(emb)
        }
        Outcome::Exhausted => PatternSearch::NotFound,
        Outcome::OutOfBudget => PatternSearch::BudgetExceeded,
    }
}

fn bfs_order(pattern: &Graph) -> Vec<usize> {
    let m = pattern.n();
    let mut seen = vec![false; m];
    let mut order = Vec::with_capacity(m);
    loop {
        let root = (0..m)
            .filter(|&v| !seen[v])
            .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)));
        let Some(root) = root else { break };
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in pattern.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct MatchState<'a> {
    host: &'a Graph,
    pattern: &'a Graph,
    mode: EmbedMode,
    order: &'a [usize],
    images: Vec<usize>,
    used: Vec<bool>,
    nodes_left: u64,
}

impl MatchState<'_> {
    fn extend(&mut self, depth: usize) -> Outcome {
        if depth == self.order.len() {
            return Outcome::Found;
        }
        let pv = self.order[depth];
        let mapped_neighbors: Vec<usize> = self.order[..depth]
            .iter()
            .filter(|&&u| self.pattern.has_edge(u, pv))
            .map(|&u| self.images[u])
            .collect();
        let words = self.host.words_per_row();
        let candidates: Vec<u64> = match mapped_neighbors.split_first() {
            None => vec![!0u64; words],
            Some((&first, rest)) => {
                let mut mask: Vec<u64> = self.host.row(first).to_vec();
                for &h in rest {
                    for (m, r) in mask.iter_mut().zip(self.host.row(h)) {
                        *m &= r;
                    }
                }
                mask
            }
        };
        let pdeg = self.pattern.degree(pv);
        for c in crate::graph::iter_bits(&candidates) {
            if c >= self.host.n() {
                break;
            }
            if self.nodes_left == 0 {
                return Outcome::OutOfBudget;
            }
            self.nodes_left -= 1;
            if self.used[c] || self.host.degree(c) < pdeg {
                continue;
            }
            if self.mode == EmbedMode::Induced {
                let clash = self.order[..depth].iter().any(|&u| {
                    !self.pattern.has_edge(u, pv) && self.host.has_edge(self.images[u], c)
                });
                if clash {
                    continue;
                }
            }
            self.images[pv] = c;
            self.used[c] = true;
            match self.extend(depth + 1) {
                Outcome::Found => return Outcome::Found,
                Outcome::OutOfBudget => return Outcome::OutOfBudget,
                Outcome::Exhausted => {}
            }
            self.used[c] = false;
            self.images[pv] = usize::MAX;
        }
        Outcome::Exhausted
    }
}
