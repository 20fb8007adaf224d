//! Recurrent bounded eventualities `G F[<=x] a` and their conjunctions.
//!
//! Gaps are counted in states: the gap of a bottom component is the largest
//! number of consecutive `a`-free states a path inside it can visit. From a
//! state of the component, `G F[<=n] a` then holds almost surely iff `n` is
//! at least the gap, and with probability zero otherwise.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph;
use crate::markov::{all_pairs_distance, scc_decompose, MarkovChain};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsccGapInfo {
    pub states: Vec<usize>,
    /// `None` when the component has an `a`-free cycle.
    pub gap: Option<u64>,
    pub reachable: bool,
}

impl BsccGapInfo {
    pub fn accepting(&self) -> bool {
        self.reachable && self.gap.is_some()
    }
}

/// Longest run of `a`-free states inside the bottom component `b`.
pub fn gap_of_bscc(mc: &MarkovChain, b: &[usize], a: &str) -> Option<u64> {
    let mut keep = vec![false; mc.len()];
    for &s in b {
        keep[s] = !mc.has_label(s, a);
    }
    let starts: Vec<usize> = b.iter().copied().filter(|&s| keep[s]).collect();
    graph::longest_path_nodes(mc.adj(), &keep, &starts).map(|n| n as u64)
}

pub fn bscc_gaps(mc: &MarkovChain, a: &str) -> Vec<BsccGapInfo> {
    let reach = mc.reachable();
    scc_decompose(mc)
        .bottoms()
        .map(|b| BsccGapInfo {
            states: b.to_vec(),
            gap: gap_of_bscc(mc, b, a),
            reachable: reach[b[0]],
        })
        .collect()
}

/// Digraph over `s0` and the `a`-states; `cost[u][v]` is what a path
/// segment from `u` to `v` demands of the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub source: usize,
    pub targets: Vec<bool>,
    pub cost: Vec<Vec<Option<u64>>>,
}

/// Least bottleneck cost of a path from the source to a target
/// (Dijkstra-style relaxation with `max` in place of `+`).
pub fn c_min(sk: &Skeleton) -> Option<u64> {
    let n = sk.cost.len();
    let mut best: Vec<Option<u64>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    best[sk.source] = Some(0);
    heap.push(Reverse((0u64, sk.source)));
    while let Some(Reverse((f, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if sk.targets[u] {
            return Some(f);
        }
        for v in 0..n {
            let Some(c) = sk.cost[u][v] else { continue };
            if v == u || done[v] {
                continue;
            }
            let cand = f.max(c);
            if best[v].map_or(true, |b| cand < b) {
                best[v] = Some(cand);
                heap.push(Reverse((cand, v)));
            }
        }
    }
    None
}

/// Skeleton of `mc` for `a` with targets the `a`-states of `b`. Vertex 0 is
/// the initial state; the rest are the other `a`-states in increasing order.
/// A segment leaving an `a`-state at distance `d` passes `d - 1` `a`-free
/// states, one leaving an unlabeled initial state passes `d`.
pub fn skeleton(
    mc: &MarkovChain,
    a: &str,
    b: &[usize],
    dist: &[Vec<Option<usize>>],
) -> (Skeleton, Vec<usize>) {
    let s0 = mc.init();
    let mut vertices = vec![s0];
    vertices.extend((0..mc.len()).filter(|&s| s != s0 && mc.has_label(s, a)));
    let targets = vertices
        .iter()
        .map(|s| mc.has_label(*s, a) && b.contains(s))
        .collect();
    let cost = vertices
        .iter()
        .map(|&u| {
            let lead = u64::from(mc.has_label(u, a));
            vertices
                .iter()
                .map(|&v| {
                    if u == v {
                        None
                    } else {
                        dist[u][v].map(|d| d as u64 - lead)
                    }
                })
                .collect()
        })
        .collect();
    let sk = Skeleton {
        source: 0,
        targets,
        cost,
    };
    (sk, vertices)
}

/// Least `n` with `Pr(G F[<=n] a) > 0`.
pub fn min_val_pos_buchi(mc: &MarkovChain, a: &str) -> Option<u64> {
    let dist = all_pairs_distance(mc);
    let s0 = mc.init();
    bscc_gaps(mc, a)
        .into_iter()
        .filter(BsccGapInfo::accepting)
        .filter_map(|info| {
            let gap = info.gap?;
            let to_a = info
                .states
                .iter()
                .filter(|&&s| mc.has_label(s, a))
                .filter_map(|&s| dist[s0][s])
                .min()? as u64;
            if gap >= to_a {
                Some(gap)
            } else {
                let (sk, _) = skeleton(mc, a, &info.states, &dist);
                c_min(&sk).map(|c| c.max(gap))
            }
        })
        .min()
}

/// Least `n` with `Pr(G F[<=n] a) = 1`: the longest reachable run of
/// `a`-free states, or `None` when such runs are unbounded.
pub fn min_val_as1_buchi(mc: &MarkovChain, a: &str) -> Option<u64> {
    let reach = mc.reachable();
    let keep: Vec<bool> = (0..mc.len())
        .map(|s| reach[s] && !mc.has_label(s, a))
        .collect();
    let starts: Vec<usize> = (0..mc.len()).filter(|&s| keep[s]).collect();
    graph::longest_path_nodes(mc.adj(), &keep, &starts).map(|n| n as u64)
}

/// True when no valuation gives the conjunction of `G F[<=xi] ai` positive
/// probability.
pub fn emptiness_pos_genbuchi(mc: &MarkovChain, atoms: &[&str]) -> bool {
    let reach = mc.reachable();
    !scc_decompose(mc)
        .bottoms()
        .filter(|b| reach[b[0]])
        .any(|b| atoms.iter().all(|a| gap_of_bscc(mc, b, a).is_some()))
}

/// True when no valuation gives the conjunction probability one.
pub fn emptiness_as1_genbuchi(mc: &MarkovChain, atoms: &[&str]) -> bool {
    atoms.iter().any(|a| min_val_as1_buchi(mc, a).is_none())
}
