//! Product of a chain with the counter-instantiated automaton, and the
//! qualitative SCC analysis on top of it.
//!
//! A counter holds the distance to the next position where the body of its
//! eventuality holds, `v + 1` standing for "more than `v`". The value is
//! guessed when it cannot be derived and checked as it counts down, so each
//! word keeps at most one surviving run. Guesses that no path of the
//! counter-free product can realize are never materialized.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::automaton::GAutomaton;
use crate::error::{Error, Result};
use crate::graph;
use crate::markov::MarkovChain;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PNode {
    pub s: usize,
    pub h: usize,
    pub i: usize,
    pub k: Box<[u32]>,
}

#[derive(Clone, Debug)]
pub struct Product {
    pub nodes: Vec<PNode>,
    pub adj: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
}

/// Reachable pairs of chain state and automaton state, without counters.
struct Skeleton {
    pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    adj: Vec<Vec<usize>>,
    initial: Vec<usize>,
}

fn letter_successors(aut: &GAutomaton) -> Vec<BTreeMap<u64, Vec<usize>>> {
    aut.succ
        .iter()
        .map(|succ| {
            let mut by: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for &g in succ {
                by.entry(aut.letter[g]).or_default().push(g);
            }
            by
        })
        .collect()
}

fn skeleton(aut: &GAutomaton, mc: &MarkovChain, masks: &[u64]) -> Skeleton {
    let by_letter = letter_successors(aut);
    let mut sk = Skeleton {
        pairs: Vec::new(),
        index: HashMap::new(),
        adj: Vec::new(),
        initial: Vec::new(),
    };
    let s0 = mc.init();
    for &h in &aut.initial {
        if aut.letter[h] == masks[s0] {
            sk.index.insert((s0, h), sk.pairs.len());
            sk.initial.push(sk.pairs.len());
            sk.pairs.push((s0, h));
        }
    }
    let mut next = 0;
    while next < sk.pairs.len() {
        let (s, h) = sk.pairs[next];
        let mut out = Vec::new();
        for (t, _) in mc.succ(s) {
            let Some(gs) = by_letter[h].get(&masks[*t]) else { continue };
            for &g in gs {
                let id = *sk.index.entry((*t, g)).or_insert_with(|| {
                    sk.pairs.push((*t, g));
                    sk.pairs.len() - 1
                });
                out.push(id);
            }
        }
        sk.adj.push(out);
        next += 1;
    }
    sk
}

/// Per skeleton node, the achievable first-hit distances of `body`, with
/// distances beyond `v` folded into `v + 1`.
fn distance_sets(sk: &Skeleton, aut: &GAutomaton, body: usize, v: u64) -> Vec<Vec<bool>> {
    let n = sk.pairs.len();
    let width = v as usize + 2;
    let hit: Vec<bool> = sk.pairs.iter().map(|&(_, h)| aut.states[h][body]).collect();
    let rev = graph::reverse(&sk.adj);
    let mut d = vec![vec![false; width]; n];
    let mut layer = hit.clone();
    // avoid[j]: some path from the node avoids body for j+1 positions
    let mut avoid: Vec<bool> = hit.iter().map(|&b| !b).collect();
    for dist in 0..=v as usize {
        for u in 0..n {
            if layer[u] {
                d[u][dist] = true;
            }
        }
        if dist == v as usize {
            break;
        }
        let mut up = vec![false; n];
        for u in 0..n {
            if layer[u] {
                for &p in &rev[u] {
                    if !hit[p] {
                        up[p] = true;
                    }
                }
            }
        }
        layer = up;
        let mut keep = vec![false; n];
        for u in 0..n {
            if avoid[u] {
                for &p in &rev[u] {
                    if !hit[p] {
                        keep[p] = true;
                    }
                }
            }
        }
        avoid = keep;
    }
    for u in 0..n {
        if avoid[u] {
            d[u][width - 1] = true;
        }
    }
    d
}

impl Product {
    /// Builds the reachable product of `mc` with the automaton instantiated
    /// at `bounds` (one per parametric slot of `aut`).
    pub fn build(aut: &GAutomaton, mc: &MarkovChain, bounds: &[u64], cap: usize) -> Result<Self> {
        if bounds.len() != aut.params.len() {
            return Err(Error::Valuation(format!(
                "expected {} bounds, got {}",
                aut.params.len(),
                bounds.len()
            )));
        }
        if bounds.iter().any(|&v| v >= u32::MAX as u64 - 1) {
            return Err(Error::Resource {
                what: "parameter value".into(),
                limit: u32::MAX as usize - 2,
            });
        }
        let masks: Vec<u64> = (0..mc.len())
            .map(|s| aut.closure.mask_of(mc.label(s)))
            .collect();
        let sk = skeleton(aut, mc, &masks);
        // allowed[p][node][value]
        let allowed: Vec<Vec<Vec<bool>>> = aut
            .params
            .iter()
            .zip(bounds)
            .map(|(p, &v)| {
                let mut d = distance_sets(&sk, aut, p.body, v);
                for (u, row) in d.iter_mut().enumerate() {
                    let h = &aut.states[sk.pairs[u].1];
                    for (val, ok) in row.iter_mut().enumerate() {
                        let val = val as u64;
                        *ok = *ok && (val == 0) == h[p.body] && (val <= v) == h[p.elem];
                    }
                }
                d
            })
            .collect();
        let choices = |u: usize, from: Option<&[u32]>| -> Vec<Vec<u32>> {
            let mut out: Vec<Vec<u32>> = vec![Vec::new()];
            for (p, &v) in bounds.iter().enumerate() {
                let v = v as u32;
                let ok = &allowed[p][u];
                let cands: Vec<u32> = match from.map(|k| k[p]) {
                    None | Some(0) => (0..=v + 1).filter(|&x| ok[x as usize]).collect(),
                    Some(k) if k <= v => vec![k - 1].into_iter().filter(|&x| ok[x as usize]).collect(),
                    Some(_) => [v, v + 1].into_iter().filter(|&x| ok[x as usize]).collect(),
                };
                if cands.is_empty() {
                    return Vec::new();
                }
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        cands.iter().map(move |&c| {
                            let mut next = prefix.clone();
                            next.push(c);
                            next
                        })
                    })
                    .collect();
            }
            out
        };

        let mut prod = Product {
            nodes: Vec::new(),
            adj: Vec::new(),
            initial: Vec::new(),
            accepting: Vec::new(),
        };
        let mut index: HashMap<(usize, usize, Box<[u32]>), usize> = HashMap::new();
        let mut intern = |prod: &mut Product, u: usize, i: usize, k: Vec<u32>| -> Result<usize> {
            let key = (u, i, k.into_boxed_slice());
            if let Some(&id) = index.get(&key) {
                return Ok(id);
            }
            if prod.nodes.len() >= cap {
                return Err(Error::Resource {
                    what: "product nodes".into(),
                    limit: cap,
                });
            }
            let (s, h) = sk.pairs[u];
            let id = prod.nodes.len();
            prod.nodes.push(PNode {
                s,
                h,
                i,
                k: key.2.clone(),
            });
            prod.accepting.push(i == 0 && aut.in_buchi(0, h));
            index.insert(key, id);
            Ok(id)
        };
        let mut sk_of: Vec<usize> = Vec::new();
        for &u in &sk.initial {
            for k in choices(u, None) {
                let id = intern(&mut prod, u, 0, k)?;
                if id == sk_of.len() {
                    sk_of.push(u);
                    prod.initial.push(id);
                }
            }
        }
        let mut next = 0;
        while next < prod.nodes.len() {
            let u = sk_of[next];
            let node = prod.nodes[next].clone();
            let j = aut.next_index(node.i, node.h);
            let mut out = Vec::new();
            for &w in &sk.adj[u] {
                for k in choices(w, Some(&node.k)) {
                    let id = intern(&mut prod, w, j, k)?;
                    if id == sk_of.len() {
                        sk_of.push(w);
                    }
                    out.push(id);
                }
            }
            prod.adj.push(out);
            next += 1;
        }
        Ok(prod)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nontrivial SCCs that contain an accepting node.
    pub fn accepting_sccs(&self) -> Vec<Vec<usize>> {
        let sccs = graph::tarjan(&self.adj, None);
        (0..sccs.len())
            .filter(|&c| !sccs.trivial[c] && sccs.members[c].iter().any(|&n| self.accepting[n]))
            .map(|c| sccs.members[c].clone())
            .collect()
    }

    /// Fiber-subset check: starting from the full fiber over each chain
    /// state of the component, follow chain transitions and take image sets
    /// inside the component; the component is incomplete iff some image
    /// is empty.
    pub fn is_complete(&self, mc: &MarkovChain, members: &[usize], cap: usize) -> Result<bool> {
        let inside: HashSet<usize> = members.iter().copied().collect();
        let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &n in members {
            fibers.entry(self.nodes[n].s).or_default().push(n);
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut stack: Vec<Vec<usize>> = Vec::new();
        for mut f in fibers.into_values() {
            f.sort_unstable();
            if seen.insert(f.clone()) {
                stack.push(f);
            }
        }
        while let Some(set) = stack.pop() {
            let s = self.nodes[set[0]].s;
            for (t, _) in mc.succ(s) {
                let mut image: Vec<usize> = set
                    .iter()
                    .flat_map(|&n| self.adj[n].iter().copied())
                    .filter(|m| inside.contains(m) && self.nodes[*m].s == *t)
                    .collect();
                if image.is_empty() {
                    return Ok(false);
                }
                image.sort_unstable();
                image.dedup();
                if !seen.contains(&image) {
                    if seen.len() >= cap {
                        return Err(Error::Resource {
                            what: "fiber subsets".into(),
                            limit: cap,
                        });
                    }
                    seen.insert(image.clone());
                    stack.push(image);
                }
            }
        }
        Ok(true)
    }

    /// All reachable complete accepting SCCs.
    pub fn complete_accepting_sccs(&self, mc: &MarkovChain, cap: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        for c in self.accepting_sccs() {
            if self.is_complete(mc, &c, cap)? {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// First reachable complete accepting SCC, as a certificate.
    pub fn complete_accepting_scc(&self, mc: &MarkovChain, cap: usize) -> Result<Option<Vec<usize>>> {
        for c in self.accepting_sccs() {
            if self.is_complete(mc, &c, cap)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// Probability one: follow the deterministic subset construction from
    /// the initial nodes and require that every reachable subset contains a
    /// node from which a complete accepting SCC is reachable.
    pub fn almost_sure(&self, mc: &MarkovChain, cap: usize) -> Result<bool> {
        let mut target = vec![false; self.len()];
        for c in self.complete_accepting_sccs(mc, cap)? {
            for n in c {
                target[n] = true;
            }
        }
        let good = graph::can_reach(&self.adj, &target);
        let start: Vec<usize> = self.initial.clone();
        if start.is_empty() {
            return Ok(false);
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        seen.insert(start.clone());
        let mut stack = vec![start];
        while let Some(set) = stack.pop() {
            if !set.iter().any(|&n| good[n]) {
                return Ok(false);
            }
            let s = self.nodes[set[0]].s;
            for (t, _) in mc.succ(s) {
                let mut image: Vec<usize> = set
                    .iter()
                    .flat_map(|&n| self.adj[n].iter().copied())
                    .filter(|m| self.nodes[*m].s == *t)
                    .collect();
                if image.is_empty() {
                    return Ok(false);
                }
                image.sort_unstable();
                image.dedup();
                if !seen.contains(&image) {
                    if seen.len() >= cap {
                        return Err(Error::Resource {
                            what: "subset states".into(),
                            limit: cap,
                        });
                    }
                    seen.insert(image.clone());
                    stack.push(image);
                }
            }
        }
        Ok(true)
    }
}
