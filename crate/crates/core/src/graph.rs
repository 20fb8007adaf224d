//! Digraph utilities over adjacency lists.

use std::collections::VecDeque;

/// Strongly connected components, numbered in the order Tarjan's algorithm
/// closes them (successor components first).
#[derive(Clone, Debug)]
pub struct Sccs {
    pub comp: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// No edge leaves the component.
    pub bottom: Vec<bool>,
    /// Single node without a self-loop.
    pub trivial: Vec<bool>,
}

impl Sccs {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Iterative Tarjan over the nodes selected by `keep` (all when `None`).
/// Edges to unselected nodes are ignored for the decomposition but still
/// make a component non-bottom.
pub fn tarjan(adj: &[Vec<usize>], keep: Option<&[bool]>) -> Sccs {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let kept = |v: usize| keep.map_or(true, |k| k[v]);
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    let mut work: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN || !kept(root) {
            continue;
        }
        work.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                if !kept(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let id = members.len();
                let mut c = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = id;
                    c.push(w);
                    if w == v {
                        break;
                    }
                }
                c.sort_unstable();
                members.push(c);
            }
        }
    }

    let bottom = members
        .iter()
        .enumerate()
        .map(|(id, c)| c.iter().all(|&v| adj[v].iter().all(|&w| comp[w] == id)))
        .collect();
    let trivial = members
        .iter()
        .map(|c| c.len() == 1 && !adj[c[0]].contains(&c[0]))
        .collect();
    Sccs {
        comp,
        members,
        bottom,
        trivial,
    }
}

/// Nodes reachable from `starts`, restricted to `keep` when given.
pub fn reachable(adj: &[Vec<usize>], starts: &[usize], keep: Option<&[bool]>) -> Vec<bool> {
    let kept = |v: usize| keep.map_or(true, |k| k[v]);
    let mut seen = vec![false; adj.len()];
    let mut todo: Vec<usize> = starts.iter().copied().filter(|&s| kept(s)).collect();
    for &s in &todo {
        seen[s] = true;
    }
    while let Some(v) = todo.pop() {
        for &w in &adj[v] {
            if !seen[w] && kept(w) {
                seen[w] = true;
                todo.push(w);
            }
        }
    }
    seen
}

/// Nodes from which some node in `targets` is reachable.
pub fn can_reach(adj: &[Vec<usize>], targets: &[bool]) -> Vec<bool> {
    let rev = reverse(adj);
    let starts: Vec<usize> = (0..adj.len()).filter(|&v| targets[v]).collect();
    reachable(&rev, &starts, None)
}

pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            rev[w].push(v);
        }
    }
    rev
}

/// Breadth-first distances from `start`.
pub fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Whether the subgraph induced by `keep` contains a cycle.
pub fn has_cycle(adj: &[Vec<usize>], keep: &[bool]) -> bool {
    let sccs = tarjan(adj, Some(keep));
    (0..sccs.len()).any(|c| !sccs.trivial[c])
}

/// Longest path, counted in nodes, inside the acyclic subgraph induced by
/// `keep`, over paths starting anywhere in `starts`. `None` if the induced
/// subgraph has a cycle reachable from `starts`.
pub fn longest_path_nodes(adj: &[Vec<usize>], keep: &[bool], starts: &[usize]) -> Option<usize> {
    let reach = reachable(adj, starts, Some(keep));
    if has_cycle(adj, &reach) {
        return None;
    }
    // Tarjan closes successors first, so components come in reverse
    // topological order.
    let sccs = tarjan(adj, Some(&reach));
    let mut best = vec![0usize; adj.len()];
    for c in &sccs.members {
        let v = c[0];
        let tail = adj[v]
            .iter()
            .filter(|&&w| reach[w])
            .map(|&w| best[w])
            .max()
            .unwrap_or(0);
        best[v] = 1 + tail;
    }
    Some(
        starts
            .iter()
            .filter(|&&s| reach[s])
            .map(|&s| best[s])
            .max()
            .unwrap_or(0),
    )
}
